#pragma once

// Preference-pair dataset construction: fold and score sampled sequences,
// then pair rank j with rank j + N/2 (standard) or pair every sample below
// a threshold against the wild type (thresholded).

#include <cstdint>
#include <string>
#include <vector>

#include "seqforge/fold_oracle.hpp"
#include "seqforge/model.hpp"

namespace seqforge::prefs {

struct ScoredSample {
    Sequence seq;
    geom::Structure predicted;
    double tm = 0.0;
    double gen_log_prob = 0.0;
    int index = 0;  // position in the original sample list
};

struct PreferencePair {
    std::string structure_id;
    Sequence chosen;
    Sequence rejected;
    double chosen_tm = 0.0;
    double rejected_tm = 0.0;
};

enum class PairVariant { Standard, Thresholded };

// Folds each sample and scores it against the native. Order preserved.
std::vector<ScoredSample> score_samples(const geom::Structure& native, const std::vector<model::Sampled>& samples,
                                        const oracle::OracleConfig& cfg);

// Sort descending by TM (ties by original index), pair rank j with rank
// j + N/2. Odd N drops the single worst-ranked sample with a warning.
std::vector<PreferencePair> build_pairs(const std::vector<ScoredSample>& scored, const std::string& structure_id);

// Appendix-style curation: every sample with tm < t_r becomes a rejected
// sample paired against the wild type (chosen_tm = 1 under the
// deterministic oracle). May be empty.
std::vector<PreferencePair> build_pairs_thresholded(const std::vector<ScoredSample>& scored,
                                                    const Sequence& wild_type, double t_r,
                                                    const std::string& structure_id);

struct DatasetStats {
    int structures = 0;
    int failed_structures = 0;
    int total_samples = 0;
    int duplicate_samples = 0;  // samples identical to an earlier sample of the same structure
    int wild_type_hits = 0;     // samples identical to the wild type
};

struct PairDataset {
    std::vector<PreferencePair> pairs;
    int round = 0;
    std::uint64_t seed = 0;
    PairVariant variant = PairVariant::Standard;
    double threshold_t_r = 0.8;
    std::string model_hash;
    std::string oracle_hash;
    DatasetStats stats;
};

// Samples cfg.count sequences per native (per-structure seed derived from
// (seed, id)), scores, pairs per variant, and aggregates with provenance.
PairDataset build_round_dataset(const model::ModelParams& params,
                                const std::vector<const oracle::CorpusItem*>& split,
                                const model::SampleConfig& cfg, PairVariant variant,
                                const oracle::OracleConfig& oracle_cfg, std::uint64_t seed, int round,
                                double threshold_t_r = 0.8);

}  // namespace seqforge::prefs
