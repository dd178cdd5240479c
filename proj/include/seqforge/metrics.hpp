#pragma once

// Evaluation protocol: perplexity, recovery rate, TM/RMSD aggregation over
// sampled designs, split labels, hard-set selection, and per-position
// alignment match reports.

#include <cstdint>
#include <string>
#include <vector>

#include "seqforge/fold_oracle.hpp"
#include "seqforge/model.hpp"

namespace seqforge::metrics {

struct EvalConfig {
    int samples_per_structure = 10;
    double temperature = 0.15;
    double top_p = 1.0;
    double tm_group_threshold = 0.5;
    int short_length_cutoff = 100;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SampleScore {
    int sample_index = 0;
    double tm = 0.0;
    double recovery = 0.0;
    double rmsd = 0.0;
};

struct StructureRecord {
    std::string id;
    int length = 0;
    bool single_chain = true;
    bool is_short = true;
    double mean_tm = 0.0;
    double mean_recovery = 0.0;
    double mean_rmsd = 0.0;
    double perplexity = 0.0;
    bool tm_low_group = false;  // mean_tm < tm_group_threshold
    std::vector<SampleScore> samples;
};

struct Aggregate {
    std::string label;
    int count = 0;
    double mean_tm = 0.0;
    double mean_recovery = 0.0;
    double mean_rmsd = 0.0;
    double mean_perplexity = 0.0;
};

struct EvalReport {
    EvalConfig config;
    std::vector<StructureRecord> per_structure;
    std::vector<Aggregate> aggregates;  // All, Short, SingleChain, TMLow, TMHigh

    const Aggregate& aggregate(const std::string& label) const;
};

// exp of the per-residue mean NLL of the ground-truth sequence.
double perplexity(const model::ModelParams& p, const geom::Structure& structure, const Sequence& seq);

// Fraction of positions with identical residues.
double recovery(const Sequence& designed, const Sequence& wild_type);

enum class MatchLabel { Match, Mismatch };

std::vector<MatchLabel> alignment_report(const Sequence& designed, const Sequence& wild_type);

// Samples cfg.samples_per_structure sequences per structure (temperature
// cfg.temperature, top_p), folds them, and aggregates TM/recovery/RMSD
// means plus wild-type perplexity. Per-structure seeds derive from
// (cfg.seed, id).
EvalReport evaluate_model(const model::ModelParams& p, const std::vector<const oracle::CorpusItem*>& split,
                          const oracle::OracleConfig& oracle_cfg, const EvalConfig& cfg);

// Recomputes aggregates from per-structure records (also used to verify
// reports on load).
void rebuild_aggregates(EvalReport& report);

// The k lowest-mean-TM ids from each side of the threshold partition
// (ties by id ascending). Groups smaller than k are taken whole with a
// warning on stderr.
std::vector<std::string> select_hard_set(const EvalReport& baseline, int k_per_group, double threshold);

}  // namespace seqforge::metrics
