#include "seqforge/pref_data.hpp"

#include <algorithm>
#include <iostream>
#include <set>

#include "seqforge/hash.hpp"

namespace seqforge::prefs {

std::vector<ScoredSample> score_samples(const geom::Structure& native, const std::vector<model::Sampled>& samples,
                                        const oracle::OracleConfig& cfg) {
    std::vector<ScoredSample> out;
    out.reserve(samples.size());
    for (std::size_t n = 0; n < samples.size(); ++n) {
        const model::Sampled& s = samples[n];
        if (s.seq.length() != native.length())
            throw CorrespondenceError("score_samples: sample length " + std::to_string(s.seq.length()) +
                                      " != native length " + std::to_string(native.length()));
        ScoredSample sc;
        sc.seq = s.seq;
        sc.predicted = oracle::fold(s.seq, cfg);
        sc.predicted.id = native.id;
        sc.tm = geom::tm_score(sc.predicted, native).value;
        sc.gen_log_prob = s.total_log_prob;
        sc.index = static_cast<int>(n);
        out.push_back(std::move(sc));
    }
    return out;
}

namespace {

// Descending TM, ties by original sample index.
std::vector<int> rank_order(const std::vector<ScoredSample>& scored) {
    std::vector<int> order(scored.size());
    for (std::size_t i = 0; i < scored.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (scored[static_cast<std::size_t>(a)].tm != scored[static_cast<std::size_t>(b)].tm)
            return scored[static_cast<std::size_t>(a)].tm > scored[static_cast<std::size_t>(b)].tm;
        return scored[static_cast<std::size_t>(a)].index < scored[static_cast<std::size_t>(b)].index;
    });
    return order;
}

}  // namespace

std::vector<PreferencePair> build_pairs(const std::vector<ScoredSample>& scored, const std::string& structure_id) {
    if (scored.size() < 2) throw Error("build_pairs: need at least 2 scored samples");
    std::vector<int> order = rank_order(scored);
    if (order.size() % 2 != 0) {
        std::cerr << "[seqforge] warning: odd sample count " << order.size() << " for structure " << structure_id
                  << "; dropping the worst-ranked sample\n";
        order.pop_back();
    }
    const std::size_t half = order.size() / 2;
    std::vector<PreferencePair> pairs;
    pairs.reserve(half);
    for (std::size_t j = 0; j < half; ++j) {
        const ScoredSample& w = scored[static_cast<std::size_t>(order[j])];
        const ScoredSample& l = scored[static_cast<std::size_t>(order[j + half])];
        PreferencePair pr;
        pr.structure_id = structure_id;
        pr.chosen = w.seq;
        pr.rejected = l.seq;
        pr.chosen_tm = w.tm;
        pr.rejected_tm = l.tm;
        pairs.push_back(std::move(pr));
    }
    return pairs;
}

std::vector<PreferencePair> build_pairs_thresholded(const std::vector<ScoredSample>& scored,
                                                    const Sequence& wild_type, double t_r,
                                                    const std::string& structure_id) {
    if (!(t_r > 0.0) || !(t_r < 1.0)) throw ConfigError("t_r must be in (0, 1)");
    std::vector<PreferencePair> pairs;
    for (const ScoredSample& s : scored) {
        if (s.tm >= t_r) continue;
        PreferencePair pr;
        pr.structure_id = structure_id;
        pr.chosen = wild_type;
        pr.rejected = s.seq;
        pr.chosen_tm = 1.0;  // fold(wild type) == native under the deterministic oracle
        pr.rejected_tm = s.tm;
        pairs.push_back(std::move(pr));
    }
    return pairs;
}

PairDataset build_round_dataset(const model::ModelParams& params,
                                const std::vector<const oracle::CorpusItem*>& split,
                                const model::SampleConfig& cfg, PairVariant variant,
                                const oracle::OracleConfig& oracle_cfg, std::uint64_t seed, int round,
                                double threshold_t_r) {
    PairDataset ds;
    ds.round = round;
    ds.seed = seed;
    ds.variant = variant;
    ds.threshold_t_r = threshold_t_r;
    ds.model_hash = hash_hex(params.content_hash());
    ds.oracle_hash = oracle_cfg.content_hash();

    for (const oracle::CorpusItem* item : split) {
        model::SampleConfig per = cfg;
        per.seed = derive_seed(seed, fnv1a64(item->native.id));
        try {
            const auto samples = model::sample(params, item->native, per);
            const auto scored = score_samples(item->native, samples, oracle_cfg);

            std::set<std::string> seen;
            for (const ScoredSample& s : scored) {
                ++ds.stats.total_samples;
                if (!seen.insert(s.seq.residues).second) ++ds.stats.duplicate_samples;
                if (s.seq == item->wild_type) ++ds.stats.wild_type_hits;
            }

            std::vector<PreferencePair> pairs =
                variant == PairVariant::Standard
                    ? build_pairs(scored, item->native.id)
                    : build_pairs_thresholded(scored, item->wild_type, threshold_t_r, item->native.id);
            for (PreferencePair& pr : pairs) ds.pairs.push_back(std::move(pr));
            ++ds.stats.structures;
        } catch (const Error& e) {
            std::cerr << "[seqforge] warning: skipping structure " << item->native.id << ": " << e.what() << "\n";
            ++ds.stats.failed_structures;
        }
    }
    return ds;
}

}  // namespace seqforge::prefs
