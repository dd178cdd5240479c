#include "seqforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>

#include "seqforge/hash.hpp"
#include "seqforge/rng.hpp"

namespace seqforge::metrics {

void EvalConfig::validate() const {
    if (samples_per_structure < 1) throw ConfigError("samples_per_structure must be >= 1");
    if (!(temperature > 0.0)) throw ConfigError("temperature must be > 0");
    if (!(top_p > 0.0) || top_p > 1.0) throw ConfigError("top_p must be in (0, 1]");
    if (short_length_cutoff < 1) throw ConfigError("short_length_cutoff must be >= 1");
}

const Aggregate& EvalReport::aggregate(const std::string& label) const {
    for (const Aggregate& a : aggregates)
        if (a.label == label) return a;
    throw Error("eval report has no aggregate '" + label + "'");
}

double perplexity(const model::ModelParams& p, const geom::Structure& structure, const Sequence& seq) {
    if (seq.length() != structure.length())
        throw CorrespondenceError("perplexity: length mismatch");
    const model::SequenceLogProb slp = model::sequence_log_prob(p, structure, seq);
    return std::exp(-slp.total / seq.length());
}

double recovery(const Sequence& designed, const Sequence& wild_type) {
    if (designed.length() != wild_type.length())
        throw CorrespondenceError("recovery: length mismatch");
    int matches = 0;
    for (int i = 0; i < designed.length(); ++i)
        if (designed[i] == wild_type[i]) ++matches;
    return static_cast<double>(matches) / designed.length();
}

std::vector<MatchLabel> alignment_report(const Sequence& designed, const Sequence& wild_type) {
    if (designed.length() != wild_type.length())
        throw CorrespondenceError("alignment_report: length mismatch");
    std::vector<MatchLabel> labels(static_cast<std::size_t>(designed.length()));
    for (int i = 0; i < designed.length(); ++i)
        labels[static_cast<std::size_t>(i)] = designed[i] == wild_type[i] ? MatchLabel::Match : MatchLabel::Mismatch;
    return labels;
}

namespace {

Aggregate aggregate_over(const std::string& label, const std::vector<StructureRecord>& records,
                         const std::function<bool(const StructureRecord&)>& pred) {
    Aggregate a;
    a.label = label;
    for (const StructureRecord& r : records) {
        if (!pred(r)) continue;
        ++a.count;
        a.mean_tm += r.mean_tm;
        a.mean_recovery += r.mean_recovery;
        a.mean_rmsd += r.mean_rmsd;
        a.mean_perplexity += r.perplexity;
    }
    if (a.count > 0) {
        a.mean_tm /= a.count;
        a.mean_recovery /= a.count;
        a.mean_rmsd /= a.count;
        a.mean_perplexity /= a.count;
    }
    return a;
}

}  // namespace

void rebuild_aggregates(EvalReport& report) {
    report.aggregates.clear();
    const auto& rs = report.per_structure;
    report.aggregates.push_back(aggregate_over("All", rs, [](const StructureRecord&) { return true; }));
    report.aggregates.push_back(aggregate_over("Short", rs, [](const StructureRecord& r) { return r.is_short; }));
    report.aggregates.push_back(
        aggregate_over("SingleChain", rs, [](const StructureRecord& r) { return r.single_chain; }));
    report.aggregates.push_back(
        aggregate_over("TMLow", rs, [](const StructureRecord& r) { return r.tm_low_group; }));
    report.aggregates.push_back(
        aggregate_over("TMHigh", rs, [](const StructureRecord& r) { return !r.tm_low_group; }));
}

EvalReport evaluate_model(const model::ModelParams& p, const std::vector<const oracle::CorpusItem*>& split,
                          const oracle::OracleConfig& oracle_cfg, const EvalConfig& cfg) {
    cfg.validate();
    if (split.empty()) throw Error("evaluate_model: empty split");
    EvalReport report;
    report.config = cfg;

    for (const oracle::CorpusItem* item : split) {
        try {
            StructureRecord rec;
            rec.id = item->native.id;
            rec.length = item->native.length();
            rec.single_chain = item->native.single_chain;
            rec.is_short = item->native.length() < cfg.short_length_cutoff;

            model::SampleConfig scfg;
            scfg.temperature = cfg.temperature;
            scfg.top_p = cfg.top_p;
            scfg.count = cfg.samples_per_structure;
            scfg.seed = derive_seed(cfg.seed, fnv1a64(item->native.id));

            const auto samples = model::sample(p, item->native, scfg);
            for (std::size_t n = 0; n < samples.size(); ++n) {
                geom::Structure predicted = oracle::fold(samples[n].seq, oracle_cfg);
                SampleScore ss;
                ss.sample_index = static_cast<int>(n);
                ss.tm = geom::tm_score(predicted, item->native).value;
                ss.recovery = recovery(samples[n].seq, item->wild_type);
                ss.rmsd = geom::rmsd(predicted, item->native);
                rec.mean_tm += ss.tm;
                rec.mean_recovery += ss.recovery;
                rec.mean_rmsd += ss.rmsd;
                rec.samples.push_back(ss);
            }
            const double inv = 1.0 / static_cast<double>(samples.size());
            rec.mean_tm *= inv;
            rec.mean_recovery *= inv;
            rec.mean_rmsd *= inv;
            rec.perplexity = perplexity(p, item->native, item->wild_type);
            rec.tm_low_group = rec.mean_tm < cfg.tm_group_threshold;
            report.per_structure.push_back(std::move(rec));
        } catch (const Error& e) {
            std::cerr << "[seqforge] warning: evaluation skipped structure " << item->native.id << ": " << e.what()
                      << "\n";
        }
    }
    rebuild_aggregates(report);
    return report;
}

std::vector<std::string> select_hard_set(const EvalReport& baseline, int k_per_group, double threshold) {
    if (k_per_group < 1) throw ConfigError("k_per_group must be >= 1");
    if (static_cast<int>(baseline.per_structure.size()) < 2 * k_per_group)
        throw Error("select_hard_set: report covers fewer than 2k structures");

    std::vector<const StructureRecord*> low, high;
    for (const StructureRecord& r : baseline.per_structure) {
        (r.mean_tm < threshold ? low : high).push_back(&r);
    }
    const auto by_tm_then_id = [](const StructureRecord* a, const StructureRecord* b) {
        if (a->mean_tm != b->mean_tm) return a->mean_tm < b->mean_tm;
        return a->id < b->id;
    };
    std::sort(low.begin(), low.end(), by_tm_then_id);
    std::sort(high.begin(), high.end(), by_tm_then_id);

    std::vector<std::string> ids;
    for (auto* group : {&low, &high}) {
        if (static_cast<int>(group->size()) < k_per_group) {
            std::cerr << "[seqforge] warning: hard-set group (" << (group == &low ? "low" : "high") << ") has only "
                      << group->size() << " structures, taking all\n";
        }
        const int take = std::min<int>(k_per_group, static_cast<int>(group->size()));
        for (int i = 0; i < take; ++i) ids.push_back((*group)[static_cast<std::size_t>(i)]->id);
    }
    return ids;
}

}  // namespace seqforge::metrics
