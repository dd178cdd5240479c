#include "seqforge/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>

namespace seqforge::train {

void DpoConfig::validate() const {
    if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
    if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (training_steps < 0) throw ConfigError("training_steps must be >= 0");
    if (rounds < 1) throw ConfigError("rounds must be >= 1");
}

AdamState AdamState::zeros_like(const model::ModelParams& p) {
    AdamState s;
    s.m = model::ParamBlocks::zeros_like(p);
    s.v = model::ParamBlocks::zeros_like(p);
    return s;
}

TrainerState TrainerState::fresh(const model::ModelParams& p) {
    TrainerState st;
    st.policy = p;
    st.reference = p;
    st.opt = AdamState::zeros_like(p);
    return st;
}

double preference_probability(double r_w, double r_l) {
    const double z = r_w - r_l;
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double softplus_neg(double x) {
    // -log sigma(x) = log(1 + exp(-x))
    if (x >= 0.0) return std::log1p(std::exp(-x));
    return -x + std::log1p(std::exp(x));
}

PairLossTerms dpo_pair_loss(double policy_lp_chosen, double policy_lp_rejected, double ref_lp_chosen,
                            double ref_lp_rejected, double beta) {
    PairLossTerms t;
    t.margin = beta * ((policy_lp_chosen - ref_lp_chosen) - (policy_lp_rejected - ref_lp_rejected));
    t.loss = softplus_neg(t.margin);
    return t;
}

namespace {

struct FeatureCache {
    const StructureResolver& resolve;
    std::map<std::string, model::FeatureMatrix> cache;

    const model::FeatureMatrix& get(const std::string& id) {
        auto it = cache.find(id);
        if (it == cache.end()) it = cache.emplace(id, model::compute_features(resolve(id))).first;
        return it->second;
    }
};

// Shared core: DPO term (unless sft_only) plus optional lambda-weighted
// SFT term on the chosen sequences.
std::pair<Diagnostics, model::ParamBlocks> loss_and_grad_impl(const TrainerState& state,
                                                              const std::vector<const prefs::PreferencePair*>& batch,
                                                              const StructureResolver& resolve, double beta,
                                                              double lambda, bool sft_only) {
    if (batch.empty()) throw Error("loss_and_grad: empty batch");
    Diagnostics diag;
    model::ParamBlocks grad = model::ParamBlocks::zeros_like(state.policy);
    FeatureCache feats{resolve, {}};
    const double inv_b = 1.0 / static_cast<double>(batch.size());

    for (const prefs::PreferencePair* pair : batch) {
        const model::FeatureMatrix& f = feats.get(pair->structure_id);
        const double lp_c = model::sequence_log_prob(state.policy, f, pair->chosen).total;

        if (!sft_only) {
            const double lp_r = model::sequence_log_prob(state.policy, f, pair->rejected).total;
            const double lr_c = model::sequence_log_prob(state.reference, f, pair->chosen).total;
            const double lr_r = model::sequence_log_prob(state.reference, f, pair->rejected).total;
            const PairLossTerms t = dpo_pair_loss(lp_c, lp_r, lr_c, lr_r, beta);
            diag.dpo_loss += t.loss * inv_b;
            diag.mean_margin += t.margin * inv_b;
            if (t.margin > 0.0) diag.accuracy += inv_b;
            // d(-log sigma(m))/dm = -sigma(-m)
            const double dm = -preference_probability(0.0, t.margin);
            model::accumulate_sequence_grad(state.policy, f, pair->chosen, dm * beta * inv_b, grad);
            model::accumulate_sequence_grad(state.policy, f, pair->rejected, -dm * beta * inv_b, grad);
        }

        if (lambda > 0.0) {
            diag.sft_loss += -lp_c * inv_b;
            model::accumulate_sequence_grad(state.policy, f, pair->chosen, -lambda * inv_b, grad);
        }
    }
    diag.loss = diag.dpo_loss + lambda * diag.sft_loss;
    return {diag, std::move(grad)};
}

}  // namespace

std::pair<Diagnostics, model::ParamBlocks> dpo_loss_and_grad(const TrainerState& state,
                                                             const std::vector<const prefs::PreferencePair*>& batch,
                                                             const StructureResolver& resolve, double beta) {
    return loss_and_grad_impl(state, batch, resolve, beta, 0.0, false);
}

std::pair<Diagnostics, model::ParamBlocks> combined_loss_and_grad(const TrainerState& state,
                                                                  const std::vector<const prefs::PreferencePair*>& batch,
                                                                  const StructureResolver& resolve,
                                                                  const DpoConfig& cfg) {
    return loss_and_grad_impl(state, batch, resolve, cfg.beta, cfg.lambda, cfg.sft_only);
}

void adamw_step(model::ModelParams& params, AdamState& opt, model::ParamBlocks& grad, const DpoConfig& cfg) {
    opt.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(opt.step));
    const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(opt.step));

    const bool lora = params.lora_active();
    auto pv = model::trainable_views(params);
    auto gv = model::trainable_views(grad, lora);
    auto mv = model::trainable_views(opt.m, lora);
    auto vv = model::trainable_views(opt.v, lora);

    for (std::size_t blk = 0; blk < pv.size(); ++blk) {
        Vec& p = *pv[blk];
        Vec& g = *gv[blk];
        Vec& m = *mv[blk];
        Vec& v = *vv[blk];
        if (m.size() != p.size()) throw Error("adamw_step: optimizer moments do not match parameters");
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * g[i];
            v[i] = cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p[i] -= cfg.learning_rate * (mhat / (std::sqrt(vhat) + cfg.adam_eps) + cfg.weight_decay * p[i]);
        }
    }
}

void train_round(TrainerState& state, const prefs::PairDataset& data, const StructureResolver& resolve,
                 const DpoConfig& cfg, const StepLogger& log) {
    cfg.validate();
    if (cfg.training_steps == 0) return;
    if (data.pairs.empty()) {
        std::cerr << "[seqforge] warning: empty pair dataset, skipping training round\n";
        return;
    }

    Rng rng(derive_seed(cfg.seed, 0x7261696eULL));
    std::vector<int> order(data.pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::size_t cursor = order.size();  // forces a shuffle on first use

    std::vector<const prefs::PreferencePair*> batch;
    for (int step = 1; step <= cfg.training_steps; ++step) {
        batch.clear();
        while (batch.size() < static_cast<std::size_t>(cfg.batch_size)) {
            if (cursor == order.size()) {
                rng.shuffle(order);
                cursor = 0;
            }
            batch.push_back(&data.pairs[static_cast<std::size_t>(order[cursor])]);
            ++cursor;
        }
        auto [diag, grad] = combined_loss_and_grad(state, batch, resolve, cfg);
        adamw_step(state.policy, state.opt, grad, cfg);
        if (log) log(StepRecord{step, diag.loss, diag.dpo_loss, diag.sft_loss, diag.mean_margin, diag.accuracy});
    }
}

std::vector<RoundResult> iterate(const model::ModelParams& initial,
                                 const std::vector<const oracle::CorpusItem*>& structures,
                                 const IterateConfig& cfg, int rounds, const RoundSink& sink) {
    if (rounds < 1) throw ConfigError("rounds must be >= 1");
    if (structures.empty()) throw Error("iterate: no structures");

    const StructureResolver resolve = [&structures](const std::string& id) -> const geom::Structure& {
        for (const oracle::CorpusItem* item : structures)
            if (item->native.id == id) return item->native;
        throw Error("iterate: unknown structure id " + id);
    };

    std::vector<RoundResult> results;
    // Evaluation reuses cfg.eval.seed every round: per-structure sampling
    // seeds derive from (seed, id), so trajectories are paired across
    // rounds and round 0 reproduces an external baseline report run with
    // the same seed.
    auto eval_at = [&](const model::ModelParams& p) {
        return metrics::evaluate_model(p, structures, cfg.oracle, cfg.eval);
    };

    model::ModelParams policy = initial;
    {
        RoundResult r0;
        r0.round = 0;
        r0.checkpoint = policy;
        r0.eval = eval_at(policy);
        if (sink) sink(r0);
        results.push_back(std::move(r0));
    }

    for (int t = 1; t <= rounds; ++t) {
        model::SampleConfig gen = cfg.gen;
        gen.seed = derive_seed(cfg.dpo.seed, static_cast<std::uint64_t>(t), 0x67ULL);
        prefs::PairDataset ds = prefs::build_round_dataset(policy, structures, gen, cfg.variant, cfg.oracle,
                                                           derive_seed(cfg.dpo.seed, static_cast<std::uint64_t>(t)),
                                                           t, cfg.threshold_t_r);

        TrainerState state = TrainerState::fresh(policy);  // reference := policy
        DpoConfig dc = cfg.dpo;
        dc.seed = derive_seed(cfg.dpo.seed, static_cast<std::uint64_t>(t), 0x74ULL);
        train_round(state, ds, resolve, dc);

        RoundResult r;
        r.round = t;
        r.checkpoint = state.policy;
        r.data_stats = ds.stats;
        r.pair_count = static_cast<int>(ds.pairs.size());
        r.eval = eval_at(state.policy);
        if (sink) sink(r);
        results.push_back(std::move(r));
        policy = std::move(state.policy);
    }
    return results;
}

}  // namespace seqforge::train
