#include "seqforge/pipeline.hpp"

#include <iostream>

namespace seqforge::pipeline {

PretrainResult pretrain_model(const oracle::Corpus& corpus, const cli::PretrainConfig& cfg) {
    const auto train_items = corpus.split_items(oracle::Split::Train);
    if (train_items.empty()) throw Error("pretrain: empty train split");

    PretrainResult out;
    out.params = model::ModelParams::init_random(corpus.oracle_cfg.contact_energy.alphabet, cfg.embed_dim,
                                                 cfg.hidden_dim, derive_seed(cfg.seed, 0x696e6974ULL));
    if (cfg.steps == 0) return out;

    // adamw_step reads its hyperparameters from a DpoConfig
    train::DpoConfig opt_cfg;
    opt_cfg.learning_rate = cfg.learning_rate;
    opt_cfg.adam_beta1 = cfg.adam_beta1;
    opt_cfg.adam_beta2 = cfg.adam_beta2;
    opt_cfg.adam_eps = cfg.adam_eps;

    train::AdamState opt = train::AdamState::zeros_like(out.params);

    Rng rng(derive_seed(cfg.seed, 0x70726574ULL));
    std::vector<int> order(train_items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::size_t cursor = order.size();

    std::vector<std::pair<const geom::Structure*, const Sequence*>> batch;
    for (int step = 1; step <= cfg.steps; ++step) {
        batch.clear();
        while (batch.size() < static_cast<std::size_t>(cfg.batch_size)) {
            if (cursor == order.size()) {
                rng.shuffle(order);
                cursor = 0;
            }
            const oracle::CorpusItem* item = train_items[static_cast<std::size_t>(order[cursor])];
            batch.emplace_back(&item->native, &item->wild_type);
            ++cursor;
        }
        auto [loss, grad] = model::nll_loss_and_grad(out.params, batch);
        train::adamw_step(out.params, opt, grad, opt_cfg);
        out.loss_curve.push_back(train::StepRecord{step, loss, 0.0, loss, 0.0, 0.0});
    }
    return out;
}

double split_nll(const model::ModelParams& p, const std::vector<const oracle::CorpusItem*>& split) {
    if (split.empty()) throw Error("split_nll: empty split");
    double total = 0.0;
    for (const oracle::CorpusItem* item : split) {
        const model::SequenceLogProb slp = model::sequence_log_prob(p, item->native, item->wild_type);
        total += -slp.total / item->wild_type.length();
    }
    return total / static_cast<double>(split.size());
}

train::StructureResolver corpus_resolver(const oracle::Corpus& corpus) {
    return [&corpus](const std::string& id) -> const geom::Structure& {
        const oracle::CorpusItem* item = corpus.find(id);
        if (!item) throw Error("unknown structure id: " + id);
        return item->native;
    };
}

model::ModelParams dpo_round(const model::ModelParams& policy,
                             const std::vector<const oracle::CorpusItem*>& train_items,
                             const oracle::Corpus& corpus, const cli::RunConfig& cfg, int round,
                             prefs::PairDataset* dataset_out, std::vector<train::StepRecord>* log_out) {
    model::SampleConfig gen = cfg.gen;
    gen.seed = derive_seed(cfg.dpo.seed, static_cast<std::uint64_t>(round), 0x67ULL);
    prefs::PairDataset ds =
        prefs::build_round_dataset(policy, train_items, gen, cfg.pair_variant, cfg.oracle,
                                   derive_seed(cfg.dpo.seed, static_cast<std::uint64_t>(round)), round,
                                   cfg.pair_threshold);

    train::TrainerState state = train::TrainerState::fresh(policy);
    train::DpoConfig dc = cfg.dpo;
    dc.seed = derive_seed(cfg.dpo.seed, static_cast<std::uint64_t>(round), 0x74ULL);
    train::StepLogger logger = nullptr;
    if (log_out) {
        logger = [log_out](const train::StepRecord& r) { log_out->push_back(r); };
    }
    train::train_round(state, ds, corpus_resolver(corpus), dc, logger);

    if (dataset_out) *dataset_out = std::move(ds);
    return std::move(state.policy);
}

}  // namespace seqforge::pipeline
