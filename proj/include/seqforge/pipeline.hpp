#pragma once

// Pipeline pieces shared by the CLI commands and the test suites:
// NLL pretraining of the base model and corpus-backed helpers.

#include <utility>
#include <vector>

#include "seqforge/run_config.hpp"

namespace seqforge::pipeline {

struct PretrainResult {
    model::ModelParams params;
    std::vector<train::StepRecord> loss_curve;  // minibatch NLL per step
};

// Maximizes the conditional likelihood of wild-type sequences on the train
// split (per-residue mean NLL objective) with AdamW.
PretrainResult pretrain_model(const oracle::Corpus& corpus, const cli::PretrainConfig& cfg);

// Full-split per-residue mean NLL (deterministic, no sampling).
double split_nll(const model::ModelParams& p, const std::vector<const oracle::CorpusItem*>& split);

train::StructureResolver corpus_resolver(const oracle::Corpus& corpus);

// One preference-optimization round on `train_items` starting from
// `policy`: build pairs, reference := policy, train. Returns the tuned
// policy; the dataset used is written to *dataset_out when non-null.
model::ModelParams dpo_round(const model::ModelParams& policy,
                             const std::vector<const oracle::CorpusItem*>& train_items,
                             const oracle::Corpus& corpus, const cli::RunConfig& cfg, int round,
                             prefs::PairDataset* dataset_out = nullptr,
                             std::vector<train::StepRecord>* log_out = nullptr);

}  // namespace seqforge::pipeline
