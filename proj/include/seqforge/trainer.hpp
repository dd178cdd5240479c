#pragma once

// DPO + SFT training: preference loss with a frozen reference model,
// AdamW updates, single-round driver, and the multi-round loop that
// reinitializes the reference from the current policy each round.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "seqforge/metrics.hpp"
#include "seqforge/pref_data.hpp"

namespace seqforge::train {

struct DpoConfig {
    double beta = 0.5;
    double lambda = 1.0;
    double learning_rate = 1e-5;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double weight_decay = 0.0;
    int batch_size = 128;
    int training_steps = 0;
    int rounds = 1;
    std::uint64_t seed = 0;
    bool sft_only = false;  // drop the DPO term, keep the lambda*SFT term

    void validate() const;
};

struct AdamState {
    model::ParamBlocks m;
    model::ParamBlocks v;
    std::int64_t step = 0;

    static AdamState zeros_like(const model::ModelParams& p);
};

struct TrainerState {
    model::ModelParams policy;
    model::ModelParams reference;  // frozen within a round
    AdamState opt;
    int round = 0;

    static TrainerState fresh(const model::ModelParams& p);
};

// sigma(r_w - r_l), overflow-safe.
double preference_probability(double r_w, double r_l);

// -log sigma(x), overflow-safe.
double softplus_neg(double x);

struct PairLossTerms {
    double loss = 0.0;    // -log sigma(margin)
    double margin = 0.0;  // beta * ((lp_w - lr_w) - (lp_l - lr_l)), pre-sigmoid
};

// DPO loss of one pair from already-computed sequence log-probs.
PairLossTerms dpo_pair_loss(double policy_lp_chosen, double policy_lp_rejected, double ref_lp_chosen,
                            double ref_lp_rejected, double beta);

struct Diagnostics {
    double loss = 0.0;
    double dpo_loss = 0.0;
    double sft_loss = 0.0;  // mean chosen-sequence NLL (token sum), before lambda
    double mean_margin = 0.0;
    double accuracy = 0.0;  // fraction of pairs with positive margin
};

// Batch items reference pairs plus the resolver mapping structure_id to
// the conditioning structure.
using StructureResolver = std::function<const geom::Structure&(const std::string&)>;

std::pair<Diagnostics, model::ParamBlocks> dpo_loss_and_grad(const TrainerState& state,
                                                             const std::vector<const prefs::PreferencePair*>& batch,
                                                             const StructureResolver& resolve, double beta);

// loss = lambda * mean(-log pi_theta(S_w|T)) + L_DPO (token-sum SFT term;
// with sft_only the DPO term is dropped).
std::pair<Diagnostics, model::ParamBlocks> combined_loss_and_grad(const TrainerState& state,
                                                                  const std::vector<const prefs::PreferencePair*>& batch,
                                                                  const StructureResolver& resolve,
                                                                  const DpoConfig& cfg);

// Decoupled-weight-decay Adam with bias correction; only trainable blocks
// move (LoRA-only when adapters are active).
void adamw_step(model::ModelParams& params, AdamState& opt, model::ParamBlocks& grad, const DpoConfig& cfg);

struct StepRecord {
    int step = 0;
    double loss = 0.0;
    double dpo_loss = 0.0;
    double sft_loss = 0.0;
    double margin = 0.0;
    double accuracy = 0.0;
};

using StepLogger = std::function<void(const StepRecord&)>;

// Runs cfg.training_steps minibatch steps over the dataset (seeded shuffle,
// epoch wraparound). The reference model is untouched.
void train_round(TrainerState& state, const prefs::PairDataset& data, const StructureResolver& resolve,
                 const DpoConfig& cfg, const StepLogger& log = nullptr);

struct RoundResult {
    int round = 0;
    model::ModelParams checkpoint;
    prefs::DatasetStats data_stats;
    int pair_count = 0;
    metrics::EvalReport eval;  // on the driving structures
};

struct IterateConfig {
    DpoConfig dpo;
    model::SampleConfig gen;
    oracle::OracleConfig oracle;
    metrics::EvalConfig eval;
    prefs::PairVariant variant = prefs::PairVariant::Standard;
    double threshold_t_r = 0.8;
};

using RoundSink = std::function<void(const RoundResult&)>;

// Multi-round refinement over `structures`: each round builds a fresh pair
// dataset from the current policy, reinitializes the reference to the
// policy, trains, and evaluates. Round 0 in the result list is the
// untrained baseline evaluation. Optimizer moments are reset each round.
std::vector<RoundResult> iterate(const model::ModelParams& initial,
                                 const std::vector<const oracle::CorpusItem*>& structures,
                                 const IterateConfig& cfg, int rounds, const RoundSink& sink = nullptr);

}  // namespace seqforge::train
