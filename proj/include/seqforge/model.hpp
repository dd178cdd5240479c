#pragma once

// Structure-conditioned autoregressive sequence model with exact analytic
// gradients. Per position i:
//
//   z_i = W1_eff * f_i + W2 * embed[s_{i-1}] + W3 * c_i + b
//   logits_i = U * tanh(z_i)
//   c_{i+1} = gamma * c_i + (1 - gamma) * embed[s_i],   c_0 = 0
//
// where f_i are backbone features, s_{-1} is a dedicated begin-of-sequence
// embedding row, and W1_eff adds the scaled low-rank delta when a LoRA
// adapter is attached (base weights frozen in that case).

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "seqforge/features.hpp"
#include "seqforge/linalg.hpp"
#include "seqforge/rng.hpp"
#include "seqforge/sequence.hpp"

namespace seqforge::model {

struct LoraAdapter {
    int rank = 0;
    double alpha = 0.0;
    Mat A;  // rank x F
    Mat B;  // H x rank
};

struct ModelParams {
    Alphabet alphabet;
    int embed_dim = 16;   // E
    int hidden_dim = 32;  // H

    Mat embed;  // (|A|+1) x E; last row is the begin-of-sequence token
    Mat W1;     // H x F
    Mat W2;     // H x E
    Mat W3;     // H x E
    Vec b;      // H
    Mat U;      // |A| x H
    double gamma = 0.9;  // EMA context decay, fixed (not trained)

    std::optional<LoraAdapter> lora;

    int bos_row() const { return alphabet.size(); }
    bool lora_active() const { return lora.has_value(); }

    static ModelParams init_random(const Alphabet& a, int embed_dim, int hidden_dim, std::uint64_t seed);

    std::uint64_t content_hash() const;
};

// Gradient (or Adam moment) storage shaped like the trainable blocks.
struct ParamBlocks {
    Mat embed, W1, W2, W3;
    Vec b;
    Mat U;
    Mat lora_A, lora_B;

    static ParamBlocks zeros_like(const ModelParams& p);
    void scale(double s);
};

// Trainable blocks in a fixed order. With a LoRA adapter attached only
// (A, B) are trainable; otherwise all base blocks are. The two overloads
// return aligned lists so params, gradients and optimizer moments can be
// walked together.
std::vector<Vec*> trainable_views(ModelParams& p);
std::vector<Vec*> trainable_views(ParamBlocks& g, bool lora_active);

struct SampleConfig {
    double temperature = 1.0;
    double top_p = 1.0;
    int count = 1;  // N
    std::uint64_t seed = 0;

    void validate() const;
};

// Pre-softmax scores for position i given prefix s_{<i}.
Vec logits(const ModelParams& p, const FeatureMatrix& feats, const Sequence& prefix, int i);

struct SequenceLogProb {
    double total = 0.0;
    Vec per_residue;
};

SequenceLogProb sequence_log_prob(const ModelParams& p, const geom::Structure& structure, const Sequence& seq);
SequenceLogProb sequence_log_prob(const ModelParams& p, const FeatureMatrix& feats, const Sequence& seq);

// Adds weight * d(sum_i log P(s_i))/dtheta into grad. Exact backprop,
// including the EMA context recurrence and the LoRA factorization.
void accumulate_sequence_grad(const ModelParams& p, const FeatureMatrix& feats, const Sequence& seq,
                              double weight, ParamBlocks& grad);

// Mean over the batch of per-residue NLL: (1/B) sum_b (1/L_b) sum_i -log P.
std::pair<double, ParamBlocks> nll_loss_and_grad(const ModelParams& p,
                                                 const std::vector<std::pair<const geom::Structure*, const Sequence*>>& batch);

struct Sampled {
    Sequence seq;
    double total_log_prob = 0.0;  // under the unmodified model distribution
};

// Ancestral sampling with temperature and nucleus filtering. Sample n uses
// the stream derived from (cfg.seed, n), so results are independent of
// evaluation order. temperature <= 1e-6 switches to greedy argmax.
std::vector<Sampled> sample(const ModelParams& p, const geom::Structure& structure, const SampleConfig& cfg);
std::vector<Sampled> sample(const ModelParams& p, const FeatureMatrix& feats, const SampleConfig& cfg);

// Returns a copy with adapter (A ~ N(0, 0.01), B = 0) targeting W1; the
// initial delta is zero so the distribution is unchanged at attach time.
ModelParams attach_lora(const ModelParams& p, int rank, double alpha, std::uint64_t seed);

}  // namespace seqforge::model
