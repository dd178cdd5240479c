#include "seqforge/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seqforge/hash.hpp"

namespace seqforge::model {

namespace {

void fill_gaussian(Vec& v, Rng& rng, double stddev) {
    for (double& x : v) x = rng.gaussian(0.0, stddev);
}

// log softmax with max subtraction; returns log Z so callers get both
// probabilities and log-probs from one pass.
void log_softmax(const Vec& logits, Vec& logp) {
    const double m = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double l : logits) z += std::exp(l - m);
    const double log_z = m + std::log(z);
    logp.resize(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) logp[i] = logits[i] - log_z;
}

}  // namespace

ModelParams ModelParams::init_random(const Alphabet& a, int embed_dim, int hidden_dim, std::uint64_t seed) {
    ModelParams p;
    p.alphabet = a;
    p.embed_dim = embed_dim;
    p.hidden_dim = hidden_dim;
    p.embed = Mat(a.size() + 1, embed_dim);
    p.W1 = Mat(hidden_dim, kFeatureDim);
    p.W2 = Mat(hidden_dim, embed_dim);
    p.W3 = Mat(hidden_dim, embed_dim);
    p.b.assign(static_cast<std::size_t>(hidden_dim), 0.0);
    p.U = Mat(a.size(), hidden_dim);

    Rng rng(seed);
    fill_gaussian(p.embed.a, rng, 0.02);
    fill_gaussian(p.W1.a, rng, 0.02);
    fill_gaussian(p.W2.a, rng, 0.02);
    fill_gaussian(p.W3.a, rng, 0.02);
    fill_gaussian(p.b, rng, 0.02);
    fill_gaussian(p.U.a, rng, 0.02);
    return p;
}

std::uint64_t ModelParams::content_hash() const {
    std::uint64_t h = fnv1a64(alphabet.letters);
    h = fnv1a64(embed.a, h);
    h = fnv1a64(W1.a, h);
    h = fnv1a64(W2.a, h);
    h = fnv1a64(W3.a, h);
    h = fnv1a64(b, h);
    h = fnv1a64(U.a, h);
    const double g = gamma;
    h = fnv1a64(&g, sizeof g, h);
    if (lora) {
        h = fnv1a64(lora->A.a, h);
        h = fnv1a64(lora->B.a, h);
        const double af[2] = {static_cast<double>(lora->rank), lora->alpha};
        h = fnv1a64(af, sizeof af, h);
    }
    return h;
}

ParamBlocks ParamBlocks::zeros_like(const ModelParams& p) {
    ParamBlocks g;
    g.embed = Mat(p.embed.rows, p.embed.cols);
    g.W1 = Mat(p.W1.rows, p.W1.cols);
    g.W2 = Mat(p.W2.rows, p.W2.cols);
    g.W3 = Mat(p.W3.rows, p.W3.cols);
    g.b.assign(p.b.size(), 0.0);
    g.U = Mat(p.U.rows, p.U.cols);
    if (p.lora) {
        g.lora_A = Mat(p.lora->A.rows, p.lora->A.cols);
        g.lora_B = Mat(p.lora->B.rows, p.lora->B.cols);
    }
    return g;
}

void ParamBlocks::scale(double s) {
    for (double& x : embed.a) x *= s;
    for (double& x : W1.a) x *= s;
    for (double& x : W2.a) x *= s;
    for (double& x : W3.a) x *= s;
    for (double& x : b) x *= s;
    for (double& x : U.a) x *= s;
    for (double& x : lora_A.a) x *= s;
    for (double& x : lora_B.a) x *= s;
}

std::vector<Vec*> trainable_views(ModelParams& p) {
    if (p.lora) return {&p.lora->A.a, &p.lora->B.a};
    return {&p.embed.a, &p.W1.a, &p.W2.a, &p.W3.a, &p.b, &p.U.a};
}

std::vector<Vec*> trainable_views(ParamBlocks& g, bool lora_active) {
    if (lora_active) return {&g.lora_A.a, &g.lora_B.a};
    return {&g.embed.a, &g.W1.a, &g.W2.a, &g.W3.a, &g.b, &g.U.a};
}

void SampleConfig::validate() const {
    if (!(temperature > 0.0)) throw ConfigError("temperature must be > 0");
    if (!(top_p > 0.0) || top_p > 1.0) throw ConfigError("top_p must be in (0, 1]");
    if (count < 1) throw ConfigError("sample count must be >= 1");
}

namespace {

// Shared per-position forward pass. `c` is the EMA context entering
// position i; prev is the embedding row index of s_{i-1} (BOS at i = 0).
struct PositionActivations {
    Vec z;       // pre-tanh hidden
    Vec h;       // tanh(z)
    Vec logits;  // U * h
    Vec af;      // A * f_i when LoRA is active
};

void position_forward(const ModelParams& p, const double* f_row, int prev_idx, const Vec& c,
                      PositionActivations& act) {
    const int H = p.hidden_dim;
    act.z.assign(static_cast<std::size_t>(H), 0.0);
    matvec_acc(p.W1, f_row, act.z.data());
    if (p.lora) {
        const LoraAdapter& lr = *p.lora;
        act.af.assign(static_cast<std::size_t>(lr.rank), 0.0);
        matvec_acc(lr.A, f_row, act.af.data());
        const double scale = lr.alpha / lr.rank;
        for (int r = 0; r < H; ++r) {
            const double* br = lr.B.row(r);
            double s = 0.0;
            for (int k = 0; k < lr.rank; ++k) s += br[k] * act.af[static_cast<std::size_t>(k)];
            act.z[static_cast<std::size_t>(r)] += scale * s;
        }
    }
    matvec_acc(p.W2, p.embed.row(prev_idx), act.z.data());
    matvec_acc(p.W3, c.data(), act.z.data());
    for (int r = 0; r < H; ++r) act.z[static_cast<std::size_t>(r)] += p.b[static_cast<std::size_t>(r)];

    act.h.resize(static_cast<std::size_t>(H));
    for (int r = 0; r < H; ++r) act.h[static_cast<std::size_t>(r)] = std::tanh(act.z[static_cast<std::size_t>(r)]);

    act.logits.assign(static_cast<std::size_t>(p.alphabet.size()), 0.0);
    matvec_acc(p.U, act.h.data(), act.logits.data());
}

void advance_context(const ModelParams& p, Vec& c, int token_idx) {
    const double* e = p.embed.row(token_idx);
    for (int k = 0; k < p.embed_dim; ++k)
        c[static_cast<std::size_t>(k)] = p.gamma * c[static_cast<std::size_t>(k)] + (1.0 - p.gamma) * e[k];
}

}  // namespace

Vec logits(const ModelParams& p, const FeatureMatrix& feats, const Sequence& prefix, int i) {
    if (i < 0 || i >= feats.length) throw Error("logits: position out of range");
    if (prefix.length() < i) throw Error("logits: prefix shorter than position");
    Vec c(static_cast<std::size_t>(p.embed_dim), 0.0);
    for (int j = 0; j < i; ++j) advance_context(p, c, p.alphabet.index_of(prefix[j]));
    const int prev = i == 0 ? p.bos_row() : p.alphabet.index_of(prefix[i - 1]);
    PositionActivations act;
    position_forward(p, feats.row(i), prev, c, act);
    return act.logits;
}

SequenceLogProb sequence_log_prob(const ModelParams& p, const FeatureMatrix& feats, const Sequence& seq) {
    if (seq.length() != feats.length)
        throw CorrespondenceError("sequence_log_prob: sequence length " + std::to_string(seq.length()) +
                                  " != structure length " + std::to_string(feats.length));
    const int L = seq.length();
    SequenceLogProb out;
    out.per_residue.resize(static_cast<std::size_t>(L));
    Vec c(static_cast<std::size_t>(p.embed_dim), 0.0);
    PositionActivations act;
    Vec logp;
    for (int i = 0; i < L; ++i) {
        const int token = p.alphabet.index_of(seq[i]);
        const int prev = i == 0 ? p.bos_row() : p.alphabet.index_of(seq[i - 1]);
        position_forward(p, feats.row(i), prev, c, act);
        log_softmax(act.logits, logp);
        out.per_residue[static_cast<std::size_t>(i)] = logp[static_cast<std::size_t>(token)];
        out.total += logp[static_cast<std::size_t>(token)];
        advance_context(p, c, token);
    }
    return out;
}

SequenceLogProb sequence_log_prob(const ModelParams& p, const geom::Structure& structure, const Sequence& seq) {
    return sequence_log_prob(p, compute_features(structure), seq);
}

void accumulate_sequence_grad(const ModelParams& p, const FeatureMatrix& feats, const Sequence& seq,
                              double weight, ParamBlocks& grad) {
    if (seq.length() != feats.length) throw CorrespondenceError("accumulate_sequence_grad: length mismatch");
    const int L = seq.length();
    const int H = p.hidden_dim;
    const int A = p.alphabet.size();
    const bool lora = p.lora_active();

    // forward, caching per-position activations
    std::vector<PositionActivations> acts(static_cast<std::size_t>(L));
    std::vector<Vec> contexts(static_cast<std::size_t>(L));
    std::vector<int> tokens(static_cast<std::size_t>(L));
    std::vector<int> prevs(static_cast<std::size_t>(L));
    Vec c(static_cast<std::size_t>(p.embed_dim), 0.0);
    for (int i = 0; i < L; ++i) {
        tokens[static_cast<std::size_t>(i)] = p.alphabet.index_of(seq[i]);
        prevs[static_cast<std::size_t>(i)] = i == 0 ? p.bos_row() : tokens[static_cast<std::size_t>(i - 1)];
        contexts[static_cast<std::size_t>(i)] = c;
        position_forward(p, feats.row(i), prevs[static_cast<std::size_t>(i)], c, acts[static_cast<std::size_t>(i)]);
        advance_context(p, c, tokens[static_cast<std::size_t>(i)]);
    }

    // backward; acc carries the EMA-context gradient from positions > i
    Vec acc(static_cast<std::size_t>(p.embed_dim), 0.0);
    Vec dlogits(static_cast<std::size_t>(A));
    Vec dh(static_cast<std::size_t>(H));
    Vec dz(static_cast<std::size_t>(H));
    Vec dc(static_cast<std::size_t>(p.embed_dim));
    Vec probs(static_cast<std::size_t>(A));
    for (int i = L - 1; i >= 0; --i) {
        const PositionActivations& act = acts[static_cast<std::size_t>(i)];
        const double m = *std::max_element(act.logits.begin(), act.logits.end());
        double z = 0.0;
        for (int t = 0; t < A; ++t) {
            probs[static_cast<std::size_t>(t)] = std::exp(act.logits[static_cast<std::size_t>(t)] - m);
            z += probs[static_cast<std::size_t>(t)];
        }
        for (int t = 0; t < A; ++t) probs[static_cast<std::size_t>(t)] /= z;

        // d(log P(s_i))/dlogits = onehot - softmax
        for (int t = 0; t < A; ++t) dlogits[static_cast<std::size_t>(t)] = -weight * probs[static_cast<std::size_t>(t)];
        dlogits[static_cast<std::size_t>(tokens[static_cast<std::size_t>(i)])] += weight;

        outer_acc(grad.U, 1.0, dlogits.data(), act.h.data());
        dh.assign(static_cast<std::size_t>(H), 0.0);
        matvec_t_acc(p.U, dlogits.data(), dh.data());
        for (int r = 0; r < H; ++r) {
            const double hr = act.h[static_cast<std::size_t>(r)];
            dz[static_cast<std::size_t>(r)] = dh[static_cast<std::size_t>(r)] * (1.0 - hr * hr);
        }

        const double* f_row = feats.row(i);
        if (lora) {
            const LoraAdapter& lr = *p.lora;
            const double scale = lr.alpha / lr.rank;
            // dB += scale * dz (A f)^T ; dA += scale * (B^T dz) f^T
            outer_acc(grad.lora_B, scale, dz.data(), act.af.data());
            Vec btdz(static_cast<std::size_t>(lr.rank), 0.0);
            matvec_t_acc(lr.B, dz.data(), btdz.data());
            outer_acc(grad.lora_A, scale, btdz.data(), f_row);
        } else {
            outer_acc(grad.W1, 1.0, dz.data(), f_row);
            outer_acc(grad.W2, 1.0, dz.data(), p.embed.row(prevs[static_cast<std::size_t>(i)]));
            outer_acc(grad.W3, 1.0, dz.data(), contexts[static_cast<std::size_t>(i)].data());
            for (int r = 0; r < H; ++r) grad.b[static_cast<std::size_t>(r)] += dz[static_cast<std::size_t>(r)];
            // embedding grad through the previous-token path
            double* ge = grad.embed.row(prevs[static_cast<std::size_t>(i)]);
            Vec tmp(static_cast<std::size_t>(p.embed_dim), 0.0);
            matvec_t_acc(p.W2, dz.data(), tmp.data());
            for (int k = 0; k < p.embed_dim; ++k) ge[k] += tmp[static_cast<std::size_t>(k)];
        }

        // context gradient: direct use at this position plus decayed flow
        // from later positions
        dc.assign(static_cast<std::size_t>(p.embed_dim), 0.0);
        matvec_t_acc(p.W3, dz.data(), dc.data());
        for (int k = 0; k < p.embed_dim; ++k)
            acc[static_cast<std::size_t>(k)] = dc[static_cast<std::size_t>(k)] + p.gamma * acc[static_cast<std::size_t>(k)];
        if (!lora && i >= 1) {
            double* ge = grad.embed.row(tokens[static_cast<std::size_t>(i - 1)]);
            for (int k = 0; k < p.embed_dim; ++k) ge[k] += (1.0 - p.gamma) * acc[static_cast<std::size_t>(k)];
        }
    }
}

std::pair<double, ParamBlocks> nll_loss_and_grad(
    const ModelParams& p, const std::vector<std::pair<const geom::Structure*, const Sequence*>>& batch) {
    if (batch.empty()) throw Error("nll_loss_and_grad: empty batch");
    ParamBlocks grad = ParamBlocks::zeros_like(p);
    double loss = 0.0;
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    for (const auto& [structure, seq] : batch) {
        const FeatureMatrix feats = compute_features(*structure);
        const SequenceLogProb slp = sequence_log_prob(p, feats, *seq);
        const double inv_len = 1.0 / static_cast<double>(seq->length());
        loss += -slp.total * inv_len * inv_b;
        accumulate_sequence_grad(p, feats, *seq, -inv_len * inv_b, grad);
    }
    return {loss, std::move(grad)};
}

std::vector<Sampled> sample(const ModelParams& p, const FeatureMatrix& feats, const SampleConfig& cfg) {
    cfg.validate();
    const int A = p.alphabet.size();
    const int L = feats.length;
    std::vector<Sampled> out;
    out.reserve(static_cast<std::size_t>(cfg.count));

    PositionActivations act;
    Vec logp, scaled, probs;
    std::vector<int> order(static_cast<std::size_t>(A));

    for (int n = 0; n < cfg.count; ++n) {
        Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(n)));
        Sampled s;
        s.seq.residues.reserve(static_cast<std::size_t>(L));
        Vec c(static_cast<std::size_t>(p.embed_dim), 0.0);
        int prev = p.bos_row();
        for (int i = 0; i < L; ++i) {
            position_forward(p, feats.row(i), prev, c, act);

            int token;
            if (cfg.temperature <= 1e-6) {
                token = static_cast<int>(std::max_element(act.logits.begin(), act.logits.end()) -
                                         act.logits.begin());
            } else {
                scaled.resize(static_cast<std::size_t>(A));
                for (int t = 0; t < A; ++t) scaled[static_cast<std::size_t>(t)] = act.logits[static_cast<std::size_t>(t)] / cfg.temperature;
                log_softmax(scaled, probs);
                for (double& v : probs) v = std::exp(v);

                // nucleus: smallest probability-sorted prefix with mass >= top_p
                std::iota(order.begin(), order.end(), 0);
                std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                    return probs[static_cast<std::size_t>(a)] > probs[static_cast<std::size_t>(b)];
                });
                int kept = A;
                double mass = 0.0;
                for (int k = 0; k < A; ++k) {
                    mass += probs[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
                    if (mass >= cfg.top_p - 1e-12) {
                        kept = k + 1;
                        break;
                    }
                }
                const double u = rng.uniform() * mass;
                double cum = 0.0;
                token = order[static_cast<std::size_t>(kept - 1)];
                for (int k = 0; k < kept; ++k) {
                    cum += probs[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
                    if (u < cum) {
                        token = order[static_cast<std::size_t>(k)];
                        break;
                    }
                }
            }

            // log-prob under the unmodified model distribution
            log_softmax(act.logits, logp);
            s.total_log_prob += logp[static_cast<std::size_t>(token)];
            s.seq.residues.push_back(p.alphabet.letters[static_cast<std::size_t>(token)]);
            advance_context(p, c, token);
            prev = token;
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Sampled> sample(const ModelParams& p, const geom::Structure& structure, const SampleConfig& cfg) {
    return sample(p, compute_features(structure), cfg);
}

ModelParams attach_lora(const ModelParams& p, int rank, double alpha, std::uint64_t seed) {
    const int max_rank = std::min(p.hidden_dim, kFeatureDim);
    if (rank < 1) throw RankError("lora rank must be >= 1");
    if (rank > max_rank)
        throw RankError("lora rank " + std::to_string(rank) + " exceeds min(H, F) = " + std::to_string(max_rank));
    ModelParams out = p;
    LoraAdapter lr;
    lr.rank = rank;
    lr.alpha = alpha;
    lr.A = Mat(rank, kFeatureDim);
    lr.B = Mat(p.hidden_dim, rank);
    Rng rng(seed);
    fill_gaussian(lr.A.a, rng, 0.01);
    // B stays zero so the adapted model equals the base at attach time
    out.lora = std::move(lr);
    return out;
}

}  // namespace seqforge::model
