#pragma once

// Run configuration: presets, config-file overrides, and the manifest
// that makes every run re-executable bit-identically.

#include <cstdint>
#include <map>
#include <string>

#include "seqforge/metrics.hpp"
#include "seqforge/trainer.hpp"

namespace seqforge::cli {

struct PretrainConfig {
    int steps = 1200;
    int batch_size = 16;
    double learning_rate = 0.02;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t seed = 0;
    int embed_dim = 16;
    int hidden_dim = 32;
};

struct RunConfig {
    std::string preset = "desk-default";
    oracle::OracleConfig oracle;
    model::SampleConfig gen;  // generation settings for pair construction
    train::DpoConfig dpo;
    metrics::EvalConfig eval;
    PretrainConfig pretrain;

    // LoRA settings (rank 0 disables; the desk default trains all weights).
    int lora_rank = 0;
    double lora_alpha = 16.0;

    prefs::PairVariant pair_variant = prefs::PairVariant::Standard;
    double pair_threshold = 0.8;

    // hard-set / multi-round knobs
    int hardset_k = 5;
    double hardset_threshold = 0.5;
};

// desk-default, paper-single-round, paper-multi-round. Paper presets
// resolve to the published training configs; the desk preset is sized to
// run the whole pipeline in minutes.
RunConfig make_preset(const std::string& name);

// JSON round-trip; load applies the file's keys on top of its preset.
std::string run_config_to_json(const RunConfig& c);
RunConfig run_config_from_json(const std::string& text);

struct RunManifest {
    std::string tool_version;
    std::string command;
    std::uint64_t seed = 0;
    RunConfig config;
    std::map<std::string, std::string> args;           // resolved CLI arguments
    std::map<std::string, std::string> input_hashes;   // path -> content hash
    std::map<std::string, std::string> output_hashes;  // relative path -> content hash
    std::string started_at;
    std::string finished_at;
};

void save_manifest(const RunManifest& m, const std::string& path);
RunManifest load_manifest(const std::string& path);

}  // namespace seqforge::cli
