#include "seqforge/run_config.hpp"

#include <json.hpp>

#include "seqforge/serialize.hpp"

using ordered_json = nlohmann::ordered_json;

namespace seqforge::cli {

RunConfig make_preset(const std::string& name) {
    RunConfig c;
    c.preset = name;
    if (name == "desk-default") {
        // sized to run the full loop in minutes on one core
        c.gen.temperature = 1.0;
        c.gen.top_p = 0.9;
        c.gen.count = 20;
        c.dpo.beta = 0.5;
        c.dpo.lambda = 1.0;
        c.dpo.learning_rate = 0.01;
        c.dpo.batch_size = 16;
        c.dpo.training_steps = 500;
        c.dpo.rounds = 1;
        c.lora_rank = 0;  // the small model trains all weights
        c.pretrain.steps = 1200;
        c.pretrain.batch_size = 16;
        c.pretrain.learning_rate = 0.02;
    } else if (name == "paper-single-round") {
        c.gen.temperature = 1.0;
        c.gen.top_p = 0.9;
        c.gen.count = 20;
        c.dpo.beta = 0.5;
        c.dpo.lambda = 1.0;
        c.dpo.learning_rate = 1e-5;
        c.dpo.batch_size = 128;
        c.dpo.training_steps = 4000;
        c.dpo.rounds = 1;
        c.lora_rank = 16;
        c.lora_alpha = 16.0;
    } else if (name == "paper-multi-round") {
        c.gen.temperature = 1.1;
        c.gen.top_p = 1.0;
        c.gen.count = 200;
        c.dpo.beta = 0.5;
        c.dpo.lambda = 1.0;
        c.dpo.learning_rate = 1e-5;
        c.dpo.batch_size = 128;
        c.dpo.training_steps = 200;
        c.dpo.rounds = 20;
        c.lora_rank = 16;
        c.lora_alpha = 16.0;
    } else {
        throw ConfigError("unknown preset '" + name + "' (expected desk-default, paper-single-round, "
                          "paper-multi-round)");
    }
    return c;
}

namespace {

ordered_json sample_cfg_to_json(const model::SampleConfig& s) {
    ordered_json j;
    j["temperature"] = s.temperature;
    j["top_p"] = s.top_p;
    j["count"] = s.count;
    j["seed"] = s.seed;
    return j;
}

void sample_cfg_merge(model::SampleConfig& s, const ordered_json& j) {
    s.temperature = j.value("temperature", s.temperature);
    s.top_p = j.value("top_p", s.top_p);
    s.count = j.value("count", s.count);
    s.seed = j.value("seed", s.seed);
}

ordered_json dpo_cfg_to_json(const train::DpoConfig& d) {
    ordered_json j;
    j["beta"] = d.beta;
    j["lambda"] = d.lambda;
    j["learning_rate"] = d.learning_rate;
    j["adam_beta1"] = d.adam_beta1;
    j["adam_beta2"] = d.adam_beta2;
    j["adam_eps"] = d.adam_eps;
    j["weight_decay"] = d.weight_decay;
    j["batch_size"] = d.batch_size;
    j["training_steps"] = d.training_steps;
    j["rounds"] = d.rounds;
    j["seed"] = d.seed;
    j["sft_only"] = d.sft_only;
    return j;
}

void dpo_cfg_merge(train::DpoConfig& d, const ordered_json& j) {
    d.beta = j.value("beta", d.beta);
    d.lambda = j.value("lambda", d.lambda);
    d.learning_rate = j.value("learning_rate", d.learning_rate);
    d.adam_beta1 = j.value("adam_beta1", d.adam_beta1);
    d.adam_beta2 = j.value("adam_beta2", d.adam_beta2);
    d.adam_eps = j.value("adam_eps", d.adam_eps);
    d.weight_decay = j.value("weight_decay", d.weight_decay);
    d.batch_size = j.value("batch_size", d.batch_size);
    d.training_steps = j.value("training_steps", d.training_steps);
    d.rounds = j.value("rounds", d.rounds);
    d.seed = j.value("seed", d.seed);
    d.sft_only = j.value("sft_only", d.sft_only);
}

ordered_json eval_cfg_to_json(const metrics::EvalConfig& e) {
    ordered_json j;
    j["samples_per_structure"] = e.samples_per_structure;
    j["temperature"] = e.temperature;
    j["top_p"] = e.top_p;
    j["tm_group_threshold"] = e.tm_group_threshold;
    j["short_length_cutoff"] = e.short_length_cutoff;
    j["seed"] = e.seed;
    return j;
}

void eval_cfg_merge(metrics::EvalConfig& e, const ordered_json& j) {
    e.samples_per_structure = j.value("samples_per_structure", e.samples_per_structure);
    e.temperature = j.value("temperature", e.temperature);
    e.top_p = j.value("top_p", e.top_p);
    e.tm_group_threshold = j.value("tm_group_threshold", e.tm_group_threshold);
    e.short_length_cutoff = j.value("short_length_cutoff", e.short_length_cutoff);
    e.seed = j.value("seed", e.seed);
}

ordered_json pretrain_cfg_to_json(const PretrainConfig& p) {
    ordered_json j;
    j["steps"] = p.steps;
    j["batch_size"] = p.batch_size;
    j["learning_rate"] = p.learning_rate;
    j["adam_beta1"] = p.adam_beta1;
    j["adam_beta2"] = p.adam_beta2;
    j["adam_eps"] = p.adam_eps;
    j["seed"] = p.seed;
    j["embed_dim"] = p.embed_dim;
    j["hidden_dim"] = p.hidden_dim;
    return j;
}

void pretrain_cfg_merge(PretrainConfig& p, const ordered_json& j) {
    p.steps = j.value("steps", p.steps);
    p.batch_size = j.value("batch_size", p.batch_size);
    p.learning_rate = j.value("learning_rate", p.learning_rate);
    p.adam_beta1 = j.value("adam_beta1", p.adam_beta1);
    p.adam_beta2 = j.value("adam_beta2", p.adam_beta2);
    p.adam_eps = j.value("adam_eps", p.adam_eps);
    p.seed = j.value("seed", p.seed);
    p.embed_dim = j.value("embed_dim", p.embed_dim);
    p.hidden_dim = j.value("hidden_dim", p.hidden_dim);
}

ordered_json run_config_to_json_obj(const RunConfig& c) {
    ordered_json j;
    j["preset"] = c.preset;
    j["oracle"] = io::detail::oracle_cfg_to_json(c.oracle);
    j["gen"] = sample_cfg_to_json(c.gen);
    j["dpo"] = dpo_cfg_to_json(c.dpo);
    j["eval"] = eval_cfg_to_json(c.eval);
    j["pretrain"] = pretrain_cfg_to_json(c.pretrain);
    j["lora_rank"] = c.lora_rank;
    j["lora_alpha"] = c.lora_alpha;
    j["pair_variant"] = c.pair_variant == prefs::PairVariant::Standard ? "standard" : "thresholded";
    j["pair_threshold"] = c.pair_threshold;
    j["hardset_k"] = c.hardset_k;
    j["hardset_threshold"] = c.hardset_threshold;
    return j;
}

RunConfig run_config_from_json_obj(const ordered_json& doc) {
    // A manifest may be passed directly; its "config" object is the config.
    const ordered_json& j = doc.contains("config") ? doc.at("config") : doc;
    RunConfig c = make_preset(j.value("preset", std::string("desk-default")));
    if (j.contains("oracle")) c.oracle = io::detail::oracle_cfg_from_json(j.at("oracle"));
    if (j.contains("gen")) sample_cfg_merge(c.gen, j.at("gen"));
    if (j.contains("dpo")) dpo_cfg_merge(c.dpo, j.at("dpo"));
    if (j.contains("eval")) eval_cfg_merge(c.eval, j.at("eval"));
    if (j.contains("pretrain")) pretrain_cfg_merge(c.pretrain, j.at("pretrain"));
    c.lora_rank = j.value("lora_rank", c.lora_rank);
    c.lora_alpha = j.value("lora_alpha", c.lora_alpha);
    if (j.contains("pair_variant"))
        c.pair_variant = j.at("pair_variant").get<std::string>() == "thresholded" ? prefs::PairVariant::Thresholded
                                                                                  : prefs::PairVariant::Standard;
    c.pair_threshold = j.value("pair_threshold", c.pair_threshold);
    c.hardset_k = j.value("hardset_k", c.hardset_k);
    c.hardset_threshold = j.value("hardset_threshold", c.hardset_threshold);
    return c;
}

}  // namespace

std::string run_config_to_json(const RunConfig& c) { return run_config_to_json_obj(c).dump(2) + "\n"; }

RunConfig run_config_from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) throw SchemaError("invalid JSON in run config");
    return run_config_from_json_obj(j);
}

void save_manifest(const RunManifest& m, const std::string& path) {
    ordered_json j;
    j["format"] = "seqforge-manifest";
    j["version"] = 1;
    j["tool_version"] = m.tool_version;
    j["command"] = m.command;
    j["seed"] = m.seed;
    j["config"] = run_config_to_json_obj(m.config);
    ordered_json args;
    for (const auto& [k, v] : m.args) args[k] = v;
    j["args"] = std::move(args);
    ordered_json in;
    for (const auto& [k, v] : m.input_hashes) in[k] = v;
    j["inputs"] = std::move(in);
    ordered_json out;
    for (const auto& [k, v] : m.output_hashes) out[k] = v;
    j["outputs"] = std::move(out);
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    io::write_text_file(path, j.dump(2) + "\n");
}

RunManifest load_manifest(const std::string& path) {
    ordered_json j = ordered_json::parse(io::read_text_file(path), nullptr, false);
    if (j.is_discarded()) throw SchemaError("invalid JSON in manifest " + path);
    if (j.value("format", "") != "seqforge-manifest") throw SchemaError(path + ": not a manifest");
    RunManifest m;
    m.tool_version = j.value("tool_version", "");
    m.command = j.value("command", "");
    m.seed = j.value("seed", std::uint64_t{0});
    m.config = run_config_from_json_obj(j);
    if (j.contains("args"))
        for (const auto& [k, v] : j.at("args").items()) m.args[k] = v.get<std::string>();
    if (j.contains("inputs"))
        for (const auto& [k, v] : j.at("inputs").items()) m.input_hashes[k] = v.get<std::string>();
    if (j.contains("outputs"))
        for (const auto& [k, v] : j.at("outputs").items()) m.output_hashes[k] = v.get<std::string>();
    m.started_at = j.value("started_at", "");
    m.finished_at = j.value("finished_at", "");
    return m;
}

}  // namespace seqforge::cli
