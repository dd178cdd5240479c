#include "seqforge/commands.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "seqforge/hash.hpp"
#include "seqforge/pipeline.hpp"
#include "seqforge/serialize.hpp"

namespace fs = std::filesystem;

namespace seqforge::cli {

namespace {

std::string now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Exclusive, append-only output directory. Refuses non-empty targets and
// holds a lock file for the lifetime of the command.
class OutputDir {
public:
    explicit OutputDir(const std::string& path) : path_(path) {
        if (path.empty()) throw ConfigError("--out is required");
        if (fs::exists(path_)) {
            if (!fs::is_directory(path_)) throw IoError("output path is not a directory: " + path);
            if (!fs::is_empty(path_))
                throw IoError("output directory is not empty (runs are append-only): " + path);
        } else {
            fs::create_directories(path_);
        }
        lock_path_ = path_ / ".lock";
        lock_fd_ = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (lock_fd_ < 0) throw IoError("output directory is locked by another command: " + path);
    }

    ~OutputDir() {
        if (lock_fd_ >= 0) {
            ::close(lock_fd_);
            std::error_code ec;
            fs::remove(lock_path_, ec);
        }
    }

    OutputDir(const OutputDir&) = delete;
    OutputDir& operator=(const OutputDir&) = delete;

    const fs::path& path() const { return path_; }
    std::string sub(const std::string& rel) const { return (path_ / rel).string(); }

private:
    fs::path path_;
    fs::path lock_path_;
    int lock_fd_ = -1;
};

std::map<std::string, std::string> hash_outputs(const fs::path& dir) {
    std::map<std::string, std::string> hashes;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string rel = fs::relative(entry.path(), dir).string();
        if (rel == "manifest.json" || rel == ".lock") continue;
        hashes[rel] = file_hash_hex(entry.path().string());
    }
    return hashes;
}

struct CommonArgs {
    std::string config_path;
    std::string preset;
    std::string out;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--config", a.config_path, "JSON config (or a prior run manifest) overriding preset defaults");
    cmd->add_option("--preset", a.preset, "desk-default | paper-single-round | paper-multi-round");
    cmd->add_option("--out", a.out, "output directory (created; must be empty)")->required();
    cmd->add_option("--seed", a.seed, "base seed; section seeds are derived from it");
}

// Section seeds are derived from the base so one flag pins the whole run.
void apply_base_seed(RunConfig& c, std::uint64_t s) {
    c.oracle.seed = s;
    c.gen.seed = derive_seed(s, 0x67656eULL);
    c.dpo.seed = derive_seed(s, 0x64706fULL);
    c.eval.seed = derive_seed(s, 0x6576616cULL);
    c.pretrain.seed = derive_seed(s, 0x70726574ULL);
}

RunConfig resolve_config(const CommonArgs& a) {
    RunConfig c;
    if (!a.config_path.empty()) {
        std::string text = io::read_text_file(a.config_path);
        if (!a.preset.empty()) {
            // explicit --preset wins as the base the file overrides
            auto j = nlohmann::ordered_json::parse(text);
            if (j.contains("config")) j = j["config"];
            j["preset"] = a.preset;
            text = j.dump();
        }
        c = run_config_from_json(text);
    } else {
        c = make_preset(a.preset.empty() ? "desk-default" : a.preset);
    }
    if (a.seed) apply_base_seed(c, *a.seed);
    return c;
}

RunManifest begin_manifest(const std::string& command, const CommonArgs& a, const RunConfig& c) {
    RunManifest m;
    m.tool_version = kToolVersion;
    m.command = command;
    m.seed = a.seed.value_or(0);
    m.config = c;
    m.started_at = now_iso8601();
    return m;
}

void finish_manifest(RunManifest& m, const OutputDir& out) {
    m.finished_at = now_iso8601();
    m.output_hashes = hash_outputs(out.path());
    save_manifest(m, out.sub("manifest.json"));
}

model::ModelParams load_params(const std::string& path) { return io::load_checkpoint(path).params; }

metrics::EvalConfig eval_cfg_for(const RunConfig& c) { return c.eval; }

// --- corpus ------------------------------------------------------------------

int cmd_corpus(const CommonArgs& args, int count, int min_len, int max_len) {
    const RunConfig cfg = resolve_config(args);
    OutputDir out(args.out);
    RunManifest manifest = begin_manifest("corpus", args, cfg);
    manifest.args = {{"count", std::to_string(count)},
                     {"min_len", std::to_string(min_len)},
                     {"max_len", std::to_string(max_len)}};

    const oracle::Corpus corpus = oracle::generate_corpus(count, min_len, max_len, cfg.oracle, cfg.oracle.seed);
    io::save_corpus(corpus, out.path().string());

    int train_n = 0, test_n = 0;
    for (const auto& item : corpus.items) (item.split == oracle::Split::Train ? train_n : test_n)++;
    std::cout << "corpus: " << corpus.items.size() << " structures (" << train_n << " train / " << test_n
              << " test) -> " << out.path().string() << "\n";

    finish_manifest(manifest, out);
    return 0;
}

// --- pretrain ----------------------------------------------------------------

int cmd_pretrain(const CommonArgs& args, const std::string& corpus_dir, std::optional<int> steps) {
    RunConfig cfg = resolve_config(args);
    if (steps) cfg.pretrain.steps = *steps;
    OutputDir out(args.out);
    RunManifest manifest = begin_manifest("pretrain", args, cfg);
    manifest.args = {{"corpus", corpus_dir}};
    manifest.input_hashes["corpus/index.json"] = file_hash_hex((fs::path(corpus_dir) / "index.json").string());

    const oracle::Corpus corpus = io::load_corpus(corpus_dir);
    pipeline::PretrainResult result = pipeline::pretrain_model(corpus, cfg.pretrain);

    io::save_checkpoint(io::Checkpoint{result.params, std::nullopt}, out.sub("checkpoint.json"));
    io::write_text_file(out.sub("loss_curve.csv"), io::step_log_csv(result.loss_curve));

    const double train_nll = pipeline::split_nll(result.params, corpus.split_items(oracle::Split::Train));
    std::cout << "pretrain: " << cfg.pretrain.steps << " steps, train NLL " << train_nll << " (perplexity "
              << std::exp(train_nll) << ")\n";

    finish_manifest(manifest, out);
    return 0;
}

// --- eval ---------------------------------------------------------------------

int cmd_eval(const CommonArgs& args, const std::string& corpus_dir, const std::string& checkpoint,
             const std::string& split_name) {
    const RunConfig cfg = resolve_config(args);
    OutputDir out(args.out);
    RunManifest manifest = begin_manifest("eval", args, cfg);
    manifest.args = {{"corpus", corpus_dir}, {"checkpoint", checkpoint}, {"split", split_name}};
    manifest.input_hashes["corpus/index.json"] = file_hash_hex((fs::path(corpus_dir) / "index.json").string());
    manifest.input_hashes["checkpoint"] = file_hash_hex(checkpoint);

    const oracle::Corpus corpus = io::load_corpus(corpus_dir);
    const oracle::Split split = split_name == "train" ? oracle::Split::Train : oracle::Split::Test;
    const model::ModelParams params = load_params(checkpoint);

    const metrics::EvalReport report =
        metrics::evaluate_model(params, corpus.split_items(split), corpus.oracle_cfg, eval_cfg_for(cfg));
    io::save_eval_report(report, out.path().string());

    const metrics::Aggregate& all = report.aggregate("All");
    std::cout << "eval[" << split_name << "]: n=" << all.count << " TM " << all.mean_tm << " recovery "
              << all.mean_recovery << " rmsd " << all.mean_rmsd << " ppl " << all.mean_perplexity << "\n";

    finish_manifest(manifest, out);
    return 0;
}

// --- dpo ----------------------------------------------------------------------

int cmd_dpo(const CommonArgs& args, const std::string& corpus_dir, const std::string& checkpoint,
            std::optional<double> lambda, bool lambda_only, const std::string& variant,
            std::optional<int> steps, std::optional<int> gen_count, std::optional<int> rounds,
            std::optional<double> t_r) {
    RunConfig cfg = resolve_config(args);
    if (lambda) cfg.dpo.lambda = *lambda;
    cfg.dpo.sft_only = lambda_only;
    if (steps) cfg.dpo.training_steps = *steps;
    if (gen_count) cfg.gen.count = *gen_count;
    if (rounds) cfg.dpo.rounds = *rounds;
    if (t_r) cfg.pair_threshold = *t_r;
    if (variant == "thresholded") cfg.pair_variant = prefs::PairVariant::Thresholded;
    else if (variant == "standard") cfg.pair_variant = prefs::PairVariant::Standard;
    else throw ConfigError("unknown --variant '" + variant + "'");

    OutputDir out(args.out);
    RunManifest manifest = begin_manifest("dpo", args, cfg);
    manifest.args = {{"corpus", corpus_dir},
                     {"checkpoint", checkpoint},
                     {"variant", variant},
                     {"lambda_only", lambda_only ? "1" : "0"}};
    manifest.input_hashes["corpus/index.json"] = file_hash_hex((fs::path(corpus_dir) / "index.json").string());
    manifest.input_hashes["checkpoint"] = file_hash_hex(checkpoint);

    const oracle::Corpus corpus = io::load_corpus(corpus_dir);
    const auto train_items = corpus.split_items(oracle::Split::Train);
    const auto test_items = corpus.split_items(oracle::Split::Test);

    model::ModelParams policy = load_params(checkpoint);
    const metrics::EvalReport baseline =
        metrics::evaluate_model(policy, test_items, corpus.oracle_cfg, eval_cfg_for(cfg));
    io::save_eval_report(baseline, out.sub("eval_baseline"));

    if (cfg.lora_rank > 0)
        policy = model::attach_lora(policy, cfg.lora_rank, cfg.lora_alpha, derive_seed(cfg.dpo.seed, 0x6c6f7261ULL));

    for (int t = 1; t <= cfg.dpo.rounds; ++t) {
        prefs::PairDataset ds;
        std::vector<train::StepRecord> log;
        policy = pipeline::dpo_round(policy, train_items, corpus, cfg, t, &ds, &log);
        char name[64];
        std::snprintf(name, sizeof name, "pairs_round_%d", t);
        io::save_pair_dataset(ds, out.sub(name));
        std::snprintf(name, sizeof name, "training_log_round_%d.csv", t);
        io::write_text_file(out.sub(name), io::step_log_csv(log));
    }

    io::save_checkpoint(io::Checkpoint{policy, std::nullopt}, out.sub("checkpoint.json"));
    const metrics::EvalReport tuned =
        metrics::evaluate_model(policy, test_items, corpus.oracle_cfg, eval_cfg_for(cfg));
    io::save_eval_report(tuned, out.sub("eval_tuned"));

    std::cout << "dpo: TM " << baseline.aggregate("All").mean_tm << " -> " << tuned.aggregate("All").mean_tm
              << ", recovery " << baseline.aggregate("All").mean_recovery << " -> "
              << tuned.aggregate("All").mean_recovery << "\n";

    finish_manifest(manifest, out);
    return 0;
}

// --- sweep ----------------------------------------------------------------------

std::vector<int> parse_grid(const std::string& s) {
    std::vector<int> grid;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        grid.push_back(std::stoi(tok));
    }
    if (grid.empty()) throw ConfigError("empty grid");
    return grid;
}

int cmd_sweep(const CommonArgs& args, const std::string& corpus_dir, const std::string& checkpoint,
              const std::string& steps_grid_s, const std::string& n_grid_s, int fixed_n, int fixed_steps) {
    const RunConfig cfg = resolve_config(args);
    OutputDir out(args.out);
    RunManifest manifest = begin_manifest("sweep", args, cfg);
    manifest.args = {{"corpus", corpus_dir},   {"checkpoint", checkpoint},
                     {"steps_grid", steps_grid_s}, {"n_grid", n_grid_s},
                     {"fixed_n", std::to_string(fixed_n)}, {"fixed_steps", std::to_string(fixed_steps)}};
    manifest.input_hashes["corpus/index.json"] = file_hash_hex((fs::path(corpus_dir) / "index.json").string());
    manifest.input_hashes["checkpoint"] = file_hash_hex(checkpoint);

    const oracle::Corpus corpus = io::load_corpus(corpus_dir);
    const auto train_items = corpus.split_items(oracle::Split::Train);
    const auto test_items = corpus.split_items(oracle::Split::Test);
    const model::ModelParams base = load_params(checkpoint);

    const metrics::EvalReport baseline =
        metrics::evaluate_model(base, test_items, corpus.oracle_cfg, eval_cfg_for(cfg));

    auto run_point = [&](int gen_count, int steps) -> metrics::EvalReport {
        if (steps == 0 || gen_count == 0) return baseline;  // no training
        RunConfig point = cfg;
        point.gen.count = gen_count;
        point.dpo.training_steps = steps;
        model::ModelParams tuned = pipeline::dpo_round(base, train_items, corpus, point, 1);
        return metrics::evaluate_model(tuned, test_items, corpus.oracle_cfg, eval_cfg_for(cfg));
    };

    auto row = [](int axis, const metrics::EvalReport& r) {
        const metrics::Aggregate& all = r.aggregate("All");
        return std::to_string(axis) + "," + io::format_double(all.mean_recovery) + "," +
               io::format_double(all.mean_tm) + "," + io::format_double(all.mean_rmsd) + "\n";
    };

    std::string steps_csv = "steps,recovery,tm,rmsd\n";
    for (int v : parse_grid(steps_grid_s)) steps_csv += row(v, run_point(fixed_n, v));
    io::write_text_file(out.sub("steps_sweep.csv"), steps_csv);

    std::string n_csv = "n,recovery,tm,rmsd\n";
    for (int v : parse_grid(n_grid_s)) n_csv += row(v, run_point(v, fixed_steps));
    io::write_text_file(out.sub("n_sweep.csv"), n_csv);

    std::cout << "sweep: wrote steps_sweep.csv and n_sweep.csv\n";
    finish_manifest(manifest, out);
    return 0;
}

// --- hardset ----------------------------------------------------------------------

int cmd_hardset(const CommonArgs& args, const std::string& corpus_dir, const std::string& checkpoint,
                const std::string& baseline_dir, std::optional<int> rounds) {
    RunConfig cfg = resolve_config(args);
    if (rounds) cfg.dpo.rounds = *rounds;
    OutputDir out(args.out);
    RunManifest manifest = begin_manifest("hardset", args, cfg);
    manifest.args = {{"corpus", corpus_dir}, {"checkpoint", checkpoint}, {"baseline_eval", baseline_dir}};
    manifest.input_hashes["corpus/index.json"] = file_hash_hex((fs::path(corpus_dir) / "index.json").string());
    manifest.input_hashes["checkpoint"] = file_hash_hex(checkpoint);
    manifest.input_hashes["baseline_eval/summary.json"] =
        file_hash_hex((fs::path(baseline_dir) / "summary.json").string());

    const oracle::Corpus corpus = io::load_corpus(corpus_dir);
    const metrics::EvalReport baseline = io::load_eval_report(baseline_dir);
    const std::vector<std::string> ids =
        metrics::select_hard_set(baseline, cfg.hardset_k, cfg.hardset_threshold);

    std::vector<const oracle::CorpusItem*> items;
    for (const std::string& id : ids) {
        const oracle::CorpusItem* item = corpus.find(id);
        if (!item) throw Error("hard-set structure not in corpus: " + id);
        items.push_back(item);
    }

    model::ModelParams policy = load_params(checkpoint);
    if (cfg.lora_rank > 0)
        policy = model::attach_lora(policy, cfg.lora_rank, cfg.lora_alpha, derive_seed(cfg.dpo.seed, 0x6c6f7261ULL));

    train::IterateConfig icfg;
    icfg.dpo = cfg.dpo;
    icfg.gen = cfg.gen;
    icfg.oracle = corpus.oracle_cfg;
    icfg.eval = cfg.eval;
    icfg.variant = cfg.pair_variant;
    icfg.threshold_t_r = cfg.pair_threshold;

    std::string trajectory = "round,id,mean_tm,mean_recovery\n";
    std::string final_dist = "id,sample,tm\n";
    const train::RoundSink sink = [&](const train::RoundResult& r) {
        char name[64];
        std::snprintf(name, sizeof name, "checkpoint_round_%d.json", r.round);
        io::save_checkpoint(io::Checkpoint{r.checkpoint, std::nullopt}, out.sub(name));
        double sum_tm = 0.0, sum_rec = 0.0;
        for (const metrics::StructureRecord& rec : r.eval.per_structure) {
            trajectory += std::to_string(r.round) + "," + rec.id + "," + io::format_double(rec.mean_tm) + "," +
                          io::format_double(rec.mean_recovery) + "\n";
            sum_tm += rec.mean_tm;
            sum_rec += rec.mean_recovery;
        }
        const double n = static_cast<double>(r.eval.per_structure.size());
        trajectory += std::to_string(r.round) + ",ALL," + io::format_double(sum_tm / n) + "," +
                      io::format_double(sum_rec / n) + "\n";
    };

    const auto results = train::iterate(policy, items, icfg, cfg.dpo.rounds, sink);

    for (const metrics::StructureRecord& rec : results.back().eval.per_structure) {
        for (const metrics::SampleScore& s : rec.samples) {
            final_dist += rec.id + "," + std::to_string(s.sample_index) + "," + io::format_double(s.tm) + "\n";
        }
    }
    io::write_text_file(out.sub("trajectory.csv"), trajectory);
    io::write_text_file(out.sub("final_tm_distribution.csv"), final_dist);

    const double tm0 = results.front().eval.aggregate("All").mean_tm;
    const double tmf = results.back().eval.aggregate("All").mean_tm;
    std::cout << "hardset: " << ids.size() << " structures, mean TM " << tm0 << " -> " << tmf << " over "
              << cfg.dpo.rounds << " rounds\n";

    finish_manifest(manifest, out);
    return 0;
}

// --- report ----------------------------------------------------------------------

int cmd_report(const CommonArgs& args, const std::vector<std::string>& inputs) {
    const RunConfig cfg = resolve_config(args);
    OutputDir out(args.out);
    RunManifest manifest = begin_manifest("report", args, cfg);

    std::vector<std::pair<std::string, metrics::EvalReport>> reports;
    for (const std::string& spec_arg : inputs) {
        const auto eq = spec_arg.find('=');
        if (eq == std::string::npos) throw ConfigError("--in expects label=eval_dir, got '" + spec_arg + "'");
        const std::string label = spec_arg.substr(0, eq);
        const std::string dir = spec_arg.substr(eq + 1);
        reports.emplace_back(label, io::load_eval_report(dir));
        manifest.input_hashes[label + "/summary.json"] = file_hash_hex((fs::path(dir) / "summary.json").string());
        manifest.args["in:" + label] = dir;
    }
    if (reports.empty()) throw ConfigError("report: at least one --in label=dir is required");

    static const char* kAggs[] = {"All", "Short", "SingleChain", "TMLow", "TMHigh"};
    std::string csv = "model,aggregate,count,mean_tm,mean_recovery,mean_rmsd,mean_perplexity,delta_tm\n";
    for (const auto& [label, report] : reports) {
        for (const char* agg : kAggs) {
            const metrics::Aggregate& a = report.aggregate(agg);
            const metrics::Aggregate& base = reports.front().second.aggregate(agg);
            csv += label + std::string(",") + agg + "," + std::to_string(a.count) + "," +
                   io::format_double(a.mean_tm) + "," + io::format_double(a.mean_recovery) + "," +
                   io::format_double(a.mean_rmsd) + "," + io::format_double(a.mean_perplexity) + "," +
                   io::format_double(a.mean_tm - base.mean_tm) + "\n";
        }
    }
    io::write_text_file(out.sub("comparison.csv"), csv);

    // human-readable TM table: rows = models, columns = splits
    std::ostringstream table;
    table << "TM-score by split\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-16s %8s %8s %8s %8s %8s\n", "model", "Short", "SingleCh", "All", "TM<thr",
                  "TM>thr");
    table << line;
    for (const auto& [label, report] : reports) {
        std::snprintf(line, sizeof line, "%-16s %8.4f %8.4f %8.4f %8.4f %8.4f\n", label.c_str(),
                      report.aggregate("Short").mean_tm, report.aggregate("SingleChain").mean_tm,
                      report.aggregate("All").mean_tm, report.aggregate("TMLow").mean_tm,
                      report.aggregate("TMHigh").mean_tm);
        table << line;
    }
    io::write_text_file(out.sub("table.txt"), table.str());
    std::cout << table.str();

    finish_manifest(manifest, out);
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"structure-conditioned sequence design with folding-oracle preference feedback"};
    app.require_subcommand(1);

    // corpus
    auto* corpus_cmd = app.add_subcommand("corpus", "generate a synthetic structure-sequence corpus");
    CommonArgs corpus_args;
    int count = 200, min_len = 8, max_len = 16;
    add_common(corpus_cmd, corpus_args);
    corpus_cmd->add_option("--count", count, "number of structures")->check(CLI::PositiveNumber);
    corpus_cmd->add_option("--min-len", min_len, "minimum sequence length");
    corpus_cmd->add_option("--max-len", max_len, "maximum sequence length");

    // pretrain
    auto* pretrain_cmd = app.add_subcommand("pretrain", "train the base model by conditional NLL");
    CommonArgs pretrain_args;
    std::string pre_corpus;
    std::optional<int> pre_steps;
    add_common(pretrain_cmd, pretrain_args);
    pretrain_cmd->add_option("--corpus", pre_corpus, "corpus directory")->required();
    pretrain_cmd->add_option("--steps", pre_steps, "override pretraining steps");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a corpus split");
    CommonArgs eval_args;
    std::string eval_corpus, eval_checkpoint, eval_split = "test";
    add_common(eval_cmd, eval_args);
    eval_cmd->add_option("--corpus", eval_corpus, "corpus directory")->required();
    eval_cmd->add_option("--checkpoint", eval_checkpoint, "model checkpoint")->required();
    eval_cmd->add_option("--split", eval_split, "train | test")->check(CLI::IsMember({"train", "test"}));

    // dpo
    auto* dpo_cmd = app.add_subcommand("dpo", "preference-optimize a pretrained checkpoint");
    CommonArgs dpo_args;
    std::string dpo_corpus, dpo_checkpoint, dpo_variant = "standard";
    std::optional<double> dpo_lambda, dpo_tr;
    std::optional<int> dpo_steps, dpo_n, dpo_rounds;
    bool dpo_lambda_only = false;
    add_common(dpo_cmd, dpo_args);
    dpo_cmd->add_option("--corpus", dpo_corpus, "corpus directory")->required();
    dpo_cmd->add_option("--checkpoint", dpo_checkpoint, "pretrained checkpoint")->required();
    dpo_cmd->add_option("--lambda", dpo_lambda, "SFT regularization weight");
    dpo_cmd->add_flag("--lambda-only", dpo_lambda_only, "SFT ablation: drop the DPO term");
    dpo_cmd->add_option("--variant", dpo_variant, "standard | thresholded")
        ->check(CLI::IsMember({"standard", "thresholded"}));
    dpo_cmd->add_option("--t-r", dpo_tr, "threshold for the thresholded variant");
    dpo_cmd->add_option("--steps", dpo_steps, "training steps per round");
    dpo_cmd->add_option("--n", dpo_n, "generated sequences per structure");
    dpo_cmd->add_option("--rounds", dpo_rounds, "number of rounds");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "scaling sweeps over training steps and sample count");
    CommonArgs sweep_args;
    std::string sweep_corpus, sweep_checkpoint;
    std::string steps_grid = "0,100,250,500", n_grid = "0,8,20,40";
    int fixed_n = 20, fixed_steps = 500;
    add_common(sweep_cmd, sweep_args);
    sweep_cmd->add_option("--corpus", sweep_corpus, "corpus directory")->required();
    sweep_cmd->add_option("--checkpoint", sweep_checkpoint, "pretrained checkpoint")->required();
    sweep_cmd->add_option("--steps-grid", steps_grid, "comma-separated training-step grid");
    sweep_cmd->add_option("--n-grid", n_grid, "comma-separated sample-count grid");
    sweep_cmd->add_option("--fixed-n", fixed_n, "sample count for the steps sweep");
    sweep_cmd->add_option("--fixed-steps", fixed_steps, "training steps for the N sweep");

    // hardset
    auto* hard_cmd = app.add_subcommand("hardset", "multi-round refinement on the hardest structures");
    CommonArgs hard_args;
    std::string hard_corpus, hard_checkpoint, hard_baseline;
    std::optional<int> hard_rounds;
    add_common(hard_cmd, hard_args);
    hard_cmd->add_option("--corpus", hard_corpus, "corpus directory")->required();
    hard_cmd->add_option("--checkpoint", hard_checkpoint, "pretrained checkpoint")->required();
    hard_cmd->add_option("--baseline-eval", hard_baseline, "baseline eval report directory")->required();
    hard_cmd->add_option("--rounds", hard_rounds, "number of refinement rounds");

    // report
    auto* report_cmd = app.add_subcommand("report", "merge eval reports into comparison tables");
    CommonArgs report_args;
    std::vector<std::string> report_inputs;
    add_common(report_cmd, report_args);
    report_cmd->add_option("--in", report_inputs, "label=eval_dir (repeatable)")->required();

    try {
        app.parse(argc, argv);
        if (corpus_cmd->parsed()) {
            if (min_len > max_len || min_len < 4) throw ConfigError("invalid length range (need 4 <= min <= max)");
            return cmd_corpus(corpus_args, count, min_len, max_len);
        }
        if (pretrain_cmd->parsed()) return cmd_pretrain(pretrain_args, pre_corpus, pre_steps);
        if (eval_cmd->parsed()) return cmd_eval(eval_args, eval_corpus, eval_checkpoint, eval_split);
        if (dpo_cmd->parsed())
            return cmd_dpo(dpo_args, dpo_corpus, dpo_checkpoint, dpo_lambda, dpo_lambda_only, dpo_variant,
                           dpo_steps, dpo_n, dpo_rounds, dpo_tr);
        if (sweep_cmd->parsed())
            return cmd_sweep(sweep_args, sweep_corpus, sweep_checkpoint, steps_grid, n_grid, fixed_n, fixed_steps);
        if (hard_cmd->parsed()) return cmd_hardset(hard_args, hard_corpus, hard_checkpoint, hard_baseline, hard_rounds);
        if (report_cmd->parsed()) return cmd_report(report_args, report_inputs);
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 4;
    }
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("seqforge");
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace seqforge::cli
