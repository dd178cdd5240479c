#include "seqforge/serialize.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace seqforge::io {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& content) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

ordered_json parse(const std::string& text, const std::string& what) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) throw SchemaError("invalid JSON in " + what);
    return j;
}

void expect_format(const ordered_json& j, const std::string& format, int version, const std::string& what) {
    if (!j.is_object() || j.value("format", "") != format)
        throw SchemaError(what + ": expected format '" + format + "'");
    if (j.value("version", -1) != version)
        throw SchemaError(what + ": unsupported version");
}

ordered_json vec_to_json(const Vec& v) {
    ordered_json arr = ordered_json::array();
    for (double x : v) arr.push_back(x);
    return arr;
}

Vec vec_from_json(const ordered_json& j) {
    Vec v;
    v.reserve(j.size());
    for (const auto& x : j) v.push_back(x.get<double>());
    return v;
}

ordered_json mat_to_json(const Mat& m) {
    ordered_json j;
    j["rows"] = m.rows;
    j["cols"] = m.cols;
    j["data"] = vec_to_json(m.a);
    return j;
}

Mat mat_from_json(const ordered_json& j) {
    Mat m(j.at("rows").get<int>(), j.at("cols").get<int>());
    m.a = vec_from_json(j.at("data"));
    if (m.a.size() != static_cast<std::size_t>(m.rows) * static_cast<std::size_t>(m.cols))
        throw SchemaError("matrix data does not match declared shape");
    return m;
}

}  // namespace

// --- structures --------------------------------------------------------------

void save_structure(const geom::Structure& s, const std::string& path) {
    ordered_json j;
    j["format"] = "seqforge-structure";
    j["version"] = 1;
    j["id"] = s.id;
    j["single_chain"] = s.single_chain;
    j["source"] = s.source == geom::StructureSource::SyntheticNative ? "synthetic-native" : "oracle-predicted";
    ordered_json coords = ordered_json::array();
    for (const geom::Vec3& p : s.coords) coords.push_back(ordered_json::array({p.x, p.y, p.z}));
    j["coords"] = std::move(coords);
    write_text_file(path, j.dump(2) + "\n");
}

geom::Structure load_structure(const std::string& path) {
    const ordered_json j = parse(read_text_file(path), path);
    expect_format(j, "seqforge-structure", 1, path);
    geom::Structure s;
    s.id = j.at("id").get<std::string>();
    s.single_chain = j.at("single_chain").get<bool>();
    const std::string src = j.at("source").get<std::string>();
    if (src == "synthetic-native") s.source = geom::StructureSource::SyntheticNative;
    else if (src == "oracle-predicted") s.source = geom::StructureSource::OraclePredicted;
    else throw SchemaError(path + ": unknown source '" + src + "'");
    for (const auto& c : j.at("coords")) {
        if (c.size() != 3) throw SchemaError(path + ": coordinate is not a 3-vector");
        s.coords.push_back(geom::Vec3{c[0].get<double>(), c[1].get<double>(), c[2].get<double>()});
    }
    s.validate(true);
    return s;
}

// --- oracle config (shared by corpus + run config) ---------------------------

namespace detail {

ordered_json oracle_cfg_to_json(const oracle::OracleConfig& c) {
    ordered_json j;
    j["lattice"] = "cubic3d";
    j["bond_length"] = c.bond_length;
    j["beam_width"] = c.beam_width;
    j["exhaustive_max_len"] = c.exhaustive_max_len;
    j["seed"] = c.seed;
    j["alphabet"] = c.contact_energy.alphabet.letters;
    j["contact_energies"] = vec_to_json(c.contact_energy.e);
    return j;
}

oracle::OracleConfig oracle_cfg_from_json(const ordered_json& j) {
    oracle::OracleConfig c;
    if (j.value("lattice", "cubic3d") != "cubic3d") throw SchemaError("unknown lattice");
    c.bond_length = j.value("bond_length", 3.8);
    c.beam_width = j.value("beam_width", 64);
    c.exhaustive_max_len = j.value("exhaustive_max_len", 12);
    c.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("alphabet")) c.contact_energy.alphabet = Alphabet(j.at("alphabet").get<std::string>());
    if (j.contains("contact_energies")) c.contact_energy.e = vec_from_json(j.at("contact_energies"));
    c.validate();
    return c;
}

}  // namespace detail

// --- corpus -------------------------------------------------------------------

void save_corpus(const oracle::Corpus& corpus, const std::string& dir) {
    ordered_json index;
    index["format"] = "seqforge-corpus";
    index["version"] = 1;
    index["oracle"] = detail::oracle_cfg_to_json(corpus.oracle_cfg);
    ordered_json items = ordered_json::array();
    for (const oracle::CorpusItem& item : corpus.items) {
        ordered_json rec;
        rec["id"] = item.native.id;
        rec["sequence"] = item.wild_type.residues;
        rec["split"] = item.split == oracle::Split::Train ? "train" : "test";
        items.push_back(std::move(rec));
        save_structure(item.native, (fs::path(dir) / "structures" / (item.native.id + ".json")).string());
    }
    index["items"] = std::move(items);
    write_text_file((fs::path(dir) / "index.json").string(), index.dump(2) + "\n");
}

oracle::Corpus load_corpus(const std::string& dir) {
    const std::string index_path = (fs::path(dir) / "index.json").string();
    const ordered_json index = parse(read_text_file(index_path), index_path);
    expect_format(index, "seqforge-corpus", 1, index_path);

    oracle::Corpus corpus;
    corpus.oracle_cfg = detail::oracle_cfg_from_json(index.at("oracle"));
    for (const auto& rec : index.at("items")) {
        oracle::CorpusItem item;
        const std::string id = rec.at("id").get<std::string>();
        item.wild_type = Sequence(rec.at("sequence").get<std::string>());
        item.split = rec.at("split").get<std::string>() == "test" ? oracle::Split::Test : oracle::Split::Train;
        item.native = load_structure((fs::path(dir) / "structures" / (id + ".json")).string());
        if (item.native.id != id) throw SchemaError("corpus structure id mismatch for " + id);
        corpus.items.push_back(std::move(item));
    }
    return corpus;
}

// --- checkpoints ----------------------------------------------------------------

namespace {

ordered_json blocks_to_json(model::ParamBlocks& blocks, bool lora_active) {
    ordered_json j;
    const char* names[] = {"embed", "W1", "W2", "W3", "b", "U"};
    const char* lora_names[] = {"lora_A", "lora_B"};
    auto views = model::trainable_views(blocks, lora_active);
    for (std::size_t i = 0; i < views.size(); ++i) {
        j[lora_active ? lora_names[i] : names[i]] = vec_to_json(*views[i]);
    }
    return j;
}

void blocks_from_json(const ordered_json& j, model::ParamBlocks& blocks, bool lora_active) {
    const char* names[] = {"embed", "W1", "W2", "W3", "b", "U"};
    const char* lora_names[] = {"lora_A", "lora_B"};
    auto views = model::trainable_views(blocks, lora_active);
    for (std::size_t i = 0; i < views.size(); ++i) {
        *views[i] = vec_from_json(j.at(lora_active ? lora_names[i] : names[i]));
    }
}

}  // namespace

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
    const model::ModelParams& p = ck.params;
    ordered_json j;
    j["format"] = "seqforge-checkpoint";
    j["version"] = 1;
    j["feature_version"] = model::kFeatureSpecVersion;
    j["alphabet"] = p.alphabet.letters;
    j["embed_dim"] = p.embed_dim;
    j["hidden_dim"] = p.hidden_dim;
    j["gamma"] = p.gamma;
    j["embed"] = mat_to_json(p.embed);
    j["W1"] = mat_to_json(p.W1);
    j["W2"] = mat_to_json(p.W2);
    j["W3"] = mat_to_json(p.W3);
    j["b"] = vec_to_json(p.b);
    j["U"] = mat_to_json(p.U);
    if (p.lora) {
        ordered_json lj;
        lj["rank"] = p.lora->rank;
        lj["alpha"] = p.lora->alpha;
        lj["A"] = mat_to_json(p.lora->A);
        lj["B"] = mat_to_json(p.lora->B);
        j["lora"] = std::move(lj);
    } else {
        j["lora"] = nullptr;
    }
    if (ck.opt) {
        ordered_json oj;
        oj["step"] = ck.opt->step;
        model::ParamBlocks m = ck.opt->m;  // trainable_views needs mutable refs
        model::ParamBlocks v = ck.opt->v;
        oj["m"] = blocks_to_json(m, p.lora_active());
        oj["v"] = blocks_to_json(v, p.lora_active());
        j["optimizer"] = std::move(oj);
    } else {
        j["optimizer"] = nullptr;
    }
    write_text_file(path, j.dump() + "\n");
}

Checkpoint load_checkpoint(const std::string& path) {
    const ordered_json j = parse(read_text_file(path), path);
    expect_format(j, "seqforge-checkpoint", 1, path);
    if (j.value("feature_version", -1) != model::kFeatureSpecVersion)
        throw SchemaError(path + ": feature spec version mismatch");

    Checkpoint ck;
    model::ModelParams& p = ck.params;
    p.alphabet = Alphabet(j.at("alphabet").get<std::string>());
    p.embed_dim = j.at("embed_dim").get<int>();
    p.hidden_dim = j.at("hidden_dim").get<int>();
    p.gamma = j.at("gamma").get<double>();
    p.embed = mat_from_json(j.at("embed"));
    p.W1 = mat_from_json(j.at("W1"));
    p.W2 = mat_from_json(j.at("W2"));
    p.W3 = mat_from_json(j.at("W3"));
    p.b = vec_from_json(j.at("b"));
    p.U = mat_from_json(j.at("U"));
    if (!j.at("lora").is_null()) {
        model::LoraAdapter lr;
        lr.rank = j["lora"].at("rank").get<int>();
        lr.alpha = j["lora"].at("alpha").get<double>();
        lr.A = mat_from_json(j["lora"].at("A"));
        lr.B = mat_from_json(j["lora"].at("B"));
        p.lora = std::move(lr);
    }
    if (!j.at("optimizer").is_null()) {
        train::AdamState opt = train::AdamState::zeros_like(p);
        opt.step = j["optimizer"].at("step").get<std::int64_t>();
        blocks_from_json(j["optimizer"].at("m"), opt.m, p.lora_active());
        blocks_from_json(j["optimizer"].at("v"), opt.v, p.lora_active());
        ck.opt = std::move(opt);
    }
    return ck;
}

// --- preference datasets ---------------------------------------------------------

void save_pair_dataset(const prefs::PairDataset& ds, const std::string& dir) {
    std::string lines;
    for (const prefs::PreferencePair& pr : ds.pairs) {
        ordered_json j;
        j["structure_id"] = pr.structure_id;
        j["chosen"] = pr.chosen.residues;
        j["rejected"] = pr.rejected.residues;
        j["chosen_tm"] = pr.chosen_tm;
        j["rejected_tm"] = pr.rejected_tm;
        j["round"] = ds.round;
        j["seed"] = ds.seed;
        lines += j.dump();
        lines += "\n";
    }
    write_text_file((fs::path(dir) / "pairs.jsonl").string(), lines);

    ordered_json m;
    m["format"] = "seqforge-pairs";
    m["version"] = 1;
    m["round"] = ds.round;
    m["seed"] = ds.seed;
    m["variant"] = ds.variant == prefs::PairVariant::Standard ? "standard" : "thresholded";
    m["threshold_t_r"] = ds.threshold_t_r;
    m["model_hash"] = ds.model_hash;
    m["oracle_hash"] = ds.oracle_hash;
    m["pair_count"] = ds.pairs.size();
    ordered_json st;
    st["structures"] = ds.stats.structures;
    st["failed_structures"] = ds.stats.failed_structures;
    st["total_samples"] = ds.stats.total_samples;
    st["duplicate_samples"] = ds.stats.duplicate_samples;
    st["wild_type_hits"] = ds.stats.wild_type_hits;
    m["stats"] = std::move(st);
    write_text_file((fs::path(dir) / "dataset.json").string(), m.dump(2) + "\n");
}

prefs::PairDataset load_pair_dataset(const std::string& dir) {
    const std::string mpath = (fs::path(dir) / "dataset.json").string();
    const ordered_json m = parse(read_text_file(mpath), mpath);
    expect_format(m, "seqforge-pairs", 1, mpath);

    prefs::PairDataset ds;
    ds.round = m.at("round").get<int>();
    ds.seed = m.at("seed").get<std::uint64_t>();
    ds.variant = m.at("variant").get<std::string>() == "standard" ? prefs::PairVariant::Standard
                                                                  : prefs::PairVariant::Thresholded;
    ds.threshold_t_r = m.at("threshold_t_r").get<double>();
    ds.model_hash = m.at("model_hash").get<std::string>();
    ds.oracle_hash = m.at("oracle_hash").get<std::string>();
    const auto& st = m.at("stats");
    ds.stats.structures = st.at("structures").get<int>();
    ds.stats.failed_structures = st.at("failed_structures").get<int>();
    ds.stats.total_samples = st.at("total_samples").get<int>();
    ds.stats.duplicate_samples = st.at("duplicate_samples").get<int>();
    ds.stats.wild_type_hits = st.at("wild_type_hits").get<int>();

    std::istringstream in(read_text_file((fs::path(dir) / "pairs.jsonl").string()));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const ordered_json j = parse(line, "pairs.jsonl");
        prefs::PreferencePair pr;
        pr.structure_id = j.at("structure_id").get<std::string>();
        pr.chosen = Sequence(j.at("chosen").get<std::string>());
        pr.rejected = Sequence(j.at("rejected").get<std::string>());
        pr.chosen_tm = j.at("chosen_tm").get<double>();
        pr.rejected_tm = j.at("rejected_tm").get<double>();
        ds.pairs.push_back(std::move(pr));
    }
    return ds;
}

// --- evaluation reports ------------------------------------------------------------

namespace {

ordered_json eval_config_to_json(const metrics::EvalConfig& c) {
    ordered_json j;
    j["samples_per_structure"] = c.samples_per_structure;
    j["temperature"] = c.temperature;
    j["top_p"] = c.top_p;
    j["tm_group_threshold"] = c.tm_group_threshold;
    j["short_length_cutoff"] = c.short_length_cutoff;
    j["seed"] = c.seed;
    return j;
}

metrics::EvalConfig eval_config_from_json(const ordered_json& j) {
    metrics::EvalConfig c;
    c.samples_per_structure = j.value("samples_per_structure", 10);
    c.temperature = j.value("temperature", 0.15);
    c.top_p = j.value("top_p", 1.0);
    c.tm_group_threshold = j.value("tm_group_threshold", 0.5);
    c.short_length_cutoff = j.value("short_length_cutoff", 100);
    c.seed = j.value("seed", std::uint64_t{0});
    return c;
}

}  // namespace

void save_eval_report(const metrics::EvalReport& r, const std::string& dir) {
    ordered_json j;
    j["format"] = "seqforge-eval";
    j["version"] = 1;
    j["config"] = eval_config_to_json(r.config);

    ordered_json recs = ordered_json::array();
    std::string per_structure_csv = "id,length,single_chain,short,tm_group,mean_tm,mean_recovery,mean_rmsd,perplexity\n";
    std::string per_sample_csv = "id,sample,tm,recovery,rmsd\n";
    for (const metrics::StructureRecord& rec : r.per_structure) {
        ordered_json rj;
        rj["id"] = rec.id;
        rj["length"] = rec.length;
        rj["single_chain"] = rec.single_chain;
        rj["short"] = rec.is_short;
        rj["tm_low_group"] = rec.tm_low_group;
        rj["mean_tm"] = rec.mean_tm;
        rj["mean_recovery"] = rec.mean_recovery;
        rj["mean_rmsd"] = rec.mean_rmsd;
        rj["perplexity"] = rec.perplexity;
        ordered_json samples = ordered_json::array();
        for (const metrics::SampleScore& s : rec.samples) {
            samples.push_back(ordered_json::array({s.sample_index, s.tm, s.recovery, s.rmsd}));
            per_sample_csv += rec.id + "," + std::to_string(s.sample_index) + "," + format_double(s.tm) + "," +
                              format_double(s.recovery) + "," + format_double(s.rmsd) + "\n";
        }
        rj["samples"] = std::move(samples);
        recs.push_back(std::move(rj));

        per_structure_csv += rec.id + "," + std::to_string(rec.length) + "," + (rec.single_chain ? "1" : "0") + "," +
                             (rec.is_short ? "1" : "0") + "," + (rec.tm_low_group ? "low" : "high") + "," +
                             format_double(rec.mean_tm) + "," + format_double(rec.mean_recovery) + "," +
                             format_double(rec.mean_rmsd) + "," + format_double(rec.perplexity) + "\n";
    }
    j["per_structure"] = std::move(recs);

    ordered_json aggs = ordered_json::array();
    for (const metrics::Aggregate& a : r.aggregates) {
        ordered_json aj;
        aj["label"] = a.label;
        aj["count"] = a.count;
        aj["mean_tm"] = a.mean_tm;
        aj["mean_recovery"] = a.mean_recovery;
        aj["mean_rmsd"] = a.mean_rmsd;
        aj["mean_perplexity"] = a.mean_perplexity;
        aggs.push_back(std::move(aj));
    }
    j["aggregates"] = std::move(aggs);

    write_text_file((fs::path(dir) / "summary.json").string(), j.dump(2) + "\n");
    write_text_file((fs::path(dir) / "per_structure.csv").string(), per_structure_csv);
    write_text_file((fs::path(dir) / "per_sample.csv").string(), per_sample_csv);
}

metrics::EvalReport load_eval_report(const std::string& dir) {
    const std::string path = (fs::path(dir) / "summary.json").string();
    const ordered_json j = parse(read_text_file(path), path);
    expect_format(j, "seqforge-eval", 1, path);

    metrics::EvalReport r;
    r.config = eval_config_from_json(j.at("config"));
    for (const auto& rj : j.at("per_structure")) {
        metrics::StructureRecord rec;
        rec.id = rj.at("id").get<std::string>();
        rec.length = rj.at("length").get<int>();
        rec.single_chain = rj.at("single_chain").get<bool>();
        rec.is_short = rj.at("short").get<bool>();
        rec.tm_low_group = rj.at("tm_low_group").get<bool>();
        rec.mean_tm = rj.at("mean_tm").get<double>();
        rec.mean_recovery = rj.at("mean_recovery").get<double>();
        rec.mean_rmsd = rj.at("mean_rmsd").get<double>();
        rec.perplexity = rj.at("perplexity").get<double>();
        for (const auto& sj : rj.at("samples")) {
            metrics::SampleScore s;
            s.sample_index = sj[0].get<int>();
            s.tm = sj[1].get<double>();
            s.recovery = sj[2].get<double>();
            s.rmsd = sj[3].get<double>();
            rec.samples.push_back(s);
        }
        r.per_structure.push_back(std::move(rec));
    }
    for (const auto& aj : j.at("aggregates")) {
        metrics::Aggregate a;
        a.label = aj.at("label").get<std::string>();
        a.count = aj.at("count").get<int>();
        a.mean_tm = aj.at("mean_tm").get<double>();
        a.mean_recovery = aj.at("mean_recovery").get<double>();
        a.mean_rmsd = aj.at("mean_rmsd").get<double>();
        a.mean_perplexity = aj.at("mean_perplexity").get<double>();
        r.aggregates.push_back(std::move(a));
    }
    return r;
}

std::string step_log_csv(const std::vector<train::StepRecord>& records) {
    std::string out = "step,loss,dpo_loss,sft_loss,margin,accuracy\n";
    for (const train::StepRecord& r : records) {
        out += std::to_string(r.step) + "," + format_double(r.loss) + "," + format_double(r.dpo_loss) + "," +
               format_double(r.sft_loss) + "," + format_double(r.margin) + "," + format_double(r.accuracy) + "\n";
    }
    return out;
}

}  // namespace seqforge::io
