#pragma once

// Persistence for every on-disk artifact: structure files, corpus
// directories, model checkpoints (with optimizer state), preference-pair
// datasets, and evaluation reports. All writers emit deterministic bytes
// (fixed key order, shortest-round-trip doubles) so reruns hash equal.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "seqforge/fold_oracle.hpp"
#include "seqforge/metrics.hpp"
#include "seqforge/model.hpp"
#include "seqforge/pref_data.hpp"
#include "seqforge/trainer.hpp"

namespace seqforge::io {

// Shortest decimal form that round-trips the exact double.
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// --- structures -----------------------------------------------------------

void save_structure(const geom::Structure& s, const std::string& path);
geom::Structure load_structure(const std::string& path);

// --- corpus ----------------------------------------------------------------

// Layout: <dir>/index.json + <dir>/structures/<id>.json
void save_corpus(const oracle::Corpus& corpus, const std::string& dir);
oracle::Corpus load_corpus(const std::string& dir);

// --- checkpoints ------------------------------------------------------------

struct Checkpoint {
    model::ModelParams params;
    std::optional<train::AdamState> opt;
};

void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// --- preference datasets ----------------------------------------------------

// Layout: <dir>/pairs.jsonl + <dir>/dataset.json (provenance manifest).
void save_pair_dataset(const prefs::PairDataset& ds, const std::string& dir);
prefs::PairDataset load_pair_dataset(const std::string& dir);

// --- evaluation reports -----------------------------------------------------

// Layout: <dir>/per_structure.csv, <dir>/per_sample.csv, <dir>/summary.json
void save_eval_report(const metrics::EvalReport& r, const std::string& dir);
metrics::EvalReport load_eval_report(const std::string& dir);

// --- training logs ----------------------------------------------------------

std::string step_log_csv(const std::vector<train::StepRecord>& records);

namespace detail {
// Shared with the run-config loader.
nlohmann::ordered_json oracle_cfg_to_json(const oracle::OracleConfig& c);
oracle::OracleConfig oracle_cfg_from_json(const nlohmann::ordered_json& j);
}  // namespace detail

}  // namespace seqforge::io
