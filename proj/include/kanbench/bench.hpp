#pragma once

// End-to-end benchmark: for every configured dataset, train the MLP/KAN
// pair, symbolify the KAN, generate inference source and cost reports, and
// collect everything into Table-I-shaped rows.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kanbench/codegen.hpp"
#include "kanbench/datasets.hpp"
#include "kanbench/kan.hpp"
#include "kanbench/mlp.hpp"
#include "kanbench/symbolic.hpp"
#include "kanbench/training.hpp"

namespace kanbench {

struct DatasetSource {
    enum class Kind { moons, csv };
    Kind kind = Kind::moons;
    std::size_t samples = 10000;
    double noise = 0.2;
    std::filesystem::path path;
    CsvSchema schema;
};

struct MlpSpec {
    std::vector<std::size_t> layer_sizes;
    std::vector<Activation> activations;
    TrainConfig train;
};

struct KanSpec {
    std::vector<std::size_t> layer_sizes;
    int grid = 3;
    int degree = 3;
    TrainConfig train;
};

struct DatasetEntry {
    std::string name;
    DatasetSource source;
    bool smote = false;
    std::size_t smote_neighbors = 5;
    double test_fraction = 0.2;
    MlpSpec mlp;
    KanSpec kan;
};

struct BenchConfig {
    std::uint64_t seed = 42;
    std::filesystem::path output_dir = "out";
    std::vector<DatasetEntry> datasets;
};

/// Relative CSV paths resolve against `base_dir`.
BenchConfig parse_bench_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
BenchConfig load_bench_config(const std::filesystem::path& path);
/// Keeps only the named datasets, in config order; throws invalid-config
/// on an unknown name.
void select_datasets(BenchConfig& config, const std::vector<std::string>& names);
const DatasetEntry& find_dataset(const BenchConfig& config, const std::string& name);

/// Seed used for everything in the row at `index`.
std::uint64_t row_seed(const BenchConfig& config, std::size_t index);

struct PreparedData {
    std::size_t raw_samples = 0;
    std::size_t samples = 0;  // after optional SMOTE
    Dataset train;            // standardized
    Dataset test;             // standardized with train statistics
};

PreparedData prepare_dataset(const DatasetEntry& entry, std::uint64_t seed);

struct ModelRow {
    std::string dataset;
    std::string model;  // "MLP" or "KAN"
    std::string model_size;
    std::string spline_info;
    std::size_t params = 0;
    double pre_accuracy = 0.0;
    std::optional<double> post_accuracy;
    std::size_t epochs_run = 0;
    double final_loss = 0.0;
    std::string stop_reason;
    CostReport cost;
    std::string artifact_stem;
    double train_seconds = 0.0;
    double inference_seconds = 0.0;
    std::optional<double> symbolic_inference_seconds;
};

struct DatasetResult {
    std::string name;
    std::string source_info;
    std::size_t raw_samples = 0;
    std::size_t samples = 0;
    std::size_t train_samples = 0;
    std::size_t test_samples = 0;
    bool ok = false;
    std::string error;
    std::vector<ModelRow> rows;

    std::optional<MlpNetwork> mlp;
    std::optional<KanNetwork> kan;
    std::optional<SymbolicNetwork> symbolic;
    TrainReport mlp_report;
    TrainReport kan_report;
    TrainConfig mlp_train;
    TrainConfig kan_train;
    std::string mlp_source;
    std::string symbolic_source;
    std::string formulas;
};

struct BenchReport {
    std::vector<DatasetResult> datasets;
    bool all_completed() const;
};

/// Runs one dataset row; failures are captured in the result, not thrown.
DatasetResult run_dataset(const DatasetEntry& entry, std::uint64_t seed);

/// `on_row` (if set) sees each dataset result as soon as it completes.
BenchReport run_benchmark(const BenchConfig& config,
                          const std::function<void(const DatasetResult&)>& on_row = {});

std::string report_csv(const BenchReport& report);
std::string report_markdown(const BenchReport& report);
std::string times_csv(const BenchReport& report);
std::string loss_csv(const TrainReport& report);

/// Writes every artifact of one dataset row (models, loss curves, source,
/// cost, formulas) into out_dir.
void emit_dataset_artifacts(const DatasetResult& result, const std::filesystem::path& out_dir);
/// Writes report.md, report.csv, times.csv and all per-row artifacts.
void emit_report(const BenchReport& report, const std::filesystem::path& out_dir);

std::string join_sizes(const std::vector<std::size_t>& sizes);

}  // namespace kanbench
