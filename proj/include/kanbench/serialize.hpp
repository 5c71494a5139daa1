#pragma once

// JSON documents for models, symbolic networks, cost reports and training
// summaries. Field names follow schemas/model.schema.json.

#include <filesystem>
#include <string>
#include <variant>

#include "json.hpp"

#include "kanbench/codegen.hpp"
#include "kanbench/kan.hpp"
#include "kanbench/mlp.hpp"
#include "kanbench/symbolic.hpp"
#include "kanbench/training.hpp"

namespace kanbench {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const KanNetwork& net);
nlohmann::json to_json(const MlpNetwork& net);
nlohmann::json to_json(const SymbolicNetwork& snet);
nlohmann::json to_json(const CostReport& cost);
nlohmann::json to_json(const TrainConfig& config);
nlohmann::json summary_json(const TrainReport& report, const TrainConfig& config);

KanNetwork kan_from_json(const nlohmann::json& doc);
MlpNetwork mlp_from_json(const nlohmann::json& doc);
SymbolicNetwork symbolic_from_json(const nlohmann::json& doc);

using AnyModel = std::variant<MlpNetwork, KanNetwork, SymbolicNetwork>;
/// Dispatches on the document's "kind" tag.
AnyModel model_from_json(const nlohmann::json& doc);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace kanbench
