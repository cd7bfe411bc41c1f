#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "salesmine/clustering.hpp"
#include "salesmine/phrase_mining.hpp"
#include "salesmine/qa_extract.hpp"
#include "salesmine/scoring.hpp"

namespace salesmine {

// Everything a pipeline run depends on. Serialized in full into every
// task record so results can be reproduced.
struct PipelineConfig {
  ScorerConfig scorer;
  QaConfig qa;
  ClusteringConfig clustering;
  MiningConfig mining;
  std::optional<std::string> rules_path;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "salesmine-data";
  std::uint64_t max_upload_bytes = 64ull << 20;
  std::size_t workers = 1;
  std::optional<std::string> cors_origin;
  PipelineConfig pipeline;
};

nlohmann::json to_json(const PipelineConfig& config);

// Strict: unknown keys and ill-typed values raise ConfigError. Missing
// keys keep their defaults. `base_dir` resolves relative lexicon and
// rules paths.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

// Applies a JSON merge patch to the serialized config and re-reads it.
PipelineConfig apply_overrides(const PipelineConfig& base, const nlohmann::json& overrides);

nlohmann::json to_json(const ServiceConfig& config);
ServiceConfig service_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ServiceConfig load_service_config(const std::filesystem::path& path);

}  // namespace salesmine
