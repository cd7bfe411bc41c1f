#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace salesmine::cli {

// Human-readable renderings of the JSON documents for --format table.
std::string faq_table(const nlohmann::json& pairs);
std::string clusters_table(const nlohmann::json& clusters);
std::string dashboard_table(const nlohmann::json& dashboard);
std::string hits_table(const nlohmann::json& hits);
std::string stats_table(const nlohmann::json& stats);

}  // namespace salesmine::cli
