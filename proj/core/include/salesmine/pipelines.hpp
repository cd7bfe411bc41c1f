#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "salesmine/config.hpp"
#include "salesmine/ingest.hpp"
#include "salesmine/search_index.hpp"
#include "salesmine/sop_engine.hpp"

// End-to-end runs shared by the CLI and the task service, so both emit
// byte-identical documents for the same input and configuration.
namespace salesmine {

enum class TaskKind : std::uint8_t { FaqExtraction, ObjectionMining, Dashboard };

std::string_view to_string(TaskKind k) noexcept;
std::optional<TaskKind> parse_task_kind(std::string_view s) noexcept;

// JSON array of QA pairs.
nlohmann::json run_faq_extraction(const Chatlog& chatlog, const PipelineConfig& config);

// JSON array of clusters with keywords and attached sales responses.
nlohmann::json run_objection_mining(const Chatlog& chatlog, const PipelineConfig& config);

// {"executions": [...], "views": {"trigger": [...], "team": [...], "staff": [...]}}.
// `only` restricts "views" to a single view. Needs config.rules_path.
nlohmann::json run_dashboard(const Chatlog& chatlog, const PipelineConfig& config,
                             std::optional<DashboardView> only = std::nullopt);
nlohmann::json run_dashboard(const Chatlog& chatlog, const RuleSet& rules,
                             std::optional<DashboardView> only = std::nullopt);

nlohmann::json run_task(TaskKind kind, const Chatlog& chatlog, const PipelineConfig& config);

// Rebuilds the response index from an objection-mining document.
SearchIndex index_from_document(const nlohmann::json& objection_doc, const Scorer& scorer);

}  // namespace salesmine
