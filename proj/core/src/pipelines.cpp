#include "salesmine/pipelines.hpp"

#include "salesmine/clustering.hpp"
#include "salesmine/documents.hpp"
#include "salesmine/phrase_mining.hpp"
#include "salesmine/qa_extract.hpp"

namespace salesmine {

std::string_view to_string(TaskKind k) noexcept {
  switch (k) {
    case TaskKind::FaqExtraction: return "faq_extraction";
    case TaskKind::ObjectionMining: return "objection_mining";
    case TaskKind::Dashboard: return "dashboard";
  }
  return "unknown";
}

std::optional<TaskKind> parse_task_kind(std::string_view s) noexcept {
  if (s == "faq_extraction") return TaskKind::FaqExtraction;
  if (s == "objection_mining") return TaskKind::ObjectionMining;
  if (s == "dashboard") return TaskKind::Dashboard;
  return std::nullopt;
}

nlohmann::json run_faq_extraction(const Chatlog& chatlog, const PipelineConfig& config) {
  const auto scorer = make_scorer(config.scorer);
  const std::vector<QAPair> pairs = extract_faq(chatlog, *scorer, config.qa);
  return to_json(std::span<const QAPair>(pairs));
}

nlohmann::json run_objection_mining(const Chatlog& chatlog, const PipelineConfig& config) {
  const auto scorer = make_scorer(config.scorer);
  const std::vector<Utterance> customers = customer_utterances(chatlog);
  std::vector<Cluster> clusters = build_clusters(customers, chatlog.dialogs, *scorer, config.clustering);

  std::vector<std::string> background;
  for (const Utterance& u : filter_trivial(customers, *scorer)) background.push_back(u.text);
  for (Cluster& c : clusters) {
    std::vector<std::string> texts;
    texts.reserve(c.members.size());
    for (const ClusterMember& m : c.members) texts.push_back(m.text);
    c.keywords = cluster_keywords(texts, background, config.mining);
  }
  return to_json(std::span<const Cluster>(clusters));
}

nlohmann::json run_dashboard(const Chatlog& chatlog, const RuleSet& rules, std::optional<DashboardView> only) {
  const std::vector<SopExecution> executions = run_rules(chatlog, rules);
  nlohmann::json records = nlohmann::json::array();
  for (const SopExecution& e : executions) records.push_back(to_json(e));
  nlohmann::json views = nlohmann::json::object();
  for (DashboardView v : {DashboardView::Trigger, DashboardView::Team, DashboardView::Staff}) {
    if (only && *only != v) continue;
    views[std::string(to_string(v))] = to_json(aggregate(executions, v));
  }
  return {{"executions", std::move(records)}, {"views", std::move(views)}};
}

nlohmann::json run_dashboard(const Chatlog& chatlog, const PipelineConfig& config, std::optional<DashboardView> only) {
  if (!config.rules_path) throw ConfigError("no SOP rule set configured (set rules_path)");
  return run_dashboard(chatlog, load_rule_set(*config.rules_path), only);
}

nlohmann::json run_task(TaskKind kind, const Chatlog& chatlog, const PipelineConfig& config) {
  switch (kind) {
    case TaskKind::FaqExtraction: return run_faq_extraction(chatlog, config);
    case TaskKind::ObjectionMining: return run_objection_mining(chatlog, config);
    case TaskKind::Dashboard: return run_dashboard(chatlog, config);
  }
  throw Error("unknown task kind");
}

SearchIndex index_from_document(const nlohmann::json& objection_doc, const Scorer& scorer) {
  const std::vector<Cluster> clusters = clusters_from_json(objection_doc);
  return build_index(clusters, scorer);
}

}  // namespace salesmine
