#include "salesmine/sop_engine.hpp"

#include <algorithm>
#include <unordered_map>

#include "salesmine/text.hpp"

namespace salesmine {

std::string_view to_string(MatchKind k) noexcept {
  switch (k) {
    case MatchKind::IntentLabel: return "intent";
    case MatchKind::KeywordAny: return "keywords";
    case MatchKind::DialogStart: return "dialog_start";
  }
  return "unknown";
}

std::string_view to_string(DashboardView v) noexcept {
  switch (v) {
    case DashboardView::Trigger: return "trigger";
    case DashboardView::Team: return "team";
    case DashboardView::Staff: return "staff";
  }
  return "unknown";
}

std::optional<DashboardView> parse_dashboard_view(std::string_view s) noexcept {
  if (s == "trigger") return DashboardView::Trigger;
  if (s == "team") return DashboardView::Team;
  if (s == "staff") return DashboardView::Staff;
  return std::nullopt;
}

IntentModel::IntentModel(std::map<std::string, std::vector<std::string>> lexicons)
    : backend_(IntentBackend::LexiconBaseline) {
  for (auto& [label, keywords] : lexicons) {
    vocabulary_.insert(label);
    auto& norm = normalized_lexicons_[label];
    for (const std::string& k : keywords) {
      if (std::string n = text::normalize_for_match(k); !n.empty()) norm.push_back(std::move(n));
    }
  }
}

IntentModel::IntentModel(std::set<std::string> vocabulary, std::string remote_url)
    : backend_(IntentBackend::Remote), vocabulary_(std::move(vocabulary)), client_(std::in_place, std::move(remote_url)) {}

std::set<std::string> IntentModel::classify(std::string_view raw) const {
  std::set<std::string> labels;
  if (backend_ == IntentBackend::Remote) {
    const auto res = client_->post("/v1/intents", {{"text", raw}, {"vocabulary", vocabulary_}});
    if (!res.is_object() || !res.contains("labels") || !res.at("labels").is_array()) {
      throw RemoteUnavailable(client_->base_url(), "malformed response: missing 'labels'");
    }
    for (const auto& l : res.at("labels")) {
      if (!l.is_string()) throw RemoteUnavailable(client_->base_url(), "malformed response: non-string label");
      if (vocabulary_.contains(l.get<std::string>())) labels.insert(l.get<std::string>());
    }
    return labels;
  }
  const std::string norm = text::normalize_for_match(raw);
  for (const auto& [label, keywords] : normalized_lexicons_) {
    for (const std::string& k : keywords) {
      if (norm.find(k) != std::string::npos) {
        labels.insert(label);
        break;
      }
    }
  }
  return labels;
}

std::set<std::string> classify_intent(std::string_view text, const IntentModel& model) {
  return model.classify(text);
}

bool matches(const TriggerSpec& spec, std::string_view raw, const IntentModel& model) {
  switch (spec.kind) {
    case MatchKind::IntentLabel:
      return spec.intent && model.classify(raw).contains(*spec.intent);
    case MatchKind::KeywordAny: {
      const std::string norm = text::normalize_for_match(raw);
      for (const std::string& k : spec.keywords) {
        const std::string nk = text::normalize_for_match(k);
        if (!nk.empty() && norm.find(nk) != std::string::npos) return true;
      }
      return false;
    }
    case MatchKind::DialogStart:
      return false;
  }
  return false;
}

std::vector<std::int64_t> detect_triggers(const Dialog& dialog, const SopRule& rule, const IntentModel& model) {
  std::vector<std::int64_t> out;
  if (rule.trigger.kind == MatchKind::DialogStart) {
    if (!dialog.utterances.empty()) out.push_back(kDialogStartIndex);
    return out;
  }
  for (const Utterance& u : dialog.utterances) {
    if (u.speaker == Speaker::Customer && matches(rule.trigger, u.text, model)) {
      out.push_back(static_cast<std::int64_t>(u.turn_index));
    }
  }
  return out;
}

SopExecution check_spotlight(const Dialog& dialog, std::int64_t trigger_index, const SopRule& rule,
                             const IntentModel& model) {
  SopExecution ex;
  ex.rule_id = rule.rule_id;
  ex.dialog_id = dialog.dialog_id;
  ex.trigger_index = trigger_index;

  std::size_t seen_sales = 0;
  const auto start = static_cast<std::size_t>(trigger_index + 1);
  for (std::size_t i = start; i < dialog.utterances.size() && seen_sales < rule.window; ++i) {
    const Utterance& u = dialog.utterances[i];
    if (u.speaker != Speaker::Sales) continue;
    ++seen_sales;
    if (matches(rule.spotlight, u.text, model)) {
      ex.executed = true;
      ex.spotlight_index = u.turn_index;
      ex.staff_id = u.staff_id;
      ex.team_id = u.team_id;
      return ex;
    }
  }
  for (const Utterance& u : dialog.utterances) {
    if (u.speaker == Speaker::Sales) {
      ex.staff_id = u.staff_id;
      ex.team_id = u.team_id;
      break;
    }
  }
  return ex;
}

std::vector<SopExecution> run_rules(const Chatlog& chatlog, const RuleSet& rules) {
  std::vector<SopExecution> out;
  for (const Dialog& d : chatlog.dialogs) {
    for (const SopRule& rule : rules.rules) {
      for (std::int64_t t : detect_triggers(d, rule, rules.model)) {
        out.push_back(check_spotlight(d, t, rule, rules.model));
      }
    }
  }
  return out;
}

DashboardStats aggregate(std::span<const SopExecution> executions, DashboardView view) {
  std::map<std::string, DashboardRow> groups;
  for (const SopExecution& e : executions) {
    std::string key;
    switch (view) {
      case DashboardView::Trigger: key = e.rule_id; break;
      case DashboardView::Team: key = e.team_id; break;
      case DashboardView::Staff: key = e.staff_id; break;
    }
    if (key.empty()) key = kUnassigned;
    DashboardRow& row = groups[key];
    row.key = key;
    ++row.triggered;
    if (e.executed) ++row.executed;
  }

  DashboardStats stats;
  stats.view = view;
  for (auto& [key, row] : groups) {
    row.ratio = static_cast<double>(row.executed) / static_cast<double>(row.triggered);
    stats.rows.push_back(std::move(row));
  }
  // Compare executed/triggered exactly by cross-multiplying.
  std::sort(stats.rows.begin(), stats.rows.end(), [](const DashboardRow& a, const DashboardRow& b) {
    const auto lhs = a.executed * b.triggered;
    const auto rhs = b.executed * a.triggered;
    if (lhs != rhs) return lhs < rhs;
    return a.key < b.key;
  });
  return stats;
}

}  // namespace salesmine
