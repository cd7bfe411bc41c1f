#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "salesmine/error.hpp"
#include "salesmine/ingest.hpp"
#include "salesmine/remote_client.hpp"

namespace salesmine {

// Trigger index of a DialogStart rule: the obligation exists before any turn.
inline constexpr std::int64_t kDialogStartIndex = -1;
inline constexpr std::string_view kUnassigned = "(unassigned)";

enum class MatchKind : std::uint8_t { IntentLabel, KeywordAny, DialogStart };

std::string_view to_string(MatchKind k) noexcept;

struct TriggerSpec {
  MatchKind kind = MatchKind::KeywordAny;
  std::optional<std::string> intent;
  std::vector<std::string> keywords;
};

// Same fields as a trigger; DialogStart is not a valid spotlight.
using SpotlightSpec = TriggerSpec;

struct SopRule {
  std::string rule_id;
  std::string name;
  TriggerSpec trigger;
  SpotlightSpec spotlight;
  std::size_t window = 10;  // counted in Sales utterances
};

enum class IntentBackend : std::uint8_t { LexiconBaseline, Remote };

class IntentModel {
 public:
  // Lexicon baseline: label -> keyword list; the vocabulary is the key set.
  explicit IntentModel(std::map<std::string, std::vector<std::string>> lexicons);
  // Remote classifier restricted to `vocabulary`.
  IntentModel(std::set<std::string> vocabulary, std::string remote_url);

  IntentBackend backend() const noexcept { return backend_; }
  const std::set<std::string>& vocabulary() const noexcept { return vocabulary_; }

  // Multi-label. Baseline: every intent with a keyword that is a substring
  // of the normalized text. Remote: service labels intersected with the
  // vocabulary.
  std::set<std::string> classify(std::string_view text) const;

 private:
  IntentBackend backend_;
  std::set<std::string> vocabulary_;
  std::map<std::string, std::vector<std::string>> normalized_lexicons_;
  std::optional<RemoteModelClient> client_;
};

std::set<std::string> classify_intent(std::string_view text, const IntentModel& model);

struct RuleSet {
  std::vector<SopRule> rules;
  IntentModel model{std::map<std::string, std::vector<std::string>>{}};

  // Throws ConfigError for duplicate ids, missing fields or unknown intents.
  void validate() const;
};

// Parses the declarative rule file format documented in docs/rules_format.md.
RuleSet parse_rule_set(std::string_view source);
RuleSet load_rule_set(const std::filesystem::path& path);

struct SopExecution {
  std::string rule_id;
  std::string dialog_id;
  std::int64_t trigger_index = kDialogStartIndex;
  bool executed = false;
  std::optional<std::size_t> spotlight_index;
  std::string staff_id;
  std::string team_id;

  friend bool operator==(const SopExecution&, const SopExecution&) = default;
};

// True when a trigger or spotlight matches the text (keyword substring or intent label).
bool matches(const TriggerSpec& spec, std::string_view text, const IntentModel& model);

std::vector<std::int64_t> detect_triggers(const Dialog& dialog, const SopRule& rule, const IntentModel& model);

// Looks at the next `rule.window` Sales turns after the trigger and stops
// at the first one matching the spotlight.
SopExecution check_spotlight(const Dialog& dialog, std::int64_t trigger_index, const SopRule& rule,
                             const IntentModel& model);

// Every rule over every dialog: dialog order, then rule order, then
// trigger order.
std::vector<SopExecution> run_rules(const Chatlog& chatlog, const RuleSet& rules);

enum class DashboardView : std::uint8_t { Trigger, Team, Staff };

std::string_view to_string(DashboardView v) noexcept;
std::optional<DashboardView> parse_dashboard_view(std::string_view s) noexcept;

struct DashboardRow {
  std::string key;
  std::uint64_t triggered = 0;
  std::uint64_t executed = 0;
  double ratio = 0.0;

  friend bool operator==(const DashboardRow&, const DashboardRow&) = default;
};

struct DashboardStats {
  DashboardView view = DashboardView::Trigger;
  std::vector<DashboardRow> rows;  // worst ratio first, ties by key
};

DashboardStats aggregate(std::span<const SopExecution> executions, DashboardView view);

}  // namespace salesmine
