// Reader for the SOP rule file: a small TOML subset with [intents],
// [intent_model] and repeated [[rule]] tables. See docs/rules_format.md.

#include <charconv>
#include <fstream>
#include <sstream>
#include <variant>

#include "salesmine/sop_engine.hpp"
#include "salesmine/text.hpp"

namespace salesmine {
namespace {

using Value = std::variant<std::string, std::int64_t, std::vector<std::string>>;

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw ConfigError("rules line " + std::to_string(line) + ": " + msg);
}

class Parser {
 public:
  Parser(std::string_view src, std::size_t line) : src_(src), line_(line) {}

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '\n') {
        ++pos_;
        ++line_;
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string parse_string() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < src_.size() && src_[pos_] != '"') {
      char c = src_[pos_++];
      if (c == '\n') fail(line_, "newline inside string");
      if (c == '\\') {
        if (pos_ >= src_.size()) break;
        const char e = src_[pos_++];
        switch (e) {
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          default: fail(line_, std::string("unsupported escape \\") + e);
        }
        continue;
      }
      out.push_back(c);
    }
    if (pos_ >= src_.size()) fail(line_, "unterminated string");
    ++pos_;
    return out;
  }

  Value parse_value() {
    skip_inline();
    if (pos_ >= src_.size()) fail(line_, "missing value");
    const char c = src_[pos_];
    if (c == '"') return parse_string();
    if (c == '[') {
      ++pos_;
      std::vector<std::string> items;
      for (;;) {
        skip_space();
        if (pos_ >= src_.size()) fail(line_, "unterminated array");
        if (src_[pos_] == ']') {
          ++pos_;
          break;
        }
        if (src_[pos_] != '"') fail(line_, "arrays may only contain strings");
        items.push_back(parse_string());
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == ',') ++pos_;
        else if (pos_ < src_.size() && src_[pos_] != ']') fail(line_, "expected ',' or ']' in array");
      }
      return items;
    }
    std::size_t end = pos_;
    while (end < src_.size() && (src_[end] == '-' || (src_[end] >= '0' && src_[end] <= '9'))) ++end;
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(src_.data() + pos_, src_.data() + end, v);
    if (ec != std::errc() || ptr == src_.data() + pos_) fail(line_, "expected a string, integer or array");
    pos_ = end;
    return v;
  }

  void skip_inline() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) ++pos_;
  }

  void expect_line_end() {
    skip_inline();
    if (pos_ < src_.size() && src_[pos_] == '#') {
      while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
    }
    if (pos_ < src_.size() && src_[pos_] == '\r') ++pos_;
    if (pos_ < src_.size() && src_[pos_] != '\n') fail(line_, "unexpected trailing characters");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

bool is_key_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

const std::string& as_string(const Value& v, const std::string& key, std::size_t line) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  fail(line, key + " must be a string");
}

std::vector<std::string> as_list(const Value& v, const std::string& key, std::size_t line) {
  if (const auto* l = std::get_if<std::vector<std::string>>(&v)) return *l;
  fail(line, key + " must be an array of strings");
}

MatchKind parse_kind(const std::string& s, std::size_t line) {
  if (s == "intent") return MatchKind::IntentLabel;
  if (s == "keywords") return MatchKind::KeywordAny;
  if (s == "dialog_start") return MatchKind::DialogStart;
  fail(line, "unknown match kind '" + s + "' (expected intent, keywords or dialog_start)");
}

}  // namespace

RuleSet parse_rule_set(std::string_view source) {
  if (!text::is_valid_utf8(source)) throw ConfigError("rules file is not UTF-8");

  enum class Section { Top, Intents, IntentModel, Rule };
  Section section = Section::Top;
  std::map<std::string, std::vector<std::string>> lexicons;
  std::string model_backend = "lexicon";
  std::string model_url;
  std::vector<SopRule> rules;
  bool saw_version = false;

  Parser p(source, 1);
  for (;;) {
    p.skip_space();
    if (p.pos_ >= source.size()) break;
    const std::size_t line = p.line_;

    if (source[p.pos_] == '[') {
      const bool array_table = source.substr(p.pos_, 2) == "[[";
      const std::size_t close = source.find(array_table ? "]]" : "]", p.pos_);
      const std::size_t eol = source.find('\n', p.pos_);
      if (close == std::string_view::npos || (eol != std::string_view::npos && close > eol)) {
        fail(line, "unterminated table header");
      }
      const std::string name =
          text::collapse_whitespace(source.substr(p.pos_ + (array_table ? 2 : 1), close - p.pos_ - (array_table ? 2 : 1)));
      p.pos_ = close + (array_table ? 2 : 1);
      p.expect_line_end();
      if (array_table && name == "rule") {
        section = Section::Rule;
        rules.emplace_back();
      } else if (!array_table && name == "intents") {
        section = Section::Intents;
      } else if (!array_table && name == "intent_model") {
        section = Section::IntentModel;
      } else {
        fail(line, "unknown table '" + name + "'");
      }
      continue;
    }

    const std::size_t key_start = p.pos_;
    std::string key;
    if (source[p.pos_] == '"') {
      key = p.parse_string();
    } else {
      while (p.pos_ < source.size() && is_key_char(source[p.pos_])) ++p.pos_;
      key = std::string(source.substr(key_start, p.pos_ - key_start));
    }
    if (key.empty()) fail(line, "expected a key");
    p.skip_inline();
    if (p.pos_ >= source.size() || source[p.pos_] != '=') fail(line, "expected '=' after " + key);
    ++p.pos_;
    const Value value = p.parse_value();
    p.expect_line_end();

    switch (section) {
      case Section::Top:
        if (key != "version") fail(line, "unknown top-level key '" + key + "'");
        if (!std::holds_alternative<std::int64_t>(value) || std::get<std::int64_t>(value) != 1) {
          fail(line, "unsupported rules format version (expected 1)");
        }
        saw_version = true;
        break;
      case Section::Intents:
        if (lexicons.contains(key)) fail(line, "intent '" + key + "' defined twice");
        lexicons[key] = as_list(value, key, line);
        break;
      case Section::IntentModel:
        if (key == "backend") model_backend = as_string(value, key, line);
        else if (key == "remote_url") model_url = as_string(value, key, line);
        else fail(line, "unknown intent_model key '" + key + "'");
        break;
      case Section::Rule: {
        SopRule& r = rules.back();
        if (key == "id") r.rule_id = as_string(value, key, line);
        else if (key == "name") r.name = as_string(value, key, line);
        else if (key == "window") {
          if (!std::holds_alternative<std::int64_t>(value) || std::get<std::int64_t>(value) < 1) {
            fail(line, "window must be a positive integer");
          }
          r.window = static_cast<std::size_t>(std::get<std::int64_t>(value));
        } else if (key == "trigger") r.trigger.kind = parse_kind(as_string(value, key, line), line);
        else if (key == "trigger_intent") r.trigger.intent = as_string(value, key, line);
        else if (key == "trigger_keywords") r.trigger.keywords = as_list(value, key, line);
        else if (key == "spotlight") r.spotlight.kind = parse_kind(as_string(value, key, line), line);
        else if (key == "spotlight_intent") r.spotlight.intent = as_string(value, key, line);
        else if (key == "spotlight_keywords") r.spotlight.keywords = as_list(value, key, line);
        else fail(line, "unknown rule key '" + key + "'");
        break;
      }
    }
  }

  if (!saw_version) throw ConfigError("rules file must start with 'version = 1'");

  RuleSet set;
  set.rules = std::move(rules);
  if (model_backend == "lexicon") {
    set.model = IntentModel(std::move(lexicons));
  } else if (model_backend == "remote") {
    if (model_url.empty()) throw ConfigError("intent_model backend 'remote' requires remote_url");
    std::set<std::string> vocabulary;
    for (const auto& [label, keywords] : lexicons) vocabulary.insert(label);
    set.model = IntentModel(std::move(vocabulary), model_url);
  } else {
    throw ConfigError("unknown intent_model backend '" + model_backend + "'");
  }
  set.validate();
  return set;
}

RuleSet load_rule_set(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open rules file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_rule_set(ss.str());
}

void RuleSet::validate() const {
  std::set<std::string> ids;
  for (const SopRule& r : rules) {
    if (r.rule_id.empty()) throw ConfigError("every rule needs an id");
    if (!ids.insert(r.rule_id).second) throw ConfigError("duplicate rule id '" + r.rule_id + "'");
    if (r.window < 1) throw ConfigError("rule '" + r.rule_id + "': window must be >= 1");
    auto check = [&](const TriggerSpec& spec, const char* what) {
      if (spec.kind == MatchKind::IntentLabel) {
        if (!spec.intent) throw ConfigError("rule '" + r.rule_id + "': " + what + " intent missing");
        if (!model.vocabulary().contains(*spec.intent)) {
          throw ConfigError("rule '" + r.rule_id + "': unknown intent '" + *spec.intent + "'");
        }
      }
      if (spec.kind == MatchKind::KeywordAny && spec.keywords.empty()) {
        throw ConfigError("rule '" + r.rule_id + "': " + what + " keywords missing");
      }
    };
    check(r.trigger, "trigger");
    check(r.spotlight, "spotlight");
    if (r.spotlight.kind == MatchKind::DialogStart) {
      throw ConfigError("rule '" + r.rule_id + "': dialog_start is not a valid spotlight");
    }
  }
}

}  // namespace salesmine
