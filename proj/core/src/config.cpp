#include "salesmine/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace salesmine {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "' in " + where);
  }
}

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& out, const std::string& where) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
    return;
  }
  T v{};
  read(j, key, v, where);
  out = std::move(v);
}

std::string resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  if (base.empty() || path.is_absolute()) return path.string();
  return (base / path).lexically_normal().string();
}

json lexicons_json(const Lexicons& l) {
  return {{"greetings", l.greetings}, {"interrogatives", l.interrogatives}, {"domain_terms", l.domain_terms}};
}

void read_lexicon(const json& j, const char* key, std::vector<std::string>& out,
                  const std::filesystem::path& base) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  const json& v = j.at(key);
  if (v.is_string()) {
    out = load_lexicon_file(resolve(base, v.get<std::string>()));
  } else if (v.is_array()) {
    read(j, key, out, "scorer.lexicons");
  } else {
    throw ConfigError(std::string("scorer.lexicons.") + key + " must be a list or a file path");
  }
}

}  // namespace

json to_json(const PipelineConfig& c) {
  json k = c.clustering.k ? json(*c.clustering.k) : json(nullptr);
  return {
      {"scorer",
       {{"backend", c.scorer.backend == ScorerBackend::Remote ? "remote" : "baseline"},
        {"remote_url", c.scorer.remote_url ? json(*c.scorer.remote_url) : json(nullptr)},
        {"per_label_threshold", c.scorer.per_label_threshold},
        {"answer_threshold", c.scorer.answer_threshold},
        {"embedding_dim", c.scorer.embedding_dim},
        {"lexicons", lexicons_json(c.scorer.lexicons)}}},
      {"qa", {{"window", c.qa.window}}},
      {"clustering", {{"k", k}, {"seed", c.clustering.seed}, {"relevance_threshold", c.clustering.relevance_threshold}}},
      {"mining",
       {{"min_support", c.mining.min_support},
        {"significance_threshold", c.mining.significance_threshold},
        {"max_phrase_len", c.mining.max_phrase_len},
        {"max_keywords", c.mining.max_keywords}}},
      {"rules_path", c.rules_path ? json(*c.rules_path) : json(nullptr)},
  };
}

PipelineConfig pipeline_config_from_json(const json& j, const std::filesystem::path& base_dir) {
  PipelineConfig c;
  reject_unknown(j, {"scorer", "qa", "clustering", "mining", "rules_path"}, "pipeline");

  if (j.contains("scorer")) {
    const json& s = j.at("scorer");
    reject_unknown(s, {"backend", "remote_url", "per_label_threshold", "answer_threshold", "embedding_dim", "lexicons"},
                   "scorer");
    std::string backend = "baseline";
    read(s, "backend", backend, "scorer");
    if (backend == "baseline") c.scorer.backend = ScorerBackend::Baseline;
    else if (backend == "remote") c.scorer.backend = ScorerBackend::Remote;
    else throw ConfigError("scorer.backend must be 'baseline' or 'remote'");
    read_optional(s, "remote_url", c.scorer.remote_url, "scorer");
    read(s, "per_label_threshold", c.scorer.per_label_threshold, "scorer");
    read(s, "answer_threshold", c.scorer.answer_threshold, "scorer");
    read(s, "embedding_dim", c.scorer.embedding_dim, "scorer");
    if (s.contains("lexicons")) {
      const json& l = s.at("lexicons");
      reject_unknown(l, {"greetings", "interrogatives", "domain_terms"}, "scorer.lexicons");
      read_lexicon(l, "greetings", c.scorer.lexicons.greetings, base_dir);
      read_lexicon(l, "interrogatives", c.scorer.lexicons.interrogatives, base_dir);
      read_lexicon(l, "domain_terms", c.scorer.lexicons.domain_terms, base_dir);
    }
  }
  if (j.contains("qa")) {
    reject_unknown(j.at("qa"), {"window"}, "qa");
    read(j.at("qa"), "window", c.qa.window, "qa");
    if (c.qa.window < 2) throw ConfigError("qa.window must be >= 2");
  }
  if (j.contains("clustering")) {
    const json& cl = j.at("clustering");
    reject_unknown(cl, {"k", "seed", "relevance_threshold"}, "clustering");
    read_optional(cl, "k", c.clustering.k, "clustering");
    read(cl, "seed", c.clustering.seed, "clustering");
    read(cl, "relevance_threshold", c.clustering.relevance_threshold, "clustering");
  }
  if (j.contains("mining")) {
    const json& m = j.at("mining");
    reject_unknown(m, {"min_support", "significance_threshold", "max_phrase_len", "max_keywords"}, "mining");
    read(m, "min_support", c.mining.min_support, "mining");
    read(m, "significance_threshold", c.mining.significance_threshold, "mining");
    read(m, "max_phrase_len", c.mining.max_phrase_len, "mining");
    read(m, "max_keywords", c.mining.max_keywords, "mining");
    c.mining.validate();
  }
  read_optional(j, "rules_path", c.rules_path, "pipeline");
  if (c.rules_path) c.rules_path = resolve(base_dir, *c.rules_path);
  c.scorer.validate();
  return c;
}

PipelineConfig apply_overrides(const PipelineConfig& base, const json& overrides) {
  if (overrides.is_null()) return base;
  if (!overrides.is_object()) throw ConfigError("config overrides must be a JSON object");
  json merged = to_json(base);
  merged.merge_patch(overrides);
  return pipeline_config_from_json(merged);
}

json to_json(const ServiceConfig& c) {
  return {{"listen", c.host + ":" + std::to_string(c.port)},
          {"data_dir", c.data_dir.string()},
          {"max_upload_bytes", c.max_upload_bytes},
          {"workers", c.workers},
          {"cors_origin", c.cors_origin ? json(*c.cors_origin) : json(nullptr)},
          {"pipeline", to_json(c.pipeline)}};
}

ServiceConfig service_config_from_json(const json& j, const std::filesystem::path& base_dir) {
  ServiceConfig c;
  reject_unknown(j, {"listen", "data_dir", "max_upload_bytes", "workers", "cors_origin", "pipeline"}, "config");
  if (j.contains("listen")) {
    std::string listen;
    read(j, "listen", listen, "config");
    const auto colon = listen.rfind(':');
    if (colon == std::string::npos) throw ConfigError("listen must be host:port");
    c.host = listen.substr(0, colon);
    try {
      c.port = std::stoi(listen.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("listen port is not a number");
    }
  }
  if (j.contains("data_dir")) {
    std::string dir;
    read(j, "data_dir", dir, "config");
    c.data_dir = resolve(base_dir, dir);
  }
  read(j, "max_upload_bytes", c.max_upload_bytes, "config");
  read(j, "workers", c.workers, "config");
  if (c.workers == 0) throw ConfigError("workers must be >= 1");
  read_optional(j, "cors_origin", c.cors_origin, "config");
  if (j.contains("pipeline")) c.pipeline = pipeline_config_from_json(j.at("pipeline"), base_dir);
  return c;
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return service_config_from_json(j, path.parent_path());
}

}  // namespace salesmine
