#include "salesmine/documents.hpp"

#include <ctime>

namespace salesmine {

using nlohmann::json;

namespace {

Instant parse_instant(const std::string& s) {
  std::tm tm{};
  if (s.empty()) return Instant{};
  if (strptime(s.c_str(), "%Y-%m-%dT%H:%M:%SZ", &tm) == nullptr) {
    throw Error("bad instant '" + s + "'");
  }
  return Instant{std::chrono::seconds{timegm(&tm)}};
}

Speaker speaker_from(const std::string& s) {
  if (s == "customer") return Speaker::Customer;
  if (s == "sales") return Speaker::Sales;
  throw Error("bad speaker '" + s + "' in document");
}

}  // namespace

json to_json(const Utterance& u) {
  return {{"turn_index", u.turn_index},
          {"speaker", to_string(u.speaker)},
          {"staff_id", u.staff_id},
          {"team_id", u.team_id},
          {"timestamp", u.timestamp ? json(*u.timestamp) : json(nullptr)},
          {"text", u.text}};
}

json to_json(const Chatlog& c) {
  json dialogs = json::array();
  for (const Dialog& d : c.dialogs) {
    json utts = json::array();
    for (const Utterance& u : d.utterances) utts.push_back(to_json(u));
    dialogs.push_back({{"dialog_id", d.dialog_id}, {"utterances", std::move(utts)}});
  }
  return {{"source_file", c.source_file}, {"ingested_at", format_instant(c.ingested_at)}, {"dialogs", std::move(dialogs)}};
}

Chatlog chatlog_from_json(const json& j) {
  try {
    Chatlog c;
    c.source_file = j.at("source_file").get<std::string>();
    c.ingested_at = parse_instant(j.at("ingested_at").get<std::string>());
    for (const json& dj : j.at("dialogs")) {
      Dialog d;
      d.dialog_id = dj.at("dialog_id").get<std::string>();
      for (const json& uj : dj.at("utterances")) {
        Utterance u;
        u.dialog_id = d.dialog_id;
        u.turn_index = uj.at("turn_index").get<std::size_t>();
        u.speaker = speaker_from(uj.at("speaker").get<std::string>());
        u.staff_id = uj.at("staff_id").get<std::string>();
        u.team_id = uj.at("team_id").get<std::string>();
        if (!uj.at("timestamp").is_null()) u.timestamp = uj.at("timestamp").get<std::string>();
        u.text = uj.at("text").get<std::string>();
        d.utterances.push_back(std::move(u));
      }
      c.dialogs.push_back(std::move(d));
    }
    return c;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed chatlog document: ") + e.what());
  }
}

json to_json(const ChatlogStats& s) {
  return {{"dialogs", s.dialogs},
          {"utterances", s.utterances},
          {"per_speaker", {{"customer", s.customer_utterances}, {"sales", s.sales_utterances}}},
          {"distinct_staff", s.distinct_staff},
          {"distinct_teams", s.distinct_teams}};
}

json to_json(const QAPair& p) {
  return {{"question", p.question},
          {"answer", p.answer},
          {"score", p.score},
          {"dialog_id", p.dialog_id},
          {"question_index", p.question_index},
          {"answer_index", p.answer_index}};
}

json to_json(std::span<const QAPair> pairs) {
  json arr = json::array();
  for (const QAPair& p : pairs) arr.push_back(to_json(p));
  return arr;
}

std::vector<QAPair> qa_pairs_from_json(const json& j) {
  try {
    std::vector<QAPair> out;
    for (const json& pj : j) {
      out.push_back(QAPair{pj.at("question").get<std::string>(), pj.at("answer").get<std::string>(),
                           pj.at("score").get<double>(), pj.at("dialog_id").get<std::string>(),
                           pj.at("question_index").get<std::size_t>(), pj.at("answer_index").get<std::size_t>()});
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed QA document: ") + e.what());
  }
}

json to_json(const Cluster& c) {
  json members = json::array();
  for (const ClusterMember& m : c.members) {
    json responses = json::array();
    for (const UtteranceRef& r : m.responses) {
      responses.push_back({{"dialog_id", r.dialog_id}, {"turn_index", r.turn_index}, {"text", r.text}});
    }
    members.push_back({{"dialog_id", m.dialog_id},
                       {"turn_index", m.turn_index},
                       {"text", m.text},
                       {"anchor_relevance", m.anchor_relevance},
                       {"responses", std::move(responses)}});
  }
  return {{"cluster_id", c.cluster_id},
          {"anchor_text", c.anchor_text},
          {"frequency", c.frequency},
          {"mean_relevance", c.mean_relevance},
          {"keywords", c.keywords},
          {"members", std::move(members)}};
}

json to_json(std::span<const Cluster> clusters) {
  json arr = json::array();
  for (const Cluster& c : clusters) arr.push_back(to_json(c));
  return arr;
}

std::vector<Cluster> clusters_from_json(const json& j) {
  if (!j.is_array()) throw Error("objection document must be a JSON array of clusters");
  try {
    std::vector<Cluster> out;
    for (const json& cj : j) {
      Cluster c;
      c.cluster_id = cj.at("cluster_id").get<std::size_t>();
      c.anchor_text = cj.at("anchor_text").get<std::string>();
      c.frequency = cj.at("frequency").get<std::size_t>();
      c.mean_relevance = cj.at("mean_relevance").get<double>();
      c.keywords = cj.at("keywords").get<std::vector<std::string>>();
      for (const json& mj : cj.at("members")) {
        ClusterMember m;
        m.dialog_id = mj.at("dialog_id").get<std::string>();
        m.turn_index = mj.at("turn_index").get<std::size_t>();
        m.text = mj.at("text").get<std::string>();
        m.anchor_relevance = mj.at("anchor_relevance").get<double>();
        for (const json& rj : mj.at("responses")) {
          m.responses.push_back(
              {rj.at("dialog_id").get<std::string>(), rj.at("turn_index").get<std::size_t>(), rj.at("text").get<std::string>()});
        }
        c.members.push_back(std::move(m));
      }
      out.push_back(std::move(c));
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed objection document: ") + e.what());
  }
}

json to_json(const SopExecution& e) {
  return {{"rule_id", e.rule_id},
          {"dialog_id", e.dialog_id},
          {"trigger_index", e.trigger_index},
          {"executed", e.executed},
          {"spotlight_index", e.spotlight_index ? json(*e.spotlight_index) : json(nullptr)},
          {"staff_id", e.staff_id},
          {"team_id", e.team_id}};
}

json to_json(const DashboardStats& s) {
  json rows = json::array();
  for (const DashboardRow& r : s.rows) {
    rows.push_back({{"key", r.key}, {"triggered", r.triggered}, {"executed", r.executed}, {"ratio", r.ratio}});
  }
  return rows;
}

json to_json(const SearchIndex& index, std::span<const SearchHit> hits) {
  json arr = json::array();
  for (const SearchHit& h : hits) {
    const IndexEntry& e = index.entry(h.entry_id);
    arr.push_back({{"entry_id", e.entry_id},
                   {"response_text", e.response_text},
                   {"customer_query_text", e.customer_query_text},
                   {"cluster_id", e.cluster_id},
                   {"score", h.score}});
  }
  return arr;
}

std::string render_document(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace salesmine
