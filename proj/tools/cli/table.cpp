#include "cli/table.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <vector>

#include "salesmine/text.hpp"

namespace salesmine::cli {
namespace {

using Row = std::vector<std::string>;

// Display width: CJK codepoints take two columns.
std::size_t width(const std::string& s) {
  std::size_t w = 0;
  for (char32_t cp : text::decode_utf8(s)) w += text::is_cjk(cp) ? 2 : 1;
  return w;
}

std::string clip(const std::string& s, std::size_t max_width) {
  if (width(s) <= max_width) return s;
  std::string out;
  std::size_t w = 0;
  for (char32_t cp : text::decode_utf8(s)) {
    const std::size_t cw = text::is_cjk(cp) ? 2 : 1;
    if (w + cw > max_width - 3) break;
    text::append_utf8(out, cp);
    w += cw;
  }
  return out + "...";
}

std::string render(const Row& header, const std::vector<Row>& rows, std::size_t max_col = 60) {
  std::vector<std::size_t> widths(header.size(), 0);
  auto measure = [&](const Row& r) {
    for (std::size_t i = 0; i < r.size(); ++i) widths[i] = std::max(widths[i], width(clip(r[i], max_col)));
  };
  measure(header);
  for (const Row& r : rows) measure(r);

  std::ostringstream out;
  auto line = [&](const Row& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      const std::string cell = clip(r[i], max_col);
      out << cell;
      if (i + 1 < r.size()) out << std::string(widths[i] - width(cell) + 2, ' ');
    }
    out << '\n';
  };
  line(header);
  Row rule;
  for (std::size_t w : widths) rule.push_back(std::string(w, '-'));
  line(rule);
  for (const Row& r : rows) line(r);
  return out.str();
}

std::string fixed(double v, int digits = 2) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string join(const nlohmann::json& arr) {
  std::string out;
  for (const auto& s : arr) {
    if (!out.empty()) out += ", ";
    out += s.get<std::string>();
  }
  return out;
}

}  // namespace

std::string faq_table(const nlohmann::json& pairs) {
  std::vector<Row> rows;
  for (const auto& p : pairs) {
    rows.push_back({fixed(p.at("score").get<double>()), p.at("dialog_id").get<std::string>(),
                    p.at("question").get<std::string>(), p.at("answer").get<std::string>()});
  }
  return render({"score", "dialog", "question", "answer"}, rows);
}

std::string clusters_table(const nlohmann::json& clusters) {
  std::vector<Row> rows;
  for (const auto& c : clusters) {
    std::size_t responses = 0;
    for (const auto& m : c.at("members")) responses += m.at("responses").size();
    rows.push_back({std::to_string(c.at("cluster_id").get<std::size_t>()),
                    std::to_string(c.at("frequency").get<std::size_t>()), fixed(c.at("mean_relevance").get<double>()),
                    std::to_string(responses), c.at("anchor_text").get<std::string>(), join(c.at("keywords"))});
  }
  return render({"cluster", "freq", "relevance", "responses", "anchor", "keywords"}, rows);
}

std::string dashboard_table(const nlohmann::json& dashboard) {
  std::ostringstream out;
  for (const auto& [view, rows_json] : dashboard.at("views").items()) {
    std::vector<Row> rows;
    for (const auto& r : rows_json) {
      rows.push_back({r.at("key").get<std::string>(), std::to_string(r.at("triggered").get<std::uint64_t>()),
                      std::to_string(r.at("executed").get<std::uint64_t>()), fixed(r.at("ratio").get<double>())});
    }
    out << "[" << view << " view]\n" << render({view, "triggered", "executed", "ratio"}, rows) << '\n';
  }
  return out.str();
}

std::string hits_table(const nlohmann::json& hits) {
  std::vector<Row> rows;
  for (const auto& h : hits) {
    rows.push_back({fixed(h.at("score").get<double>()), std::to_string(h.at("cluster_id").get<std::size_t>()),
                    h.at("customer_query_text").get<std::string>(), h.at("response_text").get<std::string>()});
  }
  return render({"score", "cluster", "customer query", "sales response"}, rows);
}

std::string stats_table(const nlohmann::json& s) {
  std::vector<Row> rows = {
      {"dialogs", std::to_string(s.at("dialogs").get<std::size_t>())},
      {"utterances", std::to_string(s.at("utterances").get<std::size_t>())},
      {"customer", std::to_string(s.at("per_speaker").at("customer").get<std::size_t>())},
      {"sales", std::to_string(s.at("per_speaker").at("sales").get<std::size_t>())},
      {"distinct staff", std::to_string(s.at("distinct_staff").get<std::size_t>())},
      {"distinct teams", std::to_string(s.at("distinct_teams").get<std::size_t>())},
  };
  return render({"metric", "value"}, rows);
}

}  // namespace salesmine::cli
