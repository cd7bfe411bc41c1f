#include "salesmine/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <ctime>
#include <set>
#include <unordered_map>

#include "salesmine/text.hpp"

namespace salesmine {

std::string_view to_string(Speaker s) noexcept {
  return s == Speaker::Customer ? "customer" : "sales";
}

std::string_view to_string(IngestError::Kind k) noexcept {
  switch (k) {
    case IngestError::Kind::MissingColumn: return "MissingColumn";
    case IngestError::Kind::BadSpeaker: return "BadSpeaker";
    case IngestError::Kind::EmptyText: return "EmptyText";
    case IngestError::Kind::NonUtf8: return "NonUtf8";
    case IngestError::Kind::DuplicateTurnIndex: return "DuplicateTurnIndex";
    case IngestError::Kind::BadTurnIndex: return "BadTurnIndex";
    case IngestError::Kind::EmptyDialogId: return "EmptyDialogId";
    case IngestError::Kind::MalformedRow: return "MalformedRow";
  }
  return "Unknown";
}

IngestError::IngestError(Kind kind, std::size_t row, std::string detail)
    : Error(std::string(to_string(kind)) + " at row " + std::to_string(row) +
            (detail.empty() ? std::string() : ": " + detail)),
      kind_(kind),
      row_(row),
      detail_(std::move(detail)) {}

namespace {

struct Record {
  std::size_t row = 0;
  std::vector<std::string> fields;
  bool blank = false;
};

// RFC 4180 reader. Accepts LF, CRLF or lone CR as record terminators.
std::vector<Record> read_records(std::string_view in) {
  if (in.substr(0, 3) == "\xEF\xBB\xBF") in.remove_prefix(3);

  std::vector<Record> records;
  Record rec;
  std::string field;
  bool field_quoted = false;
  std::size_t row = 1;
  std::size_t i = 0;

  auto end_field = [&] {
    rec.fields.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    end_field();
    rec.row = row++;
    rec.blank = rec.fields.size() == 1 && rec.fields[0].empty() && !field_quoted;
    records.push_back(std::move(rec));
    rec = Record{};
    field_quoted = false;
  };

  while (i < in.size()) {
    const char c = in[i];
    if (c == '"' && field.empty() && !field_quoted) {
      field_quoted = true;
      ++i;
      bool closed = false;
      while (i < in.size()) {
        if (in[i] == '"') {
          if (i + 1 < in.size() && in[i + 1] == '"') {
            field.push_back('"');
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        field.push_back(in[i++]);
      }
      if (!closed) {
        throw IngestError(IngestError::Kind::MalformedRow, row, "unterminated quoted field");
      }
      if (i < in.size() && in[i] != ',' && in[i] != '\n' && in[i] != '\r') {
        throw IngestError(IngestError::Kind::MalformedRow, row,
                          "unexpected character after closing quote");
      }
      continue;
    }
    if (c == ',') {
      end_field();
      field_quoted = false;
      ++i;
    } else if (c == '\r' || c == '\n') {
      end_record();
      if (c == '\r' && i + 1 < in.size() && in[i + 1] == '\n') ++i;
      ++i;
    } else if (c == '"' ) {
      throw IngestError(IngestError::Kind::MalformedRow, row, "quote inside unquoted field");
    } else {
      field.push_back(c);
      ++i;
    }
  }
  if (!field.empty() || !rec.fields.empty() || field_quoted) end_record();
  return records;
}

std::string lower_trim(std::string_view s) { return text::normalize_for_match(s); }

struct Columns {
  std::optional<std::size_t> dialog_id, speaker, text, turn_index, timestamp, staff_id, team_id;
};

struct PendingRow {
  std::uint64_t order_key;
  std::size_t row;
  Utterance utt;
};

}  // namespace

Chatlog parse_chatlog(std::string_view csv_bytes, std::string source_file, Instant ingested_at) {
  Chatlog out;
  out.source_file = std::move(source_file);
  out.ingested_at = ingested_at;

  std::vector<Record> records = read_records(csv_bytes);
  if (records.empty()) {
    throw IngestError(IngestError::Kind::MissingColumn, 1, "dialog_id");
  }

  for (const Record& r : records) {
    for (const std::string& f : r.fields) {
      if (!text::is_valid_utf8(f)) throw IngestError(IngestError::Kind::NonUtf8, r.row, {});
    }
  }

  const Record& header = records.front();
  Columns cols;
  for (std::size_t i = 0; i < header.fields.size(); ++i) {
    const std::string name = lower_trim(header.fields[i]);
    std::optional<std::size_t>* slot = nullptr;
    if (name == "dialog_id") slot = &cols.dialog_id;
    else if (name == "speaker") slot = &cols.speaker;
    else if (name == "text") slot = &cols.text;
    else if (name == "turn_index") slot = &cols.turn_index;
    else if (name == "timestamp") slot = &cols.timestamp;
    else if (name == "staff_id") slot = &cols.staff_id;
    else if (name == "team_id") slot = &cols.team_id;
    if (slot != nullptr && !slot->has_value()) *slot = i;
  }
  for (auto [slot, name] : std::array<std::pair<std::optional<std::size_t>*, const char*>, 3>{
           {{&cols.dialog_id, "dialog_id"}, {&cols.speaker, "speaker"}, {&cols.text, "text"}}}) {
    if (!slot->has_value()) throw IngestError(IngestError::Kind::MissingColumn, header.row, name);
  }

  std::vector<std::vector<PendingRow>> grouped;
  std::unordered_map<std::string, std::size_t> dialog_slot;

  for (std::size_t r = 1; r < records.size(); ++r) {
    const Record& rec = records[r];
    if (rec.blank) continue;
    if (rec.fields.size() != header.fields.size()) {
      throw IngestError(IngestError::Kind::MalformedRow, rec.row,
                        "expected " + std::to_string(header.fields.size()) + " fields, got " +
                            std::to_string(rec.fields.size()));
    }
    auto field = [&](const std::optional<std::size_t>& col) -> std::string_view {
      return col ? std::string_view(rec.fields[*col]) : std::string_view();
    };

    Utterance u;
    u.dialog_id = text::collapse_whitespace(field(cols.dialog_id));
    if (u.dialog_id.empty()) throw IngestError(IngestError::Kind::EmptyDialogId, rec.row, {});

    const std::string speaker = lower_trim(field(cols.speaker));
    if (speaker == "customer" || speaker == "c") {
      u.speaker = Speaker::Customer;
    } else if (speaker == "sales" || speaker == "s") {
      u.speaker = Speaker::Sales;
    } else {
      throw IngestError(IngestError::Kind::BadSpeaker, rec.row, speaker);
    }

    u.text = text::collapse_whitespace(field(cols.text));
    if (u.text.empty()) throw IngestError(IngestError::Kind::EmptyText, rec.row, {});

    u.staff_id = text::collapse_whitespace(field(cols.staff_id));
    u.team_id = text::collapse_whitespace(field(cols.team_id));
    if (std::string ts = text::collapse_whitespace(field(cols.timestamp)); !ts.empty()) {
      u.timestamp = std::move(ts);
    }

    auto [it, inserted] = dialog_slot.try_emplace(u.dialog_id, grouped.size());
    if (inserted) grouped.emplace_back();
    auto& bucket = grouped[it->second];

    std::uint64_t order_key = bucket.size();
    if (cols.turn_index) {
      const std::string raw = text::collapse_whitespace(field(cols.turn_index));
      const char* first = raw.data();
      const char* last = raw.data() + raw.size();
      auto [ptr, ec] = std::from_chars(first, last, order_key);
      if (raw.empty() || ec != std::errc() || ptr != last) {
        throw IngestError(IngestError::Kind::BadTurnIndex, rec.row, raw);
      }
    }
    bucket.push_back(PendingRow{order_key, rec.row, std::move(u)});
  }

  out.dialogs.reserve(grouped.size());
  for (auto& bucket : grouped) {
    std::stable_sort(bucket.begin(), bucket.end(),
                     [](const PendingRow& a, const PendingRow& b) { return a.order_key < b.order_key; });
    for (std::size_t i = 1; i < bucket.size(); ++i) {
      if (bucket[i].order_key == bucket[i - 1].order_key) {
        IngestError err(IngestError::Kind::DuplicateTurnIndex,
                        std::max(bucket[i].row, bucket[i - 1].row), bucket[i].utt.dialog_id);
        err.index = bucket[i].order_key;
        throw err;
      }
    }
    Dialog d;
    d.dialog_id = bucket.front().utt.dialog_id;
    d.utterances.reserve(bucket.size());
    for (std::size_t i = 0; i < bucket.size(); ++i) {
      bucket[i].utt.turn_index = i;
      d.utterances.push_back(std::move(bucket[i].utt));
    }
    out.dialogs.push_back(std::move(d));
  }
  return out;
}

namespace {
void append_csv_field(std::string& out, std::string_view f) {
  const bool needs_quotes = f.find_first_of(",\"\r\n") != std::string_view::npos ||
                            (!f.empty() && (f.front() == ' ' || f.back() == ' '));
  if (!needs_quotes) {
    out += f;
    return;
  }
  out.push_back('"');
  for (char c : f) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}
}  // namespace

std::string to_csv(const Chatlog& chatlog) {
  std::string out = "dialog_id,turn_index,speaker,staff_id,team_id,timestamp,text\r\n";
  for (const Dialog& d : chatlog.dialogs) {
    for (const Utterance& u : d.utterances) {
      append_csv_field(out, u.dialog_id);
      out += ',';
      out += std::to_string(u.turn_index);
      out += ',';
      out += to_string(u.speaker);
      out += ',';
      append_csv_field(out, u.staff_id);
      out += ',';
      append_csv_field(out, u.team_id);
      out += ',';
      append_csv_field(out, u.timestamp.value_or(""));
      out += ',';
      append_csv_field(out, u.text);
      out += "\r\n";
    }
  }
  return out;
}

ChatlogStats dialog_stats(const Chatlog& chatlog) {
  ChatlogStats s;
  std::set<std::string_view> staff;
  std::set<std::string_view> teams;
  s.dialogs = chatlog.dialogs.size();
  for (const Dialog& d : chatlog.dialogs) {
    for (const Utterance& u : d.utterances) {
      ++s.utterances;
      if (u.speaker == Speaker::Customer) ++s.customer_utterances;
      else ++s.sales_utterances;
      if (!u.staff_id.empty()) staff.insert(u.staff_id);
      if (!u.team_id.empty()) teams.insert(u.team_id);
    }
  }
  s.distinct_staff = staff.size();
  s.distinct_teams = teams.size();
  return s;
}

Instant now_instant() {
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

std::string format_instant(Instant t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace salesmine
