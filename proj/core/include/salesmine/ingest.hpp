#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "salesmine/error.hpp"

namespace salesmine {

enum class Speaker : std::uint8_t { Customer, Sales };

std::string_view to_string(Speaker s) noexcept;

// One chat message. turn_index is contiguous from 0 inside its dialog.
struct Utterance {
  std::string dialog_id;
  std::size_t turn_index = 0;
  Speaker speaker = Speaker::Customer;
  std::string staff_id;
  std::string team_id;
  std::optional<std::string> timestamp;
  std::string text;

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

struct Dialog {
  std::string dialog_id;
  std::vector<Utterance> utterances;

  friend bool operator==(const Dialog&, const Dialog&) = default;
};

using Instant = std::chrono::sys_seconds;

struct Chatlog {
  std::vector<Dialog> dialogs;
  std::string source_file;
  Instant ingested_at{};

  friend bool operator==(const Chatlog&, const Chatlog&) = default;
};

// Parse failure. `row` is the 1-based CSV record number with the header
// as row 1, so the first data row is row 2.
class IngestError : public Error {
 public:
  enum class Kind : std::uint8_t {
    MissingColumn,
    BadSpeaker,
    EmptyText,
    NonUtf8,
    DuplicateTurnIndex,
    BadTurnIndex,
    EmptyDialogId,
    MalformedRow,
  };

  IngestError(Kind kind, std::size_t row, std::string detail);

  Kind kind() const noexcept { return kind_; }
  std::size_t row() const noexcept { return row_; }
  // Column name for MissingColumn, dialog id for DuplicateTurnIndex.
  const std::string& detail() const noexcept { return detail_; }
  // Offending turn index for DuplicateTurnIndex.
  std::optional<std::uint64_t> index;

 private:
  Kind kind_;
  std::size_t row_;
  std::string detail_;
};

std::string_view to_string(IngestError::Kind k) noexcept;

// RFC 4180 CSV -> Chatlog. Required columns: dialog_id, speaker, text.
// Optional: turn_index, timestamp, staff_id, team_id. Header names are
// matched case-insensitively; unknown columns are ignored. Dialogs keep
// the order of their first appearance in the file.
//
// Pure: `source_file` and `ingested_at` are copied into the result so the
// same arguments always give the same Chatlog.
Chatlog parse_chatlog(std::string_view csv_bytes, std::string source_file = {},
                      Instant ingested_at = {});

// Canonical CSV rendering; parse_chatlog(to_csv(c)) reproduces c's dialogs.
std::string to_csv(const Chatlog& chatlog);

struct ChatlogStats {
  std::size_t dialogs = 0;
  std::size_t utterances = 0;
  std::size_t customer_utterances = 0;
  std::size_t sales_utterances = 0;
  std::size_t distinct_staff = 0;
  std::size_t distinct_teams = 0;

  friend bool operator==(const ChatlogStats&, const ChatlogStats&) = default;
};

// Distinct counts exclude the empty id.
ChatlogStats dialog_stats(const Chatlog& chatlog);

Instant now_instant();
std::string format_instant(Instant t);

}  // namespace salesmine
