#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "salesmine/ingest.hpp"
#include "salesmine/pipelines.hpp"

namespace salesmine {

enum class TaskStatus : std::uint8_t { Pending, Running, Succeeded, Failed };

std::string_view to_string(TaskStatus s) noexcept;
std::optional<TaskStatus> parse_task_status(std::string_view s) noexcept;

using TaskTime = std::chrono::sys_time<std::chrono::milliseconds>;

TaskTime task_clock_now();
std::string format_task_time(TaskTime t);  // 2026-10-15T22:22:33.123Z
TaskTime parse_task_time(const std::string& s);

struct Task {
  std::string task_id;
  TaskKind kind = TaskKind::FaqExtraction;
  std::string file_id;
  nlohmann::json config_snapshot;
  TaskStatus status = TaskStatus::Pending;
  std::optional<std::string> error_message;  // iff Failed
  TaskTime created_at{};
  std::optional<TaskTime> finished_at;
  std::optional<std::string> result_ref;  // iff Succeeded; path relative to the data dir
};

nlohmann::json to_json(const Task& t);
Task task_from_json(const nlohmann::json& j);

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

// Writes `bytes` to a sibling temp file, flushes it to disk and renames it
// over `path`, so readers see either the old or the new document.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

// Directory-of-documents persistence:
//   uploads/<file_id>.csv   raw bytes as uploaded
//   uploads/<file_id>.json  parsed chatlog
//   tasks/<task_id>.json    task record
//   results/<task_id>.json  result document
// All writes go through one mutex.
class Store {
 public:
  explicit Store(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }

  // Leftover temp files from an interrupted write. Removed by the constructor.
  std::size_t removed_temp_files() const noexcept { return removed_temp_files_; }

  std::string put_upload(std::string_view csv_bytes, const Chatlog& chatlog);
  bool has_upload(const std::string& file_id) const;
  Chatlog load_upload(const std::string& file_id) const;

  void put_task(const Task& task);
  std::vector<Task> load_tasks() const;

  // Returns the path relative to root.
  std::string put_result(const std::string& task_id, std::string_view document);
  std::optional<std::string> read_result(const std::string& task_id) const;

 private:
  std::filesystem::path root_;
  std::mutex write_mu_;
  std::size_t removed_temp_files_ = 0;
};

}  // namespace salesmine
