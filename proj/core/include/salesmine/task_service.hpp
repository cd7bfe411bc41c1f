#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "salesmine/config.hpp"
#include "salesmine/error.hpp"
#include "salesmine/search_index.hpp"
#include "salesmine/store.hpp"

namespace salesmine {

class NotFound : public Error {
 public:
  using Error::Error;
};

class Conflict : public Error {
 public:
  using Error::Error;
};

struct TaskServiceOptions {
  // Runs on the worker right after a task is persisted as Running.
  std::function<void(const Task&)> on_task_running;
};

// Task queue, persistence and HTTP front end. Thread-safe: any number of
// request handlers may call in concurrently; task records are mutated
// only under one lock and persisted by the store's single writer.
class TaskService {
 public:
  explicit TaskService(ServiceConfig config, TaskServiceOptions options = {});
  ~TaskService();

  TaskService(const TaskService&) = delete;
  TaskService& operator=(const TaskService&) = delete;

  const ServiceConfig& config() const noexcept { return config_; }
  Store& store() noexcept { return store_; }

  // Parses eagerly; throws IngestError and stores nothing on failure.
  std::string upload_chatlog(std::string_view csv_bytes);

  // Throws NotFound for an unknown file_id, ConfigError for bad overrides.
  std::string start_task(TaskKind kind, const std::string& file_id,
                         const nlohmann::json& overrides = nlohmann::json::object());

  std::vector<Task> list_tasks() const;  // created_at descending
  std::optional<Task> get_task(const std::string& task_id) const;

  // Throws NotFound / Conflict (task not Succeeded).
  std::string get_result(const std::string& task_id) const;

  // Throws NotFound, Conflict, EmptyQuery, ConfigError (not an objection task).
  nlohmann::json search(const std::string& task_id, std::string_view query, std::size_t k);

  // Blocks until no task is Pending or Running, or the timeout elapses.
  bool wait_idle(std::chrono::milliseconds timeout) const;

  // HTTP. bind_to_any_port returns the chosen port.
  int bind_to_any_port(const std::string& host);
  bool bind(const std::string& host, int port);
  bool listen_after_bind();  // blocks until stop()
  void stop();
  bool is_running() const;

 private:
  struct Impl;

  ServiceConfig config_;
  Store store_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace salesmine
