#include "salesmine/task_service.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <condition_variable>
#include <deque>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "salesmine/documents.hpp"
#include "salesmine/pipelines.hpp"

namespace salesmine {

using nlohmann::json;

namespace {

std::string new_task_id(TaskTime now) {
  std::string stamp;
  for (char c : format_task_time(now)) {
    if (c != '-' && c != ':' && c != '.') stamp.push_back(c);
  }
  thread_local std::mt19937_64 rng{std::random_device{}()};
  char suffix[17];
  std::snprintf(suffix, sizeof suffix, "%016llx", static_cast<unsigned long long>(rng()));
  return stamp + "-" + std::string(suffix, 8);
}

bool plausible_id(std::string_view id) {
  return !id.empty() && id.size() <= 128 &&
         std::all_of(id.begin(), id.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '-'; });
}

bool task_newer(const Task& a, const Task& b) {
  if (a.created_at != b.created_at) return a.created_at > b.created_at;
  return a.task_id > b.task_id;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(render_document(body), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view error, std::string_view message) {
  send_json(res, status, {{"error", error}, {"message", message}});
}

}  // namespace

struct TaskService::Impl {
  TaskService& self;
  TaskServiceOptions options;

  mutable std::mutex mu;
  std::condition_variable queue_cv;
  mutable std::condition_variable idle_cv;
  std::map<std::string, Task> tasks;
  std::deque<std::string> queue;
  std::size_t active = 0;
  bool stopping = false;
  std::vector<std::thread> workers;

  std::mutex index_mu;
  std::map<std::string, std::shared_ptr<const SearchIndex>> indices;

  httplib::Server server;

  Impl(TaskService& s, TaskServiceOptions o) : self(s), options(std::move(o)) {}

  void recover() {
    std::vector<Task> loaded = self.store_.load_tasks();
    std::sort(loaded.begin(), loaded.end(), [](const Task& a, const Task& b) { return task_newer(b, a); });
    for (Task& t : loaded) {
      if (t.status == TaskStatus::Running) {
        t.status = TaskStatus::Failed;
        t.error_message = "interrupted";
        t.finished_at = task_clock_now();
        t.result_ref.reset();
        self.store_.put_task(t);
      } else if (t.status == TaskStatus::Pending) {
        queue.push_back(t.task_id);
      }
      tasks.emplace(t.task_id, std::move(t));
    }
  }

  void worker_loop() {
    for (;;) {
      Task running;
      {
        std::unique_lock lock(mu);
        queue_cv.wait(lock, [&] { return stopping || !queue.empty(); });
        if (stopping) return;
        const std::string id = queue.front();
        queue.pop_front();
        Task& t = tasks.at(id);
        t.status = TaskStatus::Running;
        running = t;
        ++active;
      }
      self.store_.put_task(running);
      if (options.on_task_running) options.on_task_running(running);
      execute(running);
    }
  }

  void execute(Task task) {
    try {
      const Chatlog chatlog = self.store_.load_upload(task.file_id);
      const PipelineConfig config = pipeline_config_from_json(task.config_snapshot);
      const std::string document = render_document(run_task(task.kind, chatlog, config));
      task.result_ref = self.store_.put_result(task.task_id, document);
      task.status = TaskStatus::Succeeded;
    } catch (const std::exception& e) {
      task.status = TaskStatus::Failed;
      task.error_message = e.what();
      task.result_ref.reset();
    }
    task.finished_at = task_clock_now();
    self.store_.put_task(task);
    {
      std::lock_guard lock(mu);
      tasks[task.task_id] = task;
      --active;
    }
    idle_cv.notify_all();
  }

  void install_routes();
};

TaskService::TaskService(ServiceConfig config, TaskServiceOptions options)
    : config_(std::move(config)), store_(config_.data_dir), impl_(std::make_unique<Impl>(*this, std::move(options))) {
  config_.pipeline.scorer.validate();
  impl_->recover();
  impl_->install_routes();
  for (std::size_t i = 0; i < config_.workers; ++i) {
    impl_->workers.emplace_back([this] { impl_->worker_loop(); });
  }
}

TaskService::~TaskService() {
  impl_->server.stop();
  {
    std::lock_guard lock(impl_->mu);
    impl_->stopping = true;
  }
  impl_->queue_cv.notify_all();
  for (auto& w : impl_->workers) w.join();
}

std::string TaskService::upload_chatlog(std::string_view csv_bytes) {
  const Chatlog chatlog = parse_chatlog(csv_bytes, "upload");
  return store_.put_upload(csv_bytes, chatlog);
}

std::string TaskService::start_task(TaskKind kind, const std::string& file_id, const json& overrides) {
  if (!store_.has_upload(file_id)) throw NotFound("unknown file_id " + file_id);
  const PipelineConfig effective = apply_overrides(config_.pipeline, overrides);

  Task t;
  t.created_at = task_clock_now();
  t.task_id = new_task_id(t.created_at);
  t.kind = kind;
  t.file_id = file_id;
  t.config_snapshot = to_json(effective);
  t.status = TaskStatus::Pending;
  store_.put_task(t);
  {
    std::lock_guard lock(impl_->mu);
    impl_->tasks.emplace(t.task_id, t);
    impl_->queue.push_back(t.task_id);
  }
  impl_->queue_cv.notify_one();
  return t.task_id;
}

std::vector<Task> TaskService::list_tasks() const {
  std::vector<Task> out;
  {
    std::lock_guard lock(impl_->mu);
    for (const auto& [id, t] : impl_->tasks) out.push_back(t);
  }
  std::sort(out.begin(), out.end(), task_newer);
  return out;
}

std::optional<Task> TaskService::get_task(const std::string& task_id) const {
  std::lock_guard lock(impl_->mu);
  auto it = impl_->tasks.find(task_id);
  if (it == impl_->tasks.end()) return std::nullopt;
  return it->second;
}

std::string TaskService::get_result(const std::string& task_id) const {
  const auto task = get_task(task_id);
  if (!task) throw NotFound("unknown task " + task_id);
  if (task->status != TaskStatus::Succeeded) {
    throw Conflict("task " + task_id + " is " + std::string(to_string(task->status)));
  }
  auto doc = store_.read_result(task_id);
  if (!doc) throw NotFound("result document missing for task " + task_id);
  return std::move(*doc);
}

json TaskService::search(const std::string& task_id, std::string_view query, std::size_t k) {
  const auto task = get_task(task_id);
  if (!task) throw NotFound("unknown task " + task_id);
  if (task->kind != TaskKind::ObjectionMining) throw ConfigError("task " + task_id + " is not an objection_mining task");
  if (task->status != TaskStatus::Succeeded) {
    throw Conflict("task " + task_id + " is " + std::string(to_string(task->status)));
  }
  const PipelineConfig config = pipeline_config_from_json(task->config_snapshot);
  const auto scorer = make_scorer(config.scorer);

  std::shared_ptr<const SearchIndex> index;
  {
    std::lock_guard lock(impl_->index_mu);
    auto& slot = impl_->indices[task_id];
    if (!slot) slot = std::make_shared<const SearchIndex>(index_from_document(json::parse(get_result(task_id)), *scorer));
    index = slot;
  }
  const std::vector<SearchHit> hits = salesmine::search(*index, query, k, *scorer);
  return to_json(*index, hits);
}

bool TaskService::wait_idle(std::chrono::milliseconds timeout) const {
  std::unique_lock lock(impl_->mu);
  return impl_->idle_cv.wait_for(lock, timeout, [&] { return impl_->queue.empty() && impl_->active == 0; });
}

int TaskService::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }
bool TaskService::bind(const std::string& host, int port) { return impl_->server.bind_to_port(host, port); }
bool TaskService::listen_after_bind() { return impl_->server.listen_after_bind(); }
void TaskService::stop() { impl_->server.stop(); }
bool TaskService::is_running() const { return impl_->server.is_running(); }

void TaskService::Impl::install_routes() {
  auto& svc = self;
  server.set_payload_max_length(static_cast<std::size_t>(svc.config_.max_upload_bytes));

  if (svc.config_.cors_origin) {
    const std::string origin = *svc.config_.cors_origin;
    server.set_default_headers({{"Access-Control-Allow-Origin", origin},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  }

  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const char* kind = res.status == 413 ? "PayloadTooLarge" : res.status == 404 ? "NotFound" : "HttpError";
    send_error(res, res.status, kind, httplib::status_message(res.status));
  });

  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      send_error(res, 500, "Internal", e.what());
    } catch (...) {
      send_error(res, 500, "Internal", "unknown error");
    }
  });

  server.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ok"}});
  });

  server.Post("/api/chatlogs", [&svc](const httplib::Request& req, httplib::Response& res) {
    std::string_view body = req.body;
    std::string part;
    if (req.is_multipart_form_data()) {
      if (!req.has_file("file")) {
        send_error(res, 400, "BadRequest", "multipart upload needs a 'file' part");
        return;
      }
      part = req.get_file_value("file").content;
      body = part;
    }
    if (body.size() > svc.config_.max_upload_bytes) {
      send_error(res, 413, "PayloadTooLarge", "upload exceeds max_upload_bytes");
      return;
    }
    try {
      const std::string file_id = svc.upload_chatlog(body);
      const ChatlogStats stats = dialog_stats(svc.store_.load_upload(file_id));
      send_json(res, 200, {{"file_id", file_id}, {"stats", to_json(stats)}});
    } catch (const IngestError& e) {
      json err = {{"error", "IngestError"}, {"kind", to_string(e.kind())}, {"row", e.row()},
                  {"detail", e.detail()}, {"message", e.what()}};
      if (e.index) err["index"] = *e.index;
      send_json(res, 400, err);
    }
  });

  server.Post("/api/tasks", [&svc](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception&) {
      send_error(res, 400, "BadRequest", "request body must be JSON");
      return;
    }
    if (!body.is_object() || !body.contains("kind") || !body.at("kind").is_string() || !body.contains("file_id") ||
        !body.at("file_id").is_string()) {
      send_error(res, 400, "BadRequest", "expected {\"kind\": string, \"file_id\": string, \"config\"?: object}");
      return;
    }
    const auto kind = parse_task_kind(body.at("kind").get<std::string>());
    if (!kind) {
      send_error(res, 400, "UnknownKind", "kind must be faq_extraction, objection_mining or dashboard");
      return;
    }
    try {
      const std::string id =
          svc.start_task(*kind, body.at("file_id").get<std::string>(), body.value("config", json::object()));
      send_json(res, 202, {{"task_id", id}, {"status", "pending"}});
    } catch (const NotFound& e) {
      send_error(res, 404, "NotFound", e.what());
    } catch (const ConfigError& e) {
      send_error(res, 400, "ConfigError", e.what());
    }
  });

  server.Get("/api/tasks", [&svc](const httplib::Request&, httplib::Response& res) {
    json arr = json::array();
    for (const Task& t : svc.list_tasks()) arr.push_back(to_json(t));
    send_json(res, 200, arr);
  });

  server.Get(R"(/api/tasks/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const auto task = plausible_id(id) ? svc.get_task(id) : std::nullopt;
    if (!task) {
      send_error(res, 404, "NotFound", "unknown task " + id);
      return;
    }
    send_json(res, 200, to_json(*task));
  });

  server.Get(R"(/api/tasks/([^/]+)/result)", [&svc](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!plausible_id(id)) {
      send_error(res, 404, "NotFound", "unknown task " + id);
      return;
    }
    try {
      res.status = 200;
      res.set_content(svc.get_result(id), "application/json");
    } catch (const NotFound& e) {
      send_error(res, 404, "NotFound", e.what());
    } catch (const Conflict& e) {
      send_error(res, 409, "Conflict", e.what());
    }
  });

  server.Get("/api/search", [&svc](const httplib::Request& req, httplib::Response& res) {
    const std::string task_id = req.get_param_value("task");
    const std::string q = req.get_param_value("q");
    std::size_t k = 10;
    if (req.has_param("k")) {
      const std::string raw = req.get_param_value("k");
      auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), k);
      if (ec != std::errc() || ptr != raw.data() + raw.size() || k == 0) {
        send_error(res, 400, "BadRequest", "k must be a positive integer");
        return;
      }
    }
    if (!plausible_id(task_id)) {
      send_error(res, 404, "NotFound", "unknown task '" + task_id + "'");
      return;
    }
    try {
      send_json(res, 200, svc.search(task_id, q, k));
    } catch (const NotFound& e) {
      send_error(res, 404, "NotFound", e.what());
    } catch (const Conflict& e) {
      send_error(res, 409, "Conflict", e.what());
    } catch (const EmptyQuery& e) {
      send_error(res, 400, "EmptyQuery", e.what());
    } catch (const ConfigError& e) {
      send_error(res, 400, "BadRequest", e.what());
    }
  });
}

}  // namespace salesmine
