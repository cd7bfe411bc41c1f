#include "salesmine/store.hpp"

#include <fcntl.h>
#include <openssl/evp.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

#include "salesmine/documents.hpp"

namespace salesmine {

namespace fs = std::filesystem;

std::string_view to_string(TaskStatus s) noexcept {
  switch (s) {
    case TaskStatus::Pending: return "pending";
    case TaskStatus::Running: return "running";
    case TaskStatus::Succeeded: return "succeeded";
    case TaskStatus::Failed: return "failed";
  }
  return "unknown";
}

std::optional<TaskStatus> parse_task_status(std::string_view s) noexcept {
  if (s == "pending") return TaskStatus::Pending;
  if (s == "running") return TaskStatus::Running;
  if (s == "succeeded") return TaskStatus::Succeeded;
  if (s == "failed") return TaskStatus::Failed;
  return std::nullopt;
}

TaskTime task_clock_now() {
  return std::chrono::floor<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

std::string format_task_time(TaskTime t) {
  const auto secs = std::chrono::floor<std::chrono::seconds>(t);
  const auto ms = (t - secs).count();
  const std::time_t tt = std::chrono::system_clock::to_time_t(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[40];
  const std::size_t n = std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  std::snprintf(buf + n, sizeof buf - n, ".%03dZ", static_cast<int>(ms));
  return buf;
}

TaskTime parse_task_time(const std::string& s) {
  std::tm tm{};
  const char* rest = strptime(s.c_str(), "%Y-%m-%dT%H:%M:%S", &tm);
  if (rest == nullptr) throw Error("bad task time '" + s + "'");
  int ms = 0;
  if (*rest == '.') ms = std::atoi(rest + 1);
  return TaskTime{std::chrono::seconds{timegm(&tm)} + std::chrono::milliseconds{ms}};
}

nlohmann::json to_json(const Task& t) {
  using nlohmann::json;
  return {{"task_id", t.task_id},
          {"kind", to_string(t.kind)},
          {"file_id", t.file_id},
          {"config_snapshot", t.config_snapshot},
          {"status", to_string(t.status)},
          {"error_message", t.error_message ? json(*t.error_message) : json(nullptr)},
          {"created_at", format_task_time(t.created_at)},
          {"finished_at", t.finished_at ? json(format_task_time(*t.finished_at)) : json(nullptr)},
          {"result_ref", t.result_ref ? json(*t.result_ref) : json(nullptr)}};
}

Task task_from_json(const nlohmann::json& j) {
  try {
    Task t;
    t.task_id = j.at("task_id").get<std::string>();
    const auto kind = parse_task_kind(j.at("kind").get<std::string>());
    const auto status = parse_task_status(j.at("status").get<std::string>());
    if (!kind || !status) throw Error("bad task kind or status");
    t.kind = *kind;
    t.status = *status;
    t.file_id = j.at("file_id").get<std::string>();
    t.config_snapshot = j.at("config_snapshot");
    if (!j.at("error_message").is_null()) t.error_message = j.at("error_message").get<std::string>();
    t.created_at = parse_task_time(j.at("created_at").get<std::string>());
    if (!j.at("finished_at").is_null()) t.finished_at = parse_task_time(j.at("finished_at").get<std::string>());
    if (!j.at("result_ref").is_null()) t.result_ref = j.at("result_ref").get<std::string>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed task record: ") + e.what());
  }
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

namespace {

constexpr std::string_view kTempMarker = ".tmp-";

[[noreturn]] void throw_errno(const std::string& what) {
  throw std::system_error(errno, std::generic_category(), what);
}

std::string temp_suffix() {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  std::ostringstream ss;
  ss << std::hex << rng();
  return ss.str();
}

}  // namespace

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  const fs::path tmp = path.string() + std::string(kTempMarker) + temp_suffix();
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw_errno("open " + tmp.string());
  std::size_t written = 0;
  while (written < bytes.size()) {
    const ssize_t n = ::write(fd, bytes.data() + written, bytes.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      ::unlink(tmp.c_str());
      throw_errno("write " + tmp.string());
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0 || ::close(fd) != 0) {
    ::unlink(tmp.c_str());
    throw_errno("sync " + tmp.string());
  }
  if (::rename(tmp.c_str(), path.c_str()) != 0) {
    ::unlink(tmp.c_str());
    throw_errno("rename " + tmp.string());
  }
  // Persist the directory entry too.
  const int dir = ::open(path.parent_path().c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (dir >= 0) {
    ::fsync(dir);
    ::close(dir);
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Store::Store(fs::path root) : root_(std::move(root)) {
  for (const char* sub : {"uploads", "tasks", "results"}) {
    fs::create_directories(root_ / sub);
    for (const auto& entry : fs::directory_iterator(root_ / sub)) {
      if (entry.path().filename().string().find(kTempMarker) != std::string::npos) {
        fs::remove(entry.path());
        ++removed_temp_files_;
      }
    }
  }
}

std::string Store::put_upload(std::string_view csv_bytes, const Chatlog& chatlog) {
  const std::string file_id = sha256_hex(csv_bytes);
  std::lock_guard lock(write_mu_);
  // JSON first: has_upload keys on it, so a crash between the two writes
  // leaves an orphan CSV rather than a half-registered upload.
  const fs::path json_path = root_ / "uploads" / (file_id + ".json");
  if (!fs::exists(json_path)) {
    write_file_atomic(root_ / "uploads" / (file_id + ".csv"), csv_bytes);
    write_file_atomic(json_path, render_document(to_json(chatlog)));
  }
  return file_id;
}

bool Store::has_upload(const std::string& file_id) const {
  if (file_id.empty() || file_id.find_first_not_of("0123456789abcdef") != std::string::npos) return false;
  return fs::exists(root_ / "uploads" / (file_id + ".json"));
}

Chatlog Store::load_upload(const std::string& file_id) const {
  if (!has_upload(file_id)) throw Error("unknown file_id " + file_id);
  return chatlog_from_json(nlohmann::json::parse(read_file(root_ / "uploads" / (file_id + ".json"))));
}

void Store::put_task(const Task& task) {
  std::lock_guard lock(write_mu_);
  write_file_atomic(root_ / "tasks" / (task.task_id + ".json"), render_document(to_json(task)));
}

std::vector<Task> Store::load_tasks() const {
  std::vector<Task> out;
  for (const auto& entry : fs::directory_iterator(root_ / "tasks")) {
    if (entry.path().extension() != ".json") continue;
    out.push_back(task_from_json(nlohmann::json::parse(read_file(entry.path()))));
  }
  return out;
}

std::string Store::put_result(const std::string& task_id, std::string_view document) {
  const std::string rel = "results/" + task_id + ".json";
  std::lock_guard lock(write_mu_);
  write_file_atomic(root_ / rel, document);
  return rel;
}

std::optional<std::string> Store::read_result(const std::string& task_id) const {
  const fs::path p = root_ / "results" / (task_id + ".json");
  if (!fs::exists(p)) return std::nullopt;
  return read_file(p);
}

}  // namespace salesmine
