#include "salesmine/remote_client.hpp"

#include <httplib.h>

#include "salesmine/error.hpp"

namespace salesmine {

RemoteModelClient::RemoteModelClient(std::string base_url, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {
  std::string_view url = base_url_;
  while (!url.empty() && url.back() == '/') url.remove_suffix(1);
  const auto scheme_end = url.find("://");
  const std::size_t authority_start = scheme_end == std::string_view::npos ? 0 : scheme_end + 3;
  const auto path_start = url.find('/', authority_start);
  if (path_start == std::string_view::npos) {
    scheme_host_port_ = std::string(url);
  } else {
    scheme_host_port_ = std::string(url.substr(0, path_start));
    path_prefix_ = std::string(url.substr(path_start));
  }
  if (scheme_end == std::string_view::npos) scheme_host_port_ = "http://" + scheme_host_port_;
}

nlohmann::json RemoteModelClient::post(std::string_view path, const nlohmann::json& body) const {
  httplib::Client client(scheme_host_port_);
  if (!client.is_valid()) throw RemoteUnavailable(base_url_, "invalid url");
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  const std::string target = path_prefix_ + std::string(path);
  auto res = client.Post(target, body.dump(), "application/json");
  if (!res) throw RemoteUnavailable(base_url_, httplib::to_string(res.error()));
  if (res->status != 200) {
    throw RemoteUnavailable(base_url_, target + " returned HTTP " + std::to_string(res->status));
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw RemoteUnavailable(base_url_, target + " returned invalid JSON: " + e.what());
  }
}

}  // namespace salesmine
