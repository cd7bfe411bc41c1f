#pragma once

#include <chrono>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace salesmine {

// JSON-over-HTTP client for the external model service. One POST per
// call, no retries; any transport failure, non-200 status or unparsable
// body surfaces as RemoteUnavailable.
class RemoteModelClient {
 public:
  explicit RemoteModelClient(std::string base_url,
                             std::chrono::milliseconds timeout = std::chrono::seconds(2));

  nlohmann::json post(std::string_view path, const nlohmann::json& body) const;

  const std::string& base_url() const noexcept { return base_url_; }

 private:
  std::string base_url_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  std::chrono::milliseconds timeout_;
};

}  // namespace salesmine
