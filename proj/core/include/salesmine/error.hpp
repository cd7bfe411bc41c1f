#pragma once

#include <stdexcept>
#include <string>

namespace salesmine {

// Root of every exception the library throws on bad input or a failed
// dependency. Callers that only care about success/failure catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration (rule files, config documents, flag values).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A remote model service could not be reached or answered with garbage.
class RemoteUnavailable : public Error {
 public:
  RemoteUnavailable(std::string url, std::string cause)
      : Error("remote model service unavailable at " + url + ": " + cause),
        url_(std::move(url)),
        cause_(std::move(cause)) {}

  const std::string& url() const noexcept { return url_; }
  const std::string& cause() const noexcept { return cause_; }

 private:
  std::string url_;
  std::string cause_;
};

}  // namespace salesmine
