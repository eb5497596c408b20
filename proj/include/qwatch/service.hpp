#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qwatch/bank.hpp"

namespace qwatch {

struct ServiceConfig {
  /// Adds a "diagnostics" object with the numeric risk to results.
  bool expose_risk_value = false;
  /// Origins that receive CORS headers; "*" allows any origin.
  std::vector<std::string> cors_origins;
  /// Serve files from this directory under "/" when set.
  std::optional<std::string> static_dir;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Request handling for the assessment API, independent of the transport.
/// Holds no per-request state; safe to call from many threads at once.
class AssessmentService {
 public:
  AssessmentService(std::shared_ptr<const ValidatedBank> bank, ServiceConfig config);

  HttpResponse sections() const;
  HttpResponse questions(std::string_view section_id) const;
  HttpResponse results(std::string_view body) const;

  /// Routes `method path` to one of the endpoints above.
  HttpResponse handle(std::string_view method, std::string_view path, std::string_view body) const;

  /// CORS headers to attach for a request from `origin` (empty if not allowed).
  std::vector<std::pair<std::string, std::string>> cors_headers(std::string_view origin) const;

  const ValidatedBank& bank() const noexcept { return *bank_; }
  const ServiceConfig& config() const noexcept { return config_; }

 private:
  std::shared_ptr<const ValidatedBank> bank_;
  ServiceConfig config_;
  std::string sections_body_;
};

/// Splits "host:port". Throws std::invalid_argument on malformed input.
std::pair<std::string, int> parse_listen_address(std::string_view address);

/// HTTP/1.1 front end for an AssessmentService.
class HttpServer {
 public:
  explicit HttpServer(const AssessmentService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds and serves on a background thread. Port 0 picks a free port.
  /// Returns the bound port.
  int start(const std::string& host, int port);

  /// Binds and serves on the calling thread until stop() is called.
  void run(const std::string& host, int port);

  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace qwatch
