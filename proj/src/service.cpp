#include "qwatch/service.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>
#include <thread>

#include <httplib.h>

#include "qwatch/chain.hpp"
#include "qwatch/payload.hpp"
#include "qwatch/scoring.hpp"

namespace qwatch {

namespace {

constexpr std::string_view kApiPrefix = "/api/v1";

HttpResponse json_response(int status, const payload::Json& body) { return {status, body.dump(), "application/json"}; }

}  // namespace

AssessmentService::AssessmentService(std::shared_ptr<const ValidatedBank> bank, ServiceConfig config)
    : bank_(std::move(bank)), config_(std::move(config)) {
  if (!bank_) throw std::invalid_argument("service requires a loaded bank");
  sections_body_ = payload::sections(*bank_).dump();
}

HttpResponse AssessmentService::sections() const { return {200, sections_body_, "application/json"}; }

HttpResponse AssessmentService::questions(std::string_view section_id) const {
  auto index = bank_->find_section(section_id);
  if (!index) {
    return json_response(404, payload::not_found(section_id, "unknown section id '" + std::string(section_id) + "'"));
  }
  return json_response(200, payload::questions(*bank_, *index));
}

HttpResponse AssessmentService::results(std::string_view body) const {
  Selection selection;
  try {
    selection = payload::parse_selection(body);
  } catch (const payload::RequestError& e) {
    return json_response(400, payload::error("bad-request", e.what()));
  }
  if (auto violations = check_selection(*bank_, selection); !violations.empty()) {
    return json_response(422, payload::violations(violations));
  }
  return json_response(200, payload::result(assemble_result(*bank_, selection), config_.expose_risk_value));
}

HttpResponse AssessmentService::handle(std::string_view method, std::string_view path, std::string_view body) const {
  if (path.substr(0, kApiPrefix.size()) != kApiPrefix) {
    return json_response(404, payload::not_found(path, "no such resource"));
  }
  std::string_view rest = path.substr(kApiPrefix.size());
  auto method_not_allowed = [&] {
    return json_response(405, payload::error("method-not-allowed",
                                             std::string(method) + " is not supported on " + std::string(path)));
  };

  if (rest == "/sections") return method == "GET" ? sections() : method_not_allowed();
  if (rest == "/results") return method == "POST" ? results(body) : method_not_allowed();

  constexpr std::string_view kSections = "/sections/";
  constexpr std::string_view kQuestions = "/questions";
  if (rest.size() > kSections.size() + kQuestions.size() && rest.substr(0, kSections.size()) == kSections &&
      rest.substr(rest.size() - kQuestions.size()) == kQuestions) {
    std::string_view id = rest.substr(kSections.size(), rest.size() - kSections.size() - kQuestions.size());
    if (id.find('/') == std::string_view::npos) {
      return method == "GET" ? questions(id) : method_not_allowed();
    }
  }
  return json_response(404, payload::not_found(path, "no such resource"));
}

std::vector<std::pair<std::string, std::string>> AssessmentService::cors_headers(std::string_view origin) const {
  const auto& allowed = config_.cors_origins;
  const bool wildcard = std::find(allowed.begin(), allowed.end(), "*") != allowed.end();
  if (origin.empty() || (!wildcard && std::find(allowed.begin(), allowed.end(), origin) == allowed.end())) {
    return {};
  }
  return {{"Access-Control-Allow-Origin", std::string(origin)},
          {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
          {"Access-Control-Allow-Headers", "Content-Type"},
          {"Vary", "Origin"}};
}

std::pair<std::string, int> parse_listen_address(std::string_view address) {
  const auto colon = address.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw std::invalid_argument("listen address must be host:port, got '" + std::string(address) + "'");
  }
  std::string_view port_text = address.substr(colon + 1);
  int port = -1;
  auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc() || ptr != port_text.data() + port_text.size() || port < 0 || port > 65535) {
    throw std::invalid_argument("invalid port in listen address '" + std::string(address) + "'");
  }
  return {std::string(address.substr(0, colon)), port};
}

struct HttpServer::Impl {
  explicit Impl(const AssessmentService& service) : service(service) {
    auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
      const HttpResponse out = this->service.handle(req.method, req.path, req.body);
      res.status = out.status;
      res.set_content(out.body, out.content_type);
      apply_cors(req, res);
    };
    server.Get(R"(/api/.*)", dispatch);
    server.Post(R"(/api/.*)", dispatch);
    server.Put(R"(/api/.*)", dispatch);
    server.Delete(R"(/api/.*)", dispatch);
    server.Options(R"(/api/.*)", [this](const httplib::Request& req, httplib::Response& res) {
      res.status = 204;
      apply_cors(req, res);
    });
    if (const auto& dir = service.config().static_dir) {
      if (!server.set_mount_point("/", *dir)) {
        throw std::invalid_argument("static directory '" + *dir + "' does not exist");
      }
    }
  }

  void apply_cors(const httplib::Request& req, httplib::Response& res) const {
    for (const auto& [name, value] : service.cors_headers(req.get_header_value("Origin"))) {
      res.set_header(name, value);
    }
  }

  const AssessmentService& service;
  httplib::Server server;
  std::thread worker;
};

HttpServer::HttpServer(const AssessmentService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::run(const std::string& host, int port) {
  if (!impl_->server.bind_to_port(host, port)) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace qwatch
