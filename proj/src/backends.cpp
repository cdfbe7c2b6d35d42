#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "llmmom/digest.hpp"
#include "llmmom/error.hpp"
#include "llmmom/scorer.hpp"

namespace llmmom {

int mock_score_units(const ScoreKey& key) {
  const std::uint64_t h = sha256_prefix64(key.canonical());
  // floor(h * 10001 / 2^64), uniform over 0..10000, done in two 32-bit halves.
  constexpr std::uint64_t c = RawScore::kScale + 1;
  const std::uint64_t hi = h >> 32, lo = h & 0xffffffffu;
  return static_cast<int>((hi * c + ((lo * c) >> 32)) >> 32);
}

std::string MockBackend::complete(const std::string& /*prompt*/, const ScoreKey& key) {
  return RawScore::from_units(mock_score_units(key)).str();
}

LiveBackend::LiveBackend(LiveBackendConfig cfg) : cfg_(std::move(cfg)) {
  const auto scheme_end = cfg_.url.find("://");
  if (scheme_end == std::string::npos) throw PreconditionError("backend URL must include a scheme: " + cfg_.url);
  const auto path_start = cfg_.url.find('/', scheme_end + 3);
  scheme_host_ = cfg_.url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : cfg_.url.substr(path_start);
  const char* token = std::getenv(cfg_.auth_env.c_str());
  if (token == nullptr || *token == '\0') {
    throw PreconditionError("environment variable " + cfg_.auth_env + " holding the API token is not set");
  }
  token_ = token;
}

std::string LiveBackend::request_body(const std::string& prompt) const {
  nlohmann::ordered_json body;
  body["model"] = cfg_.model;
  body["messages"] = nlohmann::ordered_json::array({{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = cfg_.temperature;
  return body.dump();
}

std::string LiveBackend::reply_content(const std::string& response_body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(response_body);
  } catch (const nlohmann::json::parse_error& e) {
    throw TransportError(std::string("unparseable response body: ") + e.what());
  }
  const nlohmann::json::json_pointer ptr("/choices/0/message/content");
  if (!j.contains(ptr) || !j.at(ptr).is_string()) throw TransportError("response lacks choices[0].message.content");
  return j.at(ptr).get<std::string>();
}

std::string LiveBackend::complete(const std::string& prompt, const ScoreKey& /*key*/) {
  httplib::Client client(scheme_host_);
  client.set_connection_timeout(cfg_.timeout);
  client.set_read_timeout(cfg_.timeout);
  client.set_bearer_token_auth(token_);
  auto res = client.Post(path_, request_body(prompt), "application/json");
  if (!res) throw TransportError("HTTP request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw TransportError("HTTP status " + std::to_string(res->status));
  return reply_content(res->body);
}

}  // namespace llmmom
