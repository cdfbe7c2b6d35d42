#include "llmmom/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "llmmom/error.hpp"

namespace llmmom {

using nlohmann::json;

std::string_view to_string(BackendKind k) {
  switch (k) {
    case BackendKind::Mock: return "mock";
    case BackendKind::Live: return "live";
    case BackendKind::CacheOnly: return "cache-only";
  }
  return "mock";
}

BackendKind parse_backend_kind(std::string_view text) {
  if (text == "mock") return BackendKind::Mock;
  if (text == "live") return BackendKind::Live;
  if (text == "cache-only") return BackendKind::CacheOnly;
  throw PreconditionError("unknown backend '" + std::string(text) + "'; expected mock, live or cache-only");
}

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw PreconditionError("config: '" + where + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw PreconditionError("config: unknown key '" + where + "." + key + "'");
    }
  }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw PreconditionError("config: '" + where + "." + key + "' has the wrong type");
  }
}

void read_path(const json& obj, const char* key, std::filesystem::path& out, const std::filesystem::path& base) {
  std::string s;
  read(obj, key, s, "paths");
  if (s.empty()) return;
  std::filesystem::path p(s);
  out = p.is_relative() && !base.empty() ? base / p : p;
}

void read_date(const json& obj, const char* key, Date& out) {
  std::string s;
  read(obj, key, s, "split");
  if (s.empty()) return;
  try {
    out = Date::parse(s);
  } catch (const std::exception& e) {
    throw PreconditionError(std::string("config: split.") + key + ": " + e.what());
  }
}

HyperParams parse_theta(const json& t, HyperParams theta) {
  check_keys(t, "theta", {"tau", "k", "m", "pi", "c", "w", "eta"});
  std::string s;
  if (t.contains("tau")) {
    read(t, "tau", s, "theta");
    theta.tau = parse_frequency(s);
  }
  read(t, "k", theta.k, "theta");
  read(t, "m", theta.m, "theta");
  if (t.contains("pi")) {
    read(t, "pi", s, "theta");
    theta.pi = parse_prompt_variant(s);
  }
  read(t, "c", theta.cap, "theta");
  if (t.contains("w")) {
    read(t, "w", s, "theta");
    theta.w = parse_weight_scheme(s);
  }
  read(t, "eta", theta.eta, "theta");
  validate_theta(theta);
  return theta;
}

json theta_json(const HyperParams& theta) {
  return {{"tau", std::string(llmmom::to_string(theta.tau))},
          {"k", theta.k},
          {"m", theta.m},
          {"pi", std::string(llmmom::to_string(theta.pi))},
          {"c", theta.cap},
          {"w", std::string(llmmom::to_string(theta.w))},
          {"eta", theta.eta}};
}

}  // namespace

void validate_theta(const HyperParams& theta) {
  if (theta.k < 1) throw PreconditionError("theta.k must be >= 1");
  if (theta.m < 1) throw PreconditionError("theta.m must be >= 1");
  if (!(theta.eta > 0)) throw PreconditionError("theta.eta must be positive");
}

HyperParams theta_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw PreconditionError(std::string("theta file is not valid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("theta")) return parse_theta(doc["theta"], HyperParams{});
  return parse_theta(doc, HyperParams{});
}

std::string theta_to_json(const HyperParams& theta) { return theta_json(theta).dump(2) + "\n"; }

RunConfig RunConfig::from_json(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw PreconditionError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(doc, "config", {"paths", "backend", "split", "theta", "cost_bps", "threads"});
  RunConfig cfg;

  if (doc.contains("paths")) {
    const auto& p = doc["paths"];
    check_keys(p, "paths", {"returns", "risk_free", "news", "score_cache", "templates", "output"});
    read_path(p, "returns", cfg.paths.returns, base_dir);
    read_path(p, "risk_free", cfg.paths.risk_free, base_dir);
    read_path(p, "news", cfg.paths.news, base_dir);
    read_path(p, "score_cache", cfg.paths.score_cache, base_dir);
    read_path(p, "templates", cfg.paths.templates, base_dir);
    read_path(p, "output", cfg.paths.output, base_dir);
  }

  if (doc.contains("backend")) {
    const auto& b = doc["backend"];
    check_keys(b, "backend",
               {"kind", "url", "model", "auth_env", "temperature", "timeout_s", "retries", "backoff_initial_ms",
                "backoff_max_ms", "max_in_flight", "requests_per_minute"});
    std::string kind = std::string(to_string(cfg.backend));
    read(b, "kind", kind, "backend");
    cfg.backend = parse_backend_kind(kind);
    read(b, "url", cfg.live.url, "backend");
    read(b, "model", cfg.live.model, "backend");
    read(b, "auth_env", cfg.live.auth_env, "backend");
    read(b, "temperature", cfg.live.temperature, "backend");
    long long timeout = cfg.live.timeout.count();
    read(b, "timeout_s", timeout, "backend");
    cfg.live.timeout = std::chrono::seconds(timeout);
    read(b, "retries", cfg.scorer.retries, "backend");
    long long backoff = cfg.scorer.backoff_initial.count();
    read(b, "backoff_initial_ms", backoff, "backend");
    cfg.scorer.backoff_initial = std::chrono::milliseconds(backoff);
    backoff = cfg.scorer.backoff_max.count();
    read(b, "backoff_max_ms", backoff, "backend");
    cfg.scorer.backoff_max = std::chrono::milliseconds(backoff);
    read(b, "max_in_flight", cfg.scorer.max_in_flight, "backend");
    read(b, "requests_per_minute", cfg.scorer.requests_per_minute, "backend");
    if (cfg.scorer.retries < 0) throw PreconditionError("config: backend.retries must be >= 0");
    if (cfg.scorer.max_in_flight < 1) throw PreconditionError("config: backend.max_in_flight must be >= 1");
    if (cfg.scorer.requests_per_minute < 0) {
      throw PreconditionError("config: backend.requests_per_minute must be >= 0");
    }
  }

  if (doc.contains("split")) {
    const auto& s = doc["split"];
    check_keys(s, "split", {"validation_from", "validation_to", "test_from", "test_to"});
    read_date(s, "validation_from", cfg.split.validation_from);
    read_date(s, "validation_to", cfg.split.validation_to);
    read_date(s, "test_from", cfg.split.test_from);
    read_date(s, "test_to", cfg.split.test_to);
    cfg.split.validate();
  }

  if (doc.contains("theta")) cfg.theta = parse_theta(doc["theta"], cfg.theta);

  read(doc, "cost_bps", cfg.cost_bps, "config");
  if (!(cfg.cost_bps >= 0)) throw PreconditionError("config: cost_bps must be >= 0");
  read(doc, "threads", cfg.threads, "config");
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str(), path.parent_path());
}

std::string RunConfig::to_json() const {
  json doc;
  doc["paths"] = {{"returns", paths.returns.string()},         {"risk_free", paths.risk_free.string()},
                  {"news", paths.news.string()},               {"score_cache", paths.score_cache.string()},
                  {"templates", paths.templates.string()},     {"output", paths.output.string()}};
  doc["backend"] = {{"kind", std::string(to_string(backend))},
                    {"url", live.url},
                    {"model", live.model},
                    {"auth_env", live.auth_env},
                    {"temperature", live.temperature},
                    {"timeout_s", live.timeout.count()},
                    {"retries", scorer.retries},
                    {"backoff_initial_ms", scorer.backoff_initial.count()},
                    {"backoff_max_ms", scorer.backoff_max.count()},
                    {"max_in_flight", scorer.max_in_flight},
                    {"requests_per_minute", scorer.requests_per_minute}};
  doc["split"] = {{"validation_from", split.validation_from.iso()},
                  {"validation_to", split.validation_to.iso()},
                  {"test_from", split.test_from.iso()},
                  {"test_to", split.test_to.iso()}};
  doc["theta"] = theta_json(theta);
  doc["cost_bps"] = cost_bps;
  doc["threads"] = threads;
  return doc.dump(2) + "\n";
}

unsigned RunConfig::effective_threads() const {
  if (threads > 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace llmmom
