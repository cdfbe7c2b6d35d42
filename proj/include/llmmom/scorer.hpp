#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "llmmom/calendar.hpp"
#include "llmmom/prompt.hpp"

namespace llmmom {

/// Model score in [0, 1] held as an integer count of 1e-4 units, so the four
/// decimal digits the model returns are represented exactly.
class RawScore {
 public:
  static constexpr int kScale = 10000;

  static RawScore missing() { return RawScore{}; }
  static RawScore from_units(int units);

  bool is_missing() const { return !units_.has_value(); }
  int units() const { return *units_; }
  double value() const { return static_cast<double>(*units_) / kScale; }
  /// "0.7341"; "missing" for a missing score.
  std::string str() const;

  friend bool operator==(const RawScore&, const RawScore&) = default;

 private:
  std::optional<int> units_;
};

/// 2v - 1 for a present raw score, 0 for a missing one. Computed from the
/// integer units so that e.g. 0.7341 maps to exactly 0.4682.
double normalize(const RawScore& raw);

/// Outcome of parsing a model reply.
struct ParsedReply {
  int units = 0;        // clamped into [0, 10000]
  bool clamped = false;
};

/// Accepts a bare decimal with optional surrounding whitespace and nothing
/// else; rounds to four decimals (half away from zero). Returns nullopt for a
/// non-numeric reply.
std::optional<ParsedReply> parse_reply(std::string_view reply);

struct ScoreKey {
  std::string ticker;
  Date as_of;
  int lookback_days = 0;
  int horizon_days = 0;
  PromptVariant variant = PromptVariant::Basic;
  std::string template_hash;

  /// "ticker|date|k|l|variant|template_hash"; the cache and mock digest key.
  std::string canonical() const;
  friend bool operator==(const ScoreKey&, const ScoreKey&) = default;
};

/// Retryable failure talking to a backend (network, HTTP 5xx, rate limiting).
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScoringBackend {
 public:
  virtual ~ScoringBackend() = default;
  virtual std::string name() const = 0;
  /// True when replies are a pure function of the key (no wall-clock stamps).
  virtual bool deterministic() const { return false; }
  /// Returns the raw reply text. Throws TransportError on retryable failures.
  virtual std::string complete(const std::string& prompt, const ScoreKey& key) = 0;
};

/// Digest of the key mapped uniformly onto the 10001 four-decimal values in [0, 1].
int mock_score_units(const ScoreKey& key);

class MockBackend final : public ScoringBackend {
 public:
  std::string name() const override { return "mock"; }
  bool deterministic() const override { return true; }
  std::string complete(const std::string& prompt, const ScoreKey& key) override;
};

struct LiveBackendConfig {
  std::string url = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4o-mini";
  std::string auth_env = "OPENAI_API_KEY";
  double temperature = 0.0;
  std::chrono::seconds timeout{60};
};

/// Chat-completion endpoint: POST {model, messages:[{role:"user",content}],
/// temperature} with a bearer token read from the environment.
class LiveBackend final : public ScoringBackend {
 public:
  explicit LiveBackend(LiveBackendConfig cfg);
  std::string name() const override { return "live:" + cfg_.model; }
  std::string complete(const std::string& prompt, const ScoreKey& key) override;

  /// Request body for `prompt` (exposed for wire-format tests).
  std::string request_body(const std::string& prompt) const;
  /// Extracts choices[0].message.content from a response body.
  static std::string reply_content(const std::string& response_body);

 private:
  LiveBackendConfig cfg_;
  std::string scheme_host_;
  std::string path_;
  std::string token_;
};

struct CacheEntry {
  ScoreKey key;
  RawScore raw;
  std::string backend;
  std::string scored_at;  // empty for deterministic backends
};

/// Append-only JSONL store of scores keyed by ScoreKey. Appends are
/// serialized in-process and issued as single O_APPEND writes, so concurrent
/// writers never interleave partial lines. A torn final line is ignored on load.
class ScoreCache {
 public:
  /// In-memory cache with no backing file.
  ScoreCache() = default;
  /// Loads `path` if it exists and appends new entries to it.
  explicit ScoreCache(const std::filesystem::path& path);
  ~ScoreCache();
  ScoreCache(const ScoreCache&) = delete;
  ScoreCache& operator=(const ScoreCache&) = delete;

  std::optional<RawScore> lookup(const ScoreKey& key) const;
  /// Adds an entry; a key already present is left untouched.
  void append(const CacheEntry& entry);
  std::size_t size() const;
  /// All entries in file order.
  std::vector<CacheEntry> entries() const;

  static std::string serialize(const CacheEntry& e);
  static CacheEntry deserialize(std::string_view line);

 private:
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<CacheEntry> entries_;
  int fd_ = -1;
  std::filesystem::path path_;
};

struct ScorerOptions {
  int retries = 3;
  std::chrono::milliseconds backoff_initial{500};
  std::chrono::milliseconds backoff_max{30000};
  int max_in_flight = 8;
  double requests_per_minute = 0.0;  // 0 = unlimited
};

struct ScoreRequest {
  ScoreKey key;
  RenderedPrompt prompt;
};

struct ScorerStats {
  std::size_t backend_calls = 0;
  std::size_t cache_hits = 0;
  std::size_t missing = 0;
  std::size_t clamped = 0;
};

/// Resolves prompts to raw scores through cache then backend. With no backend
/// (cache-only mode) a cache miss is a hard error.
class Scorer {
 public:
  Scorer(ScoreCache& cache, ScoringBackend* backend, ScorerOptions opts = {});

  RawScore score(const RenderedPrompt& prompt, const ScoreKey& key);

  /// Scores every request; results follow input order. Up to max_in_flight
  /// backend calls run concurrently, paced by requests_per_minute. New cache
  /// entries are committed in input order. Throws ScoringError listing every
  /// key that hard-failed, after committing all successes.
  std::vector<RawScore> batch_score(const std::vector<ScoreRequest>& requests);

  ScorerStats stats() const;

 private:
  struct Outcome {
    RawScore raw;
    bool clamped = false;
  };
  Outcome call_backend(const RenderedPrompt& prompt, const ScoreKey& key);
  void pace();
  CacheEntry make_entry(const ScoreKey& key, RawScore raw) const;

  ScoreCache& cache_;
  ScoringBackend* backend_;
  ScorerOptions opts_;
  std::mutex pace_mu_;
  std::chrono::steady_clock::time_point next_slot_{};
  std::atomic<std::size_t> calls_{0}, hits_{0}, missing_{0}, clamped_{0};
};

}  // namespace llmmom
