#include <catch_amalgamated.hpp>

#include <atomic>
#include <fcntl.h>
#include <thread>
#include <unistd.h>

#include "llmmom/error.hpp"
#include "llmmom/scorer.hpp"
#include "support.hpp"

using namespace llmmom;
using namespace std::chrono_literals;

namespace {

ScoreKey key(const std::string& ticker, int day = 3) {
  return ScoreKey{ticker, Date(2024, 1, day), 5, 21, PromptVariant::Basic, "abc"};
}

RenderedPrompt prompt(bool empty = false) {
  RenderedPrompt p;
  p.text = "prompt";
  p.empty_window = empty;
  return p;
}

// Replies from a script, then repeats the last entry; "!" throws a transport error.
class ScriptedBackend : public ScoringBackend {
 public:
  explicit ScriptedBackend(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  std::string name() const override { return "scripted"; }
  bool deterministic() const override { return true; }
  std::string complete(const std::string&, const ScoreKey&) override {
    const auto i = std::min(calls++, replies_.size() - 1);
    if (replies_[i] == "!") throw TransportError("connection reset");
    return replies_[i];
  }
  std::size_t calls = 0;

 private:
  std::vector<std::string> replies_;
};

// Records the peak number of concurrent complete() calls.
class CountingBackend : public ScoringBackend {
 public:
  std::string name() const override { return "counting"; }
  bool deterministic() const override { return true; }
  std::string complete(const std::string&, const ScoreKey& k) override {
    const int now = ++in_flight;
    int seen = peak.load();
    while (now > seen && !peak.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(2ms);
    --in_flight;
    ++calls;
    return RawScore::from_units(mock_score_units(k)).str();
  }
  std::atomic<int> in_flight{0}, peak{0}, calls{0};
};

ScorerOptions fast() {
  ScorerOptions o;
  o.backoff_initial = 1ms;
  o.backoff_max = 4ms;
  return o;
}

}  // namespace

TEST_CASE("normalize is exact on four-decimal scores") {
  const auto p = parse_reply("0.7341");
  REQUIRE(p);
  CHECK(normalize(RawScore::from_units(p->units)) == 0.4682);
  CHECK(normalize(RawScore::missing()) == 0.0);
  CHECK(normalize(RawScore::from_units(0)) == -1.0);
  CHECK(normalize(RawScore::from_units(10000)) == 1.0);
  CHECK(normalize(RawScore::from_units(5000)) == 0.0);
  // Every four-decimal value maps to the correctly rounded 2v - 1.
  for (int u = 0; u <= 10000; ++u) {
    const double expected = std::stod(std::to_string(2 * u - 10000) + "e-4");
    REQUIRE(normalize(RawScore::from_units(u)) == expected);
  }
}

TEST_CASE("parse_reply accepts bare decimals only") {
  CHECK(parse_reply("0.7341")->units == 7341);
  CHECK(parse_reply("  0.5\n")->units == 5000);
  CHECK(parse_reply("1")->units == 10000);
  CHECK(parse_reply(".25")->units == 2500);
  CHECK(parse_reply("0.56155")->units == 5616);  // half up at the fifth digit
  CHECK(parse_reply("0.56154")->units == 5615);
  CHECK(parse_reply("0.99999")->units == 10000);
  const auto hi = parse_reply("1.2");
  CHECK((hi->units == 10000 && hi->clamped));
  const auto lo = parse_reply("-0.1");
  CHECK((lo->units == 0 && lo->clamped));
  CHECK_FALSE(parse_reply("-0")->clamped);
  for (const char* bad : {"", "  ", "abc", "0.7 points", "Score: 0.7", "0..7", "1e-1", ".", "-", "0,7"}) {
    CHECK_FALSE(parse_reply(bad).has_value());
  }
}

TEST_CASE("raw scores print with four decimals") {
  CHECK(RawScore::from_units(7341).str() == "0.7341");
  CHECK(RawScore::from_units(10000).str() == "1.0000");
  CHECK(RawScore::from_units(5).str() == "0.0005");
  CHECK(RawScore::missing().str() == "missing");
  CHECK_THROWS_AS(RawScore::from_units(10001), PreconditionError);
}

TEST_CASE("mock scores are a fixed function of the key") {
  // Values computed independently: floor(first 8 bytes of SHA-256 * 10001 / 2^64).
  CHECK(key("AAPL").canonical() == "AAPL|2024-01-03|5|21|basic|abc");
  CHECK(mock_score_units(key("AAPL")) == 1678);
  CHECK(mock_score_units(ScoreKey{"MSFT", Date(2024, 1, 31), 1, 21, PromptVariant::Advanced, "abc"}) == 1954);
  MockBackend mock;
  CHECK(mock.complete("ignored", key("AAPL")) == "0.1678");
}

TEST_CASE("empty windows are missing without a backend call") {
  ScoreCache cache;
  ScriptedBackend backend({"0.9"});
  Scorer scorer(cache, &backend, fast());
  CHECK(scorer.score(prompt(true), key("AAPL")).is_missing());
  CHECK(backend.calls == 0);
  CHECK(cache.size() == 0);
}

TEST_CASE("retries cover transport errors and non-numeric replies") {
  ScoreCache cache;
  SECTION("recovers within the retry budget") {
    ScriptedBackend backend({"!", "I think 0.8", "0.8"});
    Scorer scorer(cache, &backend, fast());
    CHECK(scorer.score(prompt(), key("AAPL")) == RawScore::from_units(8000));
    CHECK(backend.calls == 3);
  }
  SECTION("fails after R retries and names the key") {
    ScriptedBackend backend({"nope"});
    auto opts = fast();
    opts.retries = 2;
    Scorer scorer(cache, &backend, opts);
    CHECK_THROWS_WITH(scorer.score(prompt(), key("AAPL")),
                      Catch::Matchers::ContainsSubstring("AAPL|2024-01-03|5|21|basic|abc"));
    CHECK(backend.calls == 3);
    CHECK(cache.size() == 0);
  }
  SECTION("out-of-range replies are clamped and counted") {
    ScriptedBackend backend({"1.5"});
    Scorer scorer(cache, &backend, fast());
    CHECK(scorer.score(prompt(), key("AAPL")) == RawScore::from_units(10000));
    CHECK(scorer.stats().clamped == 1);
  }
}

TEST_CASE("cache replay performs zero backend calls") {
  testing::TempDir dir;
  std::vector<ScoreRequest> reqs;
  for (int d = 2; d < 12; ++d) reqs.push_back({key("AAPL", d), prompt()});
  std::vector<RawScore> first;
  {
    ScoreCache cache(dir / "scores.jsonl");
    MockBackend mock;
    Scorer scorer(cache, &mock);
    first = scorer.batch_score(reqs);
    CHECK(scorer.stats().backend_calls == 10);
  }
  ScoreCache cache(dir / "scores.jsonl");
  CHECK(cache.size() == 10);
  Scorer replay(cache, nullptr);
  CHECK(replay.batch_score(reqs) == first);
  CHECK(replay.stats().backend_calls == 0);
  CHECK(replay.stats().cache_hits == 10);
}

TEST_CASE("cache-only misses raise an actionable error") {
  ScoreCache cache;
  Scorer scorer(cache, nullptr);
  CHECK_THROWS_WITH(scorer.score(prompt(), key("AAPL")), Catch::Matchers::ContainsSubstring("llmmom score"));
}

TEST_CASE("batch scoring respects max-in-flight and keeps input order") {
  for (int limit : {1, 3, 8}) {
    ScoreCache cache;
    CountingBackend backend;
    ScorerOptions opts;
    opts.max_in_flight = limit;
    Scorer scorer(cache, &backend, opts);
    std::vector<ScoreRequest> reqs;
    for (int i = 0; i < 40; ++i) reqs.push_back({key("T" + std::to_string(i)), prompt()});
    reqs.push_back({key("T0"), prompt()});  // duplicate key: one call
    const auto out = scorer.batch_score(reqs);
    CHECK(backend.peak.load() <= limit);
    CHECK(backend.calls.load() == 40);
    for (std::size_t i = 0; i < reqs.size(); ++i) {
      CHECK(out[i] == RawScore::from_units(mock_score_units(reqs[i].key)));
    }
    // Cache entries land in input order whatever the completion order.
    const auto entries = cache.entries();
    REQUIRE(entries.size() == 40);
    for (std::size_t i = 0; i < entries.size(); ++i) CHECK(entries[i].key == reqs[i].key);
  }
}

TEST_CASE("batch failures are aggregated after committing successes") {
  class FailSome : public ScoringBackend {
   public:
    std::string name() const override { return "failsome"; }
    std::string complete(const std::string&, const ScoreKey& k) override {
      return k.ticker == "BAD" ? "n/a" : "0.5";
    }
  } backend;
  ScoreCache cache;
  auto opts = fast();
  opts.retries = 0;
  Scorer scorer(cache, &backend, opts);
  const std::vector<ScoreRequest> reqs = {{key("A"), prompt()}, {key("BAD"), prompt()}, {key("C"), prompt()}};
  CHECK_THROWS_WITH(scorer.batch_score(reqs), Catch::Matchers::ContainsSubstring("1 of 3"));
  CHECK(cache.size() == 2);
  CHECK_FALSE(cache.entries()[0].scored_at.empty());  // non-deterministic backends stamp entries
}

TEST_CASE("request pacing spaces out backend calls") {
  ScoreCache cache;
  CountingBackend backend;
  ScorerOptions opts;
  opts.requests_per_minute = 6000;  // one per 10 ms
  opts.max_in_flight = 4;
  Scorer scorer(cache, &backend, opts);
  std::vector<ScoreRequest> reqs;
  for (int i = 0; i < 6; ++i) reqs.push_back({key("P" + std::to_string(i)), prompt()});
  const auto start = std::chrono::steady_clock::now();
  scorer.batch_score(reqs);
  CHECK(std::chrono::steady_clock::now() - start >= 50ms);
}

TEST_CASE("cache file survives a torn final line and ignores duplicates") {
  testing::TempDir dir;
  const auto path = dir / "scores.jsonl";
  {
    ScoreCache cache(path);
    cache.append({key("A"), RawScore::from_units(1234), "mock", ""});
    cache.append({key("A"), RawScore::from_units(9999), "mock", ""});  // first entry wins
    cache.append({key("B"), RawScore::from_units(42), "mock", ""});
  }
  // Simulate a crash mid-append.
  const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND);
  REQUIRE(::write(fd, "{\"ticker\":\"C\",\"as_", 18) == 18);
  ::close(fd);
  {
    ScoreCache cache(path);
    CHECK(cache.size() == 2);
    CHECK(*cache.lookup(key("A")) == RawScore::from_units(1234));
    cache.append({key("D"), RawScore::from_units(1), "mock", ""});
  }
  ScoreCache reloaded(path);
  CHECK(reloaded.size() == 3);
  CHECK(reloaded.lookup(key("D")).has_value());
}

TEST_CASE("cache lines round-trip through serialize") {
  const CacheEntry e{key("AAPL"), RawScore::from_units(7341), "mock", ""};
  const std::string line = ScoreCache::serialize(e);
  CHECK(line.find("\"raw\":0.7341") != std::string::npos);
  CHECK(line.find("\"scored_at\":null") != std::string::npos);
  const CacheEntry back = ScoreCache::deserialize(line);
  CHECK(back.key == e.key);
  CHECK(back.raw == e.raw);
  CHECK(ScoreCache::serialize(back) == line);
}

TEST_CASE("concurrent appends from many threads lose nothing") {
  testing::TempDir dir;
  {
    ScoreCache cache(dir / "c.jsonl");
    std::vector<std::jthread> threads;
    for (int t = 0; t < 8; ++t) {
      threads.emplace_back([&cache, t] {
        for (int i = 0; i < 50; ++i) {
          cache.append({key("T" + std::to_string(t) + "_" + std::to_string(i)), RawScore::from_units(i), "mock", ""});
        }
      });
    }
  }
  CHECK(ScoreCache(dir / "c.jsonl").size() == 400);
}
