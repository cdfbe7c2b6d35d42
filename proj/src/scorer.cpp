#include "llmmom/scorer.hpp"

#include <algorithm>
#include <ctime>
#include <thread>

#include <spdlog/spdlog.h>

#include "llmmom/error.hpp"

namespace llmmom {

RawScore RawScore::from_units(int units) {
  if (units < 0 || units > kScale) throw PreconditionError("raw score out of [0, 1]");
  RawScore r;
  r.units_ = units;
  return r;
}

std::string RawScore::str() const {
  if (is_missing()) return "missing";
  const int u = *units_;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%d.%04d", u / kScale, u % kScale);
  return buf;
}

double normalize(const RawScore& raw) {
  if (raw.is_missing()) return 0.0;
  return static_cast<double>(2 * raw.units() - RawScore::kScale) / RawScore::kScale;
}

std::optional<ParsedReply> parse_reply(std::string_view reply) {
  const auto first = reply.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return std::nullopt;
  const auto last = reply.find_last_not_of(" \t\r\n");
  std::string_view s = reply.substr(first, last - first + 1);

  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  const auto dot = s.find('.');
  const std::string_view int_part = s.substr(0, dot);
  const std::string_view frac_part = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  if (int_part.empty() && frac_part.empty()) return std::nullopt;
  auto all_digits = [](std::string_view t) {
    return std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if (!all_digits(int_part) || !all_digits(frac_part)) return std::nullopt;

  // Integer part beyond 1 clamps anyway; avoid overflow on long digit runs.
  const auto nz = int_part.find_first_not_of('0');
  const std::string_view significant = nz == std::string_view::npos ? std::string_view{} : int_part.substr(nz);
  long long units = 0;
  if (significant.size() > 6) {
    units = 10LL * RawScore::kScale;
  } else {
    for (char c : significant) units = units * 10 + (c - '0');
    units *= RawScore::kScale;
    int scale = RawScore::kScale / 10;
    for (std::size_t i = 0; i < 4 && i < frac_part.size(); ++i, scale /= 10) units += (frac_part[i] - '0') * scale;
    if (frac_part.size() > 4 && frac_part[4] >= '5') ++units;
  }
  if (negative && units != 0) units = -units;

  ParsedReply out;
  if (units < 0) {
    out.units = 0;
    out.clamped = true;
  } else if (units > RawScore::kScale) {
    out.units = RawScore::kScale;
    out.clamped = true;
  } else {
    out.units = static_cast<int>(units);
  }
  return out;
}

std::string ScoreKey::canonical() const {
  return ticker + '|' + as_of.iso() + '|' + std::to_string(lookback_days) + '|' + std::to_string(horizon_days) + '|' +
         std::string(to_string(variant)) + '|' + template_hash;
}

Scorer::Scorer(ScoreCache& cache, ScoringBackend* backend, ScorerOptions opts)
    : cache_(cache), backend_(backend), opts_(opts) {
  if (opts_.max_in_flight < 1) throw PreconditionError("max_in_flight must be at least 1");
  if (opts_.retries < 0) throw PreconditionError("retries must be non-negative");
}

void Scorer::pace() {
  if (opts_.requests_per_minute <= 0.0) return;
  const auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(60.0 / opts_.requests_per_minute));
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(pace_mu_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_slot_);
    next_slot_ = slot + interval;
  }
  std::this_thread::sleep_until(slot);
}

Scorer::Outcome Scorer::call_backend(const RenderedPrompt& prompt, const ScoreKey& key) {
  if (backend_ == nullptr) {
    throw ScoringError("no cached score for " + key.canonical() +
                       " and no scoring backend is enabled; run `llmmom score` with --backend mock or live first");
  }
  auto backoff = opts_.backoff_initial;
  std::string last_problem;
  for (int attempt = 0; attempt <= opts_.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff = std::min(backoff * 2, opts_.backoff_max);
    }
    std::string reply;
    try {
      pace();
      ++calls_;
      reply = backend_->complete(prompt.text, key);
    } catch (const TransportError& e) {
      last_problem = std::string("transport failure: ") + e.what();
      spdlog::warn("scoring {} attempt {}: {}", key.canonical(), attempt + 1, last_problem);
      continue;
    }
    if (auto parsed = parse_reply(reply)) {
      if (parsed->clamped) {
        spdlog::warn("scoring {}: reply '{}' outside [0,1], clamped to {}", key.canonical(), reply,
                     RawScore::from_units(parsed->units).str());
      }
      return {RawScore::from_units(parsed->units), parsed->clamped};
    }
    last_problem = "non-numeric reply '" + reply + "'";
    spdlog::warn("scoring {} attempt {}: {}", key.canonical(), attempt + 1, last_problem);
  }
  throw ScoringError("scoring failed for " + key.canonical() + " after " + std::to_string(opts_.retries) +
                     " retries: " + last_problem);
}

CacheEntry Scorer::make_entry(const ScoreKey& key, RawScore raw) const {
  CacheEntry e{key, raw, backend_->name(), {}};
  if (!backend_->deterministic()) {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    e.scored_at = buf;
  }
  return e;
}

RawScore Scorer::score(const RenderedPrompt& prompt, const ScoreKey& key) {
  if (prompt.empty_window) {
    ++missing_;
    return RawScore::missing();
  }
  if (auto hit = cache_.lookup(key)) {
    ++hits_;
    return *hit;
  }
  const Outcome out = call_backend(prompt, key);
  if (out.clamped) ++clamped_;
  cache_.append(make_entry(key, out.raw));
  return out.raw;
}

std::vector<RawScore> Scorer::batch_score(const std::vector<ScoreRequest>& requests) {
  const std::size_t n = requests.size();
  std::vector<RawScore> results(n);
  std::vector<std::size_t> todo;  // indices needing a backend call, first occurrence of each key
  std::vector<std::size_t> alias(n, SIZE_MAX);
  std::unordered_map<std::string, std::size_t> first_seen;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& req = requests[i];
    if (req.prompt.empty_window) {
      ++missing_;
      results[i] = RawScore::missing();
      continue;
    }
    if (auto hit = cache_.lookup(req.key)) {
      ++hits_;
      results[i] = *hit;
      continue;
    }
    auto [it, inserted] = first_seen.emplace(req.key.canonical(), i);
    if (inserted) {
      todo.push_back(i);
    } else {
      alias[i] = it->second;
    }
  }

  if (!todo.empty()) {
    std::vector<std::string> errors(todo.size());
    std::vector<char> done(todo.size(), 0);
    std::size_t next_commit = 0;
    std::mutex commit_mu;
    std::atomic<std::size_t> cursor{0};

    auto commit_ready = [&] {
      // caller holds commit_mu
      while (next_commit < todo.size() && done[next_commit]) {
        if (errors[next_commit].empty()) {
          const auto idx = todo[next_commit];
          cache_.append(make_entry(requests[idx].key, results[idx]));
        }
        ++next_commit;
      }
    };
    auto worker = [&] {
      while (true) {
        const std::size_t j = cursor.fetch_add(1);
        if (j >= todo.size()) return;
        const auto idx = todo[j];
        std::string err;
        try {
          const Outcome out = call_backend(requests[idx].prompt, requests[idx].key);
          if (out.clamped) ++clamped_;
          results[idx] = out.raw;
        } catch (const std::exception& e) {
          err = e.what();
        }
        std::lock_guard lock(commit_mu);
        errors[j] = std::move(err);
        done[j] = 1;
        commit_ready();
      }
    };

    const auto nthreads = std::min<std::size_t>(static_cast<std::size_t>(opts_.max_in_flight), todo.size());
    {
      std::vector<std::jthread> pool;
      for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
      worker();
    }

    std::string failures;
    std::size_t failed = 0;
    for (std::size_t j = 0; j < todo.size(); ++j) {
      if (errors[j].empty()) continue;
      ++failed;
      failures += "\n  " + errors[j];
    }
    if (failed > 0) {
      throw ScoringError(std::to_string(failed) + " of " + std::to_string(n) + " score request(s) failed:" + failures);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (alias[i] != SIZE_MAX) results[i] = results[alias[i]];
  }
  return results;
}

ScorerStats Scorer::stats() const { return {calls_.load(), hits_.load(), missing_.load(), clamped_.load()}; }

}  // namespace llmmom
