#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "llmmom/error.hpp"
#include "llmmom/scorer.hpp"

namespace llmmom {

std::string ScoreCache::serialize(const CacheEntry& e) {
  nlohmann::ordered_json j;
  j["ticker"] = e.key.ticker;
  j["as_of"] = e.key.as_of.iso();
  j["k"] = e.key.lookback_days;
  j["l"] = e.key.horizon_days;
  j["variant"] = std::string(to_string(e.key.variant));
  j["template_hash"] = e.key.template_hash;
  j["raw"] = e.raw.value();
  j["backend"] = e.backend;
  if (e.scored_at.empty()) {
    j["scored_at"] = nullptr;
  } else {
    j["scored_at"] = e.scored_at;
  }
  return j.dump();
}

CacheEntry ScoreCache::deserialize(std::string_view line) {
  const auto j = nlohmann::json::parse(line);
  CacheEntry e;
  e.key.ticker = j.at("ticker").get<std::string>();
  e.key.as_of = Date::parse(j.at("as_of").get<std::string>());
  e.key.lookback_days = j.at("k").get<int>();
  e.key.horizon_days = j.at("l").get<int>();
  e.key.variant = parse_prompt_variant(j.at("variant").get<std::string>());
  e.key.template_hash = j.at("template_hash").get<std::string>();
  e.raw = RawScore::from_units(static_cast<int>(std::llround(j.at("raw").get<double>() * RawScore::kScale)));
  e.backend = j.value("backend", "");
  if (j.contains("scored_at") && j["scored_at"].is_string()) e.scored_at = j["scored_at"].get<std::string>();
  return e;
}

ScoreCache::ScoreCache(const std::filesystem::path& path) : path_(path) {
  if (std::filesystem::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path.string(), 0, "cannot open score cache");
    std::string line;
    std::size_t lineno = 0;
    bool torn = false;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const bool complete_line = !in.eof();
      try {
        CacheEntry e = deserialize(line);
        const auto key = e.key.canonical();
        if (index_.emplace(key, entries_.size()).second) entries_.push_back(std::move(e));
      } catch (const std::exception& ex) {
        if (complete_line) throw DataError(path.string(), lineno, std::string("malformed cache entry: ") + ex.what());
        torn = true;
      }
    }
    // Drop any unterminated tail so the next append starts on a fresh line
    // and the fragment never becomes a malformed interior line.
    std::ifstream whole(path, std::ios::binary);
    const std::string body((std::istreambuf_iterator<char>(whole)), std::istreambuf_iterator<char>());
    if (!body.empty() && body.back() != '\n') {
      const auto keep = body.rfind('\n');
      std::filesystem::resize_file(path, keep == std::string::npos ? 0 : keep + 1);
      if (torn) spdlog::warn("{}: dropped torn final cache line", path.string());
    }
  } else if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw DataError(path.string(), 0, std::string("cannot open score cache for append: ") + std::strerror(errno));
}

ScoreCache::~ScoreCache() {
  if (fd_ >= 0) ::close(fd_);
}

std::optional<RawScore> ScoreCache::lookup(const ScoreKey& key) const {
  std::shared_lock lock(mu_);
  auto it = index_.find(key.canonical());
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second].raw;
}

void ScoreCache::append(const CacheEntry& entry) {
  const std::string key = entry.key.canonical();
  std::unique_lock lock(mu_);
  if (index_.count(key) != 0) return;
  if (fd_ >= 0) {
    const std::string line = serialize(entry) + '\n';
    std::size_t off = 0;
    while (off < line.size()) {
      const auto w = ::write(fd_, line.data() + off, line.size() - off);
      if (w < 0) {
        if (errno == EINTR) continue;
        throw DataError(path_.string(), 0, std::string("score cache write failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(w);
    }
  }
  index_.emplace(key, entries_.size());
  entries_.push_back(entry);
}

std::size_t ScoreCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

std::vector<CacheEntry> ScoreCache::entries() const {
  std::shared_lock lock(mu_);
  return entries_;
}

}  // namespace llmmom
