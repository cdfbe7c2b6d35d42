#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "llmmom/scorer.hpp"
#include "llmmom/strategy.hpp"

namespace llmmom {

enum class BackendKind { Mock, Live, CacheOnly };

std::string_view to_string(BackendKind k);
BackendKind parse_backend_kind(std::string_view text);

/// Everything a CLI run needs, loaded from one JSON file. Relative paths are
/// resolved against the directory holding the config file.
struct RunConfig {
  struct Paths {
    std::filesystem::path returns;
    std::filesystem::path risk_free;
    std::filesystem::path news;
    std::filesystem::path score_cache;
    std::filesystem::path templates;  // empty: built-in templates
    std::filesystem::path output;
  } paths;

  BackendKind backend = BackendKind::Mock;
  LiveBackendConfig live;
  ScorerOptions scorer;

  SampleSplit split;
  HyperParams theta;
  double cost_bps = 2.0;
  unsigned threads = 0;  // 0: hardware concurrency

  /// Throws PreconditionError naming the offending key.
  static RunConfig from_json(const std::string& text, const std::filesystem::path& base_dir = {});
  static RunConfig load(const std::filesystem::path& path);
  std::string to_json() const;

  unsigned effective_threads() const;
};

/// Throws PreconditionError for k < 1, m < 1 or eta <= 0.
void validate_theta(const HyperParams& theta);
/// Reads {"tau":..,"k":..,"m":..,"pi":..,"c":..,"w":..,"eta":..}, either bare or
/// under a "theta" key. Missing fields take HyperParams defaults.
HyperParams theta_from_json(const std::string& text);
std::string theta_to_json(const HyperParams& theta);

}  // namespace llmmom
