#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "llmmom/calendar.hpp"
#include "llmmom/market_data.hpp"

namespace llmmom {

/// Target long-only weights on a rebalance date. tickers and weights are parallel.
struct WeightVector {
  Date date;
  std::vector<std::string> tickers;
  std::vector<double> weights;

  std::size_t size() const { return tickers.size(); }
  double weight_of(std::string_view ticker) const;  // 0 when not held
  double sum() const;
};

enum class WeightScheme { Equal, Value };
std::string_view to_string(WeightScheme s);
WeightScheme parse_weight_scheme(std::string_view text);

inline constexpr double kWeightCap = 0.15;

struct SelectionResult {
  Date date;
  std::vector<MomentumEntry> candidates;  // momentum-ranked
  std::vector<double> scores;             // normalized, parallel to candidates
  std::vector<std::string> selected;      // score desc, then rank asc, then ticker
};

/// Picks the top `m` candidates by normalized score; ties fall back to the
/// momentum rank and then the ticker. Holds every candidate when m exceeds
/// the candidate count.
SelectionResult select(const std::vector<MomentumEntry>& candidates, std::span<const double> scores, std::size_t m);

/// Equal: 1/m each. Value: proportional to `caps` (parallel to `selected`).
WeightVector baseline_weights(const std::vector<std::string>& selected, WeightScheme scheme,
                              std::span<const double> caps, Date date = {});

/// base_i * eta^score_i, renormalized. Returns `base` untouched when every
/// multiplier is exactly 1 (eta == 1 or all scores 0).
WeightVector tilt(const WeightVector& base, std::span<const double> scores, double eta);

/// Clamps weights above `cap` and spreads the excess over the uncapped names
/// in proportion to their weights, repeating until no weight exceeds `cap`.
/// Throws PreconditionError when size() * cap < 1.
WeightVector apply_cap(const WeightVector& w, double cap = kWeightCap);

/// One rebalance's baseline and enhanced targets.
struct ScheduleRow {
  WeightVector baseline;
  WeightVector enhanced;
};

/// CSV `date,ticker,weight_baseline,weight_enhanced` over the union of held names.
void write_weight_schedule(const std::vector<ScheduleRow>& rows, const std::filesystem::path& path);

}  // namespace llmmom
