#include "llmmom/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "llmmom/csv.hpp"
#include "llmmom/error.hpp"

namespace llmmom {

double WeightVector::weight_of(std::string_view ticker) const {
  for (std::size_t i = 0; i < tickers.size(); ++i) {
    if (tickers[i] == ticker) return weights[i];
  }
  return 0.0;
}

double WeightVector::sum() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

std::string_view to_string(WeightScheme s) { return s == WeightScheme::Equal ? "equal" : "value"; }

WeightScheme parse_weight_scheme(std::string_view text) {
  if (text == "equal" || text == "Equal") return WeightScheme::Equal;
  if (text == "value" || text == "Value") return WeightScheme::Value;
  throw PreconditionError("unknown weighting scheme '" + std::string(text) + "'");
}

SelectionResult select(const std::vector<MomentumEntry>& candidates, std::span<const double> scores, std::size_t m) {
  if (candidates.empty()) throw PreconditionError("selection needs at least one candidate");
  if (scores.size() != candidates.size()) throw PreconditionError("every candidate needs a score");
  SelectionResult out;
  out.candidates = candidates;
  out.scores.assign(scores.begin(), scores.end());

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    if (candidates[a].rank != candidates[b].rank) return candidates[a].rank < candidates[b].rank;
    return candidates[a].ticker < candidates[b].ticker;
  });
  const std::size_t keep = std::min(m, candidates.size());
  for (std::size_t i = 0; i < keep; ++i) out.selected.push_back(candidates[order[i]].ticker);
  return out;
}

WeightVector baseline_weights(const std::vector<std::string>& selected, WeightScheme scheme,
                              std::span<const double> caps, Date date) {
  if (selected.empty()) throw PreconditionError("cannot weight an empty selection");
  WeightVector w;
  w.date = date;
  w.tickers = selected;
  const double n = static_cast<double>(selected.size());
  if (scheme == WeightScheme::Equal) {
    w.weights.assign(selected.size(), 1.0 / n);
    return w;
  }
  if (caps.size() != selected.size()) throw PreconditionError("value weighting needs a market cap per name");
  double total = 0.0;
  for (std::size_t i = 0; i < caps.size(); ++i) {
    if (!(caps[i] > 0.0) || !std::isfinite(caps[i])) {
      throw PreconditionError("missing market cap for " + selected[i] + " under value weighting");
    }
    total += caps[i];
  }
  w.weights.reserve(caps.size());
  for (double c : caps) w.weights.push_back(c / total);
  return w;
}

WeightVector tilt(const WeightVector& base, std::span<const double> scores, double eta) {
  if (!(eta > 0.0)) throw PreconditionError("tilt multiplier must be positive");
  if (scores.size() != base.size()) throw PreconditionError("every held name needs a score");
  std::vector<double> mult(scores.size());
  bool identity = true;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    mult[i] = std::pow(eta, scores[i]);
    identity = identity && mult[i] == 1.0;
  }
  if (identity) return base;

  WeightVector out = base;
  double total = 0.0;
  for (std::size_t i = 0; i < mult.size(); ++i) {
    out.weights[i] = base.weights[i] * mult[i];
    total += out.weights[i];
  }
  for (double& x : out.weights) x /= total;
  return out;
}

WeightVector apply_cap(const WeightVector& w, double cap) {
  const std::size_t n = w.size();
  if (static_cast<double>(n) * cap < 1.0) {
    throw PreconditionError("weight cap " + csv::fmt(cap) + " is infeasible for " + std::to_string(n) +
                            " holdings; use a larger portfolio (m * cap >= 1) or disable the cap");
  }
  if (std::none_of(w.weights.begin(), w.weights.end(), [&](double x) { return x > cap; })) return w;

  const double total = w.sum();
  std::vector<char> capped(n, 0);
  std::size_t num_capped = 0;
  WeightVector out = w;
  while (true) {
    const double remaining = 1.0 - static_cast<double>(num_capped) * cap;
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!capped[i]) {
        free_sum += w.weights[i] / total;
        ++free_count;
      }
    }
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (capped[i]) {
        out.weights[i] = cap;
        continue;
      }
      // All-zero remainder: the proportional rule is undefined, spread evenly.
      const double v = free_sum > 0.0 ? (w.weights[i] / total) * (remaining / free_sum)
                                      : remaining / static_cast<double>(free_count);
      out.weights[i] = v;
      if (v > cap) {
        capped[i] = 1;
        ++num_capped;
        changed = true;
      }
    }
    if (!changed) return out;
  }
}

void write_weight_schedule(const std::vector<ScheduleRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string(), 0, "cannot open for writing");
  out << "date,ticker,weight_baseline,weight_enhanced\n";
  for (const auto& row : rows) {
    std::set<std::string> names(row.baseline.tickers.begin(), row.baseline.tickers.end());
    names.insert(row.enhanced.tickers.begin(), row.enhanced.tickers.end());
    const std::string date = row.enhanced.date.iso();
    for (const auto& t : names) {
      out << date << ',' << t << ',' << csv::fmt(row.baseline.weight_of(t)) << ','
          << csv::fmt(row.enhanced.weight_of(t)) << '\n';
    }
  }
}

}  // namespace llmmom
