#include "llmmom/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "llmmom/error.hpp"

namespace llmmom {

namespace {

// mt19937_64's output sequence is fixed by the standard; the library's
// distributions are not, so uniforms and normals are derived by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double normal() {
    if (spare_) {
      spare_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    cached_ = r * std::sin(2.0 * M_PI * u2);
    spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }
  std::uint64_t bits() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool spare_ = false;
  double cached_ = 0.0;
};

std::string ticker_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "S%03d", i);
  return buf;
}

}  // namespace

ReturnPanel synthetic_panel(const SyntheticSpec& spec) {
  if (spec.tickers < 1) throw PreconditionError("synthetic panel needs at least one ticker");
  std::vector<Date> dates;
  for (Date d = spec.start; d <= spec.end; d = d.plus_days(1)) {
    if (!d.is_weekend()) dates.push_back(d);
  }
  if (dates.empty()) throw PreconditionError("synthetic panel has no weekdays in range");
  const auto n = static_cast<std::size_t>(spec.tickers);
  std::vector<std::string> tickers;
  for (int i = 0; i < spec.tickers; ++i) tickers.push_back(ticker_name(i));

  Rng rng(spec.seed);
  std::vector<double> beta(n), vol(n), drift(n), cap(n);
  std::vector<std::size_t> entry(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    beta[i] = 0.6 + 0.8 * rng.uniform();
    vol[i] = 0.01 + 0.02 * rng.uniform();
    drift[i] = 0.0004 * rng.normal();
    cap[i] = std::exp(23.0 + 1.2 * rng.normal());
    if (rng.uniform() < spec.late_entry_share) {
      entry[i] = static_cast<std::size_t>(rng.uniform() * static_cast<double>(dates.size()));
    }
  }

  std::vector<ReturnPanel::Cell> cells(dates.size() * n);
  std::vector<double> rf(dates.size());
  const double rf_daily = spec.risk_free_annual / 252.0;
  for (std::size_t t = 0; t < dates.size(); ++t) {
    rf[t] = rf_daily * (1.0 + 0.1 * std::sin(static_cast<double>(t) / 120.0));
    const double market = 0.0003 + 0.009 * rng.normal();
    for (std::size_t i = 0; i < n; ++i) {
      // Drifts wander slowly, which gives winners some persistence.
      drift[i] = 0.995 * drift[i] + 0.00004 * rng.normal();
      const double r = std::max(-0.5, drift[i] + beta[i] * market + vol[i] * rng.normal());
      const bool missing = rng.uniform() < spec.missing_rate;
      auto& c = cells[t * n + i];
      cap[i] *= 1.0 + r;
      c.market_cap = cap[i];
      c.member = t >= entry[i];
      if (!missing) c.ret = r;
    }
  }
  return ReturnPanel(std::move(dates), std::move(tickers), std::move(cells), std::move(rf));
}

std::vector<NewsItem> synthetic_news(const SyntheticSpec& spec, const ReturnPanel& panel) {
  static constexpr const char* kTopics[] = {"earnings beat expectations", "guidance cut", "new product launch",
                                            "regulatory probe", "analyst upgrade", "analyst downgrade",
                                            "share buyback", "executive departure"};
  Rng rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<NewsItem> out;
  for (std::size_t t = 0; t < panel.num_dates(); ++t) {
    const Date d = panel.dates()[t];
    for (std::size_t i = 0; i < panel.num_tickers(); ++i) {
      // Up to three draws per day keep the count roughly Poisson.
      for (int draw = 0; draw < 3; ++draw) {
        if (rng.uniform() >= spec.news_per_day / 3.0) continue;
        const int minute_of_day = static_cast<int>(rng.bits() % (24 * 60));
        const auto& topic = kTopics[rng.bits() % std::size(kTopics)];
        NewsItem item;
        item.ticker = panel.tickers()[i];
        item.published_at = Timestamp{d, minute_of_day / 60, minute_of_day % 60};
        item.title = item.ticker + ": " + topic;
        item.summary = "Synthetic report on " + item.ticker + " (" + topic + ") dated " + d.iso() + ".";
        item.source = "synthetic";
        out.push_back(std::move(item));
      }
    }
  }
  return out;
}

}  // namespace llmmom
