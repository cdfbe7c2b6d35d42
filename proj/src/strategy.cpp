#include "llmmom/strategy.hpp"

#include <algorithm>
#include <cstdio>

#include "llmmom/csv.hpp"
#include "llmmom/error.hpp"

namespace llmmom {

std::string HyperParams::str() const {
  char eta_buf[32];
  std::snprintf(eta_buf, sizeof eta_buf, "%g", eta);
  return "tau=" + std::string(to_string(tau)) + " k=" + std::to_string(k) + " l=" + std::to_string(horizon()) +
         " m=" + std::to_string(m) + " pi=" + std::string(to_string(pi)) + " c=" + (cap ? "on" : "off") +
         " w=" + std::string(to_string(w)) + " eta=" + eta_buf;
}

std::string_view to_string(Frequency f) { return f == Frequency::Weekly ? "weekly" : "monthly"; }

Frequency parse_frequency(std::string_view text) {
  if (text == "weekly" || text == "week") return Frequency::Weekly;
  if (text == "monthly" || text == "month") return Frequency::Monthly;
  throw PreconditionError("unknown rebalance frequency '" + std::string(text) + "'");
}

void SampleSplit::validate() const {
  if (validation_to < validation_from) throw PreconditionError("validation window ends before it starts");
  if (test_to < test_from) throw PreconditionError("test window ends before it starts");
  if (!(validation_to < test_from)) throw PreconditionError("validation window must precede the test window");
}

StrategyContext::StrategyContext(const ReturnPanel& panel, const NewsStore& news, const PromptTemplates& templates,
                                 Scorer& scorer, double cost_bps)
    : panel_(panel), news_(news), templates_(templates), scorer_(scorer), cost_bps_(cost_bps) {}

std::vector<Date> StrategyContext::rebalance_dates(Frequency tau, Date from, Date to) const {
  const auto& cal = panel_.calendar();
  std::vector<Date> out;
  std::optional<Date> inception;
  for (std::size_t i = kSignalLookback; i < cal.size() && cal[i] <= to; ++i) {
    if (!cal.is_period_end(i, tau)) continue;
    if (cal[i] < from) {
      inception = cal[i];
    } else {
      out.push_back(cal[i]);
    }
  }
  if (inception) out.insert(out.begin(), *inception);
  return out;
}

const RebalanceCandidates& StrategyContext::candidates(Date date) {
  std::lock_guard lock(mu_);
  auto& slot = candidates_[date];
  if (!slot) {
    auto rc = std::make_unique<RebalanceCandidates>();
    rc->date = date;
    const MomentumSignal sig = momentum_signal(panel_, date);
    rc->candidates = extended_momentum_set(sig);
    for (const auto& e : sig.entries) {
      if (e.decile > 1) break;
      rc->top_decile.push_back(e);
    }
    slot = std::move(rc);
  }
  return *slot;
}

std::vector<ScoreRequest> StrategyContext::score_requests(const std::vector<Date>& dates, int k, int horizon,
                                                          PromptVariant pi) {
  std::vector<ScoreRequest> out;
  for (const Date& date : dates) {
    const auto& rc = candidates(date);
    const Timestamp as_of{date, kRequestHour, kRequestMinute};
    const Date target = panel_.calendar().offset(date, horizon);
    for (const auto& cand : rc.candidates) {
      PromptSpec spec;
      spec.variant = pi;
      spec.ticker = cand.ticker;
      spec.as_of = as_of;
      spec.lookback_days = k;
      spec.horizon_days = horizon;
      spec.window = news_.query_window(cand.ticker, date, k, panel_.calendar());
      ScoreRequest req;
      req.prompt = render(spec, target, templates_);
      req.key = ScoreKey{cand.ticker, date, k, horizon, pi, req.prompt.template_hash};
      out.push_back(std::move(req));
    }
  }
  return out;
}

std::size_t StrategyContext::prepare(const std::vector<HyperParams>& thetas, Date from, Date to) {
  std::map<std::tuple<Frequency, int, PromptVariant>, bool> combos;
  for (const auto& t : thetas) combos[{t.tau, t.k, t.pi}] = true;

  std::vector<ScoreRequest> requests;
  std::vector<std::pair<ScoreSlot, std::size_t>> layout;  // slot -> candidate count, in request order
  for (const auto& [combo, unused] : combos) {
    const auto [tau, k, pi] = combo;
    const int horizon = tau == Frequency::Weekly ? 5 : 21;
    for (const Date& date : rebalance_dates(tau, from, to)) {
      const ScoreSlot slot{date, k, horizon, pi};
      {
        std::lock_guard lock(mu_);
        if (scores_.count(slot) != 0) continue;
      }
      auto reqs = score_requests({date}, k, horizon, pi);
      layout.emplace_back(slot, reqs.size());
      std::move(reqs.begin(), reqs.end(), std::back_inserter(requests));
    }
  }
  if (requests.empty()) return 0;

  const std::vector<RawScore> raw = scorer_.batch_score(requests);
  std::size_t pos = 0;
  std::lock_guard lock(mu_);
  for (const auto& [slot, count] : layout) {
    auto col = std::make_unique<ScoreColumn>();
    for (std::size_t i = 0; i < count; ++i, ++pos) {
      col->raw.push_back(raw[pos]);
      col->normalized.push_back(normalize(raw[pos]));
    }
    scores_.try_emplace(slot, std::move(col));
  }
  return requests.size();
}

const StrategyContext::ScoreColumn& StrategyContext::column(Date date, int k, int horizon, PromptVariant pi) {
  const ScoreSlot slot{date, k, horizon, pi};
  {
    std::lock_guard lock(mu_);
    auto it = scores_.find(slot);
    if (it != scores_.end()) return *it->second;
  }
  const auto requests = score_requests({date}, k, horizon, pi);
  auto col = std::make_unique<ScoreColumn>();
  for (const auto& req : requests) {
    col->raw.push_back(scorer_.score(req.prompt, req.key));
    col->normalized.push_back(normalize(col->raw.back()));
  }
  std::lock_guard lock(mu_);
  auto [it, inserted] = scores_.try_emplace(slot, std::move(col));
  return *it->second;
}

const std::vector<double>& StrategyContext::normalized_scores(Date date, int k, int horizon, PromptVariant pi) {
  return column(date, k, horizon, pi).normalized;
}

const std::vector<RawScore>& StrategyContext::raw_scores(Date date, int k, int horizon, PromptVariant pi) {
  return column(date, k, horizon, pi).raw;
}

std::vector<double> StrategyContext::caps_on(Date date, const std::vector<std::string>& tickers) const {
  const auto t = panel_.date_index(date);
  std::vector<double> caps;
  caps.reserve(tickers.size());
  for (const auto& name : tickers) {
    const auto i = panel_.ticker_index(name);
    caps.push_back(i ? panel_.market_cap(*t, *i) : kMissing);
  }
  return caps;
}

ScheduleRow StrategyContext::build_targets(const HyperParams& theta, Date date) {
  const auto& rc = candidates(date);
  const auto& scores = normalized_scores(date, theta.k, theta.horizon(), theta.pi);

  // Enhanced: score-driven selection, base weights, tilt, then the cap.
  const SelectionResult sel = select(rc.candidates, scores, static_cast<std::size_t>(theta.m));
  std::vector<double> selected_scores;
  selected_scores.reserve(sel.selected.size());
  for (const auto& name : sel.selected) {
    for (std::size_t i = 0; i < rc.candidates.size(); ++i) {
      if (rc.candidates[i].ticker == name) {
        selected_scores.push_back(scores[i]);
        break;
      }
    }
  }
  ScheduleRow row;
  row.enhanced = tilt(baseline_weights(sel.selected, theta.w, caps_on(date, sel.selected), date), selected_scores,
                      theta.eta);
  if (theta.cap) row.enhanced = apply_cap(row.enhanced, kWeightCap);

  // Baseline comparator: the whole top-two-decile pool, same scheme and cap.
  std::vector<std::string> pool;
  pool.reserve(rc.candidates.size());
  for (const auto& c : rc.candidates) pool.push_back(c.ticker);
  row.baseline = baseline_weights(pool, theta.w, caps_on(date, pool), date);
  if (theta.cap) row.baseline = apply_cap(row.baseline, kWeightCap);
  return row;
}

std::vector<double> StrategyContext::risk_free_on(const std::vector<Date>& dates) const {
  std::vector<double> rf;
  rf.reserve(dates.size());
  for (const auto& d : dates) rf.push_back(panel_.risk_free(*panel_.date_index(d)));
  return rf;
}

StrategyRun StrategyContext::evaluate(const HyperParams& theta, Date from, Date to) {
  const auto dates = rebalance_dates(theta.tau, from, to);
  if (dates.empty()) {
    throw PreconditionError("no feasible rebalance date for " + theta.str() + " in " + from.iso() + ".." + to.iso());
  }
  StrategyRun run;
  run.theta = theta;
  run.from = from;
  run.to = to;
  BacktestConfig enh_cfg{cost_bps_, {}, to};
  BacktestConfig base_cfg{cost_bps_, {}, to};
  for (const Date& d : dates) {
    run.schedule.push_back(build_targets(theta, d));
    enh_cfg.schedule.push_back(run.schedule.back().enhanced);
    base_cfg.schedule.push_back(run.schedule.back().baseline);
  }
  run.enhanced = run_backtest(panel_, enh_cfg);
  run.baseline = run_backtest(panel_, base_cfg);
  run.window_dates = run.enhanced.dates_between(from, to);
  const auto rf = risk_free_on(run.window_dates);
  run.enhanced_stats = perf_stats(run.enhanced.net_between(from, to), rf, turnover_stat(run.enhanced, from, to));
  run.baseline_stats = perf_stats(run.baseline.net_between(from, to), rf, turnover_stat(run.baseline, from, to));
  return run;
}

BacktestResult StrategyContext::classic_top_decile(Frequency tau, Date from, Date to) {
  BacktestConfig cfg{cost_bps_, {}, to};
  for (const Date& d : rebalance_dates(tau, from, to)) {
    const auto& top = candidates(d).top_decile;
    WeightVector w;
    w.date = d;
    for (const auto& e : top) {
      w.tickers.push_back(e.ticker);
      w.weights.push_back(1.0 / static_cast<double>(top.size()));
    }
    cfg.schedule.push_back(std::move(w));
  }
  return run_backtest(panel_, cfg);
}

}  // namespace llmmom
