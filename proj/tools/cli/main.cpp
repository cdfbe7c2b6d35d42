#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "llmmom/analytics.hpp"
#include "llmmom/config.hpp"
#include "llmmom/csv.hpp"
#include "llmmom/error.hpp"
#include "llmmom/report.hpp"
#include "llmmom/search.hpp"
#include "llmmom/svg.hpp"
#include "output_dir.hpp"

namespace fs = std::filesystem;
using namespace llmmom;
using nlohmann::json;

namespace {

// Flags shared by every subcommand. Anything left unset falls back to the
// config file, then to built-in defaults.
struct CommonArgs {
  std::string config;
  std::string output;
  std::string backend;
  std::string from, to;
  std::string returns, risk_free, news, cache, templates;
  std::optional<unsigned> threads;
  std::optional<double> cost_bps;
  std::string log_level = "warn";

  std::optional<std::string> tau, pi, w, cap;
  std::optional<int> k, m;
  std::optional<double> eta;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool theta_flags) {
  cmd->add_option("--config", a.config, "Run config JSON")->check(CLI::ExistingFile);
  cmd->add_option("--output", a.output, "Output directory (replaced atomically)");
  cmd->add_option("--backend", a.backend, "Scoring backend")
      ->check(CLI::IsMember({"mock", "live", "cache-only"}));
  cmd->add_option("--from", a.from, "Window start date YYYY-MM-DD");
  cmd->add_option("--to", a.to, "Window end date YYYY-MM-DD");
  cmd->add_option("--returns", a.returns, "Returns panel CSV");
  cmd->add_option("--risk-free", a.risk_free, "Risk-free CSV");
  cmd->add_option("--news", a.news, "Canonical news JSONL");
  cmd->add_option("--score-cache", a.cache, "Score cache JSONL (default: <output>/scores.jsonl)");
  cmd->add_option("--templates", a.templates, "Directory with basic.txt and advanced.txt");
  cmd->add_option("--threads", a.threads, "Worker threads (0 = all cores)");
  cmd->add_option("--cost-bps", a.cost_bps, "One-way transaction cost in basis points");
  cmd->add_option("--log-level", a.log_level, "trace, debug, info, warn, error or off")
      ->capture_default_str();
  if (!theta_flags) return;
  cmd->add_option("--tau", a.tau, "Rebalance frequency")->check(CLI::IsMember({"weekly", "monthly"}));
  cmd->add_option("--k", a.k, "News lookback in business days");
  cmd->add_option("--m", a.m, "Portfolio size");
  cmd->add_option("--pi", a.pi, "Prompt variant")->check(CLI::IsMember({"basic", "advanced"}));
  cmd->add_option("--cap", a.cap, "15% per-name cap")->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--w", a.w, "Base weighting")->check(CLI::IsMember({"equal", "value"}));
  cmd->add_option("--eta", a.eta, "Tilt multiplier");
}

RunConfig resolve(const CommonArgs& a) {
  RunConfig cfg = a.config.empty() ? RunConfig{} : RunConfig::load(a.config);
  auto path = [](const std::string& s, fs::path& out) {
    if (!s.empty()) out = s;
  };
  path(a.returns, cfg.paths.returns);
  path(a.risk_free, cfg.paths.risk_free);
  path(a.news, cfg.paths.news);
  path(a.cache, cfg.paths.score_cache);
  path(a.templates, cfg.paths.templates);
  path(a.output, cfg.paths.output);
  if (!a.backend.empty()) cfg.backend = parse_backend_kind(a.backend);
  if (a.threads) cfg.threads = *a.threads;
  if (a.cost_bps) cfg.cost_bps = *a.cost_bps;
  if (a.tau) cfg.theta.tau = parse_frequency(*a.tau);
  if (a.k) cfg.theta.k = *a.k;
  if (a.m) cfg.theta.m = *a.m;
  if (a.pi) cfg.theta.pi = parse_prompt_variant(*a.pi);
  if (a.cap) cfg.theta.cap = *a.cap == "on";
  if (a.w) cfg.theta.w = parse_weight_scheme(*a.w);
  if (a.eta) cfg.theta.eta = *a.eta;
  validate_theta(cfg.theta);
  if (cfg.paths.output.empty()) throw PreconditionError("no output directory: pass --output or set paths.output");
  return cfg;
}

std::optional<Date> date_flag(const std::string& s, const char* name) {
  if (s.empty()) return std::nullopt;
  try {
    return Date::parse(s);
  } catch (const std::exception& e) {
    throw PreconditionError(std::string("--") + name + ": " + e.what());
  }
}

void require_file(const fs::path& p, const char* what) {
  if (p.empty()) throw PreconditionError(std::string("no ") + what + " path configured");
  if (!fs::exists(p)) throw PreconditionError(std::string(what) + " not found: " + p.string());
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw DataError(p.string(), 0, "write failed");
}

std::string opt_str(const std::optional<double>& v) { return v ? csv::fmt(*v) : "undefined"; }

// Loaded inputs plus the scoring stack for one command.
struct Session {
  RunConfig cfg;
  ReturnPanel panel;
  NewsStore news;
  PromptTemplates templates = PromptTemplates::builtin();
  std::unique_ptr<ScoreCache> cache;
  std::unique_ptr<ScoringBackend> backend;
  std::unique_ptr<Scorer> scorer;
  std::unique_ptr<StrategyContext> ctx;
};

std::unique_ptr<Session> open_session(const RunConfig& cfg, const cli::OutputDir* out, bool need_scorer) {
  auto s = std::make_unique<Session>();
  s->cfg = cfg;
  require_file(cfg.paths.returns, "returns panel");
  require_file(cfg.paths.risk_free, "risk-free series");
  s->panel = load_panel(cfg.paths.returns, cfg.paths.risk_free);
  if (!cfg.paths.news.empty()) {
    require_file(cfg.paths.news, "news file");
    s->news = load_news(cfg.paths.news);
  } else {
    spdlog::warn("no news file configured; every news window is empty");
  }
  if (!cfg.paths.templates.empty()) s->templates = PromptTemplates::from_directory(cfg.paths.templates);

  fs::path cache_path = cfg.paths.score_cache;
  if (cache_path.empty() && out != nullptr) cache_path = out->file("scores.jsonl");
  if (cfg.backend == BackendKind::CacheOnly) {
    if (cfg.paths.score_cache.empty()) {
      throw PreconditionError("the cache-only backend needs paths.score_cache (or --score-cache)");
    }
    require_file(cfg.paths.score_cache, "score cache");
  }
  s->cache = cache_path.empty() ? std::make_unique<ScoreCache>() : std::make_unique<ScoreCache>(cache_path);
  if (need_scorer) {
    switch (cfg.backend) {
      case BackendKind::Mock: s->backend = std::make_unique<MockBackend>(); break;
      case BackendKind::Live: s->backend = std::make_unique<LiveBackend>(cfg.live); break;
      case BackendKind::CacheOnly: break;
    }
  }
  s->scorer = std::make_unique<Scorer>(*s->cache, s->backend.get(), cfg.scorer);
  s->ctx = std::make_unique<StrategyContext>(s->panel, s->news, s->templates, *s->scorer, cfg.cost_bps);
  return s;
}

json stats_json(const ScorerStats& st, std::size_t requests) {
  return {{"requests", requests},
          {"backend_calls", st.backend_calls},
          {"cache_hits", st.cache_hits},
          {"empty_windows", st.missing},
          {"clamped", st.clamped}};
}

// ---- ingest ---------------------------------------------------------------

struct IngestArgs {
  std::string vendor_news;
  std::string mapping;
};

int cmd_ingest(const CommonArgs& a, const IngestArgs& ia) {
  const RunConfig cfg = resolve(a);
  cli::OutputDir out(cfg.paths.output, "ingest");
  require_file(cfg.paths.returns, "returns panel");
  require_file(cfg.paths.risk_free, "risk-free series");
  const ReturnPanel panel = load_panel(cfg.paths.returns, cfg.paths.risk_free);

  std::vector<NewsItem> items;
  std::size_t loaded_dupes = 0;
  if (!cfg.paths.news.empty()) {
    require_file(cfg.paths.news, "news file");
    const NewsStore store = load_news(cfg.paths.news);
    loaded_dupes = store.duplicates_dropped();
    for (const auto& [ticker, list] : store.by_ticker()) items.insert(items.end(), list.begin(), list.end());
  }
  if (!ia.vendor_news.empty()) {
    require_file(ia.vendor_news, "vendor news file");
    const NewsFieldMapping mapping = ia.mapping.empty() ? NewsFieldMapping{} : NewsFieldMapping::from_json_file(ia.mapping);
    auto adapted = adapt_news(ia.vendor_news, mapping);
    items.insert(items.end(), adapted.begin(), adapted.end());
  }
  const NewsStore news(std::move(items));

  save_panel(panel, out.file("returns.csv"), out.file("risk_free.csv"));
  save_news(news, out.file("news.jsonl"));

  std::size_t present = 0, missing = 0, members = 0;
  for (std::size_t t = 0; t < panel.num_dates(); ++t) {
    for (std::size_t i = 0; i < panel.num_tickers(); ++i) {
      if (panel.member(t, i)) {
        ++members;
        is_missing(panel.ret(t, i)) ? ++missing : ++present;
      }
    }
  }
  std::size_t unknown = 0;
  for (const auto& [ticker, list] : news.by_ticker()) {
    if (!panel.ticker_index(ticker)) unknown += list.size();
  }
  json report = {{"dates", panel.num_dates()},
                 {"first_date", panel.num_dates() ? panel.dates().front().iso() : ""},
                 {"last_date", panel.num_dates() ? panel.dates().back().iso() : ""},
                 {"tickers", panel.num_tickers()},
                 {"member_cells", members},
                 {"member_returns_present", present},
                 {"member_returns_missing", missing},
                 {"news_items", news.size()},
                 {"news_duplicates_dropped", loaded_dupes + news.duplicates_dropped()},
                 {"news_items_unknown_ticker", unknown}};
  write_text(out.file("validation.json"), report.dump(2) + "\n");
  out.commit();
  std::cout << "ingest: " << panel.num_dates() << " dates, " << panel.num_tickers() << " tickers, " << news.size()
            << " news items -> " << out.final_dir().string() << "\n";
  return 0;
}

// ---- score ------------------------------------------------------------------

int cmd_score(const CommonArgs& a, bool grid) {
  const RunConfig cfg = resolve(a);
  cli::OutputDir out(cfg.paths.output, "score");
  auto s = open_session(cfg, &out, true);
  const Date from = date_flag(a.from, "from").value_or(cfg.split.validation_from);
  const Date to = date_flag(a.to, "to").value_or(cfg.split.test_to);
  const auto thetas = grid ? enumerate_grid() : std::vector<HyperParams>{cfg.theta};
  const std::size_t requests = s->ctx->prepare(thetas, from, to);
  const auto st = s->scorer->stats();
  write_text(out.file("score_summary.json"), stats_json(st, requests).dump(2) + "\n");
  out.commit();
  std::cout << "score: requests=" << requests << " backend_calls=" << st.backend_calls
            << " cache_hits=" << st.cache_hits << " empty_windows=" << st.missing << " clamped=" << st.clamped
            << "\n";
  return 0;
}

// ---- backtest ---------------------------------------------------------------

void write_alpha_row(std::ostream& os, const std::string& window, const StrategyRun& run,
                     const std::vector<double>& rf) {
  auto enh = run.enhanced.net_between(run.from, run.to);
  auto base = run.baseline.net_between(run.from, run.to);
  for (std::size_t i = 0; i < rf.size(); ++i) {
    enh[i] -= rf[i];
    base[i] -= rf[i];
  }
  os << window << ',';
  try {
    const AlphaReport r = alpha_regression(enh, base);
    os << csv::fmt(r.alpha_daily) << ',' << csv::fmt(r.alpha_annualized) << ',' << csv::fmt(r.beta) << ','
       << opt_str(r.t_stat_alpha) << ',' << r.observations << '\n';
  } catch (const PreconditionError& e) {
    spdlog::warn("alpha regression on {} window skipped: {}", window, e.what());
    os << "undefined,undefined,undefined,undefined," << enh.size() << '\n';
  }
}

int cmd_backtest(const CommonArgs& a) {
  const RunConfig cfg = resolve(a);
  cli::OutputDir out(cfg.paths.output, "backtest");
  auto s = open_session(cfg, &out, true);
  const Date full_from = date_flag(a.from, "from").value_or(cfg.split.validation_from);
  const Date full_to = date_flag(a.to, "to").value_or(cfg.split.test_to);
  const HyperParams& theta = cfg.theta;
  s->ctx->prepare({theta}, full_from, full_to);
  s->ctx->prepare({theta}, cfg.split.test_from, cfg.split.test_to);
  const StrategyRun full = s->ctx->evaluate(theta, full_from, full_to);
  const StrategyRun test = s->ctx->evaluate(theta, cfg.split.test_from, cfg.split.test_to);

  const std::vector<StatsColumn> cols = {{"baseline_full", full.baseline_stats},
                                         {"enhanced_full", full.enhanced_stats},
                                         {"baseline_test", test.baseline_stats},
                                         {"enhanced_test", test.enhanced_stats}};
  write_stats_csv(cols, out.file("stats.csv"));
  const std::string table = format_stats_table(cols);
  write_text(out.file("stats.txt"), "theta: " + theta.str() + "\n\n" + table);

  {
    std::ofstream os(out.file("turnover.csv"), std::ios::binary);
    os << "strategy,window,per_rebalance,annualized\n";
    auto row = [&](const char* name, const char* window, const BacktestResult& r, Date from, Date to) {
      os << name << ',' << window << ',' << csv::fmt(turnover_stat(r, from, to)) << ','
         << csv::fmt(annualized_turnover(r, theta.tau, from, to)) << '\n';
    };
    row("baseline", "full", full.baseline, full_from, full_to);
    row("enhanced", "full", full.enhanced, full_from, full_to);
    row("baseline", "test", test.baseline, test.from, test.to);
    row("enhanced", "test", test.enhanced, test.from, test.to);
  }
  {
    std::ofstream os(out.file("alpha.csv"), std::ios::binary);
    os << "window,alpha_daily,alpha_annualized,beta,t_stat_alpha,observations\n";
    write_alpha_row(os, "full", full, s->ctx->risk_free_on(full.window_dates));
    write_alpha_row(os, "test", test, s->ctx->risk_free_on(test.window_dates));
  }

  // Daily series over the full window, equity rebased to 1 at its start.
  const auto enh = full.enhanced.net_between(full_from, full_to);
  const auto base = full.baseline.net_between(full_from, full_to);
  std::vector<std::string> labels;
  svg::Series eq_base{"baseline", {}}, eq_enh{"LLM-enhanced", {}};
  {
    std::ofstream rs(out.file("returns.csv"), std::ios::binary);
    std::ofstream es(out.file("equity.csv"), std::ios::binary);
    rs << "date,baseline,enhanced\n";
    es << "date,baseline,enhanced\n";
    double gb = 1.0, ge = 1.0;
    for (std::size_t i = 0; i < full.window_dates.size(); ++i) {
      gb *= 1.0 + base[i];
      ge *= 1.0 + enh[i];
      const std::string d = full.window_dates[i].iso();
      rs << d << ',' << csv::fmt(base[i]) << ',' << csv::fmt(enh[i]) << '\n';
      es << d << ',' << csv::fmt(gb) << ',' << csv::fmt(ge) << '\n';
      labels.push_back(d);
      eq_base.values.push_back(gb);
      eq_enh.values.push_back(ge);
    }
  }
  svg::write(svg::line_chart("Cumulative return, " + theta.str(), labels, {eq_base, eq_enh}),
             out.file("equity.svg").string());
  write_weight_schedule(full.schedule, out.file("weights.csv"));
  write_text(out.file("theta.json"), theta_to_json(theta));
  out.commit();
  std::cout << "theta: " << theta.str() << "\n\n" << table;
  return 0;
}

// ---- search -----------------------------------------------------------------

int cmd_search(const CommonArgs& a) {
  const RunConfig cfg = resolve(a);
  cli::OutputDir out(cfg.paths.output, "search");
  auto s = open_session(cfg, &out, true);
  const Date from = date_flag(a.from, "from").value_or(cfg.split.validation_from);
  const Date to = date_flag(a.to, "to").value_or(cfg.split.validation_to);
  const auto grid = enumerate_grid();
  const GridResult result = run_grid(*s->ctx, grid, from, to, cfg.effective_threads());
  write_grid_csv(result, out.file("grid.csv"));

  const GridRow& best = result.best_row();
  json star = json::parse(theta_to_json(best.theta));
  json doc = {{"theta", star},
              {"utility", best.utility},
              {"pct_sharpe", best.pct_sharpe},
              {"pct_mdd", best.pct_mdd},
              {"window", {{"from", from.iso()}, {"to", to.iso()}}}};
  write_text(out.file("theta_star.json"), doc.dump(2) + "\n");

  // Out-of-sample check of the selected configuration.
  s->ctx->prepare({best.theta}, cfg.split.test_from, cfg.split.test_to);
  const StrategyRun test = s->ctx->evaluate(best.theta, cfg.split.test_from, cfg.split.test_to);
  write_stats_csv({{"baseline_test", test.baseline_stats}, {"enhanced_test", test.enhanced_stats}},
                  out.file("test_stats.csv"));
  out.commit();
  std::cout << "search: " << result.rows.size() << " configurations on " << from.iso() << ".." << to.iso()
            << "\nbest: " << best.theta.str() << " U=" << csv::fmt(best.utility) << "\n";
  return 0;
}

// ---- perturb ----------------------------------------------------------------

int cmd_perturb(const CommonArgs& a, const std::string& theta_file, std::vector<std::string> params) {
  const RunConfig cfg = resolve(a);
  HyperParams star = cfg.theta;
  if (!theta_file.empty()) {
    std::ifstream in(theta_file);
    if (!in) throw PreconditionError("cannot open " + theta_file);
    star = theta_from_json(std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()));
  }
  if (params.empty()) params.assign(std::begin(kFreeParams), std::end(kFreeParams));
  for (const auto& p : params) perturbations(star, p);  // reject unknown names before any work

  cli::OutputDir out(cfg.paths.output, "perturb");
  auto s = open_session(cfg, &out, true);
  const Date from = date_flag(a.from, "from").value_or(cfg.split.test_from);
  const Date to = date_flag(a.to, "to").value_or(cfg.split.test_to);
  for (const auto& p : params) {
    const auto rows = perturb(*s->ctx, star, p, from, to, cfg.effective_threads());
    write_perturb_csv(rows, out.file("perturb_" + p + ".csv"));
    std::vector<std::string> labels;
    svg::Series enh{"LLM-enhanced", {}}, base{"baseline", {}};
    for (const auto& r : rows) {
      labels.push_back(r.value + (r.is_optimum ? "*" : ""));
      enh.values.push_back(r.enhanced.sharpe.value_or(0.0));
      base.values.push_back(r.baseline.sharpe.value_or(0.0));
    }
    svg::write(svg::bar_chart("Sharpe ratio when varying " + p, labels, {base, enh}),
               out.file("perturb_" + p + ".svg").string());
  }
  write_text(out.file("theta_star.json"), theta_to_json(star));
  out.commit();
  std::cout << "perturb: " << params.size() << " parameter(s) around " << star.str() << "\n";
  return 0;
}

// ---- report -----------------------------------------------------------------

int cmd_report(const CommonArgs& a) {
  const RunConfig cfg = resolve(a);
  cli::OutputDir out(cfg.paths.output, "report");
  const auto from = date_flag(a.from, "from");
  const auto to = date_flag(a.to, "to");
  require_file(cfg.paths.returns, "returns panel");
  require_file(cfg.paths.risk_free, "risk-free series");
  const ReturnPanel panel = load_panel(cfg.paths.returns, cfg.paths.risk_free);
  NewsStore news;
  if (!cfg.paths.news.empty()) {
    require_file(cfg.paths.news, "news file");
    news = load_news(cfg.paths.news);
  }
  std::vector<RawScore> scores;
  if (!cfg.paths.score_cache.empty() && fs::exists(cfg.paths.score_cache)) {
    const ScoreCache cache(cfg.paths.score_cache);
    for (const auto& e : cache.entries()) {
      if ((from && e.key.as_of < *from) || (to && *to < e.key.as_of)) continue;
      scores.push_back(e.raw);
    }
  }
  write_year_counts(news_per_year(news, panel), out.file("news_per_year"));
  write_histogram(news_per_firm_year(news, panel), "News items per firm-year", out.file("news_per_firm_year"));
  write_histogram(return_histogram(panel, -0.1, 0.1, 40, from, to), "Daily returns", out.file("return_histogram"));
  write_histogram(score_histogram(scores), "Model scores (missing excluded)", out.file("score_histogram"));
  out.commit();
  std::cout << "report: " << news.size() << " news items, " << scores.size() << " cached scores -> "
            << out.final_dir().string() << "\n";
  return 0;
}

void set_log_level(const std::string& level) {
  auto logger = spdlog::stderr_color_mt("llmmom");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(level));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Backtesting engine for news-scored cross-sectional momentum", "llmmom"};
  app.require_subcommand(1);

  CommonArgs ingest_a, score_a, backtest_a, search_a, perturb_a, report_a;
  IngestArgs ingest_x;
  bool score_grid = false;
  std::string theta_file;
  std::vector<std::string> params;

  auto* ingest = app.add_subcommand("ingest", "Validate and canonicalize the returns panel and news");
  add_common(ingest, ingest_a, false);
  ingest->add_option("--vendor-news", ingest_x.vendor_news, "Vendor news JSONL to convert");
  ingest->add_option("--mapping", ingest_x.mapping, "Field-mapping JSON for --vendor-news");

  auto* score = app.add_subcommand("score", "Populate the score cache");
  add_common(score, score_a, true);
  score->add_flag("--grid", score_grid, "Score every key needed by the full grid instead of one theta");

  auto* backtest = app.add_subcommand("backtest", "Baseline vs enhanced backtest for one theta");
  add_common(backtest, backtest_a, true);

  auto* search = app.add_subcommand("search", "Grid search over all 512 configurations");
  add_common(search, search_a, false);

  auto* perturb_cmd = app.add_subcommand("perturb", "Vary one hyperparameter at a time around theta*");
  add_common(perturb_cmd, perturb_a, true);
  perturb_cmd->add_option("--theta-star", theta_file, "theta_star.json written by search");
  perturb_cmd->add_option("--param", params, "Parameter(s) to vary: tau,k,m,pi,c,w,eta (default: all)");

  auto* report = app.add_subcommand("report", "Summary statistics of the inputs and scores");
  add_common(report, report_a, false);

  CLI11_PARSE(app, argc, argv);

  const CommonArgs* active = nullptr;
  const std::pair<CLI::App*, const CommonArgs*> commands[] = {{ingest, &ingest_a},   {score, &score_a},
                                                              {backtest, &backtest_a}, {search, &search_a},
                                                              {perturb_cmd, &perturb_a}, {report, &report_a}};
  for (const auto& [cmd, args] : commands) {
    if (cmd->parsed()) active = args;
  }
  try {
    set_log_level(active->log_level);
    if (ingest->parsed()) return cmd_ingest(ingest_a, ingest_x);
    if (score->parsed()) return cmd_score(score_a, score_grid);
    if (backtest->parsed()) return cmd_backtest(backtest_a);
    if (search->parsed()) return cmd_search(search_a);
    if (perturb_cmd->parsed()) return cmd_perturb(perturb_a, theta_file, params);
    if (report->parsed()) return cmd_report(report_a);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
