#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <sys/wait.h>

namespace testing {

namespace fs = std::filesystem;
using llmmom::Date;

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "llmmom-test-XXXXXX").string();
  if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

CommandResult run_command(const std::string& cmd) {
  CommandResult r;
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).generic_string()] = read_file(e.path());
  }
  return out;
}

std::vector<Date> weekdays(Date start, std::size_t n) {
  std::vector<Date> out;
  for (Date d = start; out.size() < n; d = d.plus_days(1)) {
    if (!d.is_weekend()) out.push_back(d);
  }
  return out;
}

llmmom::ReturnPanel make_panel(const std::vector<Date>& dates, const std::vector<std::string>& tickers,
                               const std::vector<std::vector<double>>& returns,
                               const std::vector<std::vector<double>>& caps, double rf) {
  std::vector<llmmom::ReturnPanel::Cell> cells(dates.size() * tickers.size());
  for (std::size_t t = 0; t < dates.size(); ++t) {
    for (std::size_t i = 0; i < tickers.size(); ++i) {
      auto& c = cells[t * tickers.size() + i];
      c.ret = returns[t][i];
      c.market_cap = caps.empty() ? 1.0 : caps[t][i];
      c.member = true;
    }
  }
  return llmmom::ReturnPanel(dates, tickers, std::move(cells), std::vector<double>(dates.size(), rf));
}

OracleBacktest oracle_backtest(const llmmom::ReturnPanel& panel, const std::vector<llmmom::WeightVector>& schedule,
                               double cost_bps) {
  const std::size_t n = panel.num_tickers();
  auto dense = [&](const llmmom::WeightVector& w) {
    std::vector<double> v(n, 0.0);
    for (std::size_t j = 0; j < w.size(); ++j) v[*panel.ticker_index(w.tickers[j])] = w.weights[j];
    return v;
  };
  OracleBacktest out;
  std::size_t start = *panel.date_index(schedule.front().date);
  std::vector<double> w = dense(schedule.front());
  std::size_t next = 1;
  for (std::size_t t = start + 1; t < panel.num_dates(); ++t) {
    double gross = 0.0;
    for (std::size_t i = 0; i < n; ++i) gross += w[i] * panel.ret(t, i);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += w[i] * (1.0 + panel.ret(t, i));
    for (std::size_t i = 0; i < n; ++i) w[i] = w[i] * (1.0 + panel.ret(t, i)) / total;
    double net = gross;
    if (next < schedule.size() && schedule[next].date == panel.dates()[t]) {
      const auto target = dense(schedule[next]);
      double turnover = 0.0;
      for (std::size_t i = 0; i < n; ++i) turnover += std::fabs(target[i] - w[i]);
      net -= cost_bps * 1e-4 * turnover;
      out.turnover.push_back(turnover);
      w = target;
      ++next;
    }
    out.dates.push_back(panel.dates()[t]);
    out.net.push_back(net);
  }
  return out;
}

double brute_mdd(const std::vector<double>& equity) {
  std::vector<double> path{1.0};
  path.insert(path.end(), equity.begin(), equity.end());
  double worst = 0.0;
  for (std::size_t j = 0; j < path.size(); ++j) {
    for (std::size_t i = 0; i <= j; ++i) worst = std::min(worst, path[j] / path[i] - 1.0);
  }
  return worst;
}

OracleStats oracle_stats(const std::vector<double>& net, const std::vector<double>& rf) {
  const double n = static_cast<double>(net.size());
  std::vector<double> ex(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) ex[i] = net[i] - rf[i];
  const double mean_ex = std::accumulate(ex.begin(), ex.end(), 0.0) / n;
  double ss = 0.0, down = 0.0;
  for (double e : ex) {
    ss += (e - mean_ex) * (e - mean_ex);
    if (e < 0) down += e * e;
  }
  const double sd_ex = std::sqrt(ss / (n - 1.0));
  const double dd = std::sqrt(down / n);
  OracleStats s;
  if (sd_ex > 0) s.sharpe = mean_ex / sd_ex * std::sqrt(252.0);
  if (dd > 0) s.sortino = mean_ex / dd * std::sqrt(252.0);
  double growth = 1.0;
  for (double r : net) growth *= 1.0 + r;
  s.ann_return = std::pow(growth, 252.0 / n) - 1.0;
  const double mean = std::accumulate(net.begin(), net.end(), 0.0) / n;
  double vs = 0.0;
  for (double r : net) vs += (r - mean) * (r - mean);
  s.ann_vol = std::sqrt(vs / (n - 1.0)) * std::sqrt(252.0);
  return s;
}

OracleOls oracle_ols(const std::vector<double>& y, const std::vector<double>& x) {
  // Normal equations [n Sx; Sx Sxx] [a; b] = [Sy; Sxy], solved by Cramer's rule.
  const double n = static_cast<double>(y.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  OracleOls o;
  o.alpha = (sy * sxx - sx * sxy) / det;
  o.beta = (n * sxy - sx * sy) / det;
  double rss = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - o.alpha - o.beta * x[i];
    rss += e * e;
  }
  const double s2 = rss / (n - 2.0);
  // Var(alpha) = s2 * Sxx / det (the (0,0) entry of s2 (X'X)^-1).
  const double se = std::sqrt(s2 * sxx / det);
  if (se > 0) o.t_alpha = o.alpha / se;
  return o;
}

}  // namespace testing

#include "fixtures.hpp"
#include "llmmom/csv.hpp"

namespace testing {

std::vector<llmmom::WeightVector> load_schedule(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::getline(in, line);
  std::vector<llmmom::WeightVector> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = llmmom::csv::split(line);
    const Date d = Date::parse(f[0]);
    if (out.empty() || out.back().date != d) out.push_back(llmmom::WeightVector{d, {}, {}});
    out.back().tickers.emplace_back(f[1]);
    out.back().weights.push_back(llmmom::csv::parse_double(f[2]));
  }
  return out;
}

std::vector<ExpectedDay> load_expected(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::getline(in, line);
  std::vector<ExpectedDay> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = llmmom::csv::split(line);
    out.push_back({Date::parse(f[0]), llmmom::csv::parse_double(f[1]), llmmom::csv::parse_double(f[2]),
                   llmmom::csv::parse_double(f[3]), llmmom::csv::parse_double(f[4])});
  }
  return out;
}

}  // namespace testing
