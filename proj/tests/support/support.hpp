#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "llmmom/market_data.hpp"
#include "llmmom/portfolio.hpp"

namespace testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& text);

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};
CommandResult run_command(const std::string& cmd);

/// Relative path -> contents for every regular file under `dir`.
std::map<std::string, std::string> read_tree(const std::filesystem::path& dir);

/// `n` consecutive weekdays starting at (or after) `start`.
std::vector<llmmom::Date> weekdays(llmmom::Date start, std::size_t n);

/// Panel from a dense return matrix (rows = dates); every name is a member
/// with cap 1 unless `caps` is given. NaN marks a missing return.
llmmom::ReturnPanel make_panel(const std::vector<llmmom::Date>& dates, const std::vector<std::string>& tickers,
                               const std::vector<std::vector<double>>& returns,
                               const std::vector<std::vector<double>>& caps = {}, double rf = 0.0);

// ---- independent oracles ---------------------------------------------------

/// Straightforward re-derivation of the daily backtest from its definition:
/// drift, sum |target - drifted| turnover, cost on the rebalance day.
struct OracleBacktest {
  std::vector<llmmom::Date> dates;
  std::vector<double> net;
  std::vector<double> turnover;  // per non-inception rebalance
};
OracleBacktest oracle_backtest(const llmmom::ReturnPanel& panel, const std::vector<llmmom::WeightVector>& schedule,
                               double cost_bps);

/// O(T^2) drawdown over 1.0 followed by the equity path.
double brute_mdd(const std::vector<double>& equity);

struct OracleStats {
  std::optional<double> sharpe, sortino;
  double ann_return, ann_vol;
};
OracleStats oracle_stats(const std::vector<double>& net, const std::vector<double>& rf);

struct OracleOls {
  double alpha, beta;
  std::optional<double> t_alpha;
};
/// Closed-form OLS through the normal equations with classical errors.
OracleOls oracle_ols(const std::vector<double>& y, const std::vector<double>& x);

}  // namespace testing
