#pragma once

#include <filesystem>
#include <vector>

#include "llmmom/portfolio.hpp"

namespace testing {

/// Reads `date,ticker,weight` rows into one WeightVector per date.
std::vector<llmmom::WeightVector> load_schedule(const std::filesystem::path& path);

struct ExpectedDay {
  llmmom::Date date;
  double net, equity, turnover, cost;
};
/// Reads `date,net_return,equity,turnover,cost`.
std::vector<ExpectedDay> load_expected(const std::filesystem::path& path);

}  // namespace testing
