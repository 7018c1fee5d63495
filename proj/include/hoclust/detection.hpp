#pragma once

#include <map>
#include <optional>
#include <string>

#include "hoclust/models.hpp"
#include "hoclust/recovery.hpp"

namespace hoclust {

enum class Regime { statistical, polynomial };

struct TestOutcome {
    bool reject = false;
    double statistic = 0.0;
    double threshold = 0.0;
    std::string note;
    std::map<std::string, TestOutcome> components;
};

// T_sum = sum(Y) / sqrt(prod n_i), reject when it exceeds W.
TestOutcome sum_test(const DenseTensor& Y, double W);

// T_scan = max over per-mode k_i-subsets of the standardized block sum;
// threshold sqrt(2 log prod C(n_i, k_i)). Exhaustive; budget-guarded.
TestOutcome scan_test(const DenseTensor& Y, const std::vector<int>& k, double budget = 1e8);

// Signed maximum entry against sqrt(2 sum_i log n_i).
TestOutcome max_test(const DenseTensor& Y);

// Combined CHC tests: statistical = sum OR scan, polynomial = sum OR max.
// When W is not supplied it defaults to lambda/2 * prod k / sqrt(prod n).
TestOutcome chc_detect(const DenseTensor& Y, const std::vector<int>& k, double lambda,
                       std::optional<double> W, Regime regime, double budget = 1e8);

// Combined ROHC tests. Statistical: search-based statistic on an
// independent split. Polynomial: power-iteration statistic OR max test.
TestOutcome rohc_detect(const DenseTensor& Y, const std::vector<int>& k, double mu,
                        double c_thresh, Regime regime, RngStream rng,
                        int t_max = 0, double budget = 1e8);

// Harness convention for W when lambda is unknown: sqrt(2 log log prod n_i).
double default_unknown_W(const std::vector<int>& n);

}  // namespace hoclust
