#include "hoclust/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hoclust {

namespace {

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

bool next_combination(std::vector<int>& c, int N) {
    const int d = int(c.size());
    int i = d - 1;
    while (i >= 0 && c[std::size_t(i)] == N - d + i) --i;
    if (i < 0) return false;
    ++c[std::size_t(i)];
    for (int j = i + 1; j < d; ++j) c[std::size_t(j)] = c[std::size_t(j - 1)] + 1;
    return true;
}

// max over k_last-subsets = sum of the k_last largest values
double top_k_sum(const std::vector<double>& v, int k) {
    std::vector<double> tmp = v;
    std::nth_element(tmp.begin(), tmp.begin() + (int(tmp.size()) - k), tmp.end());
    double s = 0.0;
    for (std::size_t i = tmp.size() - std::size_t(k); i < tmp.size(); ++i) s += tmp[i];
    return s;
}

void scan_max_rec(const std::vector<double>& flat, const std::vector<int>& dims,
                  const std::vector<int>& k, std::size_t mode, double& best) {
    const int d = int(dims.size());
    if (int(mode) == d - 1) {
        best = std::max(best, top_k_sum(flat, k[mode]));
        return;
    }
    std::int64_t slice_len = 1;
    for (std::size_t l = mode + 1; l < dims.size(); ++l) slice_len *= dims[l];
    std::vector<int> subset(static_cast<std::size_t>(k[mode]));
    std::iota(subset.begin(), subset.end(), 0);
    std::vector<double> reduced(static_cast<std::size_t>(slice_len));
    do {
        std::fill(reduced.begin(), reduced.end(), 0.0);
        for (int r : subset) {
            const double* src = flat.data() + std::int64_t(r) * slice_len;
            for (std::int64_t j = 0; j < slice_len; ++j) reduced[std::size_t(j)] += src[j];
        }
        scan_max_rec(reduced, dims, k, mode + 1, best);
    } while (next_combination(subset, dims[mode]));
}

}  // namespace

double default_unknown_W(const std::vector<int>& n) {
    double logprod = 0.0;
    for (int ni : n) logprod += std::log(double(ni));
    return std::sqrt(2.0 * std::log(std::max(std::exp(1.0), logprod)));
}

TestOutcome sum_test(const DenseTensor& Y, double W) {
    if (!std::isfinite(W)) throw parameter_error("sum_test: W must be finite");
    double s = 0.0;
    for (double x : Y.data) s += x;
    TestOutcome out;
    out.statistic = s / std::sqrt(double(Y.size()));
    out.threshold = W;
    out.reject = out.statistic > out.threshold;
    return out;
}

TestOutcome scan_test(const DenseTensor& Y, const std::vector<int>& k, double budget) {
    const int d = Y.order();
    if (int(k.size()) != d) throw parameter_error("scan_test: k arity mismatch");
    double logG = 0.0;
    double G = 1.0;
    double prod_k = 1.0;
    for (int i = 0; i < d; ++i) {
        if (k[std::size_t(i)] < 1 || k[std::size_t(i)] > Y.dims[std::size_t(i)])
            throw parameter_error("scan_test: need 1 <= k_i <= n_i");
        logG += log_binomial(Y.dims[std::size_t(i)], k[std::size_t(i)]);
        G *= std::exp(log_binomial(Y.dims[std::size_t(i)], k[std::size_t(i)]));
        prod_k *= k[std::size_t(i)];
    }
    if (G > budget) throw budget_error("scan_test: support space exceeds enumeration budget");

    double best = -std::numeric_limits<double>::infinity();
    scan_max_rec(Y.data, Y.dims, k, 0, best);

    TestOutcome out;
    out.statistic = best / std::sqrt(prod_k);
    out.threshold = std::sqrt(2.0 * logG);  // zero when k_i = n_i for all i
    out.reject = out.statistic > out.threshold;
    return out;
}

TestOutcome max_test(const DenseTensor& Y) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : Y.data) m = std::max(m, x);
    double sum_log_n = 0.0;
    for (int ni : Y.dims) sum_log_n += std::log(double(ni));
    TestOutcome out;
    out.statistic = m;
    out.threshold = std::sqrt(2.0 * sum_log_n);
    out.reject = out.statistic > out.threshold;
    return out;
}

namespace {

TestOutcome combine_or(const std::string& name_a, TestOutcome a, const std::string& name_b,
                       TestOutcome b) {
    TestOutcome out;
    out.reject = a.reject || b.reject;
    // headline numbers taken from the component that fired (or the larger margin)
    const double margin_a = a.statistic - a.threshold;
    const double margin_b = b.statistic - b.threshold;
    if (margin_a >= margin_b) {
        out.statistic = a.statistic;
        out.threshold = a.threshold;
    } else {
        out.statistic = b.statistic;
        out.threshold = b.threshold;
    }
    out.components.emplace(name_a, std::move(a));
    out.components.emplace(name_b, std::move(b));
    return out;
}

}  // namespace

TestOutcome chc_detect(const DenseTensor& Y, const std::vector<int>& k, double lambda,
                       std::optional<double> W, Regime regime, double budget) {
    double prod_k = 1.0;
    for (int ki : k) prod_k *= ki;
    double w = W ? *W : 0.5 * lambda * prod_k / std::sqrt(double(Y.size()));
    TestOutcome s = sum_test(Y, w);
    if (regime == Regime::statistical)
        return combine_or("sum", std::move(s), "scan", scan_test(Y, k, budget));
    return combine_or("sum", std::move(s), "max", max_test(Y));
}

TestOutcome rohc_detect(const DenseTensor& Y, const std::vector<int>& k, double mu,
                        double c_thresh, Regime regime, RngStream rng, int t_max,
                        double budget) {
    const int d = Y.order();
    if (int(k.size()) != d) throw parameter_error("rohc_detect: k arity mismatch");
    const int k_max = *std::max_element(k.begin(), k.end());
    const double threshold = c_thresh * std::sqrt(double(k_max));

    auto [A, B] = gaussian_split(Y, rng.derive(0));

    if (regime == Regime::statistical) {
        // search stage runs on A with its own internal split
        RecoveryResult stage = rohc_search(A, k, mu, rng.derive(1), budget);
        TestOutcome out;
        out.threshold = threshold;
        if (stage.failed) {
            out.statistic = 0.0;
            out.reject = false;
            out.note = "search stage produced no marked tuple";
            return out;
        }
        std::vector<std::vector<double>> scaled = stage.mode_vectors;
        for (int i = 0; i < d; ++i) {
            const double inv = 1.0 / std::sqrt(double(k[std::size_t(i)]));
            for (auto& x : scaled[std::size_t(i)]) x *= inv;
        }
        out.statistic = contract_full(B, scaled);
        out.reject = out.statistic > out.threshold;
        return out;
    }

    if (t_max <= 0) t_max = default_t_max(*std::max_element(Y.dims.begin(), Y.dims.end()));
    // power-iteration stage applied to A, again with its own split
    auto A2 = gaussian_split(A, rng.derive(1)).first;
    auto u = power_iterate(A2, t_max);

    TestOutcome sing;
    sing.statistic = contract_full(B, u);
    sing.threshold = threshold;
    sing.reject = sing.statistic > sing.threshold;
    return combine_or("sing", std::move(sing), "max", max_test(Y));
}

}  // namespace hoclust
