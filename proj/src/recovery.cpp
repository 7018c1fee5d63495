#include "hoclust/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hoclust {

namespace {

double binomial(int n, int k) {
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
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

std::vector<int> first_combination(int k) {
    std::vector<int> c(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) c[std::size_t(i)] = i;
    return c;
}

// Sum the slices of `flat` (a tensor over `dims`) selected along the first
// axis, producing the contracted tensor over dims[1:].
std::vector<double> sum_slices(const std::vector<double>& flat, std::int64_t slice_len,
                               const std::vector<int>& subset) {
    std::vector<double> out(std::size_t(slice_len), 0.0);
    for (int r : subset) {
        const double* src = flat.data() + std::int64_t(r) * slice_len;
        for (std::int64_t j = 0; j < slice_len; ++j) out[std::size_t(j)] += src[j];
    }
    return out;
}

// Sum of the k largest values; `pick` (if nonnull) receives the
// lexicographically smallest maximizing index set.
double top_k_sum(const std::vector<double>& v, int k, std::vector<int>* pick) {
    std::vector<int> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (v[std::size_t(a)] != v[std::size_t(b)]) return v[std::size_t(a)] > v[std::size_t(b)];
        return a < b;
    });
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += v[std::size_t(order[std::size_t(i)])];
    if (pick) {
        pick->assign(order.begin(), order.begin() + k);
        std::sort(pick->begin(), pick->end());
    }
    return s;
}

struct BlockMax {
    double value = -std::numeric_limits<double>::infinity();
    std::vector<std::vector<int>> support;
};

// Recursive maximizer of block sums over per-mode k_i-subsets. Modes before
// the last are enumerated lexicographically; the last mode is solved in
// closed form (top-k_d values), which is exact and keeps tie-breaking
// lexicographic.
void block_max_rec(const std::vector<double>& flat, const std::vector<int>& dims,
                   const std::vector<int>& k, std::size_t mode,
                   std::vector<std::vector<int>>& chosen, BlockMax& best, bool want_support) {
    const int d = int(dims.size());
    if (int(mode) == d - 1) {
        std::vector<int> pick;
        const double s = top_k_sum(flat, k[mode], want_support ? &pick : nullptr);
        if (s > best.value) {
            best.value = s;
            if (want_support) {
                best.support = chosen;
                best.support.push_back(std::move(pick));
            }
        }
        return;
    }
    std::int64_t slice_len = 1;
    for (std::size_t l = mode + 1; l < dims.size(); ++l) slice_len *= dims[l];
    std::vector<int> subset = first_combination(k[mode]);
    do {
        auto reduced = sum_slices(flat, slice_len, subset);
        chosen.push_back(subset);
        block_max_rec(reduced, dims, k, mode + 1, chosen, best, want_support);
        chosen.pop_back();
    } while (next_combination(subset, dims[mode]));
}

double support_space_size(const std::vector<int>& n, const std::vector<int>& k) {
    double g = 1.0;
    for (std::size_t i = 0; i < n.size(); ++i) g *= binomial(n[i], k[i]);
    return g;
}

}  // namespace

GapCut largest_gap_cut(const std::vector<double>& values, int num_gaps) {
    if (num_gaps != 1 && num_gaps != 2) throw parameter_error("largest_gap_cut: num_gaps must be 1 or 2");
    const int n = int(values.size());
    if (n < num_gaps + 1) throw parameter_error("largest_gap_cut: sequence too short");

    std::vector<int> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (values[std::size_t(a)] != values[std::size_t(b)]) return values[std::size_t(a)] < values[std::size_t(b)];
        return a < b;
    });

    std::vector<double> diffs(static_cast<std::size_t>(n - 1));
    for (int i = 0; i + 1 < n; ++i)
        diffs[std::size_t(i)] = values[std::size_t(order[std::size_t(i + 1)])] - values[std::size_t(order[std::size_t(i)])];

    // pick num_gaps largest diffs, earliest position wins ties
    std::vector<int> cut_positions;
    std::vector<char> used(diffs.size(), 0);
    for (int g = 0; g < num_gaps; ++g) {
        int best = -1;
        for (int i = 0; i + 1 < n; ++i)
            if (!used[std::size_t(i)] && (best < 0 || diffs[std::size_t(i)] > diffs[std::size_t(best)])) best = i;
        used[std::size_t(best)] = 1;
        cut_positions.push_back(best);
    }
    std::sort(cut_positions.begin(), cut_positions.end());

    GapCut out;
    int start = 0;
    for (int pos : cut_positions) {
        out.groups.emplace_back(order.begin() + start, order.begin() + pos + 1);
        out.gap_sizes.push_back(diffs[std::size_t(pos)]);
        start = pos + 1;
    }
    out.groups.emplace_back(order.begin() + start, order.end());
    for (auto& g : out.groups) std::sort(g.begin(), g.end());
    return out;
}

RecoveryResult chc_search(const DenseTensor& Y, const std::vector<int>& k, double budget) {
    const int d = Y.order();
    if (int(k.size()) != d) throw parameter_error("chc_search: k arity mismatch");
    for (int i = 0; i < d; ++i)
        if (k[std::size_t(i)] < 1 || k[std::size_t(i)] > Y.dims[std::size_t(i)])
            throw parameter_error("chc_search: need 1 <= k_i <= n_i");
    if (support_space_size(Y.dims, k) > budget)
        throw budget_error("chc_search: support space exceeds enumeration budget");

    BlockMax best;
    std::vector<std::vector<int>> chosen;
    block_max_rec(Y.data, Y.dims, k, 0, chosen, best, /*want_support=*/true);

    RecoveryResult res;
    res.support.sets = std::move(best.support);
    res.diagnostics["block_sum"] = best.value;
    return res;
}

namespace {

struct SignOption {
    std::vector<int> support;       // sorted indices
    std::vector<double> signs;      // +-1 per support entry
    std::vector<double> dense;      // n-length sign vector
};

// All (support, sign) options for one mode in the documented order:
// supports lexicographic, then sign patterns with + before - per position.
std::vector<SignOption> mode_options(int n, int kbar) {
    std::vector<SignOption> opts;
    std::vector<int> sup = first_combination(kbar);
    do {
        for (std::uint64_t bits = 0; bits < (std::uint64_t(1) << kbar); ++bits) {
            SignOption o;
            o.support = sup;
            o.signs.resize(std::size_t(kbar));
            o.dense.assign(std::size_t(n), 0.0);
            for (int i = 0; i < kbar; ++i) {
                const double s = ((bits >> i) & 1) ? -1.0 : 1.0;
                o.signs[std::size_t(i)] = s;
                o.dense[std::size_t(sup[std::size_t(i)])] = s;
            }
            opts.push_back(std::move(o));
        }
    } while (next_combination(sup, n));
    return opts;
}

}  // namespace

RecoveryResult rohc_search_core(const DenseTensor& A, const DenseTensor& B,
                                const std::vector<int>& k, double mu, double budget) {
    const int d = A.order();
    if (int(k.size()) != d) throw parameter_error("rohc_search: k arity mismatch");
    for (int i = 0; i < d; ++i)
        if (k[std::size_t(i)] < 1 || k[std::size_t(i)] > A.dims[std::size_t(i)])
            throw parameter_error("rohc_search: need 1 <= k_i <= n_i");

    double total = 0.0;
    {
        std::vector<int> kbar(std::size_t(d), 1);
        bool more = true;
        while (more) {
            double t = 1.0;
            for (int i = 0; i < d; ++i)
                t *= binomial(A.dims[std::size_t(i)], kbar[std::size_t(i)]) * std::pow(2.0, kbar[std::size_t(i)]);
            total += t;
            more = false;
            for (int i = d - 1; i >= 0; --i) {
                if (++kbar[std::size_t(i)] <= k[std::size_t(i)]) {
                    more = true;
                    break;
                }
                kbar[std::size_t(i)] = 1;
            }
        }
    }
    if (total > budget) throw budget_error("rohc_search: sign-support space exceeds enumeration budget");

    double prod_k_full = 1.0;
    for (int i = 0; i < d; ++i) prod_k_full *= k[std::size_t(i)];
    const double mark_base = mu / (2.0 * std::sqrt(2.0) * std::sqrt(prod_k_full));

    struct Marked {
        int total_sparsity = 0;
        std::vector<SignOption> tuple;
    };
    std::vector<Marked> marked;

    std::vector<int> kbar(std::size_t(d), 1);
    bool more = true;
    while (more) {
        // option lists per mode for this kbar
        std::vector<std::vector<SignOption>> opts(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) opts[std::size_t(i)] = mode_options(A.dims[std::size_t(i)], kbar[std::size_t(i)]);

        // maximize A x_1 u_1 ... x_d u_d; modes 2..d are outer loops, mode 1
        // is resolved against the contracted fiber. Ties use the pinned
        // (mode-1-major) enumeration order via the option index tuple.
        double best_val = -std::numeric_limits<double>::infinity();
        std::vector<int> best_key;
        std::vector<int> opt_idx(std::size_t(d), 0);
        bool more_outer = true;
        while (more_outer) {
            std::vector<std::vector<double>> vecs(static_cast<std::size_t>(d));
            for (int i = 1; i < d; ++i) vecs[std::size_t(i)] = opts[std::size_t(i)][std::size_t(opt_idx[std::size_t(i)])].dense;
            vecs[0].assign(std::size_t(A.dims[0]), 0.0);  // placeholder
            auto fiber = contract_all_but(A, vecs, 0);
            for (std::size_t o1 = 0; o1 < opts[0].size(); ++o1) {
                const auto& u1 = opts[0][o1];
                double val = 0.0;
                for (std::size_t t = 0; t < u1.support.size(); ++t)
                    val += u1.signs[t] * fiber[std::size_t(u1.support[t])];
                std::vector<int> key;
                key.push_back(int(o1));
                for (int i = 1; i < d; ++i) key.push_back(opt_idx[std::size_t(i)]);
                if (val > best_val || (val == best_val && (best_key.empty() || key < best_key))) {
                    best_val = val;
                    best_key = std::move(key);
                }
            }
            more_outer = false;
            for (int i = d - 1; i >= 1; --i) {
                if (++opt_idx[std::size_t(i)] < int(opts[std::size_t(i)].size())) {
                    more_outer = true;
                    break;
                }
                opt_idx[std::size_t(i)] = 0;
            }
        }

        // marking condition against the independent copy B
        std::vector<SignOption> tuple;
        for (int i = 0; i < d; ++i) tuple.push_back(opts[std::size_t(i)][std::size_t(best_key[std::size_t(i)])]);
        bool all_marked = true;
        for (int i = 0; i < d && all_marked; ++i) {
            double prod_kbar_rest = 1.0;
            for (int z = 0; z < d; ++z)
                if (z != i) prod_kbar_rest *= kbar[std::size_t(z)];
            const double thr = mark_base * prod_kbar_rest;

            std::vector<std::vector<double>> vecs(static_cast<std::size_t>(d));
            for (int z = 0; z < d; ++z) vecs[std::size_t(z)] = tuple[std::size_t(z)].dense;
            auto w = contract_all_but(B, vecs, i);
            std::vector<int> hit;
            for (int j = 0; j < A.dims[std::size_t(i)]; ++j)
                if (w[std::size_t(j)] * tuple[std::size_t(i)].dense[std::size_t(j)] >= thr) hit.push_back(j);
            if (hit != tuple[std::size_t(i)].support) all_marked = false;
        }
        if (all_marked) {
            Marked m;
            m.total_sparsity = std::accumulate(kbar.begin(), kbar.end(), 0);
            m.tuple = std::move(tuple);
            marked.push_back(std::move(m));
        }

        more = false;
        for (int i = d - 1; i >= 0; --i) {
            if (++kbar[std::size_t(i)] <= k[std::size_t(i)]) {
                more = true;
                break;
            }
            kbar[std::size_t(i)] = 1;
        }
    }

    RecoveryResult res;
    res.diagnostics["marked_tuples"] = double(marked.size());
    if (marked.empty()) {
        res.failed = true;
        res.failure_reason = "no marked tuple";
        return res;
    }
    const Marked* pick = &marked.front();
    for (const auto& m : marked)
        if (m.total_sparsity > pick->total_sparsity) pick = &m;
    for (const auto& opt : pick->tuple) {
        res.support.sets.push_back(opt.support);
        res.mode_vectors.push_back(opt.dense);
    }
    return res;
}

RecoveryResult rohc_search(const DenseTensor& Y, const std::vector<int>& k, double mu,
                           RngStream rng, double budget) {
    auto [A, B] = gaussian_split(Y, rng.derive(0));
    return rohc_search_core(A, B, k, mu, budget);
}

RecoveryResult threshold_recover(const DenseTensor& Y) {
    const int d = Y.order();
    const int n_max = *std::max_element(Y.dims.begin(), Y.dims.end());
    const double thr = std::sqrt(2.0 * (d + 1) * std::log(double(n_max)));

    RecoveryResult res;
    std::vector<std::vector<char>> seen(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) seen[std::size_t(i)].assign(std::size_t(Y.dims[std::size_t(i)]), 0);
    std::int64_t count = 0;
    std::vector<int> idx(std::size_t(d), 0);
    for (std::int64_t flat = 0; flat < Y.size(); ++flat) {
        if (std::abs(Y.data[std::size_t(flat)]) >= thr) {
            ++count;
            for (int l = 0; l < d; ++l) seen[std::size_t(l)][std::size_t(idx[std::size_t(l)])] = 1;
        }
        for (int l = d - 1; l >= 0; --l) {
            if (++idx[std::size_t(l)] < Y.dims[std::size_t(l)]) break;
            idx[std::size_t(l)] = 0;
        }
    }
    res.support.sets.resize(std::size_t(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < Y.dims[std::size_t(i)]; ++j)
            if (seen[std::size_t(i)][std::size_t(j)]) res.support.sets[std::size_t(i)].push_back(j);
    res.diagnostics["threshold"] = thr;
    res.diagnostics["tuples"] = double(count);
    return res;
}

int default_t_max(int n) { return int(std::ceil(5.0 * std::log(std::max(2, n)))); }

std::vector<std::vector<double>> power_iterate(const DenseTensor& A, int t_max) {
    const int d = A.order();
    if (t_max < 0) throw parameter_error("power_iterate: t_max must be >= 0");
    std::vector<std::vector<double>> u(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        // The initialization only seeds the contraction rounds, so a loose
        // tolerance suffices; noise-dominated unfoldings have near-tied top
        // singular values and the last iterate is the right warm start.
        try {
            u[std::size_t(i)] = top_singular_triple(matricize(A, i), 1e-6, 20000).left;
        } catch (const convergence_error& e) {
            u[std::size_t(i)] = e.last_left;
            normalize_in_place(u[std::size_t(i)]);
        }
    }

    for (int t = 1; t <= t_max; ++t) {
        for (int i = 0; i < d; ++i) {
            auto w = contract_all_but(A, u, i);
            const double nw = norm2(w);
            if (nw == 0.0) throw degenerate_error("power_iterate: contraction collapsed to zero");
            for (auto& x : w) x /= nw;
            u[std::size_t(i)] = std::move(w);
        }
    }
    return u;
}

namespace {

// CHC branch of the gap cut: signal group is the one with larger mean |v|;
// exact ties prefer the smaller group, then the one containing the smaller
// index.
std::vector<int> pick_signal_group(const GapCut& cut, const std::vector<double>& v) {
    auto mean_abs = [&](const std::vector<int>& g) {
        double s = 0.0;
        for (int j : g) s += std::abs(v[std::size_t(j)]);
        return s / double(g.size());
    };
    const auto& a = cut.groups[0];
    const auto& b = cut.groups[1];
    const double ma = mean_abs(a), mb = mean_abs(b);
    if (ma != mb) return ma > mb ? a : b;
    if (a.size() != b.size()) return a.size() < b.size() ? a : b;
    return a.front() < b.front() ? a : b;
}

bool all_equal(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] != v[0]) return false;
    return true;
}

}  // namespace

RecoveryResult power_iteration_recover(const DenseTensor& Y, ProblemKind problem, int t_max,
                                       RngStream rng) {
    const int d = Y.order();
    auto [A, B] = gaussian_split(Y, rng.derive(0));
    auto u = power_iterate(A, t_max);

    RecoveryResult res;
    res.mode_vectors = u;
    res.diagnostics["t_max"] = double(t_max);
    res.support.sets.resize(std::size_t(d));
    for (int i = 0; i < d; ++i) {
        auto v = contract_all_but(B, u, i);
        if (all_equal(v)) {
            res.failed = true;
            res.failure_reason = "degenerate projections: no gap in mode " + std::to_string(i);
            return res;
        }
        if (problem == ProblemKind::chc) {
            auto cut = largest_gap_cut(v, 1);
            res.support.sets[std::size_t(i)] = pick_signal_group(cut, v);
            res.diagnostics["gap_mode" + std::to_string(i)] = cut.gap_sizes[0];
        } else {
            auto cut = largest_gap_cut(v, 2);
            // two smaller-sized groups carry the signal
            std::vector<int> order = {0, 1, 2};
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                return cut.groups[std::size_t(a)].size() < cut.groups[std::size_t(b)].size();
            });
            std::vector<int> sup;
            for (int g = 0; g < 2; ++g)
                for (int j : cut.groups[std::size_t(order[std::size_t(g)])]) sup.push_back(j);
            std::sort(sup.begin(), sup.end());
            res.support.sets[std::size_t(i)] = std::move(sup);
            res.diagnostics["gap_mode" + std::to_string(i)] = cut.gap_sizes[0];
        }
    }
    return res;
}

Matrix aggregate_pair_matrix(const DenseTensor& Y, int i, int i_star) {
    const int d = Y.order();
    if (i == i_star || i < 0 || i_star < 0 || i >= d || i_star >= d)
        throw index_error("aggregate_pair_matrix: bad mode pair");
    double rest = 1.0;
    for (int l = 0; l < d; ++l)
        if (l != i && l != i_star) rest *= Y.dims[std::size_t(l)];
    const double denom = std::sqrt(rest);

    Matrix M(Y.dims[std::size_t(i)], Y.dims[std::size_t(i_star)]);
    std::vector<int> idx(std::size_t(d), 0);
    for (std::int64_t flat = 0; flat < Y.size(); ++flat) {
        M.at(idx[std::size_t(i)], idx[std::size_t(i_star)]) += Y.data[std::size_t(flat)];
        for (int l = d - 1; l >= 0; --l) {
            if (++idx[std::size_t(l)] < Y.dims[std::size_t(l)]) break;
            idx[std::size_t(l)] = 0;
        }
    }
    for (auto& x : M.data) x /= denom;
    return M;
}

RecoveryResult aggregated_svd_recover(const DenseTensor& Y, RngStream rng) {
    const int d = Y.order();
    if (d < 3) throw parameter_error("aggregated_svd_recover: requires d >= 3");

    RecoveryResult res;
    res.support.sets.resize(std::size_t(d));
    for (int i = 0; i < d; ++i) {
        int i_star = -1;
        for (int j = 0; j < d; ++j) {
            if (j == i) continue;
            if (i_star < 0 || Y.dims[std::size_t(j)] < Y.dims[std::size_t(i_star)]) i_star = j;
        }
        Matrix M = aggregate_pair_matrix(Y, i, i_star);

        bool zero = true;
        for (double x : M.data)
            if (x != 0.0) {
                zero = false;
                break;
            }
        if (zero) {
            res.failed = true;
            res.failure_reason = "degenerate aggregation: zero matrix in mode " + std::to_string(i);
            return res;
        }

        RngStream noise = rng.derive(std::uint64_t(i));
        Matrix A(M.rows, M.cols), B(M.rows, M.cols);
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        for (std::size_t t = 0; t < M.data.size(); ++t) {
            const double z = noise.normal();
            A.data[t] = (M.data[t] + z) * inv_sqrt2;
            B.data[t] = (M.data[t] - z) * inv_sqrt2;
        }

        std::vector<double> proj(std::size_t(M.rows), 0.0);
        try {
            auto triple = top_singular_triple(A);
            for (int r = 0; r < M.rows; ++r) {
                double acc = 0.0;
                for (int c = 0; c < M.cols; ++c) acc += B(r, c) * triple.right[std::size_t(c)];
                proj[std::size_t(r)] = acc;
            }
            res.diagnostics["sigma_mode" + std::to_string(i)] = triple.value;
        } catch (const degenerate_error&) {
            res.failed = true;
            res.failure_reason = "degenerate split matrix in mode " + std::to_string(i);
            return res;
        }

        if (all_equal(proj)) {
            res.failed = true;
            res.failure_reason = "degenerate projections: no gap in mode " + std::to_string(i);
            return res;
        }
        auto cut = largest_gap_cut(proj, 1);
        res.support.sets[std::size_t(i)] = pick_signal_group(cut, proj);
        res.diagnostics["gap_mode" + std::to_string(i)] = cut.gap_sizes[0];
    }
    return res;
}

}  // namespace hoclust
