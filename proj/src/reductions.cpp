#include "hoclust/reductions.hpp"

#include <algorithm>
#include <cmath>

namespace hoclust {

void RkParams::validate() const {
    if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0))
        throw parameter_error("rejection kernel: probabilities must be in [0,1]");
    if (!(p > q)) throw parameter_error("rejection kernel: need p > q");
    if (!(xi > 0.0)) throw parameter_error("rejection kernel: need xi > 0");
    if (iterations < 0) throw parameter_error("rejection kernel: need T >= 0");
}

double rejection_kernel(int x, const RkParams& params, RngStream rng) {
    params.validate();
    if (x != 0 && x != 1) throw parameter_error("rejection kernel: x must be 0 or 1");
    const double xi = params.xi;
    // log f(z) - log g(z) for f = N(xi,1), g = N(0,1)
    auto log_ratio = [xi](double z) { return xi * z - 0.5 * xi * xi; };

    for (int it = 0; it < params.iterations; ++it) {
        if (x == 0) {
            const double z = rng.normal();  // Z ~ g
            // p g(Z) >= q f(Z)
            const double qf_over_pg =
                (params.q == 0.0) ? 0.0 : (params.q / params.p) * std::exp(log_ratio(z));
            if (qf_over_pg <= 1.0) {
                if (rng.uniform() < 1.0 - qf_over_pg) return z;
            }
        } else {
            const double z = xi + rng.normal();  // Z ~ f
            // (1-q) f(Z) >= (1-p) g(Z)
            const double r = ((1.0 - params.p) / (1.0 - params.q)) * std::exp(-log_ratio(z));
            if (r <= 1.0) {
                if (rng.uniform() < 1.0 - r) return z;
            }
        }
    }
    return 0.0;
}

DenseTensor permute_modes(const DenseTensor& T, const std::vector<std::vector<int>>& perms) {
    const int d = T.order();
    if (int(perms.size()) != d) throw parameter_error("permute_modes: need one permutation per mode");
    DenseTensor out = DenseTensor::zeros(T.dims);
    std::vector<int> idx(std::size_t(d), 0);
    std::vector<int> dst(std::size_t(d), 0);
    for (std::int64_t flat = 0; flat < T.size(); ++flat) {
        for (int l = 0; l < d; ++l) {
            const auto& p = perms[std::size_t(l)];
            dst[std::size_t(l)] = p.empty() ? idx[std::size_t(l)] : p[std::size_t(idx[std::size_t(l)])];
        }
        out.set(dst, T.data[std::size_t(flat)]);
        for (int l = d - 1; l >= 0; --l) {
            if (++idx[std::size_t(l)] < T.dims[std::size_t(l)]) break;
            idx[std::size_t(l)] = 0;
        }
    }
    return out;
}

namespace detail {

Matrix reflection_matrix(int n) {
    if (n < 2 || n % 2 != 0) throw parameter_error("reflection_matrix: n must be even and >= 2");
    Matrix R(n, n);
    for (int i = 0; i < n; ++i) {
        R.at(i, i) += (i < n / 2) ? 1.0 : -1.0;  // A
        R.at(i, n - 1 - i) += 1.0;               // B, anti-diagonal
    }
    return R;
}

Matrix mixing_matrix(int m) {
    // Householder reflection H = I - 2 w w^T / (w^T w) with w = c - e_1,
    // c the constant unit vector; H e_1 = c, H orthogonal and symmetric.
    const double c = 1.0 / std::sqrt(double(m));
    std::vector<double> w(std::size_t(m), c);
    w[0] -= 1.0;
    double wtw = 0.0;
    for (double x : w) wtw += x * x;
    Matrix H = Matrix::identity(m);
    if (wtw > 0.0) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) H.at(i, j) -= 2.0 * w[std::size_t(i)] * w[std::size_t(j)] / wtw;
    }
    // first column must be the constant vector
    for (int i = 0; i < m; ++i)
        if (std::abs(H(i, 0) - c) > 1e-12) throw contract_error("mixing_matrix: first column not constant");
    return H;
}

}  // namespace detail

DenseTensor reflection_clone_traced(const DenseTensor& W0, int ell, RngStream rng,
                                    std::vector<std::vector<double>>& tracked) {
    const int d = W0.order();
    const int n = W0.dims[0];
    for (int l = 0; l < d; ++l)
        if (W0.dims[std::size_t(l)] != n) throw parameter_error("reflection_clone: tensor must be cubic");
    if (ell < 0) throw parameter_error("reflection_clone: ell must be >= 0");
    if (ell == 0) return W0;
    if (n % 2 != 0) throw parameter_error("reflection_clone: side length must be even");
    for (const auto& u : tracked)
        if (int(u.size()) != n) throw parameter_error("reflection_clone: tracked vector length mismatch");

    Matrix R = detail::reflection_matrix(n);
    Matrix Rs = R;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (auto& x : Rs.data) x *= inv_sqrt2;

    DenseTensor W = W0;
    for (int round = 0; round < ell; ++round) {
        auto sigma = rng.permutation(n);
        std::vector<std::vector<int>> perms(std::size_t(d), sigma);
        W = permute_modes(W, perms);
        for (int z = 0; z < d; ++z) W = mode_product(W, Rs, z);

        for (auto& u : tracked) {
            std::vector<double> pu(std::size_t(n), 0.0);
            for (int i = 0; i < n; ++i) pu[std::size_t(sigma[std::size_t(i)])] = u[std::size_t(i)];
            std::vector<double> out(std::size_t(n), 0.0);
            for (int r = 0; r < n; ++r)
                for (int c2 = 0; c2 < n; ++c2)
                    if (R(r, c2) != 0.0) out[std::size_t(r)] += R(r, c2) * pu[std::size_t(c2)];
            u = std::move(out);
        }
    }
    return W;
}

DenseTensor reflection_clone(const DenseTensor& W, int ell, RngStream rng) {
    std::vector<std::vector<double>> none;
    return reflection_clone_traced(W, ell, rng, none);
}

namespace {

// Enumerate non-decreasing index tuples of length d over [0, n).
bool next_sorted_tuple(std::vector<int>& t, int n) {
    const int d = int(t.size());
    for (int i = d - 1; i >= 0; --i) {
        if (t[std::size_t(i)] < n - 1) {
            ++t[std::size_t(i)];
            for (int j = i + 1; j < d; ++j) t[std::size_t(j)] = t[std::size_t(i)];
            return true;
        }
    }
    return false;
}

}  // namespace

namespace detail {

DenseTensor symmetric_rk_tensor(const Hypergraph& G, const RkParams& rk, RngStream rng) {
    const int d = G.d;
    const int n = G.N;
    std::vector<int> dims(std::size_t(d), n);
    DenseTensor W = DenseTensor::zeros(dims);

    std::vector<int> t(std::size_t(d), 0);
    std::int64_t rank = 0;
    do {
        bool all_equal = true;
        bool all_distinct = true;
        for (int i = 1; i < d; ++i) {
            if (t[std::size_t(i)] != t[0]) all_equal = false;
            if (t[std::size_t(i)] == t[std::size_t(i - 1)]) all_distinct = false;
        }
        if (all_equal) {
            ++rank;
            continue;  // diagonal handled by gaussianize_symmetric
        }
        // Index classes with repeated (not all equal) coordinates are not
        // hyperedges of a d-uniform graph; they carry a fresh standard
        // normal rather than RK(0), whose law has mean -xi and would bias
        // the null map away from Gaussian across Theta(n^2) cells.
        double value;
        if (all_distinct) {
            value = rejection_kernel(G.has_edge(t) ? 1 : 0, rk, rng.derive(std::uint64_t(rank)));
        } else {
            value = rng.derive(std::uint64_t(rank)).normal();
        }
        std::vector<int> perm = t;
        do {
            W.set(perm, value);
        } while (std::next_permutation(perm.begin(), perm.end()));
        ++rank;
    } while (next_sorted_tuple(t, n));
    return W;
}

DenseTensor gaussianize_with(const DenseTensor& W, RngStream diag_rng,
                             const std::function<double(std::int64_t, int)>& aux) {
    const int d = W.order();
    const int n = W.dims[0];
    for (int l = 0; l < d; ++l)
        if (W.dims[std::size_t(l)] != n) throw parameter_error("gaussianize_symmetric: tensor must be cubic");
    int dfact = 1;
    for (int i = 2; i <= d; ++i) dfact *= i;
    Matrix M = mixing_matrix(dfact);

    DenseTensor out = DenseTensor::zeros(W.dims);
    std::vector<int> t(std::size_t(d), 0);
    std::int64_t rank = 0;
    std::vector<double> src(std::size_t(dfact), 0.0);
    do {
        bool all_equal = true;
        for (int i = 1; i < d; ++i)
            if (t[std::size_t(i)] != t[0]) all_equal = false;
        if (all_equal) {
            out.set(t, diag_rng.derive(std::uint64_t(t[0])).normal());
            ++rank;
            continue;
        }
        // symmetry contract check across the index class
        const double base = W.get(t);
        std::vector<std::vector<int>> perms;
        {
            std::vector<int> perm = t;
            do {
                perms.push_back(perm);
                if (W.get(perm) != base)
                    throw contract_error("gaussianize_symmetric: input tensor is not symmetric");
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
        const int D = int(perms.size());
        src[0] = base;
        for (int j = 1; j < dfact; ++j) src[std::size_t(j)] = aux(rank, j - 1);
        for (int r = 0; r < D; ++r) {
            double acc = 0.0;
            for (int j = 0; j < dfact; ++j) acc += M(r, j) * src[std::size_t(j)];
            out.set(perms[std::size_t(r)], acc);
        }
        ++rank;
    } while (next_sorted_tuple(t, n));
    return out;
}

DenseTensor block_average(const DenseTensor& B, int n, int ell) {
    const int d = B.order();
    for (int l = 0; l < d; ++l)
        if (B.dims[std::size_t(l)] != n * ell)
            throw parameter_error("block_average: tensor side must equal n*ell");
    std::vector<int> dims(std::size_t(d), n);
    DenseTensor Y = DenseTensor::zeros(dims);
    const double scale = std::pow(double(ell), -0.5 * d);

    std::vector<int> i(std::size_t(d), 0);
    std::vector<int> j(std::size_t(d), 0);
    std::vector<int> src(std::size_t(d), 0);
    for (std::int64_t flat = 0; flat < Y.size(); ++flat) {
        double acc = 0.0;
        std::fill(j.begin(), j.end(), 0);
        while (true) {
            for (int l = 0; l < d; ++l) src[std::size_t(l)] = j[std::size_t(l)] * n + i[std::size_t(l)];
            acc += B.get(src);
            int l = d - 1;
            for (; l >= 0; --l) {
                if (++j[std::size_t(l)] < ell) break;
                j[std::size_t(l)] = 0;
            }
            if (l < 0) break;
        }
        Y.data[std::size_t(flat)] = acc * scale;
        for (int l = d - 1; l >= 0; --l) {
            if (++i[std::size_t(l)] < n) break;
            i[std::size_t(l)] = 0;
        }
    }
    return Y;
}

}  // namespace detail

DenseTensor gaussianize_symmetric(const DenseTensor& W, RngStream rng) {
    RngStream aux_rng = rng.derive(1);
    auto aux = [aux_rng](std::int64_t rank, int j) {
        RngStream s = aux_rng.derive(std::uint64_t(rank));
        return s.derive(std::uint64_t(j)).normal();
    };
    return detail::gaussianize_with(W, rng.derive(2), aux);
}

std::uint64_t hash_graph(const Hypergraph& G) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ULL;
    };
    mix(std::uint64_t(G.d));
    mix(std::uint64_t(G.N));
    for (const auto& e : G.edges) mix(pack_edge(e));
    return h;
}

namespace {

double dfactorial(int d) {
    double f = 1.0;
    for (int i = 2; i <= d; ++i) f *= i;
    return f;
}

}  // namespace

ReductionReport hpc_to_rohc(const Hypergraph& G, int ell, RngStream rng, bool pad_to_even) {
    const int d = G.d;
    int n = G.N;
    if (ell < 0) throw parameter_error("hpc_to_rohc: ell must be >= 0");

    const double xi = std::log(2.0) / (2.0 * std::sqrt(2.0 * (d + 1) * std::log(double(n)) + 2.0 * std::log(2.0)));
    RkParams rk{1.0, 0.5, xi, int(std::ceil(2.0 * (d + 1) * std::log2(double(n))))};

    DenseTensor W = detail::symmetric_rk_tensor(G, rk, rng.derive(0));
    W = gaussianize_symmetric(W, rng.derive(1));

    std::vector<std::vector<int>> perms(static_cast<std::size_t>(d));
    for (int m = 1; m < d; ++m) perms[std::size_t(m)] = rng.derive(2).derive(std::uint64_t(m)).permutation(n);
    W = permute_modes(W, perms);

    if (ell > 0) {
        if (n % 2 != 0) {
            if (!pad_to_even)
                throw parameter_error("hpc_to_rohc: reflection cloning needs even n; pad the instance");
            W = pad_cubic(W, n + 1, rng.derive(3));
            n += 1;
        }
        W = reflection_clone(W, ell, rng.derive(4));
    }

    ReductionReport rep;
    rep.output = std::move(W);
    rep.map_name = "hpc-rohc";
    rep.xi = xi;
    rep.ell = ell;
    rep.graph_hash = hash_graph(G);
    rep.seed = rng.seed;
    if (G.planted) {
        const double kappa = double(G.planted->vertices.size());
        rep.implied_signal = xi * std::pow(kappa, 0.5 * d) / std::sqrt(dfactorial(d));
        rep.implied_k = std::pow(2.0, ell) * kappa;
    }
    return rep;
}

ReductionReport hpc_to_chc_detection(const Hypergraph& G, int n_target, int ell, RngStream rng) {
    const int d = G.d;
    if (n_target < 1 || ell < 1) throw parameter_error("hpc_to_chc_detection: need n_target >= 1, ell >= 1");
    if (G.N != d * n_target * ell)
        throw parameter_error("hpc_to_chc_detection: requires N = d * n * ell");
    const int block = n_target * ell;

    const double xi =
        std::log(2.0) / (2.0 * std::sqrt(2.0 * (d + 1) * std::log(double(block)) + 2.0 * std::log(2.0)));
    RkParams rk{1.0, 0.5, xi, int(std::ceil(2.0 * (d + 1) * std::log2(double(block))))};

    std::vector<int> dims(std::size_t(d), block);
    DenseTensor B = DenseTensor::zeros(dims);
    RngStream entry_rng = rng.derive(0);
    std::vector<int> idx(std::size_t(d), 0);
    std::vector<int> verts(std::size_t(d), 0);
    for (std::int64_t flat = 0; flat < B.size(); ++flat) {
        for (int m = 0; m < d; ++m) verts[std::size_t(m)] = m * block + idx[std::size_t(m)];
        const int x = G.has_edge(verts) ? 1 : 0;  // vertices in distinct groups: always sorted
        B.data[std::size_t(flat)] = rejection_kernel(x, rk, entry_rng.derive(std::uint64_t(flat)));
        for (int l = d - 1; l >= 0; --l) {
            if (++idx[std::size_t(l)] < block) break;
            idx[std::size_t(l)] = 0;
        }
    }

    ReductionReport rep;
    rep.output = detail::block_average(B, n_target, ell);
    rep.map_name = "hpc-chc";
    rep.xi = xi;
    rep.ell = ell;
    rep.graph_hash = hash_graph(G);
    rep.seed = rng.seed;
    if (G.planted) {
        rep.implied_signal = xi / std::pow(double(ell), 0.5 * d);
        rep.implied_k = double(G.planted->vertices.size()) / (4.0 * d);
    }
    return rep;
}

ReductionReport hpds_to_chc(const Hypergraph& G, double rho, RngStream rng) {
    const int d = G.d;
    const int n = G.N;
    if (!(rho > 0.0 && rho <= 0.5)) throw parameter_error("hpds_to_chc: need rho in (0, 1/2]");

    const double xi = std::log(1.0 + 2.0 * rho) /
                      (2.0 * std::sqrt(2.0 * (d + 1) * std::log(double(n)) + 2.0 * std::log(2.0)));
    const double T_real = std::ceil(2.0 * (d + 1) * std::log(double(n)) / std::log(1.0 + 2.0 * rho));
    if (T_real > 1e6) throw budget_error("hpds_to_chc: rejection kernel iteration count exceeds cap");
    RkParams rk{0.5 + rho, 0.5, xi, int(T_real)};

    DenseTensor W = detail::symmetric_rk_tensor(G, rk, rng.derive(0));
    W = gaussianize_symmetric(W, rng.derive(1));

    std::vector<std::vector<int>> perms(static_cast<std::size_t>(d));
    for (int m = 1; m < d; ++m) perms[std::size_t(m)] = rng.derive(2).derive(std::uint64_t(m)).permutation(n);
    W = permute_modes(W, perms);

    ReductionReport rep;
    rep.output = std::move(W);
    rep.map_name = "hpds-chc";
    rep.xi = xi;
    rep.ell = 0;
    rep.graph_hash = hash_graph(G);
    rep.seed = rng.seed;
    if (G.planted) {
        rep.implied_signal = xi / std::sqrt(dfactorial(d));
        rep.implied_k = double(G.planted->vertices.size());
    }
    return rep;
}

RecoveryResult hpds_recover(const DenseTensor& A, double q2, RngStream rng) {
    const int d = A.order();
    const int N = A.dims[0];
    for (int l = 0; l < d; ++l)
        if (A.dims[std::size_t(l)] != N) throw parameter_error("hpds_recover: adjacency tensor must be cubic");
    if (!(q2 > 0.0 && q2 < 1.0)) throw parameter_error("hpds_recover: need q2 in (0,1)");
    const int g = N / d;
    if (g < 1) throw parameter_error("hpds_recover: degenerate split, need floor(N/d) >= 1");

    std::vector<int> lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
    for (int m = 0; m < d; ++m) {
        lo[std::size_t(m)] = m * g;
        hi[std::size_t(m)] = (m == d - 1) ? N : (m + 1) * g;
    }
    std::vector<int> dims(static_cast<std::size_t>(d));
    for (int m = 0; m < d; ++m) dims[std::size_t(m)] = hi[std::size_t(m)] - lo[std::size_t(m)];

    DenseTensor block = DenseTensor::zeros(dims);
    const double denom = std::sqrt(q2 * (1.0 - q2));
    std::vector<int> idx(std::size_t(d), 0);
    std::vector<int> src(std::size_t(d), 0);
    for (std::int64_t flat = 0; flat < block.size(); ++flat) {
        for (int l = 0; l < d; ++l) src[std::size_t(l)] = lo[std::size_t(l)] + idx[std::size_t(l)];
        block.data[std::size_t(flat)] = (A.get(src) - q2) / denom;
        for (int l = d - 1; l >= 0; --l) {
            if (++idx[std::size_t(l)] < dims[std::size_t(l)]) break;
            idx[std::size_t(l)] = 0;
        }
    }

    RecoveryResult inner = aggregated_svd_recover(block, rng);
    RecoveryResult out;
    out.failed = inner.failed;
    out.failure_reason = inner.failure_reason;
    out.diagnostics = inner.diagnostics;
    if (!inner.failed) {
        std::vector<int> K;
        for (int m = 0; m < d; ++m)
            for (int j : inner.support.sets[std::size_t(m)]) K.push_back(lo[std::size_t(m)] + j);
        std::sort(K.begin(), K.end());
        K.erase(std::unique(K.begin(), K.end()), K.end());
        out.support.sets.push_back(std::move(K));
    }
    return out;
}

std::vector<int> hpc_recover_via_detection(const Hypergraph& G, const HpcDetector& detector) {
    const int d = G.d;
    const int N = G.N;
    std::vector<int> Q;

    std::vector<int> v(static_cast<std::size_t>(d - 1));
    for (int i = 0; i < d - 1; ++i) v[std::size_t(i)] = i;
    while (true) {
        // X = common completion neighborhood of v
        std::vector<char> removed(std::size_t(N), 0);
        for (int u : v) removed[std::size_t(u)] = 1;
        std::vector<int> tuple(static_cast<std::size_t>(d));
        for (int x = 0; x < N; ++x) {
            if (removed[std::size_t(x)]) continue;
            for (int i = 0; i < d - 1; ++i) tuple[std::size_t(i)] = v[std::size_t(i)];
            tuple[std::size_t(d - 1)] = x;
            std::sort(tuple.begin(), tuple.end());
            if (G.has_edge(tuple)) removed[std::size_t(x)] = 1;
        }

        // induced subgraph on the survivors, relabelled order-preserving
        std::vector<int> relabel(std::size_t(N), -1);
        std::vector<int> kept;
        int nx = 0;
        for (int u = 0; u < N; ++u)
            if (!removed[std::size_t(u)]) {
                relabel[std::size_t(u)] = nx++;
                kept.push_back(u);
            }
        Hypergraph Gx;
        Gx.d = d;
        Gx.N = nx;
        for (const auto& e : G.edges) {
            bool keep = true;
            for (int u : e)
                if (removed[std::size_t(u)]) {
                    keep = false;
                    break;
                }
            if (!keep) continue;
            std::vector<int> ne;
            for (int u : e) ne.push_back(relabel[std::size_t(u)]);
            Gx.edges.push_back(std::move(ne));
        }

        if (!detector(Gx, kept))
            for (int u : v) Q.push_back(u);

        // next (d-1)-subset
        int i = d - 2;
        while (i >= 0 && v[std::size_t(i)] == N - (d - 1) + i) --i;
        if (i < 0) break;
        ++v[std::size_t(i)];
        for (int j = i + 1; j < d - 1; ++j) v[std::size_t(j)] = v[std::size_t(j - 1)] + 1;
    }

    std::sort(Q.begin(), Q.end());
    Q.erase(std::unique(Q.begin(), Q.end()), Q.end());
    return Q;
}

}  // namespace hoclust
