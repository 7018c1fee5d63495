#include "hoclust/models.hpp"

#include <algorithm>
#include <cmath>

namespace hoclust {

namespace {

void validate_nk(const std::vector<int>& n, const std::vector<int>& k) {
    if (n.size() < 2) throw parameter_error("model needs order d >= 2");
    if (n.size() != k.size()) throw parameter_error("n and k must have the same length");
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (n[i] < 1) throw parameter_error("n_i must be >= 1");
        if (k[i] < 1 || k[i] > n[i]) throw parameter_error("need 1 <= k_i <= n_i");
    }
}

// Sorted d-combinations of [0, N) in lexicographic order.
bool next_combination(std::vector<int>& c, int N) {
    const int d = int(c.size());
    int i = d - 1;
    while (i >= 0 && c[std::size_t(i)] == N - d + i) --i;
    if (i < 0) return false;
    ++c[std::size_t(i)];
    for (int j = i + 1; j < d; ++j) c[std::size_t(j)] = c[std::size_t(j - 1)] + 1;
    return true;
}

}  // namespace

void ChcParams::validate() const {
    validate_nk(n, k);
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw parameter_error("lambda must be finite and >= 0");
}

void RohcParams::validate() const {
    validate_nk(n, k);
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw parameter_error("mu must be finite and >= 0");
    if (!(magnitude_bound > 1.0)) throw parameter_error("magnitude bound C must be > 1");
}

std::uint64_t pack_edge(const std::vector<int>& sorted_tuple) {
    if (sorted_tuple.size() > 6) throw parameter_error("edge packing supports d <= 6");
    std::uint64_t key = 0;
    for (int v : sorted_tuple) {
        if (v < 0 || v > 1022) throw parameter_error("edge packing supports vertex ids < 1023");
        key = (key << 10) | std::uint64_t(v + 1);
    }
    return key;
}

void Hypergraph::rebuild_index() const {
    index_.clear();
    index_.reserve(edges.size() * 2);
    for (const auto& e : edges) index_.insert(pack_edge(e));
    index_built_ = true;
}

bool Hypergraph::has_edge(const std::vector<int>& sorted_tuple) const {
    if (!index_built_) rebuild_index();
    return index_.count(pack_edge(sorted_tuple)) > 0;
}

std::vector<double> sample_sparse_unit_vector(int n, int k, VectorStyle style, RngStream rng) {
    if (k < 1 || k > n) throw parameter_error("sample_sparse_unit_vector: need 1 <= k <= n");
    const double base = 1.0 / std::sqrt(double(k));
    std::vector<double> v(std::size_t(n), 0.0);
    std::vector<int> support = rng.combination(n, k);

    if (style == VectorStyle::equal) {
        for (int idx : support) v[std::size_t(idx)] = rng.bernoulli(0.5) ? base : -base;
        return v;
    }

    const double C = 1.5;
    std::vector<double> mag(static_cast<std::size_t>(k));
    for (int attempt = 0; attempt < 1000; ++attempt) {
        double sumsq = 0.0;
        for (auto& m : mag) {
            m = base * (1.0 + 0.5 * rng.uniform());
            sumsq += m * m;
        }
        const double norm = std::sqrt(sumsq);
        bool ok = true;
        for (const auto& m : mag) {
            const double r = m / norm;
            if (r < base / C || r > C * base) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        for (int i = 0; i < k; ++i) {
            const double signed_mag = (rng.bernoulli(0.5) ? 1.0 : -1.0) * mag[std::size_t(i)] / norm;
            v[std::size_t(support[std::size_t(i)])] = signed_mag;
        }
        return v;
    }
    throw parameter_error("sample_sparse_unit_vector: perturbed resampling did not terminate");
}

std::pair<DenseTensor, std::optional<Support>> sample_chc(const ChcParams& p, Hypothesis h,
                                                          RngStream rng) {
    p.validate();
    RngStream noise = rng.derive(0);
    RngStream structure = rng.derive(1);

    DenseTensor Y = DenseTensor::zeros(p.n);
    for (auto& x : Y.data) x = noise.normal();
    if (h == Hypothesis::null) return {std::move(Y), std::nullopt};

    Support S;
    const int d = int(p.n.size());
    for (int i = 0; i < d; ++i) S.sets.push_back(structure.derive(std::uint64_t(i)).combination(p.n[std::size_t(i)], p.k[std::size_t(i)]));

    std::vector<int> idx(std::size_t(d), 0);
    // add lambda over the block
    std::vector<std::vector<char>> inset(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        inset[std::size_t(i)].assign(std::size_t(p.n[std::size_t(i)]), 0);
        for (int j : S.sets[std::size_t(i)]) inset[std::size_t(i)][std::size_t(j)] = 1;
    }
    for (std::int64_t flat = 0; flat < Y.size(); ++flat) {
        bool in_block = true;
        for (int l = 0; l < d; ++l)
            if (!inset[std::size_t(l)][std::size_t(idx[std::size_t(l)])]) {
                in_block = false;
                break;
            }
        if (in_block) Y.data[std::size_t(flat)] += p.lambda;
        for (int l = d - 1; l >= 0; --l) {
            if (++idx[std::size_t(l)] < p.n[std::size_t(l)]) break;
            idx[std::size_t(l)] = 0;
        }
    }
    return {std::move(Y), std::move(S)};
}

RohcInstance sample_rohc_instance(const RohcParams& p, Hypothesis h, RngStream rng,
                                  VectorStyle style) {
    p.validate();
    RngStream noise = rng.derive(0);
    RngStream structure = rng.derive(1);

    RohcInstance inst;
    inst.tensor = DenseTensor::zeros(p.n);
    for (auto& x : inst.tensor.data) x = noise.normal();
    if (h == Hypothesis::null) return inst;

    const int d = int(p.n.size());
    Support S;
    for (int i = 0; i < d; ++i) {
        auto v = sample_sparse_unit_vector(p.n[std::size_t(i)], p.k[std::size_t(i)], style,
                                           structure.derive(std::uint64_t(i)));
        std::vector<int> sup;
        for (int j = 0; j < p.n[std::size_t(i)]; ++j)
            if (v[std::size_t(j)] != 0.0) sup.push_back(j);
        S.sets.push_back(std::move(sup));
        inst.vectors.push_back(std::move(v));
    }
    DenseTensor X = outer_product(inst.vectors);
    for (std::int64_t i = 0; i < X.size(); ++i)
        inst.tensor.data[std::size_t(i)] += p.mu * X.data[std::size_t(i)];
    inst.support = std::move(S);
    return inst;
}

std::pair<DenseTensor, std::optional<Support>> sample_rohc(const RohcParams& p, Hypothesis h,
                                                           RngStream rng, VectorStyle style) {
    auto inst = sample_rohc_instance(p, h, rng, style);
    return {std::move(inst.tensor), std::move(inst.support)};
}

Hypergraph sample_hypergraph(const GraphParams& gp, int N, int d, RngStream rng) {
    if (d < 2 || N < d) throw parameter_error("sample_hypergraph: need d >= 2 and N >= d");
    if (N >= 1023 || d > 6) throw parameter_error("sample_hypergraph: N < 1023 and d <= 6 supported");
    auto in01 = [](double p) { return p >= 0.0 && p <= 1.0; };

    Hypergraph G;
    G.d = d;
    G.N = N;

    std::vector<char> in_k(std::size_t(N), 0);
    double p_in = 0.5, p_out = 0.5;
    switch (gp.kind) {
        case GraphKind::erdos_renyi:
            if (!in01(gp.q)) throw parameter_error("er: q must be in [0,1]");
            p_in = p_out = gp.q;
            break;
        case GraphKind::planted_clique: {
            if (gp.kappa < 0 || gp.kappa > N) throw parameter_error("hpc: need 0 <= kappa <= N");
            p_in = 1.0;
            p_out = 0.5;
            auto K = rng.derive(1).combination(N, gp.kappa);
            for (int v : K) in_k[std::size_t(v)] = 1;
            G.planted = PlantedMeta{K, 1.0, 0.5};
            break;
        }
        case GraphKind::planted_dense_subgraph: {
            if (gp.kappa < 0 || gp.kappa > N) throw parameter_error("hpds: need 0 <= kappa <= N");
            if (!in01(gp.q1) || !in01(gp.q2) || !(gp.q1 > gp.q2))
                throw parameter_error("hpds: need probabilities with q1 > q2");
            p_in = gp.q1;
            p_out = gp.q2;
            auto K = rng.derive(1).combination(N, gp.kappa);
            for (int v : K) in_k[std::size_t(v)] = 1;
            G.planted = PlantedMeta{K, gp.q1, gp.q2};
            break;
        }
    }

    RngStream coin = rng.derive(0);
    std::vector<int> e(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) e[std::size_t(i)] = i;
    do {
        bool inside = true;
        for (int v : e)
            if (!in_k[std::size_t(v)]) {
                inside = false;
                break;
            }
        const double p = inside ? p_in : p_out;
        const double u = coin.uniform();
        if (u < p) G.edges.push_back(e);
    } while (next_combination(e, N));

    return G;
}

DenseTensor adjacency_tensor(const Hypergraph& G) {
    std::vector<int> dims(std::size_t(G.d), G.N);
    DenseTensor A = DenseTensor::zeros(dims);
    std::vector<int> idx(std::size_t(G.d), 0);
    std::vector<int> sorted(static_cast<std::size_t>(G.d));
    for (std::int64_t flat = 0; flat < A.size(); ++flat) {
        sorted = idx;
        std::sort(sorted.begin(), sorted.end());
        bool distinct = true;
        for (int l = 1; l < G.d; ++l)
            if (sorted[std::size_t(l)] == sorted[std::size_t(l - 1)]) {
                distinct = false;
                break;
            }
        if (distinct && G.has_edge(sorted)) A.data[std::size_t(flat)] = 1.0;
        for (int l = G.d - 1; l >= 0; --l) {
            if (++idx[std::size_t(l)] < G.N) break;
            idx[std::size_t(l)] = 0;
        }
    }
    return A;
}

std::pair<DenseTensor, DenseTensor> gaussian_split(const DenseTensor& Y, RngStream rng) {
    DenseTensor A = Y, B = Y;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::int64_t i = 0; i < Y.size(); ++i) {
        const double z = rng.normal();
        A.data[std::size_t(i)] = (Y.data[std::size_t(i)] + z) * inv_sqrt2;
        B.data[std::size_t(i)] = (Y.data[std::size_t(i)] - z) * inv_sqrt2;
    }
    return {std::move(A), std::move(B)};
}

DenseTensor pad_cubic(const DenseTensor& T, int new_n, RngStream rng) {
    const int d = T.order();
    const int n = T.dims[0];
    for (int l = 0; l < d; ++l)
        if (T.dims[std::size_t(l)] != n) throw parameter_error("pad_cubic: input must be cubic");
    if (new_n < n) throw parameter_error("pad_cubic: new_n must be >= n");
    std::vector<int> dims(std::size_t(d), new_n);
    DenseTensor out = DenseTensor::zeros(dims);
    std::vector<int> idx(std::size_t(d), 0);
    for (std::int64_t flat = 0; flat < out.size(); ++flat) {
        bool inside = true;
        for (int l = 0; l < d; ++l)
            if (idx[std::size_t(l)] >= n) {
                inside = false;
                break;
            }
        out.data[std::size_t(flat)] = inside ? T.get(idx) : rng.normal();
        for (int l = d - 1; l >= 0; --l) {
            if (++idx[std::size_t(l)] < new_n) break;
            idx[std::size_t(l)] = 0;
        }
    }
    return out;
}

}  // namespace hoclust
