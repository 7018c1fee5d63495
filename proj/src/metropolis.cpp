#include "hoclust/metropolis.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <unordered_map>

namespace hoclust {

void ChainConfig::validate() const {
    if (!(fugacity >= 1.0)) throw parameter_error("chain config: fugacity must be >= 1");
    if (max_steps < 0) throw parameter_error("chain config: max_steps must be >= 0");
    if (target_size < 0) throw parameter_error("chain config: target_size must be >= 0");
}

namespace {

bool next_combination(std::vector<int>& c, int N) {
    const int d = int(c.size());
    int i = d - 1;
    while (i >= 0 && c[std::size_t(i)] == N - d + i) --i;
    if (i < 0) return false;
    ++c[std::size_t(i)];
    for (int j = i + 1; j < d; ++j) c[std::size_t(j)] = c[std::size_t(j - 1)] + 1;
    return true;
}

// sorted insert / erase keeping the vector sorted
std::vector<int> with_vertex(const std::vector<int>& K, int v) {
    std::vector<int> out = K;
    out.insert(std::lower_bound(out.begin(), out.end(), v), v);
    return out;
}

std::vector<int> without_vertex(const std::vector<int>& K, int v) {
    std::vector<int> out = K;
    out.erase(std::find(out.begin(), out.end(), v));
    return out;
}

// K is a clique; checks whether K + v stays one: every (d-1)-subset of K
// together with v must be an edge.
bool extends_clique(const Hypergraph& G, const std::vector<int>& K, int v) {
    const int d = G.d;
    if (int(K.size()) < d - 1) return true;
    std::vector<int> sub(static_cast<std::size_t>(d - 1));
    std::vector<int> idx(static_cast<std::size_t>(d - 1));
    for (int i = 0; i < d - 1; ++i) idx[std::size_t(i)] = i;
    std::vector<int> edge(static_cast<std::size_t>(d));
    do {
        for (int i = 0; i < d - 1; ++i) edge[std::size_t(i)] = K[std::size_t(idx[std::size_t(i)])];
        edge[std::size_t(d - 1)] = v;
        std::sort(edge.begin(), edge.end());
        if (!G.has_edge(edge)) return false;
    } while (next_combination(idx, int(K.size())));
    return true;
}

}  // namespace

bool is_clique(const Hypergraph& G, const std::vector<int>& S) {
    const int d = G.d;
    for (int v : S)
        if (v < 0 || v >= G.N) throw parameter_error("is_clique: vertex out of range");
    if (int(S.size()) < d) return true;
    std::vector<int> sorted = S;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> idx(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) idx[std::size_t(i)] = i;
    std::vector<int> edge(static_cast<std::size_t>(d));
    do {
        for (int i = 0; i < d; ++i) edge[std::size_t(i)] = sorted[std::size_t(idx[std::size_t(i)])];
        if (!G.has_edge(edge)) return false;
    } while (next_combination(idx, int(sorted.size())));
    return true;
}

CliqueState metropolis_step(const Hypergraph& G, const CliqueState& K, double fugacity,
                            RngStream& rng) {
    if (!(fugacity >= 1.0)) throw parameter_error("metropolis_step: fugacity must be >= 1");
    const int v = int(rng.uniform_int(std::uint64_t(G.N)));
    const bool inside = std::binary_search(K.vertices.begin(), K.vertices.end(), v);
    if (!inside) {
        if (extends_clique(G, K.vertices, v)) return CliqueState{with_vertex(K.vertices, v)};
        return K;
    }
    if (rng.uniform() < 1.0 / fugacity) return CliqueState{without_vertex(K.vertices, v)};
    return K;
}

ChainRecord run_chain(const Hypergraph& G, const ChainConfig& config, const CliqueState& initial,
                      RngStream rng) {
    config.validate();
    if (!is_clique(G, initial.vertices)) throw contract_error("run_chain: initial state is not a clique");

    ChainRecord rec;
    CliqueState K = initial;
    rec.max_size = int(K.vertices.size());
    if (int(K.vertices.size()) >= config.target_size) {
        rec.hit = true;
        rec.final_size = int(K.vertices.size());
        return rec;
    }
    for (std::int64_t t = 1; t <= config.max_steps; ++t) {
        K = metropolis_step(G, K, config.fugacity, rng);
        assert(is_clique(G, K.vertices));  // every visited state stays a clique
        rec.max_size = std::max(rec.max_size, int(K.vertices.size()));
        if (int(K.vertices.size()) >= config.target_size) {
            rec.hit = true;
            rec.steps = t;
            rec.final_size = int(K.vertices.size());
            return rec;
        }
    }
    rec.steps = config.max_steps;
    rec.final_size = int(K.vertices.size());
    return rec;
}

StationaryReport stationary_check(const Hypergraph& G, double fugacity,
                                  std::int64_t state_budget) {
    if (!(fugacity >= 1.0)) throw parameter_error("stationary_check: fugacity must be >= 1");

    // enumerate the clique collection Gamma by growing from the empty set
    std::map<std::vector<int>, std::int64_t> state_id;
    std::vector<std::vector<int>> states;
    states.push_back({});
    state_id[{}] = 0;
    for (std::size_t head = 0; head < states.size(); ++head) {
        const auto K = states[head];
        const int last = K.empty() ? -1 : K.back();
        for (int v = last + 1; v < G.N; ++v) {
            if (extends_clique(G, K, v)) {
                auto K2 = with_vertex(K, v);
                if (state_id.emplace(K2, std::int64_t(states.size())).second) {
                    states.push_back(K2);
                    if (std::int64_t(states.size()) > state_budget)
                        throw budget_error("stationary_check: clique count exceeds state budget");
                }
            }
        }
    }

    const std::int64_t S = std::int64_t(states.size());
    // sparse transition rows: target -> probability
    std::vector<std::unordered_map<std::int64_t, double>> P(static_cast<std::size_t>(S));
    const double pn = 1.0 / double(G.N);
    for (std::int64_t s = 0; s < S; ++s) {
        const auto& K = states[std::size_t(s)];
        double stay = 0.0;
        for (int v = 0; v < G.N; ++v) {
            const bool inside = std::binary_search(K.begin(), K.end(), v);
            if (!inside) {
                if (extends_clique(G, K, v)) {
                    P[std::size_t(s)][state_id.at(with_vertex(K, v))] += pn;
                } else {
                    stay += pn;
                }
            } else {
                P[std::size_t(s)][state_id.at(without_vertex(K, v))] += pn / fugacity;
                stay += pn * (1.0 - 1.0 / fugacity);
            }
        }
        P[std::size_t(s)][s] += stay;  // loop probability by complementation
    }

    StationaryReport rep;
    rep.num_states = S;

    // detailed balance: fugacity^{|K|} P(K,K') = fugacity^{|K'|} P(K',K)
    double db = 0.0;
    for (std::int64_t s = 0; s < S; ++s) {
        const double ws = std::pow(fugacity, double(states[std::size_t(s)].size()));
        for (const auto& [t, p] : P[std::size_t(s)]) {
            if (t == s) continue;
            const double wt = std::pow(fugacity, double(states[std::size_t(t)].size()));
            double back = 0.0;
            auto it = P[std::size_t(t)].find(s);
            if (it != P[std::size_t(t)].end()) back = it->second;
            db = std::max(db, std::abs(ws * p - wt * back));
        }
    }
    rep.detailed_balance_residual = db;

    // stationarity of pi ~ fugacity^{|K|}
    std::vector<double> pi(static_cast<std::size_t>(S));
    double Z = 0.0;
    for (std::int64_t s = 0; s < S; ++s) {
        pi[std::size_t(s)] = std::pow(fugacity, double(states[std::size_t(s)].size()));
        Z += pi[std::size_t(s)];
    }
    for (auto& x : pi) x /= Z;
    std::vector<double> piP(std::size_t(S), 0.0);
    for (std::int64_t s = 0; s < S; ++s)
        for (const auto& [t, p] : P[std::size_t(s)]) piP[std::size_t(t)] += pi[std::size_t(s)] * p;
    double st = 0.0;
    for (std::int64_t s = 0; s < S; ++s) st = std::max(st, std::abs(piP[std::size_t(s)] - pi[std::size_t(s)]));
    rep.stationarity_residual = st;

    rep.pass = db <= 1e-12 && st <= 1e-10;
    return rep;
}

int gateway_target_size(int N, int d, double epsilon) {
    if (N < 2 || d < 2 || !(epsilon > 0.0)) throw parameter_error("gateway_target_size: bad arguments");
    const double log2N = std::log2(double(N));
    double dfact = 1.0;
    for (int i = 2; i <= d; ++i) dfact *= i;
    const double slack = 1.0 + 2.0 * epsilon / 3.0;
    const double a = std::ceil(std::pow(slack * (dfact / 2.0) * log2N, 1.0 / (d - 1)));
    const double b = std::ceil(std::pow(slack * (dfact / d) * log2N, 1.0 / (d - 1)));
    return int(2.0 * a - b);
}

}  // namespace hoclust
