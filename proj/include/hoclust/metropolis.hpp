#pragma once

#include <cstdint>
#include <vector>

#include "hoclust/models.hpp"

namespace hoclust {

// State of the clique chain: a sorted vertex set inducing a complete
// sub-hypergraph of the ambient graph.
struct CliqueState {
    std::vector<int> vertices;  // sorted
};

struct ChainConfig {
    double fugacity = 1.0;  // >= 1
    std::int64_t max_steps = 100000;
    int target_size = 0;
    void validate() const;
};

struct ChainRecord {
    bool hit = false;
    std::int64_t steps = 0;
    int max_size = 0;
    int final_size = 0;
};

struct StationaryReport {
    std::int64_t num_states = 0;
    double detailed_balance_residual = 0.0;
    double stationarity_residual = 0.0;
    bool pass = false;
};

// True iff every d-subset of S is an edge; |S| < d is vacuously a clique.
bool is_clique(const Hypergraph& G, const std::vector<int>& S);

// One transition: pick v uniformly; add it when the extension stays a
// clique, remove it with probability 1/fugacity when it is already in K.
CliqueState metropolis_step(const Hypergraph& G, const CliqueState& K, double fugacity,
                            RngStream& rng);

ChainRecord run_chain(const Hypergraph& G, const ChainConfig& config, const CliqueState& initial,
                      RngStream rng);

// Enumerates the clique state space, builds the exact transition matrix and
// verifies detailed balance (fugacity^{|K|} P(K,K') symmetric) and
// stationarity of pi(K) ~ fugacity^{|K|}. Budget-guarded enumeration.
StationaryReport stationary_check(const Hypergraph& G, double fugacity,
                                  std::int64_t state_budget = 100000);

// Target size m of the hardness construction, with slack parameter epsilon:
// m = 2 ceil(((1 + 2 eps/3) (d!/2) log2 N)^{1/(d-1)})
//     - ceil(((1 + 2 eps/3) (d-1)! log2 N)^{1/(d-1)}).
int gateway_target_size(int N, int d, double epsilon);

}  // namespace hoclust
