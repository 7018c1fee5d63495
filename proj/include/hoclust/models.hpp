#pragma once

#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "hoclust/rng.hpp"
#include "hoclust/tensor.hpp"

namespace hoclust {

enum class Hypothesis { null, planted };
enum class VectorStyle { equal, perturbed };

struct ChcParams {
    std::vector<int> n;      // dimensions per mode
    std::vector<int> k;      // cluster sizes per mode, k_i <= n_i
    double lambda = 0.0;     // signal strength, >= 0
    void validate() const;
};

struct RohcParams {
    std::vector<int> n;
    std::vector<int> k;
    double mu = 0.0;
    double magnitude_bound = 1.5;  // the C > 1 of the near-uniform class
    void validate() const;
};

// Per-mode index sets of the planted structure (0-based).
struct Support {
    std::vector<std::vector<int>> sets;

    bool operator==(const Support& other) const { return sets == other.sets; }
};

struct PlantedMeta {
    std::vector<int> vertices;  // the clique / community K, sorted
    double q1 = 1.0;
    double q2 = 0.5;
};

struct Hypergraph {
    int d = 0;
    int N = 0;
    std::vector<std::vector<int>> edges;  // sorted d-tuples, lexicographically sorted, deduped
    std::optional<PlantedMeta> planted;

    // Packed-edge lookup; built lazily, invalidated by rebuild_index().
    [[nodiscard]] bool has_edge(const std::vector<int>& sorted_tuple) const;
    void rebuild_index() const;

  private:
    mutable std::unordered_set<std::uint64_t> index_;
    mutable bool index_built_ = false;
};

std::uint64_t pack_edge(const std::vector<int>& sorted_tuple);

// k-sparse unit vector with near-uniform magnitudes. `equal` puts  +-k^{-1/2}
// with independent signs on a uniform support. `perturbed` draws magnitudes
// uniform on [k^{-1/2}, 1.5 k^{-1/2}], rescales to unit norm and resamples
// until every magnitude lies in [k^{-1/2}/C, C k^{-1/2}] (for exactly-k
// supports a unit vector cannot keep every magnitude >= k^{-1/2} unless all
// are equal, so the feasible band is symmetric around equality).
std::vector<double> sample_sparse_unit_vector(int n, int k, VectorStyle style, RngStream rng);

// Observation Y = X + Z with Z iid N(0,1). Noise is drawn from
// rng.derive(0) and structure from rng.derive(1), so null and planted runs
// sharing a stream share the exact noise realization. For the rank-one
// model each mode's sparse vector is drawn independently, so supports may
// or may not overlap across modes.
std::pair<DenseTensor, std::optional<Support>> sample_chc(const ChcParams& p, Hypothesis h,
                                                          RngStream rng);
std::pair<DenseTensor, std::optional<Support>> sample_rohc(const RohcParams& p, Hypothesis h,
                                                           RngStream rng,
                                                           VectorStyle style = VectorStyle::equal);

// Same split as sample_rohc but also returns the signed vectors v_i.
struct RohcInstance {
    DenseTensor tensor;
    std::optional<Support> support;
    std::vector<std::vector<double>> vectors;
};
RohcInstance sample_rohc_instance(const RohcParams& p, Hypothesis h, RngStream rng,
                                  VectorStyle style = VectorStyle::equal);

enum class GraphKind { erdos_renyi, planted_clique, planted_dense_subgraph };

struct GraphParams {
    GraphKind kind = GraphKind::erdos_renyi;
    double q = 0.5;    // er edge probability
    int kappa = 0;     // clique / community size
    double q1 = 1.0;   // hpds inside probability
    double q2 = 0.5;   // hpds outside probability
};

Hypergraph sample_hypergraph(const GraphParams& gp, int N, int d, RngStream rng);

// Symmetric 0/1 tensor of shape N^{x d}; tuples with repeated coordinates
// map to 0.
DenseTensor adjacency_tensor(const Hypergraph& G);

// A = (Y + Z1)/sqrt(2), B = (Y - Z1)/sqrt(2) with fresh iid N(0,1) Z1;
// A + B = sqrt(2) Y exactly, and A, B are independent given Gaussian noise.
std::pair<DenseTensor, DenseTensor> gaussian_split(const DenseTensor& Y, RngStream rng);

// Pad a cubic order-d tensor from n^d to new_n^d with fresh N(0,1) entries
// (used to reach the even side length reflection cloning needs).
DenseTensor pad_cubic(const DenseTensor& T, int new_n, RngStream rng);

}  // namespace hoclust
