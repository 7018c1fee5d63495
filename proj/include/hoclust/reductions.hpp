#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hoclust/models.hpp"
#include "hoclust/recovery.hpp"

namespace hoclust {

struct RkParams {
    double p = 1.0;   // Bernoulli probability mapped to N(xi, 1)
    double q = 0.5;   // Bernoulli probability mapped to N(0, 1)
    double xi = 0.0;  // Gaussian mean, > 0
    int iterations = 0;
    void validate() const;
};

struct ReductionReport {
    DenseTensor output;
    std::string map_name;
    double xi = 0.0;
    int ell = 0;
    // Implied target-model parameters from the reduction's guarantee;
    // populated only when the source graph carries planted metadata.
    double implied_signal = 0.0;  // mu or lambda
    double implied_k = 0.0;
    std::uint64_t graph_hash = 0;
    std::uint64_t seed = 0;
};

// Iterative acceptance scheme mapping a Bernoulli bit to (approximately)
// N(xi,1) for x ~ Bern(p) and N(0,1) for x ~ Bern(q). Returns 0.0 when no
// iteration accepts.
double rejection_kernel(int x, const RkParams& params, RngStream rng);

// One permute-and-mix transform per round: permute every mode by a shared
// uniform permutation, then multiply every mode by (A + B)/sqrt(2), where A
// is diag(I_{n/2}, -I_{n/2}) and B is the anti-diagonal permutation. Needs a
// cubic tensor with even side length.
DenseTensor reflection_clone(const DenseTensor& W, int ell, RngStream rng);

// Same, also transporting the given vectors by u <- (A+B) u^sigma each
// round (the tracked-vector law used by the invariants).
DenseTensor reflection_clone_traced(const DenseTensor& W, int ell, RngStream rng,
                                    std::vector<std::vector<double>>& tracked);

// Replaces the D symmetric copies of every non-diagonal entry class by the
// first D rows of a fixed orthogonal matrix (first column constant
// 1/sqrt(d!)) applied to (W_i, B^(1)_i, ..., B^(d!-1)_i); all-equal-index
// entries get fresh N(0,1) draws.
DenseTensor gaussianize_symmetric(const DenseTensor& W, RngStream rng);

// HPC -> ROHC (reflection-cloning route). If pad_to_even is set and N is
// odd, the tensor is padded by one slice of fresh null entries before
// cloning.
ReductionReport hpc_to_rohc(const Hypergraph& G, int ell, RngStream rng,
                            bool pad_to_even = false);

// HPC -> CHC detection (corner block + rejection kernel + block averaging);
// requires N = d * n_target * ell.
ReductionReport hpc_to_chc_detection(const Hypergraph& G, int n_target, int ell, RngStream rng);

// HPDS -> CHC recovery (rejection kernel with p = 1/2 + rho, symmetric
// mixing, mode permutations; no cloning).
ReductionReport hpds_to_chc(const Hypergraph& G, double rho, RngStream rng);

// HPDS support recovery: standardize the off-diagonal corner block of the
// adjacency tensor and run Aggregated-SVD; the estimate is the union of the
// per-mode sets mapped back to original vertex ids (support.sets[0]).
RecoveryResult hpds_recover(const DenseTensor& A, double q2, RngStream rng);

// Clique recovery from a detector: for every (d-1)-subset v, remove v and
// its common completion neighborhood; vertices of v join Q exactly when the
// detector reports the remainder as null (true = planted). The detector also
// receives the surviving vertices' original ids, which data-driven detectors
// ignore and test oracles may use.
using HpcDetector = std::function<bool(const Hypergraph&, const std::vector<int>&)>;
std::vector<int> hpc_recover_via_detection(const Hypergraph& G, const HpcDetector& detector);

std::uint64_t hash_graph(const Hypergraph& G);

// permute mode l by perms[l] (empty vector = identity):
// out[sigma_1(i_1), ..., sigma_d(i_d)] = in[i_1, ..., i_d]
DenseTensor permute_modes(const DenseTensor& T, const std::vector<std::vector<int>>& perms);

namespace detail {

// (A + B): entries in {-1, 0, 1}, (A+B)(A+B)^T = 2 I.
Matrix reflection_matrix(int n);

// d! x d! orthogonal mixing matrix, first column 1/sqrt(d!), built from a
// deterministic Householder reflection.
Matrix mixing_matrix(int d_factorial);

// Symmetric RK tensor over a hypergraph: every index class with all-distinct
// coordinates carries RK(edge indicator); classes with repeated (but not all
// equal) coordinates carry RK(0); all-equal entries stay 0 for
// gaussianize_symmetric to fill.
DenseTensor symmetric_rk_tensor(const Hypergraph& G, const RkParams& rk, RngStream rng);

// gaussianize_symmetric with an injectable auxiliary source; aux(rank, j)
// must return B^(j+1) at the rank-th sorted index class. Used by tests to
// suppress the auxiliaries.
DenseTensor gaussianize_with(const DenseTensor& W, RngStream diag_rng,
                             const std::function<double(std::int64_t, int)>& aux);

// Block averaging of the CHC detection reduction: Y[i] =
// l^{-d/2} sum over j in [l]^d of B[(j_1 n + i_1, ..., j_d n + i_d)].
DenseTensor block_average(const DenseTensor& B, int n, int ell);

}  // namespace detail

}  // namespace hoclust
