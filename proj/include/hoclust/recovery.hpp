#pragma once

#include <map>
#include <string>
#include <vector>

#include "hoclust/models.hpp"

namespace hoclust {

struct RecoveryResult {
    bool failed = false;
    std::string failure_reason;
    Support support;
    std::map<std::string, double> diagnostics;
    // Final per-mode vectors when the algorithm produces them (power
    // iteration unit vectors, search sign vectors).
    std::vector<std::vector<double>> mode_vectors;
};

struct GapCut {
    // Groups of original indices, ordered by ascending value range.
    std::vector<std::vector<int>> groups;
    std::vector<double> gap_sizes;
};

// Sort values, cut at the num_gaps largest consecutive differences
// (ties broken toward the earliest, i.e. smallest-value, gap).
GapCut largest_gap_cut(const std::vector<double>& values, int num_gaps);

// Exhaustive block-sum maximizer; ties broken lexicographically over the
// support tuple. Throws budget_error when prod C(n_i, k_i) > budget.
RecoveryResult chc_search(const DenseTensor& Y, const std::vector<int>& k,
                          double budget = 1e8);

// Sign-vector search with independent-copy marking. The tuple over all
// sparsity vectors kbar <= k costs sum over kbar of
// prod_i C(n_i, kbar_i) 2^{kbar_i} evaluations; budget guards that count.
// A failed marking pass is a first-class failure result, not an error.
RecoveryResult rohc_search(const DenseTensor& Y, const std::vector<int>& k, double mu,
                           RngStream rng, double budget = 1e8);

// Stage function: runs the search against a pre-split pair (A, B).
RecoveryResult rohc_search_core(const DenseTensor& A, const DenseTensor& B,
                                const std::vector<int>& k, double mu, double budget = 1e8);

// Entry thresholding at sqrt(2 (d+1) log max_i n_i); support is the per-mode
// projection of the surviving index tuples. Empty output is allowed.
RecoveryResult threshold_recover(const DenseTensor& Y);

enum class ProblemKind { chc, rohc };

// Steps 3-4 of the power iteration: init from per-mode unfoldings of A,
// then t_max rounds of normalized contraction updates.
std::vector<std::vector<double>> power_iterate(const DenseTensor& A, int t_max);

RecoveryResult power_iteration_recover(const DenseTensor& Y, ProblemKind problem, int t_max,
                                       RngStream rng);

// Pairwise aggregation matrix of Algorithm-5 style: entry (a, b) is the sum
// of the subtensor fixing mode i at a and mode i_star at b, divided by
// sqrt(prod of the remaining dims).
Matrix aggregate_pair_matrix(const DenseTensor& Y, int i, int i_star);

RecoveryResult aggregated_svd_recover(const DenseTensor& Y, RngStream rng);

// Default iteration count for the power method stage, ceil(5 log n).
int default_t_max(int n);

}  // namespace hoclust
