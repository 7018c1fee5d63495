#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hoclust/errors.hpp"

namespace hoclust {

// Dense order-d tensor, flat storage in lexicographic order with the LAST
// index varying fastest. Indices are 0-based throughout the C++ API.
struct DenseTensor {
    std::vector<int> dims;
    std::vector<double> data;

    DenseTensor() = default;
    DenseTensor(std::vector<int> dims_, std::vector<double> data_);

    static DenseTensor zeros(std::vector<int> dims_);

    [[nodiscard]] int order() const { return int(dims.size()); }
    [[nodiscard]] std::int64_t size() const { return std::int64_t(data.size()); }

    [[nodiscard]] std::int64_t offset(std::span<const int> idx) const;
    [[nodiscard]] double get(std::span<const int> idx) const { return data[offset(idx)]; }
    void set(std::span<const int> idx, double v) { data[offset(idx)] = v; }

    template <typename... I>
    [[nodiscard]] double operator()(I... i) const {
        const int idx[] = {int(i)...};
        return get(std::span<const int>(idx, sizeof...(I)));
    }
    template <typename... I>
    double& ref(I... i) {
        const int idx[] = {int(i)...};
        return data[offset(std::span<const int>(idx, sizeof...(I)))];
    }
};

// Row-major dense matrix.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(std::size_t(r) * c, 0.0) {}
    Matrix(int r, int c, std::vector<double> d);

    static Matrix identity(int n);

    [[nodiscard]] double operator()(int r, int c) const { return data[std::size_t(r) * cols + c]; }
    double& at(int r, int c) { return data[std::size_t(r) * cols + c]; }
};

struct SingularTriple {
    std::vector<double> left;
    std::vector<double> right;
    double value = 0.0;
};

struct AggregateStats {
    double sum = 0.0;
    double hs_norm = 0.0;
    double max_abs = 0.0;
    std::vector<int> argmax_abs;  // first index in lexicographic order
};

// Mode-z unfolding: entry (i_z, j) of the result equals T at (i_1,...,i_d)
// with j = sum over l != z of i_l * prod_{m<l, m != z} n_m (0-based form of
// the usual unfolding index map; the first non-z index varies fastest).
Matrix matricize(const DenseTensor& T, int z);

// Inverse of matricize for a given target shape.
DenseTensor dematricize(const Matrix& M, const std::vector<int>& dims, int z);

// Contraction of mode z against U (U.cols must equal dims[z]); mode z of the
// result has U.rows entries.
DenseTensor mode_product(const DenseTensor& T, const Matrix& U, int z);

// Contraction of mode z against a single vector; the result drops mode z.
// Convenience for the u^T x_z products used all over detection/recovery.
std::vector<double> contract_all_but(const DenseTensor& T, const std::vector<std::vector<double>>& vecs,
                                     int keep_mode);
double contract_full(const DenseTensor& T, const std::vector<std::vector<double>>& vecs);

DenseTensor outer_product(const std::vector<std::vector<double>>& vectors);

// Order-(d-2) subtensor fixing mode k1 at j1 and mode k2 at j2 (k1 < k2).
// For d = 2 the single value is returned as a 1-element tensor.
DenseTensor fix_two_modes(const DenseTensor& T, int k1, int k2, int j1, int j2);

AggregateStats aggregate(const DenseTensor& T);

// Leading singular triple by power iteration. Deterministic start: the
// all-ones vector perturbed by 1e-6 with alternating signs. Sign convention:
// first nonzero coordinate of `left` is positive.
SingularTriple top_singular_triple(const Matrix& M, double tol = 1e-10, int max_iter = 10000);

double norm2(std::span<const double> v);
void normalize_in_place(std::vector<double>& v);

}  // namespace hoclust
