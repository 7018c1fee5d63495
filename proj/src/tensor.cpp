#include "hoclust/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hoclust {

namespace {

std::int64_t checked_product(const std::vector<int>& dims) {
    if (dims.empty()) throw shape_error("tensor needs at least one mode");
    std::int64_t p = 1;
    for (int n : dims) {
        if (n < 1) throw shape_error("every dimension must be >= 1");
        p *= n;
    }
    return p;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<int> dims_, std::vector<double> data_)
    : dims(std::move(dims_)), data(std::move(data_)) {
    if (std::int64_t(data.size()) != checked_product(dims))
        throw shape_error("data length does not match product of dims");
}

DenseTensor DenseTensor::zeros(std::vector<int> dims_) {
    std::int64_t n = checked_product(dims_);
    DenseTensor T;
    T.dims = std::move(dims_);
    T.data.assign(std::size_t(n), 0.0);
    return T;
}

std::int64_t DenseTensor::offset(std::span<const int> idx) const {
    if (int(idx.size()) != order()) throw index_error("index arity != tensor order");
    std::int64_t off = 0;
    for (int l = 0; l < order(); ++l) {
        if (idx[l] < 0 || idx[l] >= dims[l]) throw index_error("tensor index out of range");
        off = off * dims[l] + idx[l];
    }
    return off;
}

Matrix::Matrix(int r, int c, std::vector<double> d) : rows(r), cols(c), data(std::move(d)) {
    if (rows < 1 || cols < 1 || std::int64_t(data.size()) != std::int64_t(rows) * cols)
        throw shape_error("matrix data length != rows*cols");
}

Matrix Matrix::identity(int n) {
    Matrix I(n, n);
    for (int i = 0; i < n; ++i) I.at(i, i) = 1.0;
    return I;
}

Matrix matricize(const DenseTensor& T, int z) {
    const int d = T.order();
    if (z < 0 || z >= d) throw index_error("matricize: mode out of range");
    std::int64_t ncols = 1;
    for (int l = 0; l < d; ++l)
        if (l != z) ncols *= T.dims[l];
    Matrix M(T.dims[z], int(ncols));

    // Column strides of the unfolding: the first non-z mode varies fastest.
    std::vector<std::int64_t> stride(d, 0);
    std::int64_t s = 1;
    for (int l = 0; l < d; ++l) {
        if (l == z) continue;
        stride[l] = s;
        s *= T.dims[l];
    }

    std::vector<int> idx(d, 0);
    for (std::int64_t flat = 0; flat < T.size(); ++flat) {
        std::int64_t col = 0;
        for (int l = 0; l < d; ++l)
            if (l != z) col += idx[l] * stride[l];
        M.at(idx[z], int(col)) = T.data[std::size_t(flat)];
        for (int l = d - 1; l >= 0; --l) {
            if (++idx[l] < T.dims[l]) break;
            idx[l] = 0;
        }
    }
    return M;
}

DenseTensor dematricize(const Matrix& M, const std::vector<int>& dims, int z) {
    const int d = int(dims.size());
    if (z < 0 || z >= d) throw index_error("dematricize: mode out of range");
    DenseTensor T = DenseTensor::zeros(dims);
    std::int64_t ncols = 1;
    for (int l = 0; l < d; ++l)
        if (l != z) ncols *= dims[l];
    if (M.rows != dims[z] || std::int64_t(M.cols) != ncols)
        throw shape_error("dematricize: matrix shape does not match target dims");

    std::vector<std::int64_t> stride(d, 0);
    std::int64_t s = 1;
    for (int l = 0; l < d; ++l) {
        if (l == z) continue;
        stride[l] = s;
        s *= dims[l];
    }
    std::vector<int> idx(d, 0);
    for (std::int64_t flat = 0; flat < T.size(); ++flat) {
        std::int64_t col = 0;
        for (int l = 0; l < d; ++l)
            if (l != z) col += idx[l] * stride[l];
        T.data[std::size_t(flat)] = M(idx[z], int(col));
        for (int l = d - 1; l >= 0; --l) {
            if (++idx[l] < dims[l]) break;
            idx[l] = 0;
        }
    }
    return T;
}

DenseTensor mode_product(const DenseTensor& T, const Matrix& U, int z) {
    const int d = T.order();
    if (z < 0 || z >= d) throw index_error("mode_product: mode out of range");
    if (U.cols != T.dims[z]) throw shape_error("mode_product: U.cols != dims[z]");

    std::vector<int> out_dims = T.dims;
    out_dims[z] = U.rows;
    DenseTensor out = DenseTensor::zeros(out_dims);

    // inner = product of dims after z (the fast block), outer = before z.
    std::int64_t inner = 1;
    for (int l = z + 1; l < d; ++l) inner *= T.dims[l];
    std::int64_t outer = 1;
    for (int l = 0; l < z; ++l) outer *= T.dims[l];
    const int nz = T.dims[z];

    for (std::int64_t o = 0; o < outer; ++o) {
        const double* src = T.data.data() + o * nz * inner;
        double* dst = out.data.data() + o * std::int64_t(U.rows) * inner;
        for (int j = 0; j < U.rows; ++j)
            for (int i = 0; i < nz; ++i) {
                const double u = U(j, i);
                if (u == 0.0) continue;
                const double* s = src + std::int64_t(i) * inner;
                double* t = dst + std::int64_t(j) * inner;
                for (std::int64_t q = 0; q < inner; ++q) t[q] += u * s[q];
            }
    }
    return out;
}

std::vector<double> contract_all_but(const DenseTensor& T,
                                     const std::vector<std::vector<double>>& vecs, int keep_mode) {
    const int d = T.order();
    if (int(vecs.size()) != d) throw shape_error("contract_all_but: need one vector per mode");
    std::vector<double> out(std::size_t(T.dims[keep_mode]), 0.0);
    std::vector<int> idx(d, 0);
    for (std::int64_t flat = 0; flat < T.size(); ++flat) {
        double w = T.data[std::size_t(flat)];
        if (w != 0.0) {
            for (int l = 0; l < d; ++l) {
                if (l == keep_mode) continue;
                w *= vecs[l][std::size_t(idx[l])];
                if (w == 0.0) break;
            }
            out[std::size_t(idx[keep_mode])] += w;
        }
        for (int l = d - 1; l >= 0; --l) {
            if (++idx[l] < T.dims[l]) break;
            idx[l] = 0;
        }
    }
    return out;
}

double contract_full(const DenseTensor& T, const std::vector<std::vector<double>>& vecs) {
    const int d = T.order();
    if (int(vecs.size()) != d) throw shape_error("contract_full: need one vector per mode");
    double acc = 0.0;
    std::vector<int> idx(d, 0);
    for (std::int64_t flat = 0; flat < T.size(); ++flat) {
        double w = T.data[std::size_t(flat)];
        for (int l = 0; l < d && w != 0.0; ++l) w *= vecs[l][std::size_t(idx[l])];
        acc += w;
        for (int l = d - 1; l >= 0; --l) {
            if (++idx[l] < T.dims[l]) break;
            idx[l] = 0;
        }
    }
    return acc;
}

DenseTensor outer_product(const std::vector<std::vector<double>>& vectors) {
    if (vectors.empty()) throw parameter_error("outer_product: no vectors");
    std::vector<int> dims;
    for (const auto& v : vectors) {
        if (v.empty()) throw parameter_error("outer_product: empty vector");
        dims.push_back(int(v.size()));
    }
    DenseTensor T = DenseTensor::zeros(dims);
    const int d = int(dims.size());
    std::vector<int> idx(d, 0);
    for (std::int64_t flat = 0; flat < T.size(); ++flat) {
        double p = 1.0;
        for (int l = 0; l < d; ++l) p *= vectors[l][std::size_t(idx[l])];
        T.data[std::size_t(flat)] = p;
        for (int l = d - 1; l >= 0; --l) {
            if (++idx[l] < dims[l]) break;
            idx[l] = 0;
        }
    }
    return T;
}

DenseTensor fix_two_modes(const DenseTensor& T, int k1, int k2, int j1, int j2) {
    const int d = T.order();
    if (!(0 <= k1 && k1 < k2 && k2 < d)) throw index_error("fix_two_modes: need 0 <= k1 < k2 < d");
    if (j1 < 0 || j1 >= T.dims[k1] || j2 < 0 || j2 >= T.dims[k2])
        throw index_error("fix_two_modes: slice index out of range");

    std::vector<int> out_dims;
    for (int l = 0; l < d; ++l)
        if (l != k1 && l != k2) out_dims.push_back(T.dims[l]);
    if (out_dims.empty()) out_dims.push_back(1);  // order-0 case kept as 1-element tensor

    DenseTensor out = DenseTensor::zeros(out_dims);
    std::vector<int> idx(d, 0);
    idx[k1] = j1;
    idx[k2] = j2;
    for (std::int64_t of = 0; of < out.size(); ++of) {
        out.data[std::size_t(of)] = T.get(idx);
        for (int l = d - 1; l >= 0; --l) {
            if (l == k1 || l == k2) continue;
            if (++idx[l] < T.dims[l]) break;
            idx[l] = 0;
        }
    }
    return out;
}

AggregateStats aggregate(const DenseTensor& T) {
    AggregateStats s;
    double sumsq = 0.0;
    std::int64_t best = 0;
    for (std::int64_t i = 0; i < T.size(); ++i) {
        const double x = T.data[std::size_t(i)];
        s.sum += x;
        sumsq += x * x;
        if (std::abs(x) > s.max_abs) {
            s.max_abs = std::abs(x);
            best = i;
        }
    }
    s.hs_norm = std::sqrt(sumsq);
    s.argmax_abs.assign(std::size_t(T.order()), 0);
    for (int l = T.order() - 1; l >= 0; --l) {
        s.argmax_abs[std::size_t(l)] = int(best % T.dims[l]);
        best /= T.dims[l];
    }
    return s;
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void normalize_in_place(std::vector<double>& v) {
    double n = norm2(v);
    if (n == 0.0) throw degenerate_error("cannot normalize zero vector");
    for (auto& x : v) x /= n;
}

SingularTriple top_singular_triple(const Matrix& M, double tol, int max_iter) {
    if (tol <= 0.0) throw parameter_error("top_singular_triple: tol must be positive");
    bool all_zero = true;
    for (double x : M.data)
        if (x != 0.0) {
            all_zero = false;
            break;
        }
    if (all_zero) throw degenerate_error("top_singular_triple: all-zero matrix");

    std::vector<double> v(static_cast<std::size_t>(M.cols));
    for (int i = 0; i < M.cols; ++i) v[std::size_t(i)] = 1.0 + ((i % 2 == 0) ? 1e-6 : -1e-6);
    normalize_in_place(v);

    std::vector<double> u(std::size_t(M.rows), 0.0);
    double sigma = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        // u <- normalize(M v)
        for (int r = 0; r < M.rows; ++r) {
            double acc = 0.0;
            const double* row = M.data.data() + std::size_t(r) * M.cols;
            for (int c = 0; c < M.cols; ++c) acc += row[c] * v[std::size_t(c)];
            u[std::size_t(r)] = acc;
        }
        double un = norm2(u);
        if (un == 0.0) throw convergence_error("power iteration hit the null space", u, v, sigma);
        for (auto& x : u) x /= un;

        // v <- M^T u, sigma = ||v||
        std::vector<double> w(std::size_t(M.cols), 0.0);
        for (int r = 0; r < M.rows; ++r) {
            const double ur = u[std::size_t(r)];
            const double* row = M.data.data() + std::size_t(r) * M.cols;
            for (int c = 0; c < M.cols; ++c) w[std::size_t(c)] += ur * row[c];
        }
        sigma = norm2(w);
        if (sigma == 0.0) throw convergence_error("power iteration collapsed", u, v, sigma);
        for (auto& x : w) x /= sigma;
        v = std::move(w);

        // residual ||M v - sigma u||
        double res = 0.0;
        for (int r = 0; r < M.rows; ++r) {
            double acc = 0.0;
            const double* row = M.data.data() + std::size_t(r) * M.cols;
            for (int c = 0; c < M.cols; ++c) acc += row[c] * v[std::size_t(c)];
            const double diff = acc - sigma * u[std::size_t(r)];
            res += diff * diff;
        }
        if (std::sqrt(res) <= tol * sigma) {
            for (double x : u) {
                if (x == 0.0) continue;
                if (x < 0.0) {
                    for (auto& y : u) y = -y;
                    for (auto& y : v) y = -y;
                }
                break;
            }
            return SingularTriple{u, v, sigma};
        }
    }
    throw convergence_error("power iteration did not converge", u, v, sigma);
}

}  // namespace hoclust
