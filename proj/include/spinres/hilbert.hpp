// hilbert.hpp: dense operators on small spin Hilbert spaces: tensor products,
// partial traces, Hermitian eigendecomposition, regularized logarithm, and
// collective spin operators.
//
// Conventions
//   * hbar = 1; spin operators are in units of hbar/2, so a single spin has
//     S_z eigenvalues +1 (up) and -1 (down).
//   * Single-spin basis is (|up>, |down>); in a product space subsystem 0 is
//     the slowest-varying index, i.e. |s_1 s_2 ... s_L>.

#pragma once

#include "spinres/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

namespace spinres {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Dims = std::vector<std::size_t>;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kPositivityTol = 1e-8;
inline constexpr double kDefaultLogFloor = 1e-12;

// --------------------------- small matrix utilities -------------------------

inline double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// max |M - M^dagger| entrywise
inline double hermiticity_residual(const ComplexMatrix& m) {
    return max_abs(m - m.adjoint());
}

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    return a * b - b * a;
}

inline ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    return a * b + b * a;
}

inline std::size_t product(const Dims& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

// --------------------------- eigendecomposition -----------------------------

struct EigenDecomposition {
    Eigen::VectorXd values;  // ascending
    ComplexMatrix vectors;   // unitary, eigenvectors in columns
};

namespace detail {

// No Hermiticity check; only the lower triangle is read.
inline EigenDecomposition eig_unchecked(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
    if (solver.info() != Eigen::Success) {
        throw ArgumentError("hermitian_eig: decomposition did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

inline ComplexMatrix spectral_apply(const EigenDecomposition& e, const std::function<double(double)>& f) {
    Eigen::VectorXd fv = e.values.unaryExpr(f);
    return e.vectors * fv.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

inline ComplexMatrix log_floor(const ComplexMatrix& m, double eps) {
    const auto e = eig_unchecked(m);
    return spectral_apply(e, [eps](double x) { return std::log(std::max(x, eps)); });
}

} // namespace detail

inline EigenDecomposition hermitian_eig(const ComplexMatrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw ArgumentError("hermitian_eig: matrix must be square and non-empty");
    }
    if (hermiticity_residual(m) > kHermitianTol) {
        throw ArgumentError("hermitian_eig: matrix is not Hermitian");
    }
    return detail::eig_unchecked(m);
}

// --------------------------- density matrices -------------------------------

class DensityMatrix {
public:
    struct Unchecked {};

    // Validates Hermiticity, unit trace and positivity.
    DensityMatrix(ComplexMatrix m, Dims dims) : m_(std::move(m)), dims_(std::move(dims)) {
        check_shape();
        if (hermiticity_residual(m_) > kHermitianTol) {
            throw ArgumentError("DensityMatrix: not Hermitian");
        }
        if (std::abs(m_.trace() - cplx(1.0)) > kTraceTol) {
            throw ArgumentError("DensityMatrix: trace differs from 1");
        }
        if (detail::eig_unchecked(m_).values.minCoeff() < -kPositivityTol) {
            throw ArgumentError("DensityMatrix: negative eigenvalue");
        }
    }

    // Shape is still checked; physical invariants are the caller's responsibility.
    DensityMatrix(ComplexMatrix m, Dims dims, Unchecked) : m_(std::move(m)), dims_(std::move(dims)) {
        check_shape();
    }

    static DensityMatrix pure(const ComplexVector& psi, Dims dims) {
        const double n = psi.norm();
        if (n == 0.0) throw ArgumentError("DensityMatrix::pure: zero vector");
        const ComplexVector v = psi / n;
        ComplexMatrix m = v * v.adjoint();
        m = 0.5 * (m + m.adjoint());
        return {std::move(m), std::move(dims), Unchecked{}};
    }

    static DensityMatrix maximally_mixed(Dims dims) {
        const auto d = static_cast<Eigen::Index>(product(dims));
        return {ComplexMatrix::Identity(d, d) / static_cast<double>(d), std::move(dims), Unchecked{}};
    }

    const ComplexMatrix& matrix() const noexcept { return m_; }
    const Dims& dims() const noexcept { return dims_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }

    cplx expect(const ComplexMatrix& op) const { return (m_ * op).trace(); }
    double purity() const { return (m_ * m_).trace().real(); }

private:
    void check_shape() const {
        if (m_.rows() != m_.cols() || m_.rows() == 0) {
            throw ArgumentError("DensityMatrix: matrix must be square and non-empty");
        }
        if (dims_.empty() || product(dims_) != static_cast<std::size_t>(m_.rows())) {
            throw ArgumentError("DensityMatrix: subsystem dims do not multiply to the matrix dimension");
        }
        if (!m_.allFinite()) throw ArgumentError("DensityMatrix: non-finite entry");
    }

    ComplexMatrix m_;
    Dims dims_;
};

// --------------------------- tensor products --------------------------------

// [(i*db + k), (j*db + l)] = a[i][j] * b[k][l]
inline ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    const Eigen::Index ra = a.rows(), ca = a.cols(), rb = b.rows(), cb = b.cols();
    ComplexMatrix out(ra * rb, ca * cb);
    for (Eigen::Index i = 0; i < ra; ++i) {
        for (Eigen::Index j = 0; j < ca; ++j) {
            out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
        }
    }
    return out;
}

inline DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
    Dims dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    return {tensor_product(a.matrix(), b.matrix()), std::move(dims), DensityMatrix::Unchecked{}};
}

// --------------------------- partial trace ----------------------------------

namespace detail {

// Traces out every subsystem not listed in `keep` (sorted, unique).
inline ComplexMatrix partial_trace(const ComplexMatrix& m, const Dims& dims, const std::vector<std::size_t>& keep) {
    const std::size_t n = dims.size();
    std::vector<bool> kept(n, false);
    for (auto k : keep) kept[k] = true;

    // strides of the full index, subsystem 0 slowest
    std::vector<std::size_t> stride(n, 1);
    for (std::size_t s = n - 1; s-- > 0;) stride[s] = stride[s + 1] * dims[s + 1];

    std::size_t dk = 1, dt = 1;
    for (std::size_t s = 0; s < n; ++s) (kept[s] ? dk : dt) *= dims[s];

    // Split a full index into its kept part and its traced part.
    const std::size_t total = product(dims);
    std::vector<std::size_t> kept_idx(total), traced_idx(total);
    for (std::size_t full = 0; full < total; ++full) {
        std::size_t rem = full, ki = 0, ti = 0;
        for (std::size_t s = 0; s < n; ++s) {
            const std::size_t digit = rem / stride[s];
            rem %= stride[s];
            if (kept[s]) ki = ki * dims[s] + digit;
            else ti = ti * dims[s] + digit;
        }
        kept_idx[full] = ki;
        traced_idx[full] = ti;
    }

    ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
    for (std::size_t r = 0; r < total; ++r) {
        for (std::size_t c = 0; c < total; ++c) {
            if (traced_idx[r] != traced_idx[c]) continue;
            out(static_cast<Eigen::Index>(kept_idx[r]), static_cast<Eigen::Index>(kept_idx[c])) +=
                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    return out;
}

inline std::vector<std::size_t> normalize_keep(std::vector<std::size_t> keep, std::size_t n) {
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    if (keep.empty() || keep.size() >= n) {
        throw ArgumentError("partial_trace: keep must be a nonempty proper subset of subsystems");
    }
    if (keep.back() >= n) throw ArgumentError("partial_trace: subsystem index out of range");
    return keep;
}

} // namespace detail

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<std::size_t> keep) {
    keep = detail::normalize_keep(std::move(keep), rho.dims().size());
    Dims kept_dims;
    for (auto k : keep) kept_dims.push_back(rho.dims()[k]);
    return {detail::partial_trace(rho.matrix(), rho.dims(), keep), std::move(kept_dims), DensityMatrix::Unchecked{}};
}

// --------------------------- regularized logarithm --------------------------

// V diag(ln max(lambda_i, eps)) V^dagger
inline ComplexMatrix matrix_log_psd(const ComplexMatrix& rho, double eps = kDefaultLogFloor) {
    if (!(eps > 0.0)) throw ArgumentError("matrix_log_psd: eps must be positive");
    return detail::log_floor(rho, eps);
}

inline ComplexMatrix matrix_log_psd(const DensityMatrix& rho, double eps = kDefaultLogFloor) {
    return matrix_log_psd(rho.matrix(), eps);
}

// von Neumann entropy with 0 ln 0 = 0
inline double entropy(const ComplexMatrix& rho) {
    const auto e = detail::eig_unchecked(rho);
    double s = 0.0;
    for (double l : e.values) {
        if (l > 1e-300) s -= l * std::log(l);
    }
    return s;
}

// I(A:B) for a bipartition given by `keep` vs. the rest.
inline double mutual_information(const DensityMatrix& rho, const std::vector<std::size_t>& keep) {
    std::vector<std::size_t> rest;
    for (std::size_t s = 0; s < rho.dims().size(); ++s) {
        if (std::find(keep.begin(), keep.end(), s) == keep.end()) rest.push_back(s);
    }
    return entropy(partial_trace(rho, keep).matrix()) + entropy(partial_trace(rho, rest).matrix()) -
           entropy(rho.matrix());
}

// --------------------------- spin operators ---------------------------------

namespace pauli {

inline ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }

inline ComplexMatrix x() {
    ComplexMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

inline ComplexMatrix y() {
    ComplexMatrix m(2, 2);
    m << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
    return m;
}

inline ComplexMatrix z() {
    ComplexMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

// |up><down|: raises S_z, lowers the Zeeman energy -omega S_z / 2.
inline ComplexMatrix up_from_down() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

inline ComplexMatrix down_from_up() { return up_from_down().adjoint(); }

} // namespace pauli

// Places a single-spin operator on `site` of an L-spin register.
inline ComplexMatrix embed(const ComplexMatrix& op, std::size_t site, std::size_t L) {
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (std::size_t s = 0; s < L; ++s) {
        out = tensor_product(out, s == site ? op : pauli::identity());
    }
    return out;
}

struct SpinOperatorSet {
    std::size_t L = 0;
    ComplexMatrix s_x, s_y, s_z, s_plus, s_minus;
    std::vector<ComplexMatrix> site_plus, site_minus, site_z;

    Dims dims() const { return Dims(L, 2); }
    std::size_t dim() const { return std::size_t{1} << L; }
};

inline constexpr std::size_t kMaxSpins = 6;

// S = sum_l S_l in units of hbar/2; S_+ = S_x + i S_y.
inline SpinOperatorSet collective_spin_ops(std::size_t L) {
    if (L < 1 || L > kMaxSpins) {
        throw ArgumentError("collective_spin_ops: L must be in [1, " + std::to_string(kMaxSpins) + "]");
    }
    SpinOperatorSet ops;
    ops.L = L;
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << L);
    ops.s_x = ops.s_y = ops.s_z = ComplexMatrix::Zero(d, d);
    const ComplexMatrix sp = pauli::x() + cplx(0.0, 1.0) * pauli::y();
    for (std::size_t l = 0; l < L; ++l) {
        ops.s_x += embed(pauli::x(), l, L);
        ops.s_y += embed(pauli::y(), l, L);
        ops.site_z.push_back(embed(pauli::z(), l, L));
        ops.s_z += ops.site_z.back();
        ops.site_plus.push_back(embed(sp, l, L));
        ops.site_minus.push_back(ops.site_plus.back().adjoint());
    }
    ops.s_plus = ops.s_x + cplx(0.0, 1.0) * ops.s_y;
    ops.s_minus = ops.s_x - cplx(0.0, 1.0) * ops.s_y;
    return ops;
}

} // namespace spinres
