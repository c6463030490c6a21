#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "sdc/types.hpp"

// Small dense linear algebra used by the predictor design. Everything is
// templated on the scalar so the same routines serve real test fixtures and
// the complex-valued design pipeline.
namespace sdc::linalg {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// exp(s * diag(eigs)) as a dense diagonal matrix.
template <typename Derived>
Matrix<std::complex<double>> diagonal_exponential(const Eigen::MatrixBase<Derived>& eigs, double s) {
    const Eigen::Index n = eigs.size();
    Matrix<std::complex<double>> out = Matrix<std::complex<double>>::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        out(i, i) = std::exp(s * std::complex<double>(eigs(i)));
    return out;
}

template <typename Derived>
bool is_hurwitz(const Eigen::MatrixBase<Derived>& a) {
    Eigen::ComplexEigenSolver<Matrix<std::complex<double>>> es(a.template cast<std::complex<double>>().eval(), false);
    return (es.eigenvalues().real().array() < 0.0).all();
}

template <typename Derived>
Vector<std::complex<double>> eigenvalues(const Eigen::MatrixBase<Derived>& a) {
    Eigen::ComplexEigenSolver<Matrix<std::complex<double>>> es(a.template cast<std::complex<double>>().eval(), false);
    return es.eigenvalues();
}

/// Lexicographic order on (real, imag); used to make pole lists canonical.
inline bool complex_less(const std::complex<double>& a, const std::complex<double>& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

/// Coefficients c_0..c_n (c_n = 1) of prod (s - r_i), roots taken in canonical order.
inline std::vector<std::complex<double>> monic_polynomial(std::vector<std::complex<double>> roots) {
    std::sort(roots.begin(), roots.end(), complex_less);
    std::vector<std::complex<double>> c{1.0};
    for (const auto& r : roots) {
        std::vector<std::complex<double>> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i + 1] += c[i];
            next[i] -= r * c[i];
        }
        c = std::move(next);
    }
    return c;
}

/// p(A) for a monic polynomial given by its roots, evaluated as a product of
/// shifted factors (better conditioned than Horner on the coefficients).
template <typename Scalar>
Matrix<Scalar> polynomial_of_matrix(const Matrix<Scalar>& a, std::vector<std::complex<double>> roots) {
    std::sort(roots.begin(), roots.end(), complex_less);
    const Eigen::Index n = a.rows();
    Matrix<Scalar> out = Matrix<Scalar>::Identity(n, n);
    for (const auto& r : roots) {
        Matrix<Scalar> shifted = a;
        shifted.diagonal().array() -= static_cast<Scalar>(r);
        out = (out * shifted).eval();
    }
    return out;
}

template <typename Scalar>
Matrix<Scalar> controllability_matrix(const Matrix<Scalar>& a, const Matrix<Scalar>& b) {
    const Eigen::Index n = a.rows();
    const Eigen::Index m = b.cols();
    Matrix<Scalar> c(n, n * m);
    Matrix<Scalar> block = b;
    for (Eigen::Index k = 0; k < n; ++k) {
        c.middleCols(k * m, m) = block;
        block = (a * block).eval();
    }
    return c;
}

/// Popov-Belevitch-Hautus test for a diagonal state matrix diag(eigs).
///
/// Eigenvalues closer than 1e-9 * max(1, |lambda_i|) are grouped; every group
/// must have a B row block of full row rank. Singular values below
/// 1e-9 * sigma_max(B) are treated as zero.
template <typename DerivedE, typename DerivedB>
bool diagonal_pair_controllable(const Eigen::MatrixBase<DerivedE>& eigs, const Eigen::MatrixBase<DerivedB>& b) {
    using C = std::complex<double>;
    const Eigen::Index n = eigs.size();
    if (n == 0) return true;
    Matrix<C> bc = b.template cast<C>();
    Eigen::JacobiSVD<Matrix<C>> global(bc);
    const double smax = global.singularValues().size() ? global.singularValues()(0) : 0.0;
    if (!(smax > 0.0)) return false;
    const double tol_rank = 1e-9 * smax;

    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (used[static_cast<std::size_t>(i)]) continue;
        const C li = C(eigs(i));
        std::vector<Eigen::Index> group;
        for (Eigen::Index j = i; j < n; ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            if (std::abs(C(eigs(j)) - li) < 1e-9 * std::max(1.0, std::abs(li))) {
                group.push_back(j);
                used[static_cast<std::size_t>(j)] = true;
            }
        }
        const auto mult = static_cast<Eigen::Index>(group.size());
        if (mult > bc.cols()) return false;
        Matrix<C> rows(mult, bc.cols());
        for (Eigen::Index r = 0; r < mult; ++r) rows.row(r) = bc.row(group[static_cast<std::size_t>(r)]);
        Eigen::JacobiSVD<Matrix<C>> svd(rows);
        const auto& sv = svd.singularValues();
        Eigen::Index rank = 0;
        for (Eigen::Index r = 0; r < sv.size(); ++r)
            if (sv(r) > tol_rank) ++rank;
        if (rank != mult) return false;
    }
    return true;
}

/// Ackermann's formula for a single input: returns the row k with
/// spec(A + b k) = poles.
template <typename Scalar>
Matrix<Scalar> ackermann(const Matrix<Scalar>& a, const Vector<Scalar>& b,
                         const std::vector<std::complex<double>>& poles) {
    const Eigen::Index n = a.rows();
    if (static_cast<Eigen::Index>(poles.size()) != n)
        throw Error(ErrorKind::InvalidArgument, "pole count must equal the state dimension");
    Matrix<Scalar> ctrb = controllability_matrix<Scalar>(a, b);
    Eigen::FullPivLU<Matrix<Scalar>> lu(ctrb);
    if (!lu.isInvertible())
        throw Error(ErrorKind::SynthesisFailure, "pair is not controllable");
    // last row of ctrb^{-1}
    Vector<Scalar> en = Vector<Scalar>::Zero(n);
    en(n - 1) = Scalar(1);
    Eigen::FullPivLU<Matrix<Scalar>> lut(ctrb.transpose());
    Vector<Scalar> w = lut.solve(en);
    Matrix<Scalar> pa = polynomial_of_matrix<Scalar>(a, poles);
    return -(w.transpose() * pa);
}

/// Deterministic seed direction for the rank-one reduction: attempt r uses
/// q_k proportional to 1 + eps_r k with eps = 0, 0.1, 0.2, 0.4, ..., so attempt 0
/// is the normalized all-ones vector and later attempts tilt it progressively.
inline Vector<std::complex<double>> placement_direction(Eigen::Index m, int attempt) {
    const double eps = attempt == 0 ? 0.0 : 0.1 * std::ldexp(1.0, attempt - 1);
    Vector<std::complex<double>> q(m);
    for (Eigen::Index k = 0; k < m; ++k) q(k) = 1.0 + eps * static_cast<double>(k);
    return q / q.norm();
}

inline constexpr int kPlacementAttempts = 8;

/// Pole placement for a diagonal A with multi-input B via K = q k.
template <typename DerivedE>
Matrix<std::complex<double>> place_poles(const Eigen::MatrixBase<DerivedE>& eigs,
                                         const Matrix<std::complex<double>>& b,
                                         std::vector<std::complex<double>> poles) {
    using C = std::complex<double>;
    const Eigen::Index n = eigs.size();
    if (b.rows() != n)
        throw Error(ErrorKind::InvalidArgument, "input matrix row count must equal the state dimension");
    if (static_cast<Eigen::Index>(poles.size()) != n)
        throw Error(ErrorKind::InvalidArgument, "pole count must equal the state dimension");
    if (!diagonal_pair_controllable(eigs, b))
        throw Error(ErrorKind::SynthesisFailure, "pair (A, B) fails the PBH controllability test");
    std::sort(poles.begin(), poles.end(), complex_less);

    Matrix<C> a = Matrix<C>::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) a(i, i) = C(eigs(i));

    for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
        Vector<C> q = placement_direction(b.cols(), attempt);
        Vector<C> bq = b * q;
        if (!diagonal_pair_controllable(eigs, Matrix<C>(bq))) continue;
        Matrix<C> k = ackermann<C>(a, bq, poles);
        return q * k;
    }
    throw Error(ErrorKind::SynthesisFailure, "no seed direction yields a controllable single-input pair");
}

/// Real matrix with the given spectrum: conjugate pairs become 2x2 rotation
/// blocks, real poles sit on the diagonal. Falls back to diag(poles) when the
/// list is not closed under conjugation.
inline Matrix<std::complex<double>> target_matrix(std::vector<std::complex<double>> poles) {
    using C = std::complex<double>;
    std::sort(poles.begin(), poles.end(), complex_less);
    const Eigen::Index n = static_cast<Eigen::Index>(poles.size());
    Matrix<C> t = Matrix<C>::Zero(n, n);
    std::vector<bool> used(poles.size(), false);
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < poles.size(); ++i) {
        if (used[i]) continue;
        const C p = poles[i];
        if (p.imag() == 0.0) {
            t(row, row) = p;
            used[i] = true;
            ++row;
            continue;
        }
        std::size_t j = i + 1;
        while (j < poles.size() && (used[j] || poles[j] != std::conj(p))) ++j;
        if (j == poles.size()) {
            for (std::size_t k = 0; k < poles.size(); ++k) t(k, k) = poles[k];
            return t;
        }
        used[i] = used[j] = true;
        t(row, row) = t(row + 1, row + 1) = p.real();
        t(row, row + 1) = std::abs(p.imag());
        t(row + 1, row) = -std::abs(p.imag());
        row += 2;
    }
    return t;
}

/// Full-rank assignment for a square invertible B: K = B^{-1} (T - A) with T
/// from target_matrix, so A + B K = T exactly.
template <typename DerivedE>
Matrix<std::complex<double>> exact_placement(const Eigen::MatrixBase<DerivedE>& eigs,
                                             const Matrix<std::complex<double>>& b,
                                             const std::vector<std::complex<double>>& poles) {
    using C = std::complex<double>;
    const Eigen::Index n = eigs.size();
    if (b.rows() != n || b.cols() != n)
        throw Error(ErrorKind::SynthesisFailure, "exact placement needs as many inputs as retained modes");
    if (static_cast<Eigen::Index>(poles.size()) != n)
        throw Error(ErrorKind::InvalidArgument, "pole count must equal the state dimension");
    Eigen::FullPivLU<Matrix<C>> lu(b);
    if (!lu.isInvertible()) throw Error(ErrorKind::SynthesisFailure, "input matrix is singular");
    Matrix<C> a = Matrix<C>::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) a(i, i) = C(eigs(i));
    return lu.solve(target_matrix(poles) - a);
}

/// Solves A* P + P A = -I by vectorization. A must be Hurwitz.
template <typename Scalar>
Matrix<Scalar> solve_lyapunov(const Matrix<Scalar>& a) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n) throw Error(ErrorKind::InvalidArgument, "Lyapunov solve needs a square matrix");
    if (!is_hurwitz(a)) throw Error(ErrorKind::InvalidArgument, "closed-loop matrix is not Hurwitz");

    const Matrix<Scalar> ah = a.adjoint();
    // column-major vec: vec(A* P) = (I kron A*) vec P, vec(P A) = (A^T kron I) vec P
    Matrix<Scalar> lhs = Matrix<Scalar>::Zero(n * n, n * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        lhs.block(j * n, j * n, n, n) += ah;
        for (Eigen::Index i = 0; i < n; ++i)
            lhs.block(j * n, i * n, n, n).diagonal().array() += a(i, j);
    }
    Vector<Scalar> rhs = Vector<Scalar>::Zero(n * n);
    for (Eigen::Index i = 0; i < n; ++i) rhs(i * n + i) = Scalar(-1);

    Eigen::FullPivLU<Matrix<Scalar>> lu(lhs);
    if (!lu.isInvertible()) throw Error(ErrorKind::SynthesisFailure, "singular Lyapunov system");
    Vector<Scalar> x = lu.solve(rhs);
    Matrix<Scalar> p = Eigen::Map<Matrix<Scalar>>(x.data(), n, n);
    return ((p + p.adjoint()) / Scalar(2)).eval();
}

/// Extreme eigenvalues of a Hermitian matrix.
template <typename Scalar>
std::pair<double, double> hermitian_eig_range(const Matrix<Scalar>& p) {
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(p, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return {ev.minCoeff(), ev.maxCoeff()};
}

template <typename Derived>
double spectral_norm(const Eigen::MatrixBase<Derived>& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix<typename Derived::Scalar>> svd(m.eval());
    return svd.singularValues()(0);
}

}  // namespace sdc::linalg
