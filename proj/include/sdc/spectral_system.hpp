#pragma once

#include <functional>
#include <vector>

#include "sdc/types.hpp"

namespace sdc {

/// Eigenfunction evaluator: (mode index n >= 1, position xi) -> value.
using ModeFunction = std::function<Complex(int, double)>;

/// A Riesz-spectral boundary control system in modal coordinates.
///
/// Row n-1 of the coefficient matrices belongs to mode n. `input_coeffs` holds
/// b_{n,k} = -lambda_n <B e_k, psi_n> + <A B e_k, psi_n>, the effective modal
/// input gains of the boundary input after lifting.
struct SpectralSystem {
    CVector eigenvalues;
    CMatrix input_coeffs;
    CMatrix lifting_coeffs;
    double riesz_lower = 1.0;
    double riesz_upper = 1.0;
    double domain_length = 0.0;
    RVector lifting_norms;     // ||B e_k||_H
    RVector lifting_op_norms;  // ||A B e_k||_H
    RMatrix lifting_gram;      // <B e_j, B e_k>_H
    ModeFunction phi;
    ModeFunction psi;

    Eigen::Index modes() const { return eigenvalues.size(); }
    Eigen::Index input_dim() const { return input_coeffs.cols(); }

    /// Throws InvalidParameter when a structural invariant is broken.
    void validate() const;
};

/// Number of retained modes and the decay margin of the discarded ones.
struct TruncationSpec {
    int n0 = 0;
    double alpha = 0.0;
};

/// Reaction-diffusion plant y_t = a y_xx + c y on (0, L) with Dirichlet
/// boundary inputs at both ends, lifted by B(u1, u2) = u1 + (u2 - u1) xi / L.
SpectralSystem build_heat_system(double a, double c, double length, int n_max = 10);

/// Certifies Re lambda_n <= -alpha for every stored mode beyond n0.
TruncationSpec check_truncation(const SpectralSystem& sys, int n0);

/// Kalman condition of (A_{N0}, B_{N0}) via the diagonal PBH test.
bool check_kalman(const SpectralSystem& sys, int n0);

/// <d, psi_n>_H by composite Simpson quadrature over (0, L).
Complex project_disturbance(const SpectralSystem& sys, const std::function<double(double)>& profile, int n,
                            int quad_intervals = 2048);

/// Projection onto the first `count` modes.
CVector project_profile(const SpectralSystem& sys, const std::function<double(double)>& profile, int count,
                        int quad_intervals = 2048);

/// Pointwise values of sum_n coeffs(n-1) phi_n(xi).
std::vector<double> reconstruct(const SpectralSystem& sys, const CVector& coeffs, const std::vector<double>& xi);

}  // namespace sdc
