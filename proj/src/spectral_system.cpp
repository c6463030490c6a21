#include "sdc/spectral_system.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sdc/linalg.hpp"
#include "sdc/quadrature.hpp"

namespace sdc {

void SpectralSystem::validate() const {
    const Eigen::Index n = modes();
    if (n < 1) throw Error(ErrorKind::InvalidParameter, "system has no modes");
    if (!(riesz_lower > 0.0) || riesz_lower > riesz_upper)
        throw Error(ErrorKind::InvalidParameter, "Riesz bounds must satisfy 0 < m_R <= M_R");
    if (input_coeffs.rows() != n || lifting_coeffs.rows() != n || lifting_coeffs.cols() != input_coeffs.cols())
        throw Error(ErrorKind::InvalidParameter, "coefficient matrices do not match the mode count");
    const Eigen::Index m = input_dim();
    if (m < 1) throw Error(ErrorKind::InvalidParameter, "input dimension must be positive");
    if (lifting_norms.size() != m || lifting_op_norms.size() != m || lifting_gram.rows() != m ||
        lifting_gram.cols() != m)
        throw Error(ErrorKind::InvalidParameter, "lifting data does not match the input dimension");
    for (Eigen::Index i = 1; i < n; ++i)
        if (eigenvalues(i).real() > eigenvalues(i - 1).real())
            throw Error(ErrorKind::InvalidParameter, "eigenvalues must be sorted by nonincreasing real part");
}

SpectralSystem build_heat_system(double a, double c, double length, int n_max) {
    if (!(a > 0.0)) throw Error(ErrorKind::InvalidParameter, "diffusion coefficient a must be positive");
    if (!(length > 0.0)) throw Error(ErrorKind::InvalidParameter, "domain length L must be positive");
    if (n_max < 1) throw Error(ErrorKind::InvalidParameter, "N_max must be at least 1");

    constexpr double pi = std::numbers::pi;
    SpectralSystem sys;
    sys.domain_length = length;
    sys.eigenvalues.resize(n_max);
    sys.input_coeffs.resize(n_max, 2);
    sys.lifting_coeffs.resize(n_max, 2);

    const double gain_scale = a * pi * std::sqrt(2.0 / (length * length * length));
    for (int n = 1; n <= n_max; ++n) {
        const double sign = (n % 2 == 1) ? 1.0 : -1.0;  // (-1)^{n+1}
        const double lift = std::sqrt(2.0 * length) / (n * pi);
        sys.eigenvalues(n - 1) = c - a * n * n * pi * pi / (length * length);
        sys.lifting_coeffs(n - 1, 0) = lift;
        sys.lifting_coeffs(n - 1, 1) = sign * lift;
        sys.input_coeffs(n - 1, 0) = gain_scale * n;
        sys.input_coeffs(n - 1, 1) = sign * gain_scale * n;
    }

    sys.riesz_lower = 1.0;
    sys.riesz_upper = 1.0;
    // B e_1 = 1 - xi/L, B e_2 = xi/L, and A B e_k = c B e_k (the lifts are affine).
    sys.lifting_norms = RVector::Constant(2, std::sqrt(length / 3.0));
    sys.lifting_op_norms = RVector::Constant(2, std::abs(c) * std::sqrt(length / 3.0));
    sys.lifting_gram.resize(2, 2);
    sys.lifting_gram << length / 3.0, length / 6.0, length / 6.0, length / 3.0;

    auto sine = [length](int n, double xi) {
        return Complex(std::sqrt(2.0 / length) * std::sin(n * pi * xi / length), 0.0);
    };
    sys.phi = sine;
    sys.psi = sine;
    return sys;
}

TruncationSpec check_truncation(const SpectralSystem& sys, int n0) {
    if (n0 < 0 || n0 >= sys.modes())
        throw Error(ErrorKind::InvalidParameter, "N0 must satisfy 0 <= N0 < N_max");
    double worst = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = n0; i < sys.modes(); ++i) worst = std::max(worst, sys.eigenvalues(i).real());
    if (worst >= 0.0)
        throw Error(ErrorKind::AssumptionViolated,
                    "unstable mode discarded: Re lambda_n = " + std::to_string(worst) + " for some n > N0");
    if (n0 == 0) throw Error(ErrorKind::InvalidParameter, "N0 must be a positive integer");
    return {n0, -worst};
}

bool check_kalman(const SpectralSystem& sys, int n0) {
    if (n0 < 1 || n0 > sys.modes()) throw Error(ErrorKind::InvalidParameter, "N0 must satisfy 1 <= N0 <= N_max");
    return linalg::diagonal_pair_controllable(sys.eigenvalues.head(n0), sys.input_coeffs.topRows(n0));
}

Complex project_disturbance(const SpectralSystem& sys, const std::function<double(double)>& profile, int n,
                            int quad_intervals) {
    if (n < 1 || n > sys.modes()) throw Error(ErrorKind::InvalidParameter, "mode index out of range");
    if (quad_intervals <= 0 || quad_intervals % 2 != 0)
        throw Error(ErrorKind::InvalidParameter, "quadrature interval count must be positive and even");
    auto integrand = [&](double xi) { return profile(xi) * std::conj(sys.psi(n, xi)); };
    return simpson(integrand, 0.0, sys.domain_length, quad_intervals);
}

CVector project_profile(const SpectralSystem& sys, const std::function<double(double)>& profile, int count,
                        int quad_intervals) {
    if (count < 0 || count > sys.modes()) throw Error(ErrorKind::InvalidParameter, "mode count out of range");
    CVector out(count);
    for (int n = 1; n <= count; ++n) out(n - 1) = project_disturbance(sys, profile, n, quad_intervals);
    return out;
}

std::vector<double> reconstruct(const SpectralSystem& sys, const CVector& coeffs, const std::vector<double>& xi) {
    if (coeffs.size() > sys.modes()) throw Error(ErrorKind::InvalidParameter, "more coefficients than modes");
    std::vector<double> out;
    out.reserve(xi.size());
    for (double x : xi) {
        Complex acc = 0.0;
        for (Eigen::Index n = 0; n < coeffs.size(); ++n) acc += coeffs(n) * sys.phi(static_cast<int>(n + 1), x);
        if (std::abs(acc.imag()) > 1e-10 * std::max(1.0, std::abs(acc.real())))
            throw Error(ErrorKind::InvalidArgument, "reconstruction is not real-valued");
        out.push_back(acc.real());
    }
    return out;
}

}  // namespace sdc
