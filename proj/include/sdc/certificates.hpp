#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "sdc/delay_buffer.hpp"
#include "sdc/nelder_mead.hpp"
#include "sdc/predictor.hpp"
#include "sdc/spectral_system.hpp"

namespace sdc {

/// Lyapunov/ISS constants for one choice of (beta, gamma1, gamma2).
struct CertificateBundle {
    double beta = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double C1 = 0.0;
    double C2g1 = 0.0;  // gamma1 lambda_m(P) - C1
    double C3g2 = 0.0;  // gamma2 lambda_m(P) - ||BK||^2 / m_R
    double C4 = 0.0;
    double C5 = 0.0;
    double C6 = 0.0;
    double C7 = 0.0;
    double C8 = 0.0;
    double kappa0 = 0.0;
    double small_gain_constant = 0.0;  // C4 sqrt(C6 / (2 kappa0))
    double lam_min_P = 0.0;
    double lam_max_P = 0.0;
    double norm_P = 0.0;
    double norm_BK = 0.0;
    double norm_K = 0.0;
    double alpha = 0.0;
};

/// Parameter-independent quantities; the feasible set is
/// gamma1 > gamma1_min, gamma2 > gamma2_min_lift, gamma2 > C5 / (1 - beta).
struct FeasibilityThresholds {
    double gamma1_min = 0.0;       // C1 / lambda_m(P)
    double gamma2_min_lift = 0.0;  // ||BK||^2 / (m_R lambda_m(P))
    double C5 = 0.0;

    double gamma2_min(double beta) const { return std::max(gamma2_min_lift, C5 / (1.0 - beta)); }
};

FeasibilityThresholds feasibility_thresholds(const SpectralSystem& sys, const PredictorDesign& design);

/// Operator norm of v -> B (K v) from C^{N0} into H, through the lifting Gram matrix.
double lifted_gain_norm(const SpectralSystem& sys, const CMatrix& k);

/// Throws InvalidCertificateParameters naming the first violated hypothesis.
CertificateBundle compute_constants(const SpectralSystem& sys, const PredictorDesign& design, double beta,
                                    double gamma1, double gamma2);

/// Lyapunov functional at time t. `z_history` holds Z on the simulation grid,
/// `x_coeffs` the modal coefficients of X(t) and `u_delayed` = u(t - D).
double evaluate_V(const SpectralSystem& sys, const PredictorDesign& design, const CertificateBundle& bundle,
                  double t, const DelayBuffer& z_history, const CVector& x_coeffs, const CVector& u_delayed);

struct SearchConfig {
    NelderMeadOptions simplex;
    int restarts = 4;  // extra simplex restarts from the incumbent
};

/// Minimizes small_gain_constant over (beta, gamma1, gamma2).
CertificateBundle optimize_parameters(const SpectralSystem& sys, const PredictorDesign& design,
                                      const SearchConfig& config = {});

/// Small-gain objective at a point; +inf outside the feasible set.
double small_gain_objective(const SpectralSystem& sys, const PredictorDesign& design, double beta, double gamma1,
                            double gamma2);

/// Gains of the ODE subsystem and of the coupling into the PDE.
struct CouplingConstants {
    double Ct0 = 1.0;
    double Ct1 = 0.0;
    double Ct2 = 0.0;
    double D1 = 0.0;
    double D2 = 0.0;
    double D3 = 0.0;
};

/// Coefficients of the scalar ODE / reaction-diffusion coupling
/// f1 = -a1 x + (b1/L) <eta1, X> + c1 v,
/// f2 = a2 x theta1 + b2 atan((d2/L) <eta2, X>) theta2 + c2 v theta3.
struct CouplingParameters {
    double a1 = 1.5;
    double b1 = 0.5;
    double c1 = 0.2;
    double a2 = 0.7;
    double b2 = 0.55;
    double c2 = 10.0;
    double d2 = 0.45;
};

CouplingConstants coupling_constants(const CouplingParameters& p, double length);

/// 1 - (D1 Ct1 + D2) small_gain_constant; positive when the loop is certified.
double small_gain_margin(const CertificateBundle& bundle, const CouplingConstants& coupling);

/// 1 - (D1 Ct1 + D2) C4 sqrt(C10) for a caller-supplied C10 >= 0.
double no_blowup_margin(double C4, double C10, const CouplingConstants& coupling);

/// `name = value` document with the fixed key set.
std::string format_certificate(const CertificateBundle& bundle, double margin);
std::map<std::string, double> parse_key_values(std::istream& in);

}  // namespace sdc
