#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "sdc/certificates.hpp"
#include "sdc/delay_buffer.hpp"
#include "sdc/predictor.hpp"
#include "sdc/spectral_system.hpp"

namespace sdc {

/// Scalar exogenous input v(t) of the ODE/PDE interconnection.
class Disturbance {
public:
    enum class Kind { None, CaseStudy, Samples };

    static Disturbance none() { return Disturbance(Kind::None); }
    /// v(t) = sin(2t) sin(5t)
    static Disturbance case_study() { return Disturbance(Kind::CaseStudy); }
    /// Piecewise-linear through (times, values), held constant outside.
    static Disturbance samples(std::vector<double> times, std::vector<double> values);

    double operator()(double t) const;
    Kind kind() const { return kind_; }

private:
    explicit Disturbance(Kind kind) : kind_(kind) {}
    Kind kind_;
    std::vector<double> times_;
    std::vector<double> values_;
};

struct SimConfig {
    double dt = 1e-3;
    double t_end = 10.0;
    int n_modes = 10;
    int record_stride = 1;
    Disturbance disturbance = Disturbance::none();
    bool open_loop = false;  // force u = 0

    void validate(const SpectralSystem& sys, const PredictorDesign& design) const;
};

/// Coupling profiles pre-projected onto the modal basis.
struct CouplingFields {
    CouplingParameters params;
    double length = 0.0;
    CVector eta1, eta2, theta1, theta2, theta3;

    /// eta1 = eta2 = theta2 = sqrt(6 xi (L - xi)) / L^{3/2}, theta1 = sqrt(2 xi) / L,
    /// theta3 = sqrt(2 (L - xi)) / L, projected onto n_modes modes.
    static CouplingFields case_study(const SpectralSystem& sys, const CouplingParameters& params, int n_modes);
};

/// Unit-norm profiles used by CouplingFields::case_study.
double eta_profile(double xi, double length);
double theta1_profile(double xi, double length);
double theta3_profile(double xi, double length);

/// X0(xi) = -5 xi (L/2 - xi)(L - xi).
double case_study_initial_profile(double xi, double length);

double coupling_f1(const CouplingFields& fields, double x, const CVector& coeffs, double v);
CVector coupling_f2(const CouplingFields& fields, double x, const CVector& coeffs, double v);

struct SimState {
    double t = 0.0;
    double x = 0.0;
    CVector coeffs;
};

/// One classical RK4 step of the modal Galerkin system
///   c_n' = lambda_n c_n + sum_k b_{n,k} u_k(t - D) + <f2, psi_n>,  x' = f1,
/// with the delayed input interpolated from `u_history` at each stage time.
SimState modal_rk4_step(const SpectralSystem& sys, const CouplingFields& fields, const Disturbance& v,
                        const DelayBuffer& u_history, double delay, const SimState& s, double dt);

struct TrajectoryPoint {
    double t = 0.0;
    double x = 0.0;
    double norm_x = 0.0;
    double V = 0.0;
    double norm_d = 0.0;
    CVector u;
    CVector coeffs;
    CVector z;
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    double settle_time = 0.0;  // D + t0: fully closed loop from here on
};

/// Owns the state and histories of one closed-loop run.
class ClosedLoopSimulator {
public:
    ClosedLoopSimulator(const SimConfig& config, const SpectralSystem& sys, const PredictorDesign& design,
                        const CertificateBundle& bundle, const CouplingFields& fields, double x0,
                        const CVector& initial_coeffs);

    /// Advances one grid step and appends u(t + dt) and Z(t + dt) to the histories.
    void step();

    TrajectoryPoint snapshot() const;
    const SimState& state() const { return state_; }
    std::int64_t step_index() const { return k_; }

private:
    const SimConfig& config_;
    const SpectralSystem& sys_;
    const PredictorDesign& design_;
    const CertificateBundle& bundle_;
    const CouplingFields& fields_;
    SimState state_;
    DelayBuffer u_history_;
    DelayBuffer z_history_;
    std::int64_t k_ = 0;

    void close_loop_at_current_time();
};

Trajectory simulate(const SimConfig& config, const SpectralSystem& sys, const PredictorDesign& design,
                    const CertificateBundle& bundle, const CouplingFields& fields, double x0,
                    const CVector& initial_coeffs);

struct ExponentialFit {
    double slope = 0.0;      // d/dt log(signal)
    double amplitude = 0.0;  // exp(intercept)
};

/// Least-squares line through (t, log y); needs at least 10 positive samples.
ExponentialFit fit_exponential(const std::vector<double>& t, const std::vector<double>& y);

struct DecayFit {
    double rate = 0.0;  // -slope: positive for decay
    double amplitude = 0.0;
};

/// Exponential fit of ||X(t)||_H over [t_start, end].
DecayFit decay_fit(const Trajectory& traj, double t_start);

struct EnvelopeCheck {
    bool ok = true;
    double worst_ratio = 0.0;
};

/// V(t) <= 1.05 (e^{-2 kappa0 (t - D - t0)} V(D + t0) + C6 / (2 kappa0) d_sup^2) for t >= D + t0.
EnvelopeCheck iss_envelope_check(const Trajectory& traj, const CertificateBundle& bundle, double d_sup,
                                 double slack = 0.05);

double max_disturbance_norm(const Trajectory& traj);

/// CSV with header t,x,normX,V,u1..um,normd,c1..cN; 12 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, Eigen::Index input_dim, Eigen::Index n_modes);

}  // namespace sdc
