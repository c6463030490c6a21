#include "sdc/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "sdc/quadrature.hpp"

namespace sdc {

Disturbance Disturbance::samples(std::vector<double> times, std::vector<double> values) {
    if (times.empty() || times.size() != values.size())
        throw Error(ErrorKind::InvalidParameter, "disturbance samples need matching, non-empty time and value lists");
    if (!std::is_sorted(times.begin(), times.end()))
        throw Error(ErrorKind::InvalidParameter, "disturbance sample times must be increasing");
    Disturbance d(Kind::Samples);
    d.times_ = std::move(times);
    d.values_ = std::move(values);
    return d;
}

double Disturbance::operator()(double t) const {
    switch (kind_) {
    case Kind::None: return 0.0;
    case Kind::CaseStudy: return std::sin(2.0 * t) * std::sin(5.0 * t);
    case Kind::Samples: {
        if (t <= times_.front()) return values_.front();
        if (t >= times_.back()) return values_.back();
        const auto hi = static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
        const std::size_t lo = hi - 1;
        const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
        return (1.0 - w) * values_[lo] + w * values_[hi];
    }
    }
    return 0.0;
}

void SimConfig::validate(const SpectralSystem& sys, const PredictorDesign& design) const {
    if (!(dt > 0.0)) throw Error(ErrorKind::InvalidParameter, "dt must be positive");
    if (!(dt < design.delay)) throw Error(ErrorKind::InvalidParameter, "dt must be smaller than the delay D");
    if (!(t_end >= 0.0)) throw Error(ErrorKind::InvalidParameter, "T_end must be nonnegative");
    if (n_modes < design.n0) throw Error(ErrorKind::InvalidParameter, "N_modes must be at least N0");
    if (n_modes > sys.modes()) throw Error(ErrorKind::InvalidParameter, "N_modes exceeds the modes of the plant");
    if (record_stride < 1) throw Error(ErrorKind::InvalidParameter, "record_stride must be positive");
}

double eta_profile(double xi, double length) {
    return std::sqrt(std::max(6.0 * xi * (length - xi), 0.0)) / std::pow(length, 1.5);
}
double theta1_profile(double xi, double length) { return std::sqrt(std::max(2.0 * xi, 0.0)) / length; }
double theta3_profile(double xi, double length) { return std::sqrt(std::max(2.0 * (length - xi), 0.0)) / length; }

double case_study_initial_profile(double xi, double length) {
    return -5.0 * xi * (length / 2.0 - xi) * (length - xi);
}

CouplingFields CouplingFields::case_study(const SpectralSystem& sys, const CouplingParameters& params, int n_modes) {
    const double len = sys.domain_length;
    CouplingFields f;
    f.params = params;
    f.length = len;
    if (!(params.a1 > 0.0)) throw Error(ErrorKind::InvalidParameter, "a1 must be positive");
    auto eta = [len](double xi) { return eta_profile(xi, len); };
    auto th1 = [len](double xi) { return theta1_profile(xi, len); };
    auto th3 = [len](double xi) { return theta3_profile(xi, len); };
    for (const auto& prof : {std::function<double(double)>(eta), std::function<double(double)>(th1),
                             std::function<double(double)>(th3)}) {
        const double norm2 = simpson([&](double xi) { return prof(xi) * prof(xi); }, 0.0, len);
        if (std::abs(norm2 - 1.0) > 1e-8)
            throw Error(ErrorKind::InvalidParameter, "coupling profile is not unit-norm");
    }
    f.eta1 = project_profile(sys, eta, n_modes);
    f.eta2 = f.eta1;
    f.theta2 = f.eta1;
    f.theta1 = project_profile(sys, th1, n_modes);
    f.theta3 = project_profile(sys, th3, n_modes);
    return f;
}

double coupling_f1(const CouplingFields& f, double x, const CVector& coeffs, double v) {
    const Eigen::Index n = std::min(coeffs.size(), f.eta1.size());
    const Complex inner = f.eta1.head(n).dot(coeffs.head(n));
    return -f.params.a1 * x + (f.params.b1 / f.length) * inner.real() + f.params.c1 * v;
}

CVector coupling_f2(const CouplingFields& f, double x, const CVector& coeffs, double v) {
    const Eigen::Index n = std::min(coeffs.size(), f.eta2.size());
    const double inner = f.eta2.head(n).dot(coeffs.head(n)).real();
    const double sat = f.params.b2 * std::atan(f.params.d2 / f.length * inner);
    CVector d = CVector::Zero(coeffs.size());
    d.head(n) = f.params.a2 * x * f.theta1.head(n) + sat * f.theta2.head(n) + f.params.c2 * v * f.theta3.head(n);
    return d;
}

SimState modal_rk4_step(const SpectralSystem& sys, const CouplingFields& fields, const Disturbance& v,
                        const DelayBuffer& u_history, double delay, const SimState& s, double dt) {
    const Eigen::Index n = s.coeffs.size();
    const auto lambdas = sys.eigenvalues.head(n);
    const auto gains = sys.input_coeffs.topRows(n);

    auto rhs = [&](double t, double x, const CVector& c, double& dx) {
        const double vt = v(t);
        dx = coupling_f1(fields, x, c, vt);
        const CVector ud = u_history.at(t - delay);
        return CVector(lambdas.cwiseProduct(c) + gains * ud + coupling_f2(fields, x, c, vt));
    };

    double k1x = 0, k2x = 0, k3x = 0, k4x = 0;
    const double h = dt;
    const CVector k1 = rhs(s.t, s.x, s.coeffs, k1x);
    const CVector k2 = rhs(s.t + h / 2, s.x + h / 2 * k1x, s.coeffs + h / 2 * k1, k2x);
    const CVector k3 = rhs(s.t + h / 2, s.x + h / 2 * k2x, s.coeffs + h / 2 * k2, k3x);
    const CVector k4 = rhs(s.t + h, s.x + h * k3x, s.coeffs + h * k3, k4x);

    SimState next;
    next.t = s.t + h;
    next.x = s.x + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
    next.coeffs = s.coeffs + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    return next;
}

ClosedLoopSimulator::ClosedLoopSimulator(const SimConfig& config, const SpectralSystem& sys,
                                         const PredictorDesign& design, const CertificateBundle& bundle,
                                         const CouplingFields& fields, double x0, const CVector& initial_coeffs)
    : config_(config),
      sys_(sys),
      design_(design),
      bundle_(bundle),
      fields_(fields),
      u_history_(config.dt, design.delay, design.input_dim()),
      z_history_(config.dt, design.delay, design.n0) {
    config.validate(sys, design);
    if (initial_coeffs.size() != config.n_modes)
        throw Error(ErrorKind::InvalidParameter, "initial coefficients must have N_modes entries");
    state_.t = 0.0;
    state_.x = x0;
    state_.coeffs = initial_coeffs;
    close_loop_at_current_time();
}

void ClosedLoopSimulator::close_loop_at_current_time() {
    const double t = static_cast<double>(k_) * config_.dt;
    const CVector y = state_.coeffs.head(design_.n0);
    const ArtsteinSplit split = artstein_split(design_, y, u_history_, t);
    const double phi = config_.open_loop ? 0.0 : design_.transition.value(t);
    auto [u, z] = resolve_current_input(design_, phi, split);
    u_history_.push(u);
    z_history_.push(z);
}

void ClosedLoopSimulator::step() {
    SimState next = modal_rk4_step(sys_, fields_, config_.disturbance, u_history_, design_.delay, state_, config_.dt);
    ++k_;
    next.t = static_cast<double>(k_) * config_.dt;
    if (!std::isfinite(next.x) || !next.coeffs.allFinite())
        throw Error(ErrorKind::SimulationDiverged, "non-finite state at t = " + std::to_string(next.t));
    state_ = std::move(next);
    close_loop_at_current_time();
}

TrajectoryPoint ClosedLoopSimulator::snapshot() const {
    TrajectoryPoint p;
    p.t = state_.t;
    p.x = state_.x;
    p.coeffs = state_.coeffs;
    p.norm_x = state_.coeffs.norm();
    p.u = u_history_.sample(k_);
    p.z = z_history_.sample(k_);
    const CVector u_delayed = u_history_.at(p.t - design_.delay);
    p.V = evaluate_V(sys_, design_, bundle_, p.t, z_history_, state_.coeffs, u_delayed);
    p.norm_d = coupling_f2(fields_, state_.x, state_.coeffs, config_.disturbance(p.t)).norm();
    if (!std::isfinite(p.V))
        throw Error(ErrorKind::SimulationDiverged, "non-finite Lyapunov value at t = " + std::to_string(p.t));
    return p;
}

Trajectory simulate(const SimConfig& config, const SpectralSystem& sys, const PredictorDesign& design,
                    const CertificateBundle& bundle, const CouplingFields& fields, double x0,
                    const CVector& initial_coeffs) {
    ClosedLoopSimulator sim(config, sys, design, bundle, fields, x0, initial_coeffs);
    Trajectory traj;
    traj.settle_time = design.delay + design.transition.t0();
    const auto steps = static_cast<std::int64_t>(std::ceil(config.t_end / config.dt - 1e-9));
    if (steps <= 0) return traj;
    traj.points.reserve(static_cast<std::size_t>(steps / config.record_stride + 2));
    traj.points.push_back(sim.snapshot());
    for (std::int64_t k = 1; k <= steps; ++k) {
        sim.step();
        if (k % config.record_stride == 0 || k == steps) traj.points.push_back(sim.snapshot());
    }
    return traj;
}

ExponentialFit fit_exponential(const std::vector<double>& t, const std::vector<double>& y) {
    if (t.size() != y.size()) throw Error(ErrorKind::InvalidArgument, "fit needs matching sample lists");
    std::vector<double> ts, ls;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (y[i] > 0.0) {
            ts.push_back(t[i]);
            ls.push_back(std::log(y[i]));
        }
    }
    if (ts.size() < 10) throw Error(ErrorKind::InsufficientData, "fewer than 10 positive samples in the fit window");
    const auto n = static_cast<double>(ts.size());
    double mt = 0, ml = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        mt += ts[i];
        ml += ls[i];
    }
    mt /= n;
    ml /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sxx += (ts[i] - mt) * (ts[i] - mt);
        sxy += (ts[i] - mt) * (ls[i] - ml);
    }
    if (!(sxx > 0.0)) throw Error(ErrorKind::InsufficientData, "fit window has no time spread");
    ExponentialFit fit;
    fit.slope = sxy / sxx;
    fit.amplitude = std::exp(ml - fit.slope * mt);
    return fit;
}

DecayFit decay_fit(const Trajectory& traj, double t_start) {
    std::vector<double> t, y;
    for (const auto& p : traj.points) {
        if (p.t >= t_start) {
            t.push_back(p.t);
            y.push_back(p.norm_x);
        }
    }
    const ExponentialFit fit = fit_exponential(t, y);
    return {-fit.slope, fit.amplitude};
}

namespace {

double value_at_time(const Trajectory& traj, double t) {
    const auto& pts = traj.points;
    auto it = std::lower_bound(pts.begin(), pts.end(), t, [](const TrajectoryPoint& p, double x) { return p.t < x; });
    if (it == pts.end()) return pts.back().V;
    if (it == pts.begin() || std::abs(it->t - t) < 1e-12) return it->V;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (t - lo.t) / (hi.t - lo.t);
    return (1.0 - w) * lo.V + w * hi.V;
}

}  // namespace

EnvelopeCheck iss_envelope_check(const Trajectory& traj, const CertificateBundle& bundle, double d_sup,
                                 double slack) {
    EnvelopeCheck out;
    const double t_settle = traj.settle_time;
    if (traj.points.empty() || traj.points.back().t < t_settle) return out;
    const double v_settle = value_at_time(traj, t_settle);
    const double offset = bundle.C6 / (2.0 * bundle.kappa0) * d_sup * d_sup;
    for (const auto& p : traj.points) {
        if (p.t < t_settle - 1e-12) continue;
        const double rhs = std::exp(-2.0 * bundle.kappa0 * (p.t - t_settle)) * v_settle + offset;
        const double ratio = rhs > 0.0 ? p.V / rhs : (p.V > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        out.worst_ratio = std::max(out.worst_ratio, ratio);
    }
    out.ok = out.worst_ratio <= 1.0 + slack;
    return out;
}

double max_disturbance_norm(const Trajectory& traj) {
    double m = 0.0;
    for (const auto& p : traj.points) m = std::max(m, p.norm_d);
    return m;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, Eigen::Index input_dim, Eigen::Index n_modes) {
    out << "t,x,normX,V";
    for (Eigen::Index k = 1; k <= input_dim; ++k) out << ",u" << k;
    out << ",normd";
    for (Eigen::Index n = 1; n <= n_modes; ++n) out << ",c" << n;
    out << '\n';
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.12g", v);
        out << buf;
    };
    for (const auto& p : traj.points) {
        const RVector u = real_part_checked(p.u);
        const RVector c = real_part_checked(p.coeffs);
        put(p.t);
        for (double v : {p.x, p.norm_x, p.V}) {
            out << ',';
            put(v);
        }
        for (Eigen::Index k = 0; k < u.size(); ++k) {
            out << ',';
            put(u(k));
        }
        out << ',';
        put(p.norm_d);
        for (Eigen::Index n = 0; n < c.size(); ++n) {
            out << ',';
            put(c(n));
        }
        out << '\n';
    }
}

}  // namespace sdc
