#include "sdc/predictor.hpp"

#include <algorithm>
#include <cmath>

#include "sdc/linalg.hpp"

namespace sdc {

TransitionSignal::TransitionSignal(double t0) : t0_(t0) {
    if (!(t0 > 0.0)) throw Error(ErrorKind::InvalidParameter, "transition time t0 must be positive");
}

double TransitionSignal::value(double t) const {
    const double s = std::clamp(t / t0_, 0.0, 1.0);
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double TransitionSignal::rate(double t) const {
    if (t <= 0.0 || t >= t0_) return 0.0;
    const double s = t / t0_;
    return 30.0 * s * s * (1.0 - s) * (1.0 - s) / t0_;
}

TransitionValue transition_value(const TransitionSignal& sig, double t) { return {sig.value(t), sig.rate(t)}; }

namespace {

bool is_diagonal(const CMatrix& a) {
    if (a.rows() != a.cols()) return false;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (i != j && a(i, j) != Complex(0.0)) return false;
    return true;
}

// e^{(t-s-D) A} B v for diagonal A: a row scaling.
CVector kernel_apply(const PredictorDesign& d, double lag, const CVector& bv) {
    CVector out(bv.size());
    for (Eigen::Index j = 0; j < bv.size(); ++j) out(j) = std::exp(lag * d.a_eigs(j)) * bv(j);
    return out;
}

CVector interpolate(const std::vector<CVector>& path, double step, double t) {
    const double x = t / step;
    double r = std::round(x);
    if (std::abs(x - r) < 1e-9) return path[static_cast<std::size_t>(r)];
    const auto k0 = static_cast<std::size_t>(std::floor(x));
    const double w = x - static_cast<double>(k0);
    return (1.0 - w) * path[k0] + w * path[k0 + 1];
}

}  // namespace

CMatrix diagonal_exponential(const CMatrix& a, double s) {
    if (!is_diagonal(a)) throw Error(ErrorKind::InvalidArgument, "diagonal_exponential needs a diagonal matrix");
    return linalg::diagonal_exponential(a.diagonal(), s);
}

CMatrix place_poles(const CMatrix& a, const CMatrix& b_tilde, const std::vector<Complex>& poles) {
    if (!is_diagonal(a)) throw Error(ErrorKind::InvalidArgument, "pole placement expects a diagonal state matrix");
    return linalg::place_poles(CVector(a.diagonal()), b_tilde, poles);
}

CMatrix solve_lyapunov(const CMatrix& a_cl) {
    CMatrix p = linalg::solve_lyapunov<Complex>(a_cl);
    if (!(linalg::hermitian_eig_range<Complex>(p).first > 0.0))
        throw Error(ErrorKind::SynthesisFailure, "Lyapunov solution is not positive definite");
    return p;
}

PredictorDesign synthesize_gain(const SpectralSystem& sys, int n0, double delay, double t0,
                                const std::vector<Complex>& poles, Placement placement) {
    if (!(delay > 0.0)) throw Error(ErrorKind::InvalidParameter, "delay D must be positive");
    if (n0 < 1 || n0 > sys.modes()) throw Error(ErrorKind::InvalidParameter, "N0 out of range");
    if (static_cast<int>(poles.size()) != n0)
        throw Error(ErrorKind::InvalidParameter, "need exactly N0 desired poles");

    PredictorDesign d;
    d.delay = delay;
    d.n0 = n0;
    d.transition = TransitionSignal(t0);
    d.a_eigs = sys.eigenvalues.head(n0);
    d.b_n0 = sys.input_coeffs.topRows(n0);
    d.exp_da = linalg::diagonal_exponential(d.a_eigs, -delay);
    d.desired_poles = poles;
    std::sort(d.desired_poles.begin(), d.desired_poles.end(), linalg::complex_less);

    const CMatrix b_tilde = d.exp_da * d.b_n0;
    if (placement == Placement::Exact) {
        if (!linalg::diagonal_pair_controllable(d.a_eigs, b_tilde))
            throw Error(ErrorKind::SynthesisFailure, "pair (A, B) fails the PBH controllability test");
        d.k = linalg::exact_placement(d.a_eigs, b_tilde, d.desired_poles);
    } else {
        d.k = linalg::place_poles(d.a_eigs, b_tilde, d.desired_poles);
    }
    d.a_cl = d.a_n0() + b_tilde * d.k;
    return d;
}

void attach_lyapunov(PredictorDesign& design) {
    design.p = solve_lyapunov(design.a_cl);
    const auto [lo, hi] = linalg::hermitian_eig_range<Complex>(design.p);
    design.lambda_min_p = lo;
    design.lambda_max_p = hi;
}

PredictorDesign synthesize_design(const SpectralSystem& sys, int n0, double delay, double t0,
                                  const std::vector<Complex>& poles, Placement placement) {
    PredictorDesign d = synthesize_gain(sys, n0, delay, t0, poles, placement);
    attach_lyapunov(d);
    return d;
}

double lyapunov_residual(const PredictorDesign& design) {
    if (!design.has_lyapunov()) return std::numeric_limits<double>::infinity();
    const Eigen::Index n = design.a_cl.rows();
    return (design.a_cl.adjoint() * design.p + design.p * design.a_cl + CMatrix::Identity(n, n)).norm();
}

CVector artstein_state(const PredictorDesign& design, const CVector& y, const DelayBuffer& history, double t) {
    if (t > history.latest_time() + 1e-9 * history.step())
        throw Error(ErrorKind::HistoryUnderflow, "history does not reach the requested time");
    CVector z = y;
    for (const auto& node : trapezoid_nodes(t - design.delay, t, history.step())) {
        const CVector bu = design.b_n0 * history.at(node.time);
        z += node.weight * kernel_apply(design, t - node.time - design.delay, bu);
    }
    return z;
}

ArtsteinSplit artstein_split(const PredictorDesign& design, const CVector& y, const DelayBuffer& history, double t) {
    const auto nodes = trapezoid_nodes(t - design.delay, t, history.step());
    ArtsteinSplit split{y, 0.0};
    if (nodes.empty()) return split;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const CVector bu = design.b_n0 * history.at(nodes[i].time);
        split.known += nodes[i].weight * kernel_apply(design, t - nodes[i].time - design.delay, bu);
    }
    split.top_weight = nodes.back().weight;
    return split;
}

std::pair<CVector, CVector> resolve_current_input(const PredictorDesign& design, double phi,
                                                  const ArtsteinSplit& split) {
    const Eigen::Index m = design.input_dim();
    const CMatrix eb = design.exp_da * design.b_n0;
    const CMatrix lhs = CMatrix::Identity(m, m) - phi * split.top_weight * design.k * eb;
    const CVector rhs = phi * (design.k * split.known);
    const CVector u = lhs.fullPivLu().solve(rhs);
    const CVector z = split.known + split.top_weight * (eb * u);
    return {u, z};
}

CVector control_input(const PredictorDesign& design, double phi, const CVector& z) {
    if (phi < 0.0 || phi > 1.0) throw Error(ErrorKind::InvalidArgument, "transition value must lie in [0, 1]");
    return phi * (design.k * z);
}

std::vector<CVector> invert_artstein(const PredictorDesign& design, const std::vector<CVector>& y_path,
                                     double step, const std::function<double(double)>& weight) {
    if (!(step > 0.0)) throw Error(ErrorKind::InvalidParameter, "grid step must be positive");
    const std::size_t n = y_path.size();
    const Eigen::Index m = design.input_dim();
    std::vector<CVector> base(n);
    std::vector<double> phi(n);
    for (std::size_t i = 0; i < n; ++i) {
        phi[i] = weight(static_cast<double>(i) * step);
        base[i] = phi[i] * (design.k * y_path[i]);
    }
    // Causal marching: every node below t_i is already resolved, so only the top node is implicit.
    const CMatrix eb = design.exp_da * design.b_n0;
    std::vector<CVector> v;
    v.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * step;
        if (phi[i] == 0.0 || i == 0) {
            v.push_back(base[i]);
            continue;
        }
        const auto nodes = trapezoid_nodes(std::max(t - design.delay, 0.0), t, step);
        CVector known = CVector::Zero(design.n0);
        for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
            const CVector bv = design.b_n0 * interpolate(v, step, std::min(nodes[j].time, (i - 1) * step));
            known += nodes[j].weight * kernel_apply(design, t - nodes[j].time - design.delay, bv);
        }
        const CMatrix lhs = CMatrix::Identity(m, m) - phi[i] * nodes.back().weight * design.k * eb;
        v.push_back(lhs.fullPivLu().solve(base[i] + phi[i] * (design.k * known)));
    }
    return v;
}

std::vector<CVector> invert_artstein(const PredictorDesign& design, const std::vector<CVector>& y_path,
                                     double step, const TransitionSignal& sig) {
    return invert_artstein(design, y_path, step, [&sig](double t) { return sig.value(t); });
}

}  // namespace sdc
