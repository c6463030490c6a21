#pragma once

#include <functional>
#include <vector>

#include "sdc/delay_buffer.hpp"
#include "sdc/spectral_system.hpp"
#include "sdc/types.hpp"

namespace sdc {

/// C^2 ramp from open loop (0) to closed loop (1) over [0, t0]: the quintic
/// smoothstep 10 s^3 - 15 s^4 + 6 s^5 with s = t / t0.
class TransitionSignal {
public:
    explicit TransitionSignal(double t0 = 1.0);

    double t0() const { return t0_; }
    double value(double t) const;
    double rate(double t) const;
    double max_rate() const { return 15.0 / (8.0 * t0_); }

private:
    double t0_;
};

struct TransitionValue {
    double phi;
    double phi_dot;
};

TransitionValue transition_value(const TransitionSignal& sig, double t);

/// Delay-compensating feedback u = phi K Z for the first n0 modes.
struct PredictorDesign {
    double delay = 0.0;
    int n0 = 0;
    CVector a_eigs;    // diagonal of A_{N0}
    CMatrix b_n0;      // N0 x m
    CMatrix exp_da;    // e^{-D A_{N0}}
    CMatrix k;         // m x N0
    CMatrix a_cl;      // A_{N0} + e^{-D A_{N0}} B_{N0} K
    CMatrix p;         // A_cl^* P + P A_cl = -I (empty until attached)
    std::vector<Complex> desired_poles;
    TransitionSignal transition;
    double lambda_min_p = 0.0;
    double lambda_max_p = 0.0;

    CMatrix a_n0() const { return a_eigs.asDiagonal(); }
    Eigen::Index input_dim() const { return b_n0.cols(); }
    bool has_lyapunov() const { return p.size() > 0; }
};

/// Entrywise exp(s * lambda_i) of a diagonal matrix.
CMatrix diagonal_exponential(const CMatrix& a, double s);

/// Gain K with spec(A + B_tilde K) = poles; rank-one reduction for m > 1.
CMatrix place_poles(const CMatrix& a, const CMatrix& b_tilde, const std::vector<Complex>& poles);

/// Hermitian positive-definite solution of A_cl^* P + P A_cl = -I.
CMatrix solve_lyapunov(const CMatrix& a_cl);

/// How the multi-input gain is chosen. RankOne is K = q k with a fixed seed q;
/// Exact needs m = N0 and sets A_cl to a real matrix with the requested spectrum.
enum class Placement { RankOne, Exact };

/// Gain and closed-loop matrix only; no Lyapunov matrix attached.
PredictorDesign synthesize_gain(const SpectralSystem& sys, int n0, double delay, double t0,
                                const std::vector<Complex>& poles, Placement placement = Placement::RankOne);

/// Solves the Lyapunov equation for design.a_cl and records the P spectrum.
void attach_lyapunov(PredictorDesign& design);

/// synthesize_gain followed by attach_lyapunov.
PredictorDesign synthesize_design(const SpectralSystem& sys, int n0, double delay, double t0,
                                  const std::vector<Complex>& poles, Placement placement = Placement::RankOne);

/// Frobenius norm of A_cl^* P + P A_cl + I.
double lyapunov_residual(const PredictorDesign& design);

/// Z(t) = Y(t) + int_{t-D}^t e^{(t-s-D) A} B u(s) ds, trapezoid on the buffer grid.
CVector artstein_state(const PredictorDesign& design, const CVector& y, const DelayBuffer& history, double t);

/// Artstein state with the input at time t still unknown: the history only
/// reaches t - step. Z = known + top_weight * e^{-DA} B u(t).
struct ArtsteinSplit {
    CVector known;
    double top_weight = 0.0;
};

ArtsteinSplit artstein_split(const PredictorDesign& design, const CVector& y, const DelayBuffer& history, double t);

/// Resolves u(t) = phi K Z(t) when Z depends on u(t) through the top node.
/// Returns {u, Z}.
std::pair<CVector, CVector> resolve_current_input(const PredictorDesign& design, double phi,
                                                  const ArtsteinSplit& split);

/// u = phi K Z.
CVector control_input(const PredictorDesign& design, double phi, const CVector& z);

/// Solves v = phi K Y + T_D v on the grid t_i = i * step by causal trapezoid marching,
/// (T_D f)(t) = phi(t) K int_{max(t-D,0)}^t e^{(t-s-D)A} B f(s) ds.
std::vector<CVector> invert_artstein(const PredictorDesign& design, const std::vector<CVector>& y_path,
                                     double step, const std::function<double(double)>& weight);

std::vector<CVector> invert_artstein(const PredictorDesign& design, const std::vector<CVector>& y_path,
                                     double step, const TransitionSignal& sig);

}  // namespace sdc
