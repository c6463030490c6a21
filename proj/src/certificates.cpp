#include "sdc/certificates.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <sstream>

#include "sdc/linalg.hpp"

namespace sdc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Everything that does not depend on (beta, gamma1, gamma2).
struct DesignNorms {
    double alpha;
    double norm_a;
    double norm_bn0k;
    double norm_expda_bk;
    double norm_k;
    double norm_p;
    double norm_bk;
    double C1;
    double C5;
};

DesignNorms design_norms(const SpectralSystem& sys, const PredictorDesign& design) {
    if (!design.has_lyapunov())
        throw Error(ErrorKind::InvalidArgument, "design has no Lyapunov matrix (closed loop not Hurwitz?)");
    DesignNorms n{};
    n.alpha = check_truncation(sys, design.n0).alpha;
    n.norm_a = design.a_eigs.cwiseAbs().maxCoeff();
    n.norm_bn0k = linalg::spectral_norm(design.b_n0 * design.k);
    n.norm_expda_bk = linalg::spectral_norm(design.exp_da * design.b_n0 * design.k);
    n.norm_k = linalg::spectral_norm(design.k);
    n.norm_p = linalg::spectral_norm(design.p);
    n.norm_bk = lifted_gain_norm(sys, design.k);
    n.C1 = 2.0 * std::max(1.0, design.delay * std::exp(2.0 * design.delay * n.norm_a) * n.norm_bn0k * n.norm_bn0k);

    const Eigen::Index m = design.input_dim();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double ki = design.k.row(i).norm();
        const double kai = (design.k.row(i) * design.a_cl).norm();
        acc += sys.lifting_op_norms(i) * sys.lifting_op_norms(i) * ki * ki +
               sys.lifting_norms(i) * sys.lifting_norms(i) * kai * kai;
    }
    n.C5 = 2.0 * static_cast<double>(m) / (n.alpha * sys.riesz_lower) * acc;
    return n;
}

CertificateBundle assemble(const SpectralSystem& sys, const PredictorDesign& design, const DesignNorms& n,
                           double beta, double gamma1, double gamma2) {
    const double m_r = sys.riesz_lower;
    const double lam_min = design.lambda_min_p;
    const double lam_max = design.lambda_max_p;

    if (!(beta > 0.0 && beta < 1.0))
        throw Error(ErrorKind::InvalidCertificateParameters, "beta must lie in (0, 1)");
    if (!(gamma1 > n.C1 / lam_min))
        throw Error(ErrorKind::InvalidCertificateParameters, "gamma1 must exceed C1 / lambda_m(P)");
    if (!(gamma2 > n.norm_bk * n.norm_bk / (m_r * lam_min)))
        throw Error(ErrorKind::InvalidCertificateParameters, "gamma2 must exceed ||BK||^2 / (m_R lambda_m(P))");
    if (!(gamma2 > n.C5 / (1.0 - beta)))
        throw Error(ErrorKind::InvalidCertificateParameters, "gamma2 must exceed C5 / (1 - beta)");

    CertificateBundle b;
    b.beta = beta;
    b.gamma1 = gamma1;
    b.gamma2 = gamma2;
    b.alpha = n.alpha;
    b.lam_min_P = lam_min;
    b.lam_max_P = lam_max;
    b.norm_P = n.norm_p;
    b.norm_BK = n.norm_bk;
    b.norm_K = n.norm_k;
    b.C1 = n.C1;
    b.C5 = n.C5;
    b.C2g1 = gamma1 * lam_min - n.C1;
    b.C3g2 = gamma2 * lam_min - n.norm_bk * n.norm_bk / m_r;
    b.C4 = std::sqrt(2.0 * sys.riesz_upper) + n.norm_bk / std::sqrt(b.C3g2);
    b.C6 = (1.0 / m_r) * (2.0 * (m_r + n.norm_bk * n.norm_bk) / (n.alpha * m_r) +
                          (gamma1 * (1.0 + design.delay) + gamma2) * n.norm_p * n.norm_p / beta);
    b.kappa0 = 0.5 * std::min({(1.0 - beta) / lam_max, (1.0 - beta - n.C5 / gamma2) / lam_max, n.alpha / 2.0});
    b.C7 = n.norm_a + n.norm_expda_bk + 0.5;
    b.C8 = design.transition.max_rate() * n.norm_k + n.norm_k * (n.norm_a + n.norm_expda_bk);
    b.small_gain_constant = b.C4 * std::sqrt(b.C6 / (2.0 * b.kappa0));
    return b;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

double lifted_gain_norm(const SpectralSystem& sys, const CMatrix& k) {
    const CMatrix gram = sys.lifting_gram.cast<Complex>();
    const CMatrix m = k.adjoint() * gram * k;
    const CMatrix h = (m + m.adjoint()) / 2.0;
    const double top = linalg::hermitian_eig_range<Complex>(h).second;
    return std::sqrt(std::max(top, 0.0));
}

FeasibilityThresholds feasibility_thresholds(const SpectralSystem& sys, const PredictorDesign& design) {
    const DesignNorms n = design_norms(sys, design);
    return {n.C1 / design.lambda_min_p, n.norm_bk * n.norm_bk / (sys.riesz_lower * design.lambda_min_p), n.C5};
}

CertificateBundle compute_constants(const SpectralSystem& sys, const PredictorDesign& design, double beta,
                                    double gamma1, double gamma2) {
    return assemble(sys, design, design_norms(sys, design), beta, gamma1, gamma2);
}

double small_gain_objective(const SpectralSystem& sys, const PredictorDesign& design, double beta, double gamma1,
                            double gamma2) {
    try {
        return compute_constants(sys, design, beta, gamma1, gamma2).small_gain_constant;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidCertificateParameters) return kInf;
        throw;
    }
}

double evaluate_V(const SpectralSystem& sys, const PredictorDesign& design, const CertificateBundle& bundle,
                  double t, const DelayBuffer& z_history, const CVector& x_coeffs, const CVector& u_delayed) {
    if (x_coeffs.size() < design.n0) throw Error(ErrorKind::InvalidArgument, "fewer coefficients than retained modes");
    if (x_coeffs.size() > sys.modes()) throw Error(ErrorKind::InvalidArgument, "more coefficients than system modes");
    const auto& phi = design.transition;
    auto quad = [&](const CVector& z) { return (z.adjoint() * design.p * z)(0, 0).real(); };

    const CVector z_now = z_history.at(t);
    double integral = 0.0;
    for (const auto& node : trapezoid_nodes(t - design.delay, t, z_history.step())) {
        const double w = phi.value(node.time);
        if (w != 0.0) integral += node.weight * w * quad(z_history.at(node.time));
    }
    double v = bundle.gamma1 * (quad(z_now) + integral);

    const double phi_past = phi.value(t - design.delay);
    if (phi_past != 0.0) v += bundle.gamma2 * phi_past * quad(z_history.at(t - design.delay));

    const Eigen::Index tail = x_coeffs.size() - design.n0;
    if (tail > 0) {
        const CVector lifted = sys.lifting_coeffs.middleRows(design.n0, tail) * u_delayed;
        v += 0.5 * (x_coeffs.tail(tail) - lifted).squaredNorm();
    }
    return v;
}

CertificateBundle optimize_parameters(const SpectralSystem& sys, const PredictorDesign& design,
                                      const SearchConfig& config) {
    const DesignNorms norms = design_norms(sys, design);
    const FeasibilityThresholds th{norms.C1 / design.lambda_min_p,
                                   norms.norm_bk * norms.norm_bk / (sys.riesz_lower * design.lambda_min_p), norms.C5};

    auto objective = [&](const Eigen::VectorXd& x) {
        try {
            return assemble(sys, design, norms, x(0), x(1), x(2)).small_gain_constant;
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::InvalidCertificateParameters) return kInf;
            throw;
        }
    };

    Eigen::VectorXd start(3);
    double start_value = kInf;
    for (int i = 1; i <= 9; ++i) {
        const double beta = 0.1 * i;
        for (double m1 : {1.5, 3.0, 10.0}) {
            for (double m2 : {1.5, 3.0, 10.0}) {
                Eigen::VectorXd x(3);
                x << beta, m1 * th.gamma1_min, m2 * th.gamma2_min(beta);
                const double fx = objective(x);
                if (fx < start_value) {
                    start_value = fx;
                    start = x;
                }
            }
        }
    }
    if (!std::isfinite(start_value))
        throw Error(ErrorKind::InfeasibleCertificate, "no feasible (beta, gamma1, gamma2) on the starting grid");

    NelderMeadResult best = nelder_mead(objective, start, config.simplex);
    for (int r = 0; r < config.restarts; ++r) {
        NelderMeadResult again = nelder_mead(objective, best.x, config.simplex);
        if (!(again.value < best.value)) break;
        best = again;
    }
    return assemble(sys, design, norms, best.x(0), best.x(1), best.x(2));
}

CouplingConstants coupling_constants(const CouplingParameters& p, double length) {
    if (!(p.a1 > 0.0)) throw Error(ErrorKind::InvalidParameter, "a1 must be positive");
    if (!(length > 0.0)) throw Error(ErrorKind::InvalidParameter, "L must be positive");
    CouplingConstants c;
    c.Ct0 = std::sqrt(2.0);
    c.Ct1 = 2.0 * std::abs(p.b1) / (p.a1 * length);
    c.Ct2 = 2.0 * std::abs(p.c1) / p.a1;
    c.D1 = std::abs(p.a2);
    c.D2 = std::abs(p.b2 * p.d2) / length;
    c.D3 = std::abs(p.c2);
    return c;
}

double small_gain_margin(const CertificateBundle& bundle, const CouplingConstants& coupling) {
    return 1.0 - (coupling.D1 * coupling.Ct1 + coupling.D2) * bundle.small_gain_constant;
}

double no_blowup_margin(double C4, double C10, const CouplingConstants& coupling) {
    if (C10 < 0.0) throw Error(ErrorKind::InvalidParameter, "C10 must be nonnegative");
    return 1.0 - (coupling.D1 * coupling.Ct1 + coupling.D2) * C4 * std::sqrt(C10);
}

std::string format_certificate(const CertificateBundle& b, double margin) {
    const std::pair<const char*, double> rows[] = {
        {"beta", b.beta}, {"gamma1", b.gamma1}, {"gamma2", b.gamma2}, {"C1", b.C1},
        {"C2g1", b.C2g1}, {"C3g2", b.C3g2},     {"C4", b.C4},         {"C5", b.C5},
        {"C6", b.C6},     {"kappa0", b.kappa0}, {"small_gain_constant", b.small_gain_constant},
        {"margin", margin},
    };
    std::string out;
    for (const auto& [name, value] : rows) out += std::string(name) + " = " + format_number(value) + "\n";
    return out;
}

std::map<std::string, double> parse_key_values(std::istream& in) {
    std::map<std::string, double> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        out[trim(line.substr(0, eq))] = std::stod(trim(line.substr(eq + 1)));
    }
    return out;
}

}  // namespace sdc
