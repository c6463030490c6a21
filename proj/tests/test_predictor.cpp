#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sdc/linalg.hpp"
#include "sdc/predictor.hpp"

using namespace sdc;
using std::numbers::pi;

namespace {

SpectralSystem case_plant() { return build_heat_system(5.0, 2.5, 2.0 * pi, 10); }

PredictorDesign case_design(Placement placement = Placement::RankOne) {
    return synthesize_design(case_plant(), 2, 0.1, 0.2, {Complex(-3.0), Complex(-3.0)}, placement);
}

// Scalar design dZ/dt = a Z + b u with gain k; transition forced on for the tests that want phi = 1.
PredictorDesign scalar_design(double a, double b, double k, double delay) {
    PredictorDesign d;
    d.delay = delay;
    d.n0 = 1;
    d.a_eigs = CVector::Constant(1, Complex(a));
    d.b_n0 = CMatrix::Constant(1, 1, Complex(b));
    d.exp_da = linalg::diagonal_exponential(d.a_eigs, -delay);
    d.k = CMatrix::Constant(1, 1, Complex(k));
    d.a_cl = d.a_n0() + d.exp_da * d.b_n0 * d.k;
    d.transition = TransitionSignal(1.0);
    return d;
}

std::vector<Complex> sorted_spectrum(const CMatrix& m) {
    CVector ev = linalg::eigenvalues(m);
    std::vector<Complex> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), linalg::complex_less);
    return out;
}

}  // namespace

TEST_CASE("diagonal exponential") {
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 0) = 1.25;
    a(1, 1) = -2.5;
    const CMatrix e = diagonal_exponential(a, -0.1);
    CHECK(e(0, 0).real() == doctest::Approx(std::exp(-0.125)).epsilon(1e-15));
    CHECK(e(1, 1).real() == doctest::Approx(std::exp(0.25)).epsilon(1e-15));
    CHECK(e(0, 1) == Complex(0.0));
    CHECK((diagonal_exponential(a, 0.0) - CMatrix::Identity(2, 2)).norm() == 0.0);

    CMatrix rot = CMatrix::Constant(1, 1, Complex(0.0, pi));
    CHECK(std::abs(diagonal_exponential(rot, 1.0)(0, 0) - Complex(-1.0)) < 1e-15);

    a(0, 1) = 1.0;
    CHECK_THROWS_AS(diagonal_exponential(a, 1.0), Error);
}

TEST_CASE("pole placement examples") {
    const PredictorDesign d = case_design();
    for (const Complex& ev : sorted_spectrum(d.a_cl)) CHECK(std::abs(ev - Complex(-3.0)) < 1e-6);

    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 0) = -3.0;
    a(1, 1) = -4.0;
    CHECK(place_poles(a, CMatrix::Identity(2, 2), {Complex(-3.0), Complex(-4.0)}).norm() < 1e-12);

    const CMatrix k = place_poles(CMatrix::Constant(1, 1, Complex(2.0)), CMatrix::Constant(1, 1, Complex(1.0)),
                                  {Complex(-1.0)});
    CHECK(std::abs(k(0, 0) - Complex(-3.0)) < 1e-14);
}

TEST_CASE("rank-one gain has the documented seed direction") {
    const PredictorDesign d = case_design();
    // all-ones loses mode 2 (alternating input signs), so the first tilt q ~ (1, 1.1) is used
    const CVector q = linalg::placement_direction(2, 1);
    CHECK(std::abs(q(1) / q(0) - Complex(1.1)) < 1e-15);
    for (Eigen::Index c = 0; c < d.k.cols(); ++c) CHECK(std::abs(d.k(1, c) - 1.1 * d.k(0, c)) < 1e-12);
}

TEST_CASE("exact placement sets A_cl to the target matrix") {
    const PredictorDesign d = case_design(Placement::Exact);
    CHECK((d.a_cl + 3.0 * CMatrix::Identity(2, 2)).norm() < 1e-12);

    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = -1.0;
    const CMatrix t = linalg::target_matrix({Complex(-1.0, 2.0), Complex(-1.0, -2.0)});
    CHECK(t.imag().norm() == 0.0);
    const auto spec = sorted_spectrum(t);
    CHECK(std::abs(spec[0] - Complex(-1.0, -2.0)) < 1e-12);
    CHECK(std::abs(spec[1] - Complex(-1.0, 2.0)) < 1e-12);

    CMatrix wide(2, 1);
    wide << 1.0, 1.0;
    CHECK_THROWS_AS(linalg::exact_placement(CVector(a.diagonal()), wide, {Complex(-1.0), Complex(-2.0)}), Error);
}

TEST_CASE("placement on random controllable diagonal systems") {
    std::mt19937 rng(20240601);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    int done = 0;
    for (int seed = 0; seed < 100; ++seed) {
        const int n = 1 + seed % 4;
        const int m = 1 + seed % 2;
        CVector eigs(n);
        for (int i = 0; i < n; ++i) eigs(i) = Complex(u(rng) + 0.5 * i, 0.0);
        CMatrix b(n, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) b(i, j) = u(rng);
        std::vector<Complex> poles;
        for (int i = 0; i < n; ++i) poles.emplace_back(-1.0 - 0.5 * i, 0.0);
        if (!linalg::diagonal_pair_controllable(eigs, b)) continue;
        const CMatrix k = linalg::place_poles(eigs, b, poles);
        const CMatrix acl = CMatrix(eigs.asDiagonal()) + b * k;
        const auto spec = sorted_spectrum(acl);
        std::sort(poles.begin(), poles.end(), linalg::complex_less);
        for (int i = 0; i < n; ++i) CHECK(std::abs(spec[i] - poles[i]) < 1e-6);
        ++done;
    }
    CHECK(done > 90);
}

TEST_CASE("placement ignores the order of the pole list") {
    const SpectralSystem s = case_plant();
    const auto a = synthesize_gain(s, 2, 0.1, 0.2, {Complex(-3.0), Complex(-5.0)});
    const auto b = synthesize_gain(s, 2, 0.1, 0.2, {Complex(-5.0), Complex(-3.0)});
    CHECK((a.k - b.k).norm() == 0.0);
}

TEST_CASE("uncontrollable pair is a synthesis failure") {
    CVector eigs(2);
    eigs << 1.0, 1.0;
    CMatrix b(2, 1);
    b << 1.0, 1.0;
    try {
        linalg::place_poles(eigs, b, {Complex(-1.0), Complex(-2.0)});
        FAIL("expected synthesis failure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SynthesisFailure);
    }
}

TEST_CASE("Lyapunov solutions") {
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 0) = -1.0;
    a(1, 1) = -2.0;
    const CMatrix p = solve_lyapunov(a);
    CHECK(std::abs(p(0, 0) - Complex(0.5)) < 1e-14);
    CHECK(std::abs(p(1, 1) - Complex(0.25)) < 1e-14);
    CHECK(std::abs(p(0, 1)) < 1e-14);

    CHECK(std::abs(solve_lyapunov(CMatrix::Constant(1, 1, Complex(-3.0)))(0, 0) - Complex(1.0 / 6.0)) < 1e-15);

    const PredictorDesign d = case_design();
    CHECK(lyapunov_residual(d) < 1e-9);
    CHECK(d.lambda_min_p > 0.0);
    CHECK((d.p - d.p.adjoint()).norm() == 0.0);

    // brute-force oracle: P = int_0^inf e^{A* t} e^{A t} dt on a non-normal A
    CMatrix nn(2, 2);
    nn << -1.0, 4.0, 0.0, -2.0;
    const CMatrix pn = solve_lyapunov(nn);
    Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
    const double h = 1e-3;
    for (int i = 0; i < 40000; ++i) {
        const double t = (i + 0.5) * h;
        Eigen::Matrix2d e;
        e << std::exp(-t), 4.0 * (std::exp(-t) - std::exp(-2.0 * t)), 0.0, std::exp(-2.0 * t);
        acc += e.transpose() * e * h;
    }
    CHECK((pn.real() - acc).norm() < 1e-6);

    CHECK_THROWS_AS(solve_lyapunov(CMatrix::Identity(2, 2)), Error);
}

TEST_CASE("transition signal") {
    const TransitionSignal sig(0.2);
    CHECK(sig.value(0.1) == doctest::Approx(0.5).epsilon(1e-15));
    const auto before = transition_value(sig, -1.0);
    CHECK(before.phi == 0.0);
    CHECK(before.phi_dot == 0.0);
    const auto end = transition_value(sig, 0.2);
    CHECK(end.phi == 1.0);
    CHECK(end.phi_dot == 0.0);

    // one-sided difference of phi' at t0 is -(h / 2) phi''' = -30 h / t0^3
    const double h = 1e-10;
    CHECK(std::abs((sig.rate(0.2) - sig.rate(0.2 - h)) / h) < 1e-6);
    CHECK(std::abs((sig.rate(h) - sig.rate(0.0)) / h) < 1e-6);

    double sup = 0.0;
    for (int i = 0; i <= 20000; ++i) sup = std::max(sup, sig.rate(0.2 * i / 20000.0));
    CHECK(sig.max_rate() == doctest::Approx(sup).epsilon(1e-8));
    CHECK(sig.max_rate() == doctest::Approx(15.0 / 1.6));
}

TEST_CASE("delay buffer") {
    DelayBuffer buf(0.1, 0.3, 1);
    CHECK(buf.capacity() == 5);
    for (int k = 0; k < 8; ++k) buf.push(CVector::Constant(1, Complex(k)));
    CHECK(buf.at(-0.05)(0) == Complex(0.0));
    CHECK(std::abs(buf.at(0.65)(0) - Complex(6.5)) < 1e-12);
    CHECK(buf.at(0.7 + 1e-12)(0) == Complex(7.0));
    CHECK(buf.sample(5)(0) == Complex(5.0));
    CHECK_THROWS_AS(buf.at(0.2), Error);
    CHECK_THROWS_AS(buf.at(0.75), Error);

    const auto nodes = trapezoid_nodes(-0.1 + 0.35, 0.35, 0.1);
    double w = 0.0;
    for (const auto& n : nodes) w += n.weight;
    CHECK(w == doctest::Approx(0.1));
}

TEST_CASE("Artstein state closed forms") {
    const double D = 0.3;
    const double h = 1e-3;
    const int steps = static_cast<int>(std::lround(1.0 / h));

    SUBCASE("zero input history leaves Y unchanged") {
        const PredictorDesign d = case_design();
        DelayBuffer buf(h, D, 2);
        for (int i = 0; i <= steps; ++i) buf.push(CVector::Zero(2));
        CVector y(2);
        y << 0.3, -1.0;
        CHECK((artstein_state(d, y, buf, 1.0) - y).norm() == 0.0);
    }
    SUBCASE("integrator with constant input") {
        const PredictorDesign d = scalar_design(0.0, 1.0, 0.0, D);
        DelayBuffer buf(h, D, 1);
        for (int i = 0; i <= steps; ++i) buf.push(CVector::Constant(1, Complex(2.0)));
        CHECK(std::abs(artstein_state(d, CVector::Constant(1, Complex(1.0)), buf, 1.0)(0) - Complex(1.0 + 2.0 * D)) <
              1e-12);
    }
    SUBCASE("exponential kernel with constant input") {
        const double a = -1.7;
        const PredictorDesign d = scalar_design(a, 1.0, 0.0, D);
        DelayBuffer buf(h, D, 1);
        for (int i = 0; i <= steps; ++i) buf.push(CVector::Constant(1, Complex(2.0)));
        const double exact = 1.0 + 2.0 * std::exp(-a * D) * (std::exp(a * D) - 1.0) / a;
        CHECK(std::abs(artstein_state(d, CVector::Constant(1, Complex(1.0)), buf, 1.0)(0).real() - exact) < 1e-6);
    }
}

TEST_CASE("control input") {
    const PredictorDesign d = case_design();
    CVector z(2);
    z << 1.0, 0.0;
    CHECK(control_input(d, 0.0, z).norm() == 0.0);
    CHECK(control_input(d, 1.0, CVector::Zero(2)).norm() == 0.0);
    CHECK((control_input(d, 1.0, z) - d.k.col(0)).norm() < 1e-15);
    CHECK_THROWS_AS(control_input(d, 1.5, z), Error);
}

TEST_CASE("Artstein inversion examples") {
    const double h = 1e-3;
    const PredictorDesign d = case_design();
    std::vector<CVector> y(501, CVector::Constant(2, Complex(0.7)));

    SUBCASE("zero gain") {
        PredictorDesign z = d;
        z.k.setZero();
        for (const auto& u : invert_artstein(z, y, h, z.transition)) CHECK(u.norm() == 0.0);
    }
    SUBCASE("zero transition") {
        for (const auto& u : invert_artstein(d, y, h, [](double) { return 0.0; })) CHECK(u.norm() == 0.0);
    }
    SUBCASE("scalar integrator has u = k g e^{k t} on [0, D]") {
        const double k = -2.0;
        const double g = 1.5;
        const double D = 0.2;
        const double fine = 1e-4;
        const PredictorDesign s = scalar_design(0.0, 1.0, k, D);
        const int n = static_cast<int>(std::lround(D / fine));
        std::vector<CVector> path(n + 1, CVector::Constant(1, Complex(g)));
        const auto u = invert_artstein(s, path, fine, [](double) { return 1.0; });
        double worst = 0.0;
        for (int i = 0; i <= n; ++i) worst = std::max(worst, std::abs(u[i](0).real() - k * g * std::exp(k * i * fine)));
        CHECK(worst < 1e-6);
    }
}
