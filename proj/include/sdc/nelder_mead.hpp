#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace sdc {

struct NelderMeadOptions {
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    double initial_step = 0.05;   // relative perturbation per coordinate
    double diameter_tol = 1e-6;   // relative to max(1, |best|_inf)
    int max_iterations = 2000;
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

/// Derivative-free simplex minimization. The objective may return +inf to mark
/// infeasible points; those vertices are simply never preferred.
template <typename Objective>
NelderMeadResult nelder_mead(Objective&& f, const Eigen::VectorXd& start, const NelderMeadOptions& opt = {}) {
    const Eigen::Index n = start.size();
    std::vector<Eigen::VectorXd> x(static_cast<std::size_t>(n + 1), start);
    std::vector<double> fx(static_cast<std::size_t>(n + 1));
    for (Eigen::Index i = 0; i < n; ++i) {
        auto& v = x[static_cast<std::size_t>(i + 1)];
        v(i) = start(i) != 0.0 ? start(i) * (1.0 + opt.initial_step) : 0.00025;
    }
    for (std::size_t i = 0; i < x.size(); ++i) fx[i] = f(x[i]);

    std::vector<std::size_t> order(x.size());
    NelderMeadResult result;
    int iter = 0;
    for (; iter < opt.max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[order.size() - 2];

        double diameter = 0.0;
        for (const auto& v : x) diameter = std::max(diameter, (v - x[best]).cwiseAbs().maxCoeff());
        if (diameter < opt.diameter_tol * std::max(1.0, x[best].cwiseAbs().maxCoeff())) {
            result.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i + 1 < order.size(); ++i) centroid += x[order[i]];
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd xr = centroid + opt.reflection * (centroid - x[worst]);
        const double fr = f(xr);
        if (fr < fx[best]) {
            const Eigen::VectorXd xe = centroid + opt.expansion * (xr - centroid);
            const double fe = f(xe);
            if (fe < fr) {
                x[worst] = xe;
                fx[worst] = fe;
            } else {
                x[worst] = xr;
                fx[worst] = fr;
            }
            continue;
        }
        if (fr < fx[second_worst]) {
            x[worst] = xr;
            fx[worst] = fr;
            continue;
        }
        if (fr < fx[worst]) {
            const Eigen::VectorXd xc = centroid + opt.contraction * (xr - centroid);
            const double fc = f(xc);
            if (fc <= fr) {
                x[worst] = xc;
                fx[worst] = fc;
                continue;
            }
        } else {
            const Eigen::VectorXd xcc = centroid + opt.contraction * (x[worst] - centroid);
            const double fcc = f(xcc);
            if (fcc < fx[worst]) {
                x[worst] = xcc;
                fx[worst] = fcc;
                continue;
            }
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (i == best) continue;
            x[i] = x[best] + opt.shrink * (x[i] - x[best]);
            fx[i] = f(x[i]);
        }
    }

    const auto best_it = std::min_element(fx.begin(), fx.end());
    const auto best = static_cast<std::size_t>(std::distance(fx.begin(), best_it));
    result.x = x[best];
    result.value = fx[best];
    result.iterations = iter;
    return result;
}

}  // namespace sdc
