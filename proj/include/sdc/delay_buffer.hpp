#pragma once

#include <cstdint>
#include <vector>

#include "sdc/types.hpp"

namespace sdc {

/// Fixed-step history of a vector signal sampled at t_k = k * step, k >= 0.
///
/// Holds the most recent ceil(horizon / step) + 2 samples, which covers any
/// lookup in [t - horizon, t] for the latest time t. The signal is identically
/// zero before t = 0; between samples it is linearly interpolated.
class DelayBuffer {
public:
    DelayBuffer(double step, double horizon, Eigen::Index dim);

    /// Appends the sample for the next grid time (t = 0 for the first push).
    void push(const CVector& value);

    /// Value at time t: zero for t < 0, interpolated inside the stored window.
    /// Throws HistoryUnderflow for times outside the stored window.
    CVector at(double t) const;

    /// Sample by grid index; zero for negative indices.
    CVector sample(std::int64_t k) const;

    double step() const { return step_; }
    Eigen::Index dim() const { return dim_; }
    std::size_t capacity() const { return ring_.size(); }
    bool empty() const { return count_ == 0; }
    std::int64_t latest_index() const { return count_ - 1; }
    std::int64_t earliest_index() const;
    double latest_time() const { return static_cast<double>(latest_index()) * step_; }
    double earliest_time() const { return static_cast<double>(earliest_index()) * step_; }

private:
    double step_;
    Eigen::Index dim_;
    std::vector<CVector> ring_;
    std::int64_t count_ = 0;
};

/// A quadrature node on a buffer grid.
struct WindowNode {
    double time;
    double weight;
};

/// Composite trapezoid nodes over [lo, hi]: both end points plus every grid
/// point k * step strictly inside. End points within 1e-9 * step of a grid
/// point are snapped onto it.
std::vector<WindowNode> trapezoid_nodes(double lo, double hi, double step);

}  // namespace sdc
