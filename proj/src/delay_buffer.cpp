#include "sdc/delay_buffer.hpp"

#include <cmath>
#include <string>

namespace sdc {

namespace {

constexpr double kSnap = 1e-9;

bool near_grid(double x, double& rounded) {
    rounded = std::round(x);
    return std::abs(x - rounded) < kSnap;
}

}  // namespace

DelayBuffer::DelayBuffer(double step, double horizon, Eigen::Index dim) : step_(step), dim_(dim) {
    if (!(step > 0.0)) throw Error(ErrorKind::InvalidParameter, "buffer step must be positive");
    if (!(horizon >= 0.0)) throw Error(ErrorKind::InvalidParameter, "buffer horizon must be nonnegative");
    if (dim < 1) throw Error(ErrorKind::InvalidParameter, "buffer dimension must be positive");
    const auto cap = static_cast<std::size_t>(std::ceil(horizon / step - kSnap)) + 2;
    ring_.assign(cap, CVector::Zero(dim));
}

void DelayBuffer::push(const CVector& value) {
    if (value.size() != dim_) throw Error(ErrorKind::InvalidArgument, "buffer sample has the wrong dimension");
    ring_[static_cast<std::size_t>(count_ % static_cast<std::int64_t>(ring_.size()))] = value;
    ++count_;
}

std::int64_t DelayBuffer::earliest_index() const {
    const auto cap = static_cast<std::int64_t>(ring_.size());
    return count_ > cap ? count_ - cap : 0;
}

CVector DelayBuffer::sample(std::int64_t k) const {
    if (k < 0) return CVector::Zero(dim_);
    if (k > latest_index() || k < earliest_index())
        throw Error(ErrorKind::HistoryUnderflow,
                    "buffer has no sample for grid index " + std::to_string(k));
    return ring_[static_cast<std::size_t>(k % static_cast<std::int64_t>(ring_.size()))];
}

CVector DelayBuffer::at(double t) const {
    if (t < 0.0) return CVector::Zero(dim_);
    const double x = t / step_;
    double k = 0.0;
    if (near_grid(x, k)) return sample(static_cast<std::int64_t>(k));
    const auto k0 = static_cast<std::int64_t>(std::floor(x));
    const double w = x - static_cast<double>(k0);
    return (1.0 - w) * sample(k0) + w * sample(k0 + 1);
}

std::vector<WindowNode> trapezoid_nodes(double lo, double hi, double step) {
    std::vector<WindowNode> nodes;
    if (!(hi > lo)) return nodes;

    double r = 0.0;
    std::int64_t first_inner = 0;
    if (near_grid(lo / step, r)) {
        lo = r * step;
        first_inner = static_cast<std::int64_t>(r) + 1;
    } else {
        first_inner = static_cast<std::int64_t>(std::ceil(lo / step));
    }
    std::int64_t last_inner = 0;
    if (near_grid(hi / step, r)) {
        hi = r * step;
        last_inner = static_cast<std::int64_t>(r) - 1;
    } else {
        last_inner = static_cast<std::int64_t>(std::floor(hi / step));
    }

    nodes.push_back({lo, 0.0});
    for (std::int64_t k = first_inner; k <= last_inner; ++k) nodes.push_back({static_cast<double>(k) * step, 0.0});
    nodes.push_back({hi, 0.0});
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double h = nodes[i + 1].time - nodes[i].time;
        nodes[i].weight += 0.5 * h;
        nodes[i + 1].weight += 0.5 * h;
    }
    return nodes;
}

}  // namespace sdc
