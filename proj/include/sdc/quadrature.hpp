#pragma once

#include "sdc/types.hpp"

namespace sdc {

inline constexpr int kDefaultQuadraturePoints = 2048;

/// Composite Simpson rule on `intervals` (even) equal sub-intervals of [a, b].
template <typename F>
auto simpson(F&& f, double a, double b, int intervals = kDefaultQuadraturePoints) {
    if (intervals <= 0 || intervals % 2 != 0)
        throw Error(ErrorKind::InvalidParameter, "Simpson quadrature needs a positive even interval count");
    const double h = (b - a) / intervals;
    auto sum = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) {
        const double w = (i % 2 == 1) ? 4.0 : 2.0;
        sum += w * f(a + i * h);
    }
    return sum * (h / 3.0);
}

}  // namespace sdc
