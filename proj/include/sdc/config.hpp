#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sdc/certificates.hpp"
#include "sdc/predictor.hpp"
#include "sdc/types.hpp"

namespace sdc {

/// Everything a CLI run needs, read from a sectioned `key = value` file:
///
///   [plant]       a, c, L, N_max
///   [truncation]  N0
///   [control]     D, t0, poles (comma separated; complex as `re+imi`), placement
///   [certificate] optimize, beta, gamma1, gamma2
///   [coupling]    a1, b1, c1, a2, b2, c2, d2, disturbance, disturbance_times, disturbance_values
///   [simulation]  dt, T_end, N_modes, record_stride, output, x0, initial_profile
struct RunConfig {
    struct Plant {
        double a = 0.0;
        double c = 0.0;
        double length = 0.0;
        int n_max = 10;
    } plant;

    int n0 = 0;

    struct Control {
        double delay = 0.0;
        double t0 = 0.0;
        std::vector<Complex> poles;
        Placement placement = Placement::RankOne;  // rank-one | exact
    } control;

    struct Certificate {
        bool optimize = true;
        double beta = 0.0;
        double gamma1 = 0.0;
        double gamma2 = 0.0;
    } certificate;

    CouplingParameters coupling;
    std::string disturbance = "case-study";  // none | case-study | samples
    std::vector<double> disturbance_times;
    std::vector<double> disturbance_values;

    struct Simulation {
        double dt = 1e-3;
        double t_end = 10.0;
        int n_modes = 10;
        int record_stride = 1;
        std::string output = "trajectory.csv";
        double x0 = -2.0;
        std::string initial_profile = "cubic";  // cubic | zero
    } simulation;
};

/// Throws Error(ConfigError) naming the offending section and key.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// The reaction-diffusion / ODE interconnection with its published parameters.
RunConfig case_study_config();

/// Parses `-3`, `1.5e-2`, `-1+2i`, `-1-2i`, `2i`.
Complex parse_complex(const std::string& text);

}  // namespace sdc
