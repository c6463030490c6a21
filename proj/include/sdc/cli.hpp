#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "sdc/certificates.hpp"
#include "sdc/config.hpp"
#include "sdc/predictor.hpp"
#include "sdc/spectral_system.hpp"

namespace sdc::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 1,
    kAssumptionFailure = 2,
    kSynthesisFailure = 3,
    kCertificateFailure = 4,
    kDiverged = 5,
};

int exit_code_for(ErrorKind kind);

struct RunOptions {
    std::filesystem::path out_dir = ".";
    bool no_disturbance = false;
    bool open_loop = false;
};

/// Human-readable reports go to `out`, diagnostics to `err`.
struct Streams {
    std::ostream& out;
    std::ostream& err;
};

/// Each command re-runs the stages it depends on. The overloads taking a
/// SpectralSystem skip building the plant from the config.
int cmd_validate(const RunConfig& cfg, Streams io);
int cmd_validate(const RunConfig& cfg, const SpectralSystem& sys, Streams io);

int cmd_design(const RunConfig& cfg, const RunOptions& opt, Streams io);
int cmd_design(const RunConfig& cfg, const SpectralSystem& sys, const RunOptions& opt, Streams io);

int cmd_certify(const RunConfig& cfg, const RunOptions& opt, Streams io);
int cmd_simulate(const RunConfig& cfg, const RunOptions& opt, Streams io);
int cmd_case_study(const RunOptions& opt, Streams io);

/// Loads the config then dispatches; config problems map to exit 1.
int run_with_config_file(const std::string& command, const std::string& path, const RunOptions& opt, Streams io);

SpectralSystem build_plant(const RunConfig& cfg);

/// Text of design.txt: K, spectrum of A_cl, P and the Lyapunov residual.
std::string format_design_report(const PredictorDesign& design, bool hurwitz, Placement placement);

/// Applies SDC_LOG (error | info | debug) to the default logger; unset means error.
void configure_logging();

}  // namespace sdc::cli
