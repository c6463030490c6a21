#include "sdc/types.hpp"

namespace sdc {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::AssumptionViolated: return "assumption-violated";
    case ErrorKind::SynthesisFailure: return "synthesis-failure";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::HistoryUnderflow: return "history-underflow";
    case ErrorKind::ConvergenceFailure: return "convergence-failure";
    case ErrorKind::InvalidCertificateParameters: return "invalid-certificate-parameters";
    case ErrorKind::InfeasibleCertificate: return "infeasible-certificate";
    case ErrorKind::SimulationDiverged: return "simulation-diverged";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::ConfigError: return "config-error";
    }
    return "unknown";
}

}  // namespace sdc
