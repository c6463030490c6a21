#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sdc {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

enum class ErrorKind {
    InvalidParameter,
    AssumptionViolated,
    SynthesisFailure,
    InvalidArgument,
    HistoryUnderflow,
    ConvergenceFailure,
    InvalidCertificateParameters,
    InfeasibleCertificate,
    SimulationDiverged,
    InsufficientData,
    ConfigError,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it onto an exit code without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Real part of a complex array, rejecting imaginary residue above `tol`.
template <typename Derived>
RVector real_part_checked(const Eigen::MatrixBase<Derived>& v, double tol = 1e-10) {
    if (v.imag().cwiseAbs().maxCoeff() > tol)
        throw Error(ErrorKind::InvalidArgument, "value has a non-negligible imaginary part");
    return v.real();
}

}  // namespace sdc
