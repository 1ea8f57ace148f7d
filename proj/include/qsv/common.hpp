// Shared aliases, physical constants and error types.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace qsv {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex I{0.0, 1.0};

// Boltzmann constant in eV/K (2019 SI exact value). Internal units put
// hbar = k = 1 and measure all energies in kT_ref, so this only enters
// when converting user input given in micro-eV.
inline constexpr double k_boltzmann_ev = 8.617333262e-5;

inline double uev_to_kt(double uev, double t_ref_kelvin) {
    return uev * 1e-6 / (k_boltzmann_ev * t_ref_kelvin);
}

struct DegeneracyResolutionFailure : std::runtime_error {
    explicit DegeneracyResolutionFailure(const std::string& what)
        : std::runtime_error(what) {}
};

struct CutoffTooSmall : std::runtime_error {
    explicit CutoffTooSmall(const std::string& what) : std::runtime_error(what) {}
};

struct BlockViolation : std::runtime_error {
    explicit BlockViolation(const std::string& what) : std::runtime_error(what) {}
};

struct NoSteadyState : std::runtime_error {
    explicit NoSteadyState(const std::string& what) : std::runtime_error(what) {}
};

struct StepSizeTooLarge : std::runtime_error {
    explicit StepSizeTooLarge(const std::string& what) : std::runtime_error(what) {}
};

struct ConvergenceFailure : std::runtime_error {
    explicit ConvergenceFailure(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qsv
