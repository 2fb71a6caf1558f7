#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gkpmod {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline const double kSqrtPi = std::sqrt(std::numbers::pi);
inline const double kSqrt2 = std::numbers::sqrt2;

// error taxonomy; the CLI maps every one of these except ConfigError to exit code 3
struct GkpError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TruncationError : GkpError {
    using GkpError::GkpError;
};
struct RegimeError : GkpError {
    using GkpError::GkpError;
};
struct ZeroProbability : GkpError {
    using GkpError::GkpError;
};
struct ConvergenceFailure : GkpError {
    using GkpError::GkpError;
};
struct QuadratureFailure : GkpError {
    using GkpError::GkpError;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// phase in (-pi, pi]; atan2 returns -pi for (-x, -0.0), which we fold onto +pi
inline double wrapped_arg(cplx z) {
    double a = std::atan2(z.imag(), z.real());
    if (a <= -kPi) a = kPi;
    return a;
}

}  // namespace gkpmod
