#include "gkpmod/analytics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace gkpmod {

namespace {

// the asymptotic series only reaches 1e-10 relative accuracy from x ~ 12 on
constexpr double kBesselSwitch = 15.0;

double bessel_ie_series(int nu, double x) {
    double term = std::exp(-x) * (nu == 0 ? 1.0 : 0.5 * x);
    double sum = term;
    double h2 = 0.25 * x * x;
    for (int k = 1; k < 500; ++k) {
        term *= h2 / (static_cast<double>(k) * (k + nu));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

double bessel_ie_asymptotic(int nu, double x) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0, sum = 1.0, prev = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= -(mu - (2.0 * k - 1) * (2.0 * k - 1)) / (8.0 * k * x);
        if (std::abs(term) > std::abs(prev)) break;
        sum += term;
        prev = term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum / std::sqrt(2.0 * kPi * x);
}

}  // namespace

double bessel_i0e(double x) {
    x = std::abs(x);
    return x < kBesselSwitch ? bessel_ie_series(0, x) : bessel_ie_asymptotic(0, x);
}

double bessel_i1e(double x) {
    double ax = std::abs(x);
    double v = ax < kBesselSwitch ? bessel_ie_series(1, ax) : bessel_ie_asymptotic(1, ax);
    return x < 0 ? -v : v;
}

cplx theta3(cplx z, double q, int terms) {
    int half = (terms - 1) / 2;
    cplx sum = 0.0;
    for (int n = -half; n <= half; ++n) sum += std::pow(q, n * n) * std::exp(cplx(0, 2.0 * n) * z);
    return sum;
}

double mean_abs_beta(double alpha) {
    double x = 0.5 * alpha * alpha;
    double i0 = bessel_i0e(x), i1 = bessel_i1e(x);
    return 0.5 * kSqrtPi * (i0 + alpha * alpha * (i0 + i1));
}

double mean_beta_sq(double alpha) { return 1.0 + alpha * alpha; }

double beta_expectation(double alpha, const std::function<double(double)>& f, double abs_tol) {
    using boost::math::quadrature::gauss_kronrod;
    auto integrand = [&](double b) {
        return 2.0 * b * f(b) * std::exp(-(b - alpha) * (b - alpha)) * bessel_i0e(2.0 * alpha * b);
    };
    double err = 0.0;
    double hi = alpha + 12.0;
    double val = gauss_kronrod<double, 61>::integrate(integrand, 0.0, hi, 15, abs_tol, &err);
    if (err > 10 * abs_tol + 1e-12 * std::abs(val)) throw QuadratureFailure("beta expectation did not converge");
    return val;
}

double villain_mean_sharpness(double alpha, double beta_cut, const SpecialFunctionBudget& budget) {
    using boost::math::quadrature::gauss_kronrod;
    if (!(alpha > 0.0)) throw std::invalid_argument("villain sharpness needs alpha > 0");
    if (beta_cut <= 0.0) beta_cut = 1.0 / alpha;
    const double tol = 1e-8;
    double inner_err_max = 0.0;
    auto radial = [&](double b) {
        double k = 2.0 * alpha * b;
        double q = std::exp(-kPi - 1.0 / (2.0 * k));
        auto ang = [&](double phi) { return std::abs(theta3(cplx(-phi / 2.0, kPi), q, budget.theta_terms)); };
        double ie = 0.0;
        double ang_int = gauss_kronrod<double, 31>::integrate(ang, -kPi, kPi, 12, tol, &ie);
        inner_err_max = std::max(inner_err_max, ie / std::max(1.0, ang_int));
        return b * std::exp(-(alpha - b) * (alpha - b)) * std::exp(-kPi) / std::sqrt(2.0 * k) * ang_int;
    };
    double err = 0.0;
    double hi = alpha + 6.0;
    if (beta_cut >= hi) return 0.0;
    double val = gauss_kronrod<double, 61>::integrate(radial, beta_cut, hi, 15, tol, &err);
    if (err > tol * std::max(1.0, std::abs(val)) || inner_err_max > 1e-6)
        throw QuadratureFailure("Villain integral did not converge");
    return val / (kPi * kSqrtPi);
}

SqueezingEstimate expected_squeezing(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("expected squeezing needs alpha > 0");
    return {1.0 / std::sqrt(4.0 * kPi * alpha * alpha), 1.0 / std::sqrt(4.0 * kPi * alpha * std::sqrt(1.0 + alpha * alpha))};
}

double reflection_phase(double q_T, double omega, double kappa, double omega_A, double g) {
    if (!(kappa > 0.0)) throw std::invalid_argument("reflection phase needs kappa > 0");
    double det = omega_A + g * q_T - omega;
    cplx num(kappa / 2.0, det), den(kappa / 2.0, -det);
    return std::arg(num / den);
}

}  // namespace gkpmod
