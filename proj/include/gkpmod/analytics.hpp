#pragma once

#include <functional>

#include "gkpmod/core.hpp"

namespace gkpmod {

struct SpecialFunctionBudget {
    double bessel_rel_tol = 1e-12;
    int theta_terms = 5;  // n = -(T-1)/2 .. (T-1)/2
};

// exponent-scaled modified Bessel functions e^{-x} I_n(x) for x >= 0
double bessel_i0e(double x);
double bessel_i1e(double x);

cplx theta3(cplx z, double q, int terms);

double mean_abs_beta(double alpha);
double mean_beta_sq(double alpha);

// <f(|beta|)> for any input state: 2 e^{-a^2} int_0^inf b f(b) e^{-b^2} I_0(2 a b) db
double beta_expectation(double alpha, const std::function<double(double)>& f, double abs_tol = 1e-10);

// mean sharpness <|Tr S_q|> for vacuum input under the periodic-Gaussian approximation;
// beta_cut <= 0 selects 1/alpha
double villain_mean_sharpness(double alpha, double beta_cut = -1.0, const SpecialFunctionBudget& budget = {});

struct SqueezingEstimate {
    double estimate;
    double lower_bound;
};
SqueezingEstimate expected_squeezing(double alpha);

double reflection_phase(double q_T, double omega, double kappa, double omega_A, double g);

}  // namespace gkpmod
