#pragma once

#include <vector>

namespace gkpmod {

double mean(const std::vector<double>& x);
double sample_stddev(const std::vector<double>& x);
double standard_error(const std::vector<double>& x);
// empirical quantile with linear interpolation, p in [0, 1]
double quantile(std::vector<double> x, double p);

struct KsResult {
    double statistic;
    double p_value;
};
// two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov distribution
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
// P(K > lambda) for the Kolmogorov distribution
double kolmogorov_survival(double lambda);

}  // namespace gkpmod
