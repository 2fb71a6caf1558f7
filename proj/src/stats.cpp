#include "gkpmod/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/statistics/univariate_statistics.hpp>

namespace gkpmod {

double mean(const std::vector<double>& x) {
    if (x.empty()) throw std::invalid_argument("mean of an empty sample");
    return boost::math::statistics::mean(x);
}

double sample_stddev(const std::vector<double>& x) {
    if (x.size() < 2) throw std::invalid_argument("need two samples for a standard deviation");
    return std::sqrt(boost::math::statistics::sample_variance(x));
}

double standard_error(const std::vector<double>& x) { return sample_stddev(x) / std::sqrt(double(x.size())); }

double quantile(std::vector<double> x, double p) {
    if (x.empty()) throw std::invalid_argument("quantile of an empty sample");
    std::sort(x.begin(), x.end());
    double pos = std::clamp(p, 0.0, 1.0) * (x.size() - 1);
    size_t i = static_cast<size_t>(std::floor(pos));
    if (i + 1 >= x.size()) return x.back();
    return x[i] + (pos - i) * (x[i + 1] - x[i]);
}

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 200; ++k) {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("two-sample test needs nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = a.size(), nb = b.size();
    size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    double ne = std::sqrt(na * nb / (na + nb));
    return {d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d)};
}

}  // namespace gkpmod
