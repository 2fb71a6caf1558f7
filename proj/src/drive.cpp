#include "gkpmod/drive.hpp"

#include <algorithm>
#include <limits>

namespace gkpmod {

double drive_target(const DriveSpec& spec, double t) { return 1.0 - spec.delta + spec.delta * std::cos(spec.omega_T * t); }

int interval_index(const DriveSpec& spec, double t) {
    return static_cast<int>(std::floor(spec.omega_T * t / (2.0 * kPi)));
}

int interval_sign(const DriveSpec& spec, int k) {
    if (spec.branch_schedule.empty()) return (k % 2 == 0) ? spec.branch : -spec.branch;
    int m = static_cast<int>(spec.branch_schedule.size());
    return spec.branch_schedule[((k % m) + m) % m];
}

double drive_period(const DriveSpec& spec) { return 4.0 * kPi / spec.omega_T; }

namespace {

void check_spec(const DriveSpec& spec) {
    if (!(spec.delta > 0.0 && spec.delta <= 1.0)) throw std::invalid_argument("drive delta must lie in (0, 1]");
    if (!(spec.omega_T > 0.0)) throw std::invalid_argument("drive frequency must be positive");
    if (spec.branch != 1 && spec.branch != -1) throw std::invalid_argument("branch must be +1 or -1");
}

double exact_value(const DriveSpec& spec, double t) {
    double s = std::clamp(drive_target(spec, t), -1.0, 1.0);
    double u = kPi / 2 - std::asin(s);
    return kPi / 2 - interval_sign(spec, interval_index(spec, t)) * u;
}

}  // namespace

Waveform exact_waveform(const DriveSpec& spec, const std::vector<double>& times) {
    check_spec(spec);
    Waveform w;
    w.times = times;
    for (double t : times) {
        double x = exact_value(spec, t);
        w.values.push_back(x);
        w.defect = std::max(w.defect, std::abs(std::sin(x) - drive_target(spec, t)));
    }
    return w;
}

double project_sine(const DriveSpec& spec, double freq, int samples) {
    DriveSpec plus = spec;
    plus.branch = +1;
    plus.branch_schedule.clear();
    double P = drive_period(spec), h = P / samples, acc = 0.0;
    for (int j = 0; j < samples; ++j) {
        double t = j * h;
        acc += (exact_value(plus, t) - kPi / 2) * std::sin(freq * t);
    }
    return 2.0 * acc * h / P;
}

std::vector<Harmonic> fourier_coeffs(const DriveSpec& spec, int n_terms) {
    check_spec(spec);
    if (n_terms < 1) throw std::invalid_argument("need at least one harmonic");
    std::vector<Harmonic> out;
    for (int n = 0; n < n_terms; ++n) {
        double wn = (2 * n + 1) * spec.omega_T / 2.0;
        double b;
        if (spec.delta == 1.0) {
            double m = 2.0 * n + 1;
            b = -(8.0 / kPi) * ((n % 2 == 0) ? 1.0 : -1.0) / (m * m);
        } else {
            b = project_sine(spec, wn);
        }
        out.push_back({n, wn, b});
    }
    return out;
}

namespace {

double harmonic_value(const DriveSpec& spec, const std::vector<Harmonic>& h, double t) {
    double acc = 0.0;
    for (const auto& c : h) acc += c.b_n * std::sin(c.omega_n * t);
    return kPi / 2 + spec.branch * acc;
}

// reconstruction used by the error metrics: truncated series, optionally sampled and held
std::vector<double> reconstruct(const DriveSpec& spec, int n_harmonics, double sample_rate,
                                const std::vector<double>& t) {
    std::vector<Harmonic> h;
    if (n_harmonics > 0) h = fourier_coeffs(spec, n_harmonics);
    std::vector<double> out;
    out.reserve(t.size());
    for (double ti : t) {
        double ts = std::isfinite(sample_rate) ? std::floor(ti * sample_rate) / sample_rate : ti;
        out.push_back(n_harmonics > 0 ? harmonic_value(spec, h, ts) : exact_value(spec, ts));
    }
    return out;
}

std::vector<double> period_grid(const DriveSpec& spec, int grid) {
    std::vector<double> t(grid);
    double P = drive_period(spec);
    for (int j = 0; j < grid; ++j) t[j] = P * j / grid;
    return t;
}

}  // namespace

Waveform harmonic_waveform(const DriveSpec& spec, int n_harmonics, const std::vector<double>& times) {
    check_spec(spec);
    Waveform w;
    w.times = times;
    auto h = fourier_coeffs(spec, n_harmonics);
    for (double t : times) {
        double x = harmonic_value(spec, h, t);
        w.values.push_back(x);
        w.defect = std::max(w.defect, std::abs(std::sin(x) - drive_target(spec, t)));
    }
    return w;
}

double synthesis_error(const DriveSpec& spec, int n_harmonics, double sample_rate, int grid) {
    check_spec(spec);
    if (std::isfinite(sample_rate) && !(sample_rate > spec.omega_T / kPi))
        throw std::invalid_argument("sample rate below the drive's Nyquist bound");
    DriveSpec std_spec = spec;
    std_spec.branch_schedule.clear();
    auto t = period_grid(std_spec, grid);
    auto rec = reconstruct(std_spec, n_harmonics, sample_rate, t);
    double num = 0.0, den = 0.0;
    for (size_t j = 0; j < t.size(); ++j) {
        double x = exact_value(std_spec, t[j]);
        num = std::max(num, std::abs(rec[j] - x));
        den = std::max(den, std::abs(x - kPi / 2));
    }
    return num / den;
}

double coupling_error(const DriveSpec& spec, int n_harmonics, double sample_rate, int grid) {
    check_spec(spec);
    if (n_harmonics < 1) throw std::invalid_argument("need at least one harmonic");
    DriveSpec std_spec = spec;
    std_spec.branch_schedule.clear();
    std::vector<Harmonic> kept;
    for (const auto& h : fourier_coeffs(std_spec, n_harmonics))
        if (!std::isfinite(sample_rate) || h.omega_n < kPi * sample_rate) kept.push_back(h);
    if (kept.empty()) throw std::invalid_argument("no harmonic lies below the Nyquist frequency");
    auto t = period_grid(std_spec, grid);
    double acc = 0.0;
    for (double ti : t) acc += std::sin(harmonic_value(std_spec, kept, ti)) * std::cos(spec.omega_T * ti);
    double amp = 2.0 * acc / t.size();
    return std::abs(amp / spec.delta - 1.0);
}

FluxNoiseSamples flux_noise_prefactor(const DriveSpec& spec, double epsilon, const std::vector<double>& times) {
    check_spec(spec);
    if (!(std::abs(epsilon) < 0.3)) throw std::invalid_argument("flux offset must satisfy |epsilon| < 0.3");
    FluxNoiseSamples out;
    double acc = 0.0;
    for (double t : times) {
        double s = drive_target(spec, t);
        double spur = interval_sign(spec, interval_index(spec, t)) * std::sqrt(std::max(0.0, 1.0 - s * s)) *
                      std::sin(epsilon);
        out.values.push_back(std::cos(epsilon) * s + spur);
        acc += spur;
    }
    out.spurious_average = times.empty() ? 0.0 : acc / times.size();
    return out;
}

}  // namespace gkpmod
