#pragma once

#include <vector>

#include "gkpmod/core.hpp"

namespace gkpmod {

struct DriveSpec {
    double delta = 1.0;
    double omega_T = 2.0 * kPi * 250e6;
    int branch = +1;
    int n_harmonics = -1;  // negative means the exact waveform
    // sign per interval of length 2 pi/omega_T; empty reproduces the standard branch,
    // whose sign flips every interval
    std::vector<int> branch_schedule;
};

struct Waveform {
    std::vector<double> times;
    std::vector<double> values;
    double defect = 0.0;  // max |sin(x) - s(t)|
};

double drive_target(const DriveSpec& spec, double t);  // s(t) = 1 - delta + delta cos(omega_T t)
int interval_index(const DriveSpec& spec, double t);
// sign multiplying cos(x_ext) / sqrt(1 - s^2) in the given interval
int interval_sign(const DriveSpec& spec, int k);
double drive_period(const DriveSpec& spec);  // 4 pi / omega_T

Waveform exact_waveform(const DriveSpec& spec, const std::vector<double>& times);

struct Harmonic {
    int n;
    double omega_n;
    double b_n;
};
// x_ext = pi/2 +- sum_n b_n sin((2n+1) omega_T t / 2); b_n refers to the + branch
std::vector<Harmonic> fourier_coeffs(const DriveSpec& spec, int n_terms);
// projection (2/P) int_0^P (x_+(t) - pi/2) sin(freq t) dt by the trapezoid rule
double project_sine(const DriveSpec& spec, double freq, int samples = 8192);

Waveform harmonic_waveform(const DriveSpec& spec, int n_harmonics, const std::vector<double>& times);

// max |x_rec - x| / max |x - pi/2| over one period, where x_rec is the n-harmonic waveform
// sampled at sample_rate and held; infinite sample_rate disables the hold
double synthesis_error(const DriveSpec& spec, int n_harmonics, double sample_rate, int grid = 20000);
// relative error of the resonant coupling amplitude 2<sin(x_rec) cos(omega_T t)> / delta, where x_rec
// keeps the harmonics below the Nyquist frequency of sample_rate and is reconstructed without a hold
double coupling_error(const DriveSpec& spec, int n_harmonics, double sample_rate, int grid = 20000);

struct FluxNoiseSamples {
    std::vector<double> values;      // sin(x_ext + eps)
    double spurious_average = 0.0;   // sample mean of the sin(eps) term
};
FluxNoiseSamples flux_noise_prefactor(const DriveSpec& spec, double epsilon, const std::vector<double>& times);

}  // namespace gkpmod
