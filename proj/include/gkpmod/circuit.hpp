#pragma once

#include <string>
#include <vector>

#include "gkpmod/core.hpp"

namespace gkpmod {

// all energies as angular frequencies (rad/s)
struct CircuitSpec {
    double E_J = 0.0;
    double E_C_A = 0.0;
    double E_C_T = 0.0;
    double E_L_A = 0.0;
    double E_L_T = 0.0;
    double C_J_ratio = 0.0;
    double delta_drive = 1.0;
};

double inductive_energy(double inductance_henry);  // rad/s

// oscillator frequencies are the values at x_ext = pi/2, where the junction drops out of E_L
CircuitSpec circuit_from_physical(double E_J_hz, double L_A, double f_A_hz, double L_T, double f_T_hz,
                                  double C_J_ratio, double delta_drive);

struct DerivedParams {
    double xi_A = 0.0, xi_T = 0.0;
    double omega_A = 0.0, omega_T = 0.0;
    double g = 0.0;
    double self_kerr_A = 0.0, self_kerr_T = 0.0, cross_kerr = 0.0;
    double cubic_ratio = 0.0;
    double t_coupl = 0.0;
};

// throws RegimeError when E_J >= E_L or E_C/E_L >= 0.1
void check_regime(const CircuitSpec& spec);
DerivedParams derive_params(const CircuitSpec& spec, double x_ext = kPi / 2);

double oscillator_frequency(double E_C, double E_L, double E_J, double x_ext);

struct TableBands {
    double g_lo_hz = 3e6, g_hi_hz = 15e6;
    double cross_lo = 0.02, cross_hi = 0.05;
    double self_T_lo = 1e-3, self_T_hi = 1e-2;
    double cubic_lo = 1e-3, cubic_hi = 1e-2;
    double loss_max = 0.1;  // kappa_c t_coupl |alpha|^2
    double kappa_c = 1.0 / 100e-6;
    double nbar = 3.0;
};

struct ReportRow {
    std::string quantity;
    double value;
    std::string unit;
    double band_lo, band_hi;
    bool pass;
    bool informational;  // listed for reference, not part of the band verdict
};

struct TableReport {
    std::vector<ReportRow> rows;
    bool all_pass = true;
};

TableReport validate_table(const CircuitSpec& spec, const TableBands& bands = {});

struct PotentialMinimum {
    double x_A = 0.0, x_T = 0.0;
    int iterations = 0;
    bool within_bound = false;  // |x_T| <= E_J/E_L_T (1 + tol)
    bool opposite_signs = false;
};

double potential(const CircuitSpec& spec, double x_A, double x_T, double x_ext);
PotentialMinimum potential_minimum(const CircuitSpec& spec, double x_ext, double bound_tol = 0.05);

}  // namespace gkpmod
