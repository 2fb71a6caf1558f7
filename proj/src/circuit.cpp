#include "gkpmod/circuit.hpp"

namespace gkpmod {

namespace {
constexpr double kHbar = 1.054571817e-34;
constexpr double kElectron = 1.602176634e-19;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

double inductive_energy(double inductance_henry) { return kHbar / (4.0 * kElectron * kElectron * inductance_henry); }

CircuitSpec circuit_from_physical(double E_J_hz, double L_A, double f_A_hz, double L_T, double f_T_hz,
                                  double C_J_ratio, double delta_drive) {
    CircuitSpec s;
    s.E_J = kTwoPi * E_J_hz;
    s.E_L_A = inductive_energy(L_A);
    s.E_L_T = inductive_energy(L_T);
    double wA = kTwoPi * f_A_hz, wT = kTwoPi * f_T_hz;
    s.E_C_A = wA * wA / (8.0 * s.E_L_A);
    s.E_C_T = wT * wT / (8.0 * s.E_L_T);
    s.C_J_ratio = C_J_ratio;
    s.delta_drive = delta_drive;
    return s;
}

void check_regime(const CircuitSpec& s) {
    if (!(s.E_J > 0.0)) throw RegimeError("E_J must be positive");
    if (!(s.E_J < s.E_L_A && s.E_J < s.E_L_T)) throw RegimeError("E_J must stay below both inductive energies");
    if (!(s.E_C_A < 0.1 * s.E_L_A && s.E_C_T < 0.1 * s.E_L_T))
        throw RegimeError("charging energies must be small against inductive energies");
    if (!(s.delta_drive > 0.0 && s.delta_drive <= 1.0)) throw RegimeError("drive depth must lie in (0, 1]");
}

double oscillator_frequency(double E_C, double E_L, double E_J, double x_ext) {
    return std::sqrt(8.0 * E_C * (E_L - E_J * std::cos(x_ext)));
}

DerivedParams derive_params(const CircuitSpec& s, double x_ext) {
    check_regime(s);
    DerivedParams d;
    double c = std::cos(x_ext);
    double lA = s.E_L_A - s.E_J * c, lT = s.E_L_T - s.E_J * c;
    d.xi_A = std::pow(2.0 * s.E_C_A / lA, 0.25);
    d.xi_T = std::pow(2.0 * s.E_C_T / lT, 0.25);
    d.omega_A = std::sqrt(8.0 * s.E_C_A * lA);
    d.omega_T = std::sqrt(8.0 * s.E_C_T * lT);
    // the coupling uses the mean working point so it does not follow x_ext
    double xiA0 = std::pow(2.0 * s.E_C_A / s.E_L_A, 0.25);
    double xiT0 = std::pow(2.0 * s.E_C_T / s.E_L_T, 0.25);
    d.g = 0.5 * s.delta_drive * s.E_J * xiT0 * xiA0 * xiA0;
    d.cross_kerr = s.E_J * c * d.xi_A * d.xi_A * d.xi_T * d.xi_T;
    d.self_kerr_A = s.E_J * c * std::pow(d.xi_A, 4) / 4.0;
    d.self_kerr_T = s.E_J * c * std::pow(d.xi_T, 4) / 4.0;
    d.cubic_ratio = (xiT0 * xiT0) / (xiA0 * xiA0);
    d.t_coupl = std::sqrt(2.0 * kPi) / d.g;
    return d;
}

TableReport validate_table(const CircuitSpec& s, const TableBands& b) {
    TableReport rep;
    auto add = [&](std::string q, double v, std::string unit, double lo, double hi, bool info = false) {
        bool pass = std::isfinite(v) && v >= lo && v <= hi;
        rep.rows.push_back({std::move(q), v, std::move(unit), lo, hi, pass, info});
        if (!info && !pass) rep.all_pass = false;
    };
    bool regime_ok = true;
    try {
        check_regime(s);
    } catch (const RegimeError&) {
        regime_ok = false;
    }
    add("E_J/E_L_A", s.E_J / s.E_L_A, "", 0.0, 1.0);
    add("E_J/E_L_T", s.E_J / s.E_L_T, "", 0.0, 1.0);
    add("E_C_A/E_L_A", s.E_C_A / s.E_L_A, "", 0.0, 0.1);
    add("E_C_T/E_L_T", s.E_C_T / s.E_L_T, "", 0.0, 0.1);
    add("C_J_ratio", s.C_J_ratio, "", 0.0, 0.05);
    if (!regime_ok) {
        rep.all_pass = false;
        return rep;
    }
    // Kerr magnitudes are the peak values in time, i.e. with |cos x_ext| = 1
    DerivedParams d = derive_params(s, 0.0);
    DerivedParams m = derive_params(s, kPi / 2);
    double xiA = m.xi_A, xiT = m.xi_T;
    double cross = s.E_J * xiA * xiA * xiT * xiT;
    double selfT = s.E_J * std::pow(xiT, 4) / 4.0;
    double selfA = s.E_J * std::pow(xiA, 4) / 4.0;
    add("g/2pi", m.g / (2.0 * kPi), "Hz", b.g_lo_hz, b.g_hi_hz);
    add("cross_kerr/g", cross / m.g, "", b.cross_lo, b.cross_hi);
    add("self_kerr_T/g", selfT / m.g, "", b.self_T_lo, b.self_T_hi);
    add("cubic/g", m.cubic_ratio, "", b.cubic_lo, b.cubic_hi);
    add("kappa_c*t_coupl*nbar", b.kappa_c * m.t_coupl * b.nbar, "", 0.0, b.loss_max);
    add("self_kerr_A/g", selfA / m.g, "", 0.5, 1.0, true);
    add("t_coupl", m.t_coupl, "s", 0.2e-6, 1e-6, true);
    double fA_range = (oscillator_frequency(s.E_C_A, s.E_L_A, s.E_J, kPi) - d.omega_A) / (2.0 * kPi);
    double fT_range = (oscillator_frequency(s.E_C_T, s.E_L_T, s.E_J, kPi) - d.omega_T) / (2.0 * kPi);
    add("f_A range", fA_range, "Hz", 400e6, 600e6, true);
    add("f_T range", fT_range, "Hz", 5e6, 10e6, true);
    add("f_A", m.omega_A / (2.0 * kPi), "Hz", 0.0, 1e12, true);
    add("f_T", m.omega_T / (2.0 * kPi), "Hz", 0.0, 1e12, true);
    add("xi_A", xiA, "", 0.0, 1.0, true);
    add("xi_T", xiT, "", 0.0, 1.0, true);
    return rep;
}

double potential(const CircuitSpec& s, double x_A, double x_T, double x_ext) {
    return 0.5 * s.E_L_A * x_A * x_A + 0.5 * s.E_L_T * x_T * x_T - s.E_J * std::cos(x_T - x_A - x_ext);
}

PotentialMinimum potential_minimum(const CircuitSpec& s, double x_ext, double bound_tol) {
    check_regime(s);
    double xa = 0.0, xt = 0.0;
    PotentialMinimum r;
    for (int it = 0; it < 200; ++it) {
        double ph = xt - xa - x_ext;
        double sn = std::sin(ph), cs = std::cos(ph);
        double ga = s.E_L_A * xa - s.E_J * sn;
        double gt = s.E_L_T * xt + s.E_J * sn;
        double haa = s.E_L_A + s.E_J * cs, htt = s.E_L_T + s.E_J * cs, hat = -s.E_J * cs;
        double det = haa * htt - hat * hat;
        double da, dt;
        if (haa > 0 && det > 0) {
            da = -(htt * ga - hat * gt) / det;
            dt = -(haa * gt - hat * ga) / det;
        } else {
            da = -ga / s.E_L_A;
            dt = -gt / s.E_L_T;
        }
        double u0 = potential(s, xa, xt, x_ext), lam = 1.0;
        while (lam > 1e-8 && potential(s, xa + lam * da, xt + lam * dt, x_ext) > u0 + 1e-15 * std::abs(u0)) lam /= 2;
        xa += lam * da;
        xt += lam * dt;
        r.iterations = it + 1;
        if (std::abs(lam * da) < 1e-12 && std::abs(lam * dt) < 1e-12) {
            r.x_A = xa;
            r.x_T = xt;
            r.within_bound = std::abs(xt) <= s.E_J / s.E_L_T * (1.0 + bound_tol);
            r.opposite_signs = (xa == 0.0 && xt == 0.0) || (xa * xt < 0.0);
            return r;
        }
    }
    throw ConvergenceFailure("potential minimum search did not converge");
}

}  // namespace gkpmod
