#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gkpmod/circuit.hpp"

using namespace gkpmod;

namespace {

constexpr double kHbar = 1.054571817e-34, kE = 1.602176634e-19;
constexpr double kTwoPi = 2 * kPi;

CircuitSpec midpoint(double delta = 1.0) {
    return circuit_from_physical(10e9, 2e-9, 10e9, 0.2e-9, 0.5e9, 0.01, delta);
}

const ReportRow& row(const TableReport& r, const std::string& name) {
    for (auto& x : r.rows)
        if (x.quantity == name) return x;
    throw std::runtime_error("missing row " + name);
}

}  // namespace

TEST_CASE("physical parameters map onto circuit energies") {
    auto s = midpoint();
    // flux quantum form: E_L = (Phi_0 / 2 pi)^2 / L / hbar
    double phi0 = kTwoPi * kHbar / (2 * kE);
    double el_a = (phi0 / kTwoPi) * (phi0 / kTwoPi) / 2e-9 / kHbar;
    CHECK(s.E_L_A == doctest::Approx(el_a).epsilon(1e-12));
    CHECK(s.E_J == doctest::Approx(kTwoPi * 10e9));
    auto d = derive_params(s, kPi / 2);
    CHECK(d.omega_A / kTwoPi == doctest::Approx(10e9).epsilon(1e-12));
    CHECK(d.omega_T / kTwoPi == doctest::Approx(0.5e9).epsilon(1e-12));
    CHECK(d.xi_A == doctest::Approx(std::sqrt(d.omega_A / (2 * s.E_L_A))).epsilon(1e-12));
    CHECK(d.xi_T < d.xi_A);
    CHECK(d.xi_A < 1.0);
    CHECK(d.omega_A > d.omega_T);
}

TEST_CASE("derived coupling and Kerr terms") {
    auto s = midpoint();
    auto d = derive_params(s, kPi / 2);
    CHECK(std::abs(d.cross_kerr) < 1e-6 * d.g);
    CHECK(std::abs(d.self_kerr_A) < 1e-6 * d.g);
    CHECK(std::abs(d.self_kerr_T) < 1e-6 * d.g);
    CHECK(d.g / kTwoPi >= 3e6);
    CHECK(d.g / kTwoPi <= 15e6);
    CHECK(d.t_coupl == doctest::Approx(2 * std::sqrt(2 * kPi) / (s.E_J * d.xi_T * d.xi_A * d.xi_A)).epsilon(1e-12));
    CHECK(d.cubic_ratio == doctest::Approx(d.xi_T * d.xi_T / (d.xi_A * d.xi_A)).epsilon(1e-12));

    auto half = derive_params(midpoint(0.5), kPi / 2);
    CHECK(half.g == doctest::Approx(0.5 * d.g).epsilon(1e-12));
    CHECK(derive_params(s, 0.3).g == doctest::Approx(d.g).epsilon(1e-12));

    auto top = derive_params(s, kPi);
    CHECK(top.omega_A == doctest::Approx(std::sqrt(8 * s.E_C_A * (s.E_L_A + s.E_J))).epsilon(1e-12));
    auto bottom = derive_params(s, 0.0);
    CHECK(top.omega_A > d.omega_A);
    CHECK(d.omega_A > bottom.omega_A);
    CHECK(top.omega_T > d.omega_T);
    CHECK(d.omega_T > bottom.omega_T);
    CHECK(bottom.cross_kerr == doctest::Approx(s.E_J * std::pow(bottom.xi_A * bottom.xi_T, 2)).epsilon(1e-12));
}

TEST_CASE("regime checks") {
    auto s = midpoint();
    s.E_J *= 10;
    CHECK_THROWS_AS(derive_params(s), RegimeError);
    auto rep = validate_table(s);
    CHECK_FALSE(rep.all_pass);
    CHECK_FALSE(row(rep, "E_J/E_L_A").pass);

    auto c = midpoint();
    c.E_C_A = 0.2 * c.E_L_A;
    CHECK_THROWS_AS(check_regime(c), RegimeError);
}

TEST_CASE("table bands at the midpoint spec") {
    auto s = midpoint();
    auto rep = validate_table(s);
    auto d = derive_params(s, kPi / 2);
    CHECK(row(rep, "g/2pi").pass);
    CHECK(row(rep, "cross_kerr/g").pass);
    CHECK(row(rep, "cubic/g").pass);
    CHECK(row(rep, "kappa_c*t_coupl*nbar").pass);
    CHECK(row(rep, "kappa_c*t_coupl*nbar").value == doctest::Approx(1e4 * d.t_coupl * 3.0).epsilon(1e-12));

    // with g = E_J xi_T xi_A^2 / 2 the self-Kerr ratio is tied to the other two
    double cross = row(rep, "cross_kerr/g").value, cubic = row(rep, "cubic/g").value;
    CHECK(row(rep, "self_kerr_T/g").value == doctest::Approx(cross * cubic / 4).epsilon(1e-12));
    CHECK(row(rep, "self_kerr_T/g").value < 1e-3);
    CHECK_FALSE(rep.all_pass);

    double range = (oscillator_frequency(s.E_C_A, s.E_L_A, s.E_J, kPi) - oscillator_frequency(s.E_C_A, s.E_L_A, s.E_J, 0)) / kTwoPi;
    CHECK(row(rep, "f_A range").value == doctest::Approx(range).epsilon(1e-12));
    CHECK(row(rep, "f_A range").informational);
}

TEST_CASE("potential minimum") {
    auto s = midpoint();
    auto z = potential_minimum(s, 0.0);
    CHECK(z.x_A == 0.0);
    CHECK(z.x_T == 0.0);

    auto m = potential_minimum(s, kPi / 2);
    CHECK(m.within_bound);
    CHECK(m.opposite_signs);
    CHECK(m.x_T == doctest::Approx(s.E_J / s.E_L_T).epsilon(0.05));
    CHECK(m.x_A == doctest::Approx(-s.E_J / s.E_L_A).epsilon(0.05));
    // central-difference gradient vanishes at the reported point
    const double h = 1e-7;
    double ga = (potential(s, m.x_A + h, m.x_T, kPi / 2) - potential(s, m.x_A - h, m.x_T, kPi / 2)) / (2 * h);
    double gt = (potential(s, m.x_A, m.x_T + h, kPi / 2) - potential(s, m.x_A, m.x_T - h, kPi / 2)) / (2 * h);
    CHECK(std::abs(ga) < 1e-6 * s.E_J);
    CHECK(std::abs(gt) < 1e-6 * s.E_J);

    double prev = 0.0;
    for (double x = 0.1; x <= kPi / 2 + 1e-12; x += 0.1) {
        auto r = potential_minimum(s, x);
        double shift = std::hypot(r.x_A, r.x_T);
        CHECK(shift > prev);
        prev = shift;
    }

    auto weak = s;
    weak.E_J *= 0.01;
    auto w = potential_minimum(weak, kPi / 2);
    CHECK(w.x_T / m.x_T == doctest::Approx(0.01).epsilon(0.02));
}
