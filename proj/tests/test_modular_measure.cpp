#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/distributions/chi_squared.hpp>

#include "gkpmod/analytics.hpp"
#include "gkpmod/modular_measure.hpp"

using namespace gkpmod;

namespace {

double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

// closed-form outcome density for a state with position populations pop
double density_oracle(const RVec& pop, const RVec& q, cplx alpha, cplx beta) {
    double acc = 0.0;
    for (int k = 0; k < q.size(); ++k) {
        cplx c = alpha * std::polar(1.0, 2 * kSqrtPi * q(k));
        acc += pop(k) * std::exp(-std::norm(c - beta));
    }
    return acc / kPi;
}

struct MomentStats {
    double mean_abs, se_abs, mean_sq, se_sq;
};

MomentStats beta_moments(const RVec& pop, const AncillaPrep& prep, const QuadratureBasis& qb, int shots,
                         std::uint64_t seed) {
    std::vector<double> a(shots), s(shots);
    for (int i = 0; i < shots; ++i) {
        Rng rng = Rng::substream(seed, "moments", i);
        auto r = sample_from_populations(pop, prep, qb, rng);
        a[i] = std::abs(r.beta);
        s[i] = std::norm(r.beta);
    }
    auto stats = [](const std::vector<double>& x, double& m, double& se) {
        m = 0;
        for (double v : x) m += v;
        m /= x.size();
        double var = 0;
        for (double v : x) var += (v - m) * (v - m);
        se = std::sqrt(var / (x.size() - 1) / x.size());
    };
    MomentStats out{};
    stats(a, out.mean_abs, out.se_abs);
    stats(s, out.mean_sq, out.se_sq);
    return out;
}

}  // namespace

TEST_CASE("ancilla preparation") {
    auto p = make_prep(std::sqrt(3.0));
    CHECK(p.mean_photons() == doctest::Approx(3.0));
    CHECK(p.counter_c == doctest::Approx(1.5));
    CHECK(p.leakage <= 1e-6);
    CHECK(make_prep(std::sqrt(3.0), false).counter_c == 0.0);
    CHECK_THROWS_AS(make_prep(2.0, true, 5), TruncationError);

    auto rec = make_record(cplx(-1.0, -0.0), p, 0.1);
    CHECK(rec.phi == doctest::Approx(kPi));
    CHECK(rec.concentration == doctest::Approx(2 * std::sqrt(3.0)));
}

TEST_CASE("Kraus sum matches the closed-form effect operator") {
    const int dim = 200;
    auto qb = QuadratureBasis::get(dim);
    cplx alpha = std::sqrt(3.0);
    auto prep = make_prep(alpha, true, 40, 1e-12);
    for (cplx beta : {alpha, cplx(0.4, -1.3), cplx(-2.0, 0.7)}) {
        CVec m = kraus_diagonal(beta, prep, *qb);
        double K = 2 * std::abs(alpha) * std::abs(beta), phi = std::arg(beta);
        for (int k = 0; k < dim; ++k) {
            double ref = std::exp(-std::norm(alpha) - std::norm(beta) +
                                  K * std::cos(2 * kSqrtPi * qb->q()(k) - phi)) / kPi;
            CHECK(std::norm(m(k)) == doctest::Approx(ref).epsilon(1e-8));
        }
    }
}

TEST_CASE("empty ancilla gives no information") {
    const int dim = 60;
    auto prep = make_prep(0.0);
    cplx beta(0.8, -0.3);
    auto m = measurement_operator(beta, prep, FockSpace(dim)).matrix;
    CMat ref = CMat::Identity(dim, dim) * std::exp(-0.5 * std::norm(beta)) / kSqrtPi;
    CHECK(max_abs(m - ref) < 1e-12);

    auto sq = make_squeezed_vacuum(1.7, FockSpace(dim));
    auto rho = DensityOperator::from_pure(sq);
    CHECK(outcome_density(rho, prep, beta) == doctest::Approx(std::exp(-std::norm(beta)) / kPi).epsilon(1e-12));
    auto [post, p] = post_measurement_state(rho, prep, beta);
    CHECK(max_abs(post.rho - rho.rho) < 1e-10);
}

TEST_CASE("measurement operators commute with the stabilizer") {
    const int dim = 300, half = 100;
    auto sq = build_operator(OpLabel::Sq, FockSpace(dim)).matrix;
    auto prep = make_prep(std::sqrt(3.0));
    for (cplx beta : {cplx(1.7, 0.2), cplx(-0.5, 2.1)}) {
        CMat m = measurement_operator(beta, prep, FockSpace(dim)).matrix;
        CMat c = m * sq - sq * m;
        CHECK(max_abs(c.topLeftCorner(half, half)) < 1e-6);
    }
}

TEST_CASE("POVM completeness on a beta grid") {
    const int dim = 200;
    auto qb = QuadratureBasis::get(dim);
    cplx alpha = std::sqrt(3.0);
    auto prep = make_prep(alpha);
    const double h = 0.1, rmax = std::abs(alpha) + 4;
    RVec acc = RVec::Zero(dim);
    for (double x = -rmax; x <= rmax + 1e-12; x += h)
        for (double y = -rmax; y <= rmax + 1e-12; y += h) {
            if (std::hypot(x, y) > rmax) continue;
            acc += kraus_diagonal(cplx(x, y), prep, *qb).cwiseAbs2() * h * h;
        }
    for (int k = 0; k < dim; ++k)
        if (qb->reliable(k)) CHECK(acc(k) == doctest::Approx(1.0).epsilon(0.01));
    CMat v = qb->vectors().cast<cplx>();
    CMat eff = v * acc.cast<cplx>().asDiagonal() * v.transpose();
    CHECK(max_abs(eff.topLeftCorner(40, 40) - CMat::Identity(40, 40)) < 0.01);
}

TEST_CASE("outcome density normalization and location") {
    const int dim = 200;
    auto vac = make_vacuum(FockSpace(dim));
    auto rho = DensityOperator::from_pure(vac);
    cplx alpha = std::sqrt(3.0);
    auto prep = make_prep(alpha);
    auto qb = QuadratureBasis::get(dim);
    RVec pop = q_populations(vac);

    const double h = 0.08, rmax = std::abs(alpha) + 5;
    double total = 0.0, best = -1.0;
    cplx arg_best;
    for (double x = -rmax; x <= rmax; x += h)
        for (double y = -rmax; y <= rmax; y += h) {
            double p = density_from_populations(pop, prep, *qb, cplx(x, y));
            total += p * h * h;
            if (p > best) {
                best = p;
                arg_best = cplx(x, y);
            }
        }
    CHECK(total == doctest::Approx(1.0).epsilon(0.01));
    CHECK(std::abs(arg_best) == doctest::Approx(std::abs(alpha)).epsilon(0.1));
    CHECK(std::abs(std::arg(arg_best)) < 0.2);

    auto wide = make_prep(alpha, true, 40, 1e-12);
    for (cplx beta : {cplx(1.0, 0.5), cplx(-1.2, -1.9)})
        CHECK(outcome_density(rho, wide, beta) ==
              doctest::Approx(density_oracle(pop, qb->q(), alpha, beta)).epsilon(1e-10));
}

TEST_CASE("sampled outcomes follow the outcome density") {
    const int dim = 200, shots = 10000;
    auto qb = QuadratureBasis::get(dim);
    auto sq = make_squeezed_vacuum(1.5, FockSpace(dim));
    RVec pop = q_populations(sq);
    cplx alpha = std::sqrt(2.0);
    auto prep = make_prep(alpha);

    const double lo = -4.5, w = 0.75;
    const int nb = 12;
    std::vector<double> counts(nb * nb, 0.0), expected(nb * nb, 0.0);
    for (int i = 0; i < shots; ++i) {
        Rng rng = Rng::substream(7, "hist", i);
        auto r = sample_from_populations(pop, prep, *qb, rng);
        int bx = static_cast<int>(std::floor((r.beta.real() - lo) / w));
        int by = static_cast<int>(std::floor((r.beta.imag() - lo) / w));
        if (bx >= 0 && bx < nb && by >= 0 && by < nb) counts[bx * nb + by] += 1;
    }
    const int sub = 5;
    for (int bx = 0; bx < nb; ++bx)
        for (int by = 0; by < nb; ++by) {
            double acc = 0.0;
            for (int i = 0; i < sub; ++i)
                for (int j = 0; j < sub; ++j) {
                    cplx b(lo + (bx + (i + 0.5) / sub) * w, lo + (by + (j + 0.5) / sub) * w);
                    acc += density_oracle(pop, qb->q(), alpha, b);
                }
            expected[bx * nb + by] = acc * (w * w) / (sub * sub) * shots;
        }
    double chi2 = 0.0;
    int df = -1;
    for (int i = 0; i < nb * nb; ++i) {
        if (expected[i] < 5) continue;
        chi2 += (counts[i] - expected[i]) * (counts[i] - expected[i]) / expected[i];
        ++df;
    }
    double pval = boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), chi2));
    CHECK(pval > 0.01);

    auto empty = make_prep(0.0);
    double sx = 0, sxx = 0;
    for (int i = 0; i < 4000; ++i) {
        Rng rng = Rng::substream(8, "empty", i);
        auto r = sample_from_populations(pop, empty, *qb, rng);
        sx += r.beta.real();
        sxx += std::norm(r.beta);
    }
    CHECK(std::abs(sx / 4000) < 4 * std::sqrt(0.5 / 4000));
    CHECK(sxx / 4000 == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("beta moments do not depend on the input state") {
    const int dim = 200, shots = 10000;
    auto qb = QuadratureBasis::get(dim);
    double a = std::sqrt(3.0);
    auto prep = make_prep(a);
    auto vac = beta_moments(q_populations(make_vacuum(FockSpace(dim))), prep, *qb, shots, 3);
    auto sqz = beta_moments(q_populations(make_squeezed_vacuum(3.0, FockSpace(dim))), prep, *qb, shots, 4);
    for (auto m : {vac, sqz}) {
        CHECK(std::abs(m.mean_sq - (1 + a * a)) < 3 * m.se_sq);
        CHECK(std::abs(m.mean_abs - mean_abs_beta(a)) < 3 * m.se_abs);
    }
    CHECK(std::abs(vac.mean_abs - sqz.mean_abs) < 3 * std::hypot(vac.se_abs, sqz.se_abs));
}

TEST_CASE("eigenvalue inference") {
    auto prep = make_prep(std::sqrt(3.0));
    auto rec = make_record(std::polar(2.0, 0.3), prep, 0.0);
    cplx flat = infer_eigenvalue(rec);
    CHECK(std::abs(flat - std::polar(1.0, 0.3)) < 1e-15);

    // the tilted weight exp(6 cos) has Fourier content that a smaller truncation cannot resolve
    const int dim = 500;
    auto prior = DensityOperator::from_pure(make_vacuum(FockSpace(dim)));
    auto r0 = make_record(2.0, prep, 0.0);
    CHECK(std::abs(std::arg(infer_eigenvalue(r0, prior))) < 1e-10);

    MeasurementRecord r6;
    r6.phi = 0.3;
    r6.concentration = 6.0;
    double refined = std::arg(infer_eigenvalue(r6, prior));
    // direct integration over the vacuum position density
    cplx acc = 0.0;
    const double h = 1e-3;
    for (double q = -8; q <= 8; q += h) {
        double th = 2 * kSqrtPi * q;
        acc += std::exp(-q * q) / kSqrtPi * std::polar(std::exp(6.0 * std::cos(th - 0.3)), th) * h;
    }
    CHECK(refined == doctest::Approx(std::arg(acc)).epsilon(1e-6));
    CHECK(refined > 0.0);
    CHECK(refined < 0.3);
}

TEST_CASE("logical Z readout") {
    const int dim = 200, shots = 300;
    auto prep = make_prep(std::sqrt(3.0));
    AncillaPrep half = prep;
    half.coupling_scale = 0.5;
    auto qb = QuadratureBasis::get(dim);
    for (auto [logical, bit] : {std::pair{Logical::zero, 0}, std::pair{Logical::one, 1}}) {
        auto psi = make_gkp_approx(0.25, logical, FockSpace(dim));
        RVec pop = q_populations(psi);
        // probability of the right half plane from the outcome density
        const double h = 0.05, rmax = std::sqrt(3.0) + 5;
        double right = 0.0;
        for (double x = h / 2; x <= rmax; x += h)
            for (double y = -rmax; y <= rmax; y += h) right += density_from_populations(pop, half, *qb, cplx(x, y)) * h * h;
        double p_ok = bit == 0 ? right : 1.0 - right;
        CHECK(p_ok > 0.9);

        auto rho = DensityOperator::from_pure(psi);
        int ok = 0;
        for (int i = 0; i < shots; ++i) {
            Rng rng = Rng::substream(11, "logical", i);
            ok += measure_logical_Z(rho, prep, rng).bit == bit;
        }
        double frac = static_cast<double>(ok) / shots;
        CHECK(std::abs(frac - p_ok) < 4 * std::sqrt(p_ok * (1 - p_ok) / shots) + 1e-3);
    }

    auto rho = DensityOperator::from_pure(make_vacuum(FockSpace(40)));
    int ones = 0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        Rng rng = Rng::substream(12, "uniform", i);
        ones += measure_logical_Z(rho, make_prep(0.0), rng).bit;
    }
    CHECK(std::abs(ones / static_cast<double>(n) - 0.5) < 4 * std::sqrt(0.25 / n));
}

TEST_CASE("averaged channel preserves the conjugate stabilizer") {
    const int dim = 300;
    auto qb = QuadratureBasis::get(dim);
    auto prep = make_prep(std::sqrt(3.0));
    auto vac = make_vacuum(FockSpace(dim));
    CVec c = qb->to_q(vac.amp);
    CMat rho_q = c * c.adjoint();
    const double h = 0.1, rmax = std::sqrt(3.0) + 4;
    CMat kernel = CMat::Zero(dim, dim);
    for (double x = -rmax; x <= rmax + 1e-12; x += h)
        for (double y = -rmax; y <= rmax + 1e-12; y += h) {
            if (std::hypot(x, y) > rmax) continue;
            CVec m = kraus_diagonal(cplx(x, y), prep, *qb);
            kernel += (m * m.adjoint()) * h * h;
        }
    CMat avg = rho_q.cwiseProduct(kernel);
    CMat rho_bar = qb->to_fock(avg);
    auto sp = build_operator(OpLabel::Sp, FockSpace(dim)).matrix;
    double before = std::abs(vac.amp.dot(sp * vac.amp));
    double after = std::abs((sp * rho_bar).trace());
    CHECK(after == doctest::Approx(before).epsilon(0.01));
}

TEST_CASE("post-measurement squeezing follows the concentration") {
    const int dim = 500;
    auto input = make_squeezed_vacuum(3.0, FockSpace(dim));
    auto prep = make_prep(2.0);
    auto qb = QuadratureBasis::get(dim);
    int checked = 0;
    for (int i = 0; i < 40 && checked < 10; ++i) {
        Rng rng = Rng::substream(5, "conc", i);
        MeasurementRecord rec;
        auto out = measure_pure(input, Stabilizer::Sq, prep, rng, rec);
        if (rec.concentration < 4.0) continue;
        auto r = effective_squeezing(out);
        CHECK(r.delta_q == doctest::Approx(std::sqrt(1.0 / (2 * kPi * rec.concentration))).epsilon(0.10));
        ++checked;
    }
    CHECK(checked == 10);
}

TEST_CASE("maximum-likelihood outcome for vacuum input") {
    const int dim = 200;
    auto qb = QuadratureBasis::get(dim);
    auto prep = make_prep(std::sqrt(3.0));
    RVec pop = q_populations(make_vacuum(FockSpace(dim)));
    cplx b = max_likelihood_beta(pop, prep, *qb);
    double pb = density_from_populations(pop, prep, *qb, b);
    for (cplx d : {cplx(0.01, 0), cplx(-0.01, 0), cplx(0, 0.01), cplx(0, -0.01)})
        CHECK(density_from_populations(pop, prep, *qb, b + d) <= pb);
    CHECK(std::abs(b.imag()) < 1e-6);
    CHECK(b.real() > 0.0);
}

TEST_CASE("protocol runner") {
    ProtocolConfig cfg;
    cfg.ancilla = make_prep(std::sqrt(3.0));
    cfg.target_dim = 500;
    cfg.sequence = {Stabilizer::Sq, Stabilizer::Sp};
    cfg.shots = 12;
    cfg.seed = 21;
    auto a = run_protocol(cfg);
    for (auto& s : a) {
        CHECK(s.records.size() == 2);
        CHECK(s.report.delta_q < 0.35);
        CHECK(s.report.delta_p < 0.35);
    }

    cfg.threads = 3;
    auto b = run_protocol(cfg);
    for (int i = 0; i < cfg.shots; ++i) {
        CHECK(a[i].records[0].beta == b[i].records[0].beta);
        CHECK(a[i].records[1].beta == b[i].records[1].beta);
        CHECK(a[i].report.delta_q == b[i].report.delta_q);
    }

    cfg.seed = 22;
    auto c = run_protocol(cfg);
    CHECK(c[0].records[0].beta != a[0].records[0].beta);
}
