#include "gkpmod/modular_measure.hpp"

#include <algorithm>

namespace gkpmod {

AncillaPrep make_prep(cplx alpha, bool counter_displacement_on, int fock_cutoff, double threshold) {
    AncillaPrep p;
    p.alpha = alpha;
    p.counter_displacement_on = counter_displacement_on;
    p.counter_c = counter_displacement_on ? std::norm(alpha) / 2.0 : 0.0;
    double nbar = std::norm(alpha);
    if (fock_cutoff > 0) {
        p.fock_cutoff = fock_cutoff;
        p.leakage = poisson_tail(nbar, fock_cutoff);
        if (p.leakage > threshold)
            throw TruncationError("ancilla cutoff " + std::to_string(fock_cutoff) + " leaks " +
                                  std::to_string(p.leakage));
    } else {
        int n = 1;
        while (poisson_tail(nbar, n) > threshold) ++n;
        p.fock_cutoff = n;
        p.leakage = poisson_tail(nbar, n);
    }
    return p;
}

MeasurementRecord make_record(cplx beta, const AncillaPrep& prep, double density) {
    MeasurementRecord r;
    r.beta = beta;
    r.phi = wrapped_arg(beta);
    r.concentration = 2.0 * std::abs(prep.alpha) * std::abs(beta);
    r.probability_density = density;
    return r;
}

CVec kraus_diagonal(cplx beta, const AncillaPrep& prep, const QuadratureBasis& qb) {
    const double pref = std::exp(-0.5 * (std::norm(prep.alpha) + std::norm(beta))) / kSqrtPi;
    const cplx z = std::conj(beta) * prep.alpha;
    const double t = prep.coupling_scale * 2.0 * kSqrtPi;
    const int nmax = prep.fock_cutoff - 1;
    CVec m(qb.dim());
    for (int k = 0; k < qb.dim(); ++k) {
        double th = t * qb.q()(k);
        cplx zw = z * std::polar(1.0, th);
        cplx acc = 1.0;
        for (int n = nmax; n >= 1; --n) acc = 1.0 + acc * zw / static_cast<double>(n);
        m(k) = pref * acc * std::polar(1.0, -prep.counter_c * th);
    }
    return m;
}

OperatorHandle measurement_operator(cplx beta, const AncillaPrep& prep, FockSpace target) {
    auto qb = QuadratureBasis::get(target.dim);
    CVec m = kraus_diagonal(beta, prep, *qb);
    CMat vc = qb->vectors().cast<cplx>();
    return {vc * m.asDiagonal() * vc.transpose(), OpLabel::custom, 0.0};
}

RVec q_populations(const StateVector& psi) {
    auto qb = QuadratureBasis::get(psi.space.dim);
    RVec pop = qb->to_q(psi.amp).cwiseAbs2();
    return pop / pop.sum();
}

RVec q_populations(const DensityOperator& rho) {
    auto qb = QuadratureBasis::get(rho.space.dim);
    const RMat& v = qb->vectors();
    RVec pop(qb->dim());
    CMat rv = rho.rho * v.cast<cplx>();
    for (int k = 0; k < qb->dim(); ++k) pop(k) = std::max(0.0, v.col(k).cast<cplx>().dot(rv.col(k)).real());
    return pop / pop.sum();
}

double density_from_populations(const RVec& pop, const AncillaPrep& prep, const QuadratureBasis& qb, cplx beta) {
    CVec m = kraus_diagonal(beta, prep, qb);
    return pop.dot(m.cwiseAbs2());
}

double outcome_density(const DensityOperator& rho_in, const AncillaPrep& prep, cplx beta) {
    auto qb = QuadratureBasis::get(rho_in.space.dim);
    return density_from_populations(q_populations(rho_in), prep, *qb, beta);
}

MeasurementRecord sample_from_populations(const RVec& pop, const AncillaPrep& prep, const QuadratureBasis& qb,
                                          Rng& rng) {
    RVec cum(pop.size());
    double run = 0.0;
    for (int k = 0; k < pop.size(); ++k) cum(k) = (run += pop(k));
    int k = rng.discrete_from_cumulative(cum);
    double th = prep.coupling_scale * 2.0 * kSqrtPi * qb.q()(k);
    cplx beta = rng.complex_normal(prep.alpha * std::polar(1.0, th), 1.0);
    return make_record(beta, prep, density_from_populations(pop, prep, qb, beta));
}

MeasurementRecord sample_outcome(const DensityOperator& rho_in, const AncillaPrep& prep, Rng& rng) {
    auto qb = QuadratureBasis::get(rho_in.space.dim);
    return sample_from_populations(q_populations(rho_in), prep, *qb, rng);
}

CMat apply_diagonal_q(const CMat& rho_q, const CVec& m) { return m.asDiagonal() * rho_q * m.conjugate().asDiagonal(); }

void apply_env_dephasing_q(CMat& rho_q, double env_amplitude, double coupling_scale, const QuadratureBasis& qb) {
    if (env_amplitude == 0.0) return;
    const double a2 = env_amplitude * env_amplitude;
    const double t = coupling_scale * 2.0 * kSqrtPi;
    for (int k = 0; k < qb.dim(); ++k)
        for (int l = 0; l < qb.dim(); ++l) {
            double d = t * (qb.q()(k) - qb.q()(l));
            rho_q(k, l) *= std::exp(a2 * cplx(std::cos(d) - 1.0, std::sin(d)));
        }
}

std::pair<DensityOperator, double> post_measurement_state(const DensityOperator& rho_in, const AncillaPrep& prep,
                                                          cplx beta) {
    auto qb = QuadratureBasis::get(rho_in.space.dim);
    CMat rq = apply_diagonal_q(qb->to_q(rho_in.rho), kraus_diagonal(beta, prep, *qb));
    apply_env_dephasing_q(rq, prep.env_amplitude, prep.coupling_scale, *qb);
    double prob = rq.trace().real();
    if (!(prob > kZeroProbabilityFloor)) throw ZeroProbability("outcome density below floor");
    rq /= prob;
    return {DensityOperator{qb->to_fock(rq), rho_in.space}, prob};
}

std::pair<StateVector, double> post_measurement_state(const StateVector& psi_in, const AncillaPrep& prep, cplx beta) {
    if (prep.env_amplitude != 0.0) throw std::invalid_argument("readout loss leaves a mixed state; use the density form");
    auto qb = QuadratureBasis::get(psi_in.space.dim);
    CVec c = qb->to_q(psi_in.amp).cwiseProduct(kraus_diagonal(beta, prep, *qb));
    double prob = c.squaredNorm() / psi_in.amp.squaredNorm();
    if (!(prob > kZeroProbabilityFloor)) throw ZeroProbability("outcome density below floor");
    c.normalize();
    return {StateVector{qb->to_fock(c), psi_in.space, psi_in.leakage}, prob};
}

cplx infer_eigenvalue(const MeasurementRecord& record, const std::optional<DensityOperator>& prior) {
    if (!prior) return std::polar(1.0, record.phi);
    auto qb = QuadratureBasis::get(prior->space.dim);
    RVec pop = q_populations(*prior);
    cplx acc = 0.0;
    for (int k = 0; k < qb->dim(); ++k) {
        double th = 2.0 * kSqrtPi * qb->q()(k);
        acc += pop(k) * std::polar(std::exp(record.concentration * (std::cos(th - record.phi) - 1.0)), th);
    }
    return std::polar(1.0, wrapped_arg(acc));
}

LogicalReadout measure_logical_Z(const DensityOperator& rho_in, const AncillaPrep& prep, Rng& rng) {
    AncillaPrep half = prep;
    half.coupling_scale = 0.5 * prep.coupling_scale;
    MeasurementRecord rec = sample_outcome(rho_in, half, rng);
    auto [post, prob] = post_measurement_state(rho_in, half, rec.beta);
    rec.probability_density = prob;
    return {std::cos(rec.phi) > 0.0 ? 0 : 1, rec, post};
}

cplx maximize_on_disk(const std::function<double(cplx)>& f, double rmax, double spacing) {
    const int n = static_cast<int>(std::floor(rmax / spacing));
    cplx best = 0.0;
    double best_p = -1.0;
    for (int i = -n; i <= n; ++i)
        for (int j = -n; j <= n; ++j) {
            cplx b(i * spacing, j * spacing);
            if (std::abs(b) > rmax) continue;
            double p = f(b);
            if (p > best_p) {
                best_p = p;
                best = b;
            }
        }
    double h = spacing / 2.0;
    const cplx dirs[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    while (h > 1e-9) {
        bool moved = false;
        for (const cplx& d : dirs) {
            cplx b = best + h * d;
            double p = f(b);
            if (p > best_p) {
                best_p = p;
                best = b;
                moved = true;
            }
        }
        if (!moved) h /= 2.0;
    }
    return best;
}

cplx max_likelihood_beta(const RVec& pop, const AncillaPrep& prep, const QuadratureBasis& qb, double spacing) {
    return maximize_on_disk([&](cplx b) { return density_from_populations(pop, prep, qb, b); },
                            std::abs(prep.alpha) + 4.0, spacing);
}

StateVector measure_pure(const StateVector& psi, Stabilizer which, const AncillaPrep& prep, Rng& rng,
                         MeasurementRecord& record) {
    auto qb = QuadratureBasis::get(psi.space.dim);
    CVec fock = which == Stabilizer::Sp ? fourier_rotate(psi.amp, kPi / 2) : psi.amp;
    CVec c = qb->to_q(fock);
    RVec pop = c.cwiseAbs2() / c.squaredNorm();
    record = sample_from_populations(pop, prep, *qb, rng);
    c = c.cwiseProduct(kraus_diagonal(record.beta, prep, *qb));
    c.normalize();
    fock = qb->to_fock(c);
    if (which == Stabilizer::Sp) fock = fourier_rotate(fock, -kPi / 2);
    return {fock, psi.space, psi.leakage};
}

std::vector<ShotResult> run_protocol(const ProtocolConfig& config) {
    FockSpace space(config.target_dim);
    StateVector input = config.input ? *config.input : make_vacuum(space);
    if (input.space.dim != config.target_dim) throw std::invalid_argument("input state dimension mismatch");
    QuadratureBasis::get(space.dim)->sp_q();
    QuadratureBasis::get(space.dim)->n_q();
    std::vector<ShotResult> out(config.shots);
    parallel_for(config.shots, config.threads, [&](int shot) {
        Rng rng = Rng::substream(config.seed, config.stream_tag, shot);
        StateVector psi = input;
        ShotResult res;
        for (Stabilizer s : config.sequence) {
            MeasurementRecord rec;
            psi = measure_pure(psi, s, config.ancilla, rng, rec);
            res.records.push_back(rec);
        }
        res.report = effective_squeezing(psi);
        out[shot] = res;
    });
    return out;
}

}  // namespace gkpmod
