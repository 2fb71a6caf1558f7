#include "gkpmod/release.hpp"

#include <algorithm>

namespace gkpmod {

int ReleaseConfig::resolved_steps() const {
    if (!(kappa_open >= 0.0 && t_meas >= 0.0)) throw std::invalid_argument("release rate and time must be nonnegative");
    if (filter == ReleaseFilter::custom) return static_cast<int>(custom_filter.size());
    if (steps > 0) return steps;
    return static_cast<int>(std::ceil(kappa_open * t_meas / 0.01 - 1e-9));
}

double ReleaseConfig::kappa_dt() const {
    int j = resolved_steps();
    return j == 0 ? 0.0 : kappa_open * t_meas / j;
}

namespace {

struct Weights {
    std::vector<double> emit;    // |alpha_j| / |alpha|
    std::vector<double> filter;  // f_j sqrt(kappa dt)
};

Weights release_weights(const ReleaseConfig& cfg) {
    const int J = cfg.resolved_steps();
    const double kdt = cfg.kappa_dt();
    if (J > 0 && !(kdt > 0.0 && kdt < 1.0))
        throw RegimeError("per-step release strength kappa dt must lie in (0, 1), got " + std::to_string(kdt));
    Weights w;
    for (int j = 0; j < J; ++j) {
        double e = std::sqrt(kdt) * std::pow(1.0 - kdt, 0.5 * j);
        w.emit.push_back(e);
        double f = cfg.filter == ReleaseFilter::custom ? cfg.custom_filter[j] : std::pow(1.0 - kdt, 0.5 * j);
        w.filter.push_back(f * std::sqrt(kdt));
    }
    return w;
}

}  // namespace

std::vector<cplx> release_amplitudes(cplx alpha, const ReleaseConfig& cfg) {
    auto w = release_weights(cfg);
    std::vector<cplx> out;
    for (double e : w.emit) out.push_back(alpha * e);
    return out;
}

double release_completeness(cplx alpha, const ReleaseConfig& cfg) {
    double s = 0.0;
    for (cplx a : release_amplitudes(alpha, cfg)) s += std::norm(a);
    return s;
}

IntegratedOutcome sample_release(const RVec& pop, const QuadratureBasis& qb, const AncillaPrep& prep,
                                 const ReleaseConfig& cfg, Rng& rng) {
    auto w = release_weights(cfg);
    RVec cum(pop.size());
    double run = 0.0;
    for (int k = 0; k < pop.size(); ++k) cum(k) = (run += pop(k));
    int k = rng.discrete_from_cumulative(cum);
    cplx rot = std::polar(1.0, prep.coupling_scale * 2.0 * kSqrtPi * qb.q()(k));
    cplx z = 0.0;
    for (size_t j = 0; j < w.emit.size(); ++j) z += w.filter[j] * rng.complex_normal(prep.alpha * w.emit[j] * rot, 1.0);
    IntegratedOutcome out;
    out.I_out = kSqrt2 * z.real();
    out.Q_out = kSqrt2 * z.imag();
    out.phi_out = std::atan2(out.Q_out, out.I_out);
    out.K_eff = std::abs(prep.alpha) * std::sqrt(2.0 * (out.I_out * out.I_out + out.Q_out * out.Q_out));
    return out;
}

CVec release_kernel(const IntegratedOutcome& out, const AncillaPrep& prep, const QuadratureBasis& qb) {
    const cplx z = prep.alpha * cplx(out.I_out, -out.Q_out) / kSqrt2;
    const double t = prep.coupling_scale * 2.0 * kSqrtPi;
    CVec logm(qb.dim());
    for (int k = 0; k < qb.dim(); ++k) {
        double th = t * qb.q()(k);
        logm(k) = z * std::polar(1.0, th) - cplx(0, prep.counter_c * th);
    }
    double top = logm.real().maxCoeff();
    CVec m(qb.dim());
    for (int k = 0; k < qb.dim(); ++k) m(k) = std::exp(logm(k) - top);
    return m;
}

std::pair<IntegratedOutcome, DensityOperator> release_shot(const DensityOperator& rho_in, const AncillaPrep& prep,
                                                           const ReleaseConfig& cfg, Rng& rng) {
    auto qb = QuadratureBasis::get(rho_in.space.dim);
    CMat rq = qb->to_q(rho_in.rho);
    RVec pop = rq.diagonal().real().cwiseMax(0.0);
    pop /= pop.sum();
    IntegratedOutcome out = sample_release(pop, *qb, prep, cfg, rng);
    rq = apply_diagonal_q(rq, release_kernel(out, prep, *qb));
    double tr = rq.trace().real();
    if (!(tr > kZeroProbabilityFloor)) throw ZeroProbability("release outcome has vanishing weight");
    return {out, DensityOperator{qb->to_fock(CMat(rq / tr)), rho_in.space}};
}

std::pair<IntegratedOutcome, StateVector> release_shot(const StateVector& psi_in, const AncillaPrep& prep,
                                                       const ReleaseConfig& cfg, Rng& rng) {
    auto qb = QuadratureBasis::get(psi_in.space.dim);
    CVec c = qb->to_q(psi_in.amp);
    RVec pop = c.cwiseAbs2() / c.squaredNorm();
    IntegratedOutcome out = sample_release(pop, *qb, prep, cfg, rng);
    c = c.cwiseProduct(release_kernel(out, prep, *qb));
    double nrm = c.norm();
    if (!(nrm * nrm > kZeroProbabilityFloor)) throw ZeroProbability("release outcome has vanishing weight");
    return {out, StateVector{qb->to_fock(CVec(c / nrm)), psi_in.space, psi_in.leakage}};
}

ReleaseMoments release_moments(const AncillaPrep& prep, const ReleaseConfig& cfg) {
    double a2 = prep.mean_photons();
    double s = a2 * (1.0 - std::exp(-cfg.kappa_open * cfg.t_meas));
    double a = std::sqrt(a2);
    double bound = a > 0.0 ? 1.0 / std::sqrt(4.0 * kPi * a * std::sqrt(1.0 + a2)) : std::numeric_limits<double>::infinity();
    return {4.0 * (s + s * s), bound};
}

}  // namespace gkpmod
