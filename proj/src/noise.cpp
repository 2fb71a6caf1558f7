#include "gkpmod/noise.hpp"

#include <cstdio>

namespace gkpmod {

double single_loss_weight(const AncillaPrep& prep, const LossParams& loss) {
    if (!(loss.gamma >= 0.0)) throw std::invalid_argument("loss gamma must be nonnegative");
    double w = prep.mean_photons() * loss.gamma;
    if (w >= 0.5) throw RegimeError("single-loss expansion needs gamma |alpha|^2 < 0.5, got " + std::to_string(w));
    return w;
}

AncillaPrep damped_prep(const AncillaPrep& prep, const LossParams& loss) {
    double f = std::exp(loss.half_exponent ? -0.5 * loss.gamma : -loss.gamma);
    AncillaPrep d = prep;
    d.alpha *= f;
    d.env_amplitude *= f;
    return d;
}

void apply_loss_dephasing_q(CMat& rho_q, double coupling_scale, const QuadratureBasis& qb) {
    const double a = coupling_scale * kSqrtPi;
    for (int k = 0; k < qb.dim(); ++k)
        for (int l = 0; l < qb.dim(); ++l) {
            double x = a * (qb.q()(k) - qb.q()(l));
            double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
            rho_q(k, l) *= std::polar(sinc, -x);
        }
}

LossyPost lossy_post_q(const CMat& rho_q, const QuadratureBasis& qb, const AncillaPrep& prep, cplx beta,
                       const LossParams& loss) {
    const double w = single_loss_weight(prep, loss);
    LossyPost out;
    if (loss.gamma == 0.0) {
        out.rho_q = apply_diagonal_q(rho_q, kraus_diagonal(beta, prep, qb));
        apply_env_dephasing_q(out.rho_q, prep.env_amplitude, prep.coupling_scale, qb);
        out.no_loss_part = out.rho_q.trace().real();
    } else {
        AncillaPrep damped = damped_prep(prep, loss);
        out.rho_q = apply_diagonal_q(rho_q, kraus_diagonal(beta, damped, qb));
        apply_env_dephasing_q(out.rho_q, damped.env_amplitude, prep.coupling_scale, qb);
        out.rho_q *= (1.0 - w);
        out.no_loss_part = out.rho_q.trace().real();
        CMat lost = rho_q;
        apply_loss_dephasing_q(lost, prep.coupling_scale, qb);
        lost = apply_diagonal_q(lost, kraus_diagonal(beta, prep, qb));
        apply_env_dephasing_q(lost, prep.env_amplitude, prep.coupling_scale, qb);
        out.rho_q += w * lost;
    }
    out.density = out.rho_q.trace().real();
    if (!(out.density > kZeroProbabilityFloor)) throw ZeroProbability("outcome density below floor");
    out.rho_q /= out.density;
    return out;
}

std::pair<DensityOperator, double> lossy_measurement(const DensityOperator& rho_in, const AncillaPrep& prep,
                                                     cplx beta, const LossParams& loss) {
    auto qb = QuadratureBasis::get(rho_in.space.dim);
    LossyPost p = lossy_post_q(qb->to_q(rho_in.rho), *qb, prep, beta, loss);
    return {DensityOperator{qb->to_fock(p.rho_q), rho_in.space}, p.density};
}

MeasurementRecord sample_lossy_outcome(const RVec& pop, const QuadratureBasis& qb, const AncillaPrep& prep,
                                       const LossParams& loss, Rng& rng) {
    const double w = single_loss_weight(prep, loss);
    AncillaPrep damped = damped_prep(prep, loss);
    bool lost = rng.uniform() < w;
    MeasurementRecord rec = sample_from_populations(pop, lost ? prep : damped, qb, rng);
    rec.probability_density = (1.0 - w) * density_from_populations(pop, damped, qb, rec.beta) +
                              w * density_from_populations(pop, prep, qb, rec.beta);
    return rec;
}

double lossy_delta_p(double alpha_sq_gamma, double delta_p_in) {
    if (!(alpha_sq_gamma >= 0.0 && alpha_sq_gamma < 1.0)) throw std::invalid_argument("alpha^2 gamma must lie in [0, 1)");
    return std::sqrt(delta_p_in * delta_p_in - std::log(1.0 - alpha_sq_gamma) / kPi);
}

AncillaPrep readout_loss(const AncillaPrep& prep, double eta_eff) {
    if (!(eta_eff > 0.0 && eta_eff <= 1.0)) throw std::invalid_argument("readout efficiency must lie in (0, 1]");
    AncillaPrep out = prep;
    double a = std::abs(prep.alpha);
    out.alpha = prep.alpha * std::sqrt(eta_eff);
    double lost = a * a * (1.0 - eta_eff) + prep.env_amplitude * prep.env_amplitude;
    out.env_amplitude = std::sqrt(lost);
    return out;
}

CMat hermitian_exp(const CMat& h, double t) {
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    if (es.info() != Eigen::Success) throw ConvergenceFailure("Hermitian eigensolver failed");
    CVec ph(h.rows());
    for (int k = 0; k < h.rows(); ++k) ph(k) = std::polar(1.0, t * es.eigenvalues()(k));
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

namespace {

RMat real_ladder(int dim) {
    RMat a = RMat::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

CMat symmetric_exp(const RMat& h, double t) {
    Eigen::SelfAdjointEigenSolver<RMat> es(h);
    if (es.info() != Eigen::Success) throw ConvergenceFailure("symmetric eigensolver failed");
    CVec ph(h.rows());
    for (int k = 0; k < h.rows(); ++k) ph(k) = std::polar(1.0, t * es.eigenvalues()(k));
    CMat v = es.eigenvectors().cast<cplx>();
    return v * ph.asDiagonal() * v.transpose();
}

void check_cubic(const CubicParams& cubic) {
    if (!(cubic.strength_ratio >= 0.0 && cubic.strength_ratio <= 0.05))
        throw std::invalid_argument("cubic strength ratio must lie in [0, 0.05]");
}

}  // namespace

CMat cubic_generator(int dim) {
    RMat a = real_ladder(dim);
    RMat ad = a.transpose();
    RMat s = a + ad;
    return (s * s * s - a * a * a - ad * ad * ad).cast<cplx>();
}

CubicUnitaries cubic_unitary(const AncillaPrep& prep, const CubicParams& cubic, FockSpace target, int ancilla_cutoff) {
    check_cubic(cubic);
    if (ancilla_cutoff < 1) throw std::invalid_argument("ancilla cutoff must be positive");
    const int d = target.dim;
    const double eps = cubic.epsilon3();
    auto qb = QuadratureBasis::get(d);
    CMat v = qb->vectors().cast<cplx>();
    CubicUnitaries out;
    out.params = cubic;
    if (cubic.corrected_drive || eps == 0.0) {
        for (int n = 0; n < ancilla_cutoff; ++n) {
            CVec ph(d);
            for (int k = 0; k < d; ++k) {
                double q = qb->q()(k);
                ph(k) = std::polar(1.0, 2.0 * kSqrtPi * (n - prep.counter_c) * q + 2.0 * kSqrt2 * eps * q * q * q);
            }
            out.u.push_back(v * ph.asDiagonal() * v.transpose());
        }
        return out;
    }
    RMat a = real_ladder(d);
    RMat qm = (a + a.transpose()) / kSqrt2;
    RMat g = cubic_generator(d).real();
    CMat counter = v * qb->phases(-2.0 * kSqrtPi * prep.counter_c).asDiagonal() * v.transpose();
    for (int n = 0; n < ancilla_cutoff; ++n) {
        RMat h = 2.0 * kSqrtPi * n * qm + eps * g;
        out.u.push_back(counter * symmetric_exp(h, 1.0));
    }
    return out;
}

CMat cubic_factorized_approx(const CubicParams& cubic, int n, FockSpace target) {
    check_cubic(cubic);
    const int d = target.dim;
    const double eps = cubic.epsilon3();
    RMat a = real_ladder(d);
    RMat ad = a.transpose();
    RMat qm = (a + ad) / kSqrt2;
    CMat pp = symmetric_exp(2.0 * kSqrtPi * n * qm, 1.0);
    CMat q3 = symmetric_exp(2.0 * kSqrt2 * eps * qm * qm * qm, 1.0);
    CMat b3 = symmetric_exp(a * a * a + ad * ad * ad, -eps);
    // exp(A + B) = exp(A) exp(B) exp(-[A, B]/2) + ..., which puts a minus sign on the squeezing factor
    RMat k = -(3.0 * kSqrtPi * eps / kSqrt2) * n * (ad * ad - a * a);
    // exp(K) for real antisymmetric K is exp(i H) with H = -i K Hermitian
    CMat sq = hermitian_exp(cplx(0, -1) * k.cast<cplx>(), 1.0);
    return pp * q3 * b3 * sq;
}

CubicMeasurement::CubicMeasurement(const StateVector& psi, const AncillaPrep& prep, const CubicUnitaries& unitaries)
    : psi_(psi), prep_(prep) {
    const int nlev = static_cast<int>(unitaries.u.size());
    const int d = psi.space.dim;
    v_.resize(d, nlev);
    for (int n = 0; n < nlev; ++n) v_.col(n) = unitaries.u[n] * psi.amp;
    gram_ = v_.adjoint() * v_;
}

CVec CubicMeasurement::coefficients_(cplx beta) const {
    const int nlev = static_cast<int>(v_.cols());
    const double pref = std::exp(-0.5 * (std::norm(prep_.alpha) + std::norm(beta))) / kSqrtPi;
    const cplx z = std::conj(beta) * prep_.alpha;
    CVec c(nlev);
    cplx term = pref;
    for (int n = 0; n < nlev; ++n) {
        c(n) = term;
        term *= z / static_cast<double>(n + 1);
    }
    return c;
}

double CubicMeasurement::density(cplx beta) const {
    CVec c = coefficients_(beta);
    return c.dot(gram_ * c).real() / psi_.amp.squaredNorm();
}

StateVector CubicMeasurement::post(cplx beta) const {
    CVec out = v_ * coefficients_(beta);
    double nrm = out.norm();
    if (!(nrm * nrm > kZeroProbabilityFloor)) throw ZeroProbability("outcome density below floor");
    return {out / nrm, psi_.space, psi_.leakage};
}

double CubicMeasurement::edge_weight(cplx beta) const {
    CVec amp = post(beta).amp;
    return amp.tail(std::max<int>(1, amp.size() / 10)).squaredNorm();
}

cplx CubicMeasurement::max_likelihood(double spacing) const {
    return maximize_on_disk([&](cplx b) { return density(b); }, std::abs(prep_.alpha) + 4.0, spacing);
}

CoupledQuadrature flux_offset_coupling(double epsilon, int half_period_index, int branch) {
    if (!(std::abs(epsilon) < 0.3)) throw std::invalid_argument("flux offset must satisfy |epsilon| < 0.3");
    int parity = (half_period_index % 2 == 0) ? 1 : -1;
    return {std::cos(epsilon), std::sin(epsilon), -branch * parity};
}

double net_rotation(double epsilon, int n_half_periods, int branch) {
    if (n_half_periods <= 0) return 0.0;
    double acc = 0.0;
    for (int k = 0; k < n_half_periods; ++k) {
        auto c = flux_offset_coupling(epsilon, k, branch);
        acc += c.sign * std::atan2(c.sin_part, c.cos_part);
    }
    return acc / n_half_periods;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "param,value,delta_q,delta_p\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, ",%.15g,%.15g,%.15g\n", r.value, r.delta_q, r.delta_p);
        out += r.param + buf;
    }
    return out;
}

}  // namespace gkpmod
