#include "gkpmod/hilbert.hpp"

#include <algorithm>
#include <map>

#include <unsupported/Eigen/MatrixFunctions>

namespace gkpmod {

FockSpace::FockSpace(int d) : dim(d) {
    if (d < 2) throw std::invalid_argument("FockSpace needs at least two levels");
}

DensityOperator DensityOperator::from_pure(const StateVector& psi) {
    return {psi.amp * psi.amp.adjoint(), psi.space};
}

void DensityOperator::validate(double tol, double eigen_floor) const {
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) throw GkpError("density operator is not Hermitian");
    if (std::abs(rho.trace() - 1.0) > tol) throw GkpError("density operator trace differs from 1");
    Eigen::SelfAdjointEigenSolver<CMat> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < eigen_floor) throw GkpError("density operator has a negative eigenvalue");
}

QuadratureBasis::QuadratureBasis(int dim) : dim_(dim) {
    if (dim < 2) throw std::invalid_argument("QuadratureBasis needs at least two levels");
    RVec diag = RVec::Zero(dim);
    RVec sub(dim - 1);
    for (int k = 0; k < dim - 1; ++k) sub(k) = std::sqrt((k + 1) / 2.0);
    Eigen::SelfAdjointEigenSolver<RMat> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    q_ = es.eigenvalues();
    v_ = es.eigenvectors();
}

std::shared_ptr<const QuadratureBasis> QuadratureBasis::get(int dim) {
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const QuadratureBasis>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(dim);
    if (it != cache.end()) return it->second;
    auto qb = std::make_shared<const QuadratureBasis>(dim);
    cache.emplace(dim, qb);
    return qb;
}

CVec QuadratureBasis::to_q(const CVec& fock) const { return v_.transpose().cast<cplx>() * fock; }
CVec QuadratureBasis::to_fock(const CVec& qamp) const { return v_.cast<cplx>() * qamp; }

CMat QuadratureBasis::to_q(const CMat& fock) const {
    CMat vc = v_.cast<cplx>();
    return vc.transpose() * fock * vc;
}

CMat QuadratureBasis::to_fock(const CMat& qmat) const {
    CMat vc = v_.cast<cplx>();
    return vc * qmat * vc.transpose();
}

CVec QuadratureBasis::phases(double t) const {
    CVec out(dim_);
    for (int k = 0; k < dim_; ++k) out(k) = std::polar(1.0, t * q_(k));
    return out;
}

// exp(i t q) conjugated by R(-pi/2), i.e. exp(-i t p), expressed in the q eigenbasis
CMat QuadratureBasis::rotated_(double t) const {
    CMat vc = v_.cast<cplx>();
    CMat fock = vc * phases(t).asDiagonal() * vc.transpose();
    return to_q(fourier_rotate(fock, -kPi / 2));
}

const CMat& QuadratureBasis::sp_q() const {
    std::call_once(sp_once_, [this] { sp_q_ = rotated_(2.0 * kSqrtPi); });
    return sp_q_;
}

const CMat& QuadratureBasis::x_q() const {
    std::call_once(x_once_, [this] { x_q_ = rotated_(kSqrtPi); });
    return x_q_;
}

const RMat& QuadratureBasis::n_q() const {
    std::call_once(n_once_, [this] {
        RVec n = RVec::LinSpaced(dim_, 0.0, dim_ - 1.0);
        n_q_ = v_.transpose() * n.asDiagonal() * v_;
    });
    return n_q_;
}

CVec fourier_rotate(const CVec& fock, double theta) {
    CVec out = fock;
    for (int n = 0; n < fock.size(); ++n) out(n) *= std::polar(1.0, theta * n);
    return out;
}

CMat fourier_rotate(const CMat& fock, double theta) {
    CMat out = fock;
    for (int m = 0; m < fock.rows(); ++m)
        for (int n = 0; n < fock.cols(); ++n) out(m, n) *= std::polar(1.0, theta * (m - n));
    return out;
}

double poisson_tail(double mean, int from) {
    if (from <= 0) return 1.0;
    if (mean <= 0.0) return 0.0;
    double sum = 0.0;
    for (int n = from;; ++n) {
        double term = std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
        sum += term;
        if (n > mean && term < 1e-30 * std::max(sum, 1e-300)) break;
        if (n > from + 100000) break;
    }
    return std::min(sum, 1.0);
}

CVec coherent_amplitudes(cplx alpha, int dim) {
    CVec c = CVec::Zero(dim);
    double r = std::abs(alpha);
    if (r == 0.0) {
        c(0) = 1.0;
        return c;
    }
    double th = std::arg(alpha), lr = std::log(r);
    for (int n = 0; n < dim; ++n) {
        double lm = -0.5 * r * r + n * lr - 0.5 * std::lgamma(n + 1.0);
        c(n) = std::polar(std::exp(lm), n * th);
    }
    return c;
}

StateVector make_vacuum(FockSpace space) {
    CVec amp = CVec::Zero(space.dim);
    amp(0) = 1.0;
    return {amp, space, 0.0};
}

StateVector make_coherent(cplx alpha, FockSpace space, double threshold) {
    double leak = poisson_tail(std::norm(alpha), space.dim);
    if (leak > threshold)
        throw TruncationError("coherent state leaks " + std::to_string(leak) + " beyond dim " + std::to_string(space.dim));
    CVec amp = coherent_amplitudes(alpha, space.dim);
    amp.normalize();
    return {amp, space, leak};
}

StateVector make_squeezed_vacuum(double delta, FockSpace space, double threshold) {
    if (!(delta > 0.0)) throw std::invalid_argument("squeezing delta must be positive");
    double r = std::log(1.0 / delta);
    double t = std::tanh(r);
    double lcosh = std::log(std::cosh(r));
    auto logmag = [&](long m) {
        if (m == 0) return -0.5 * lcosh;
        return m * std::log(std::abs(t)) + 0.5 * std::lgamma(2.0 * m + 1) - m * std::log(2.0) - std::lgamma(m + 1.0) -
               0.5 * lcosh;
    };
    CVec amp = CVec::Zero(space.dim);
    double kept = 0.0;
    for (int m = 0; 2 * m < space.dim; ++m) {
        if (t == 0.0 && m > 0) break;
        double mag = std::exp(logmag(m));
        amp(2 * m) = (m % 2 == 1 && t > 0) ? -mag : mag;
        kept += mag * mag;
    }
    double leak = 0.0;
    if (t != 0.0) {
        long m = (space.dim + 1) / 2;
        for (long steps = 0; steps < 2000000; ++m, ++steps) {
            double term = std::exp(2.0 * logmag(m));
            leak += term;
            if (term < 1e-30) break;
        }
        if (m - (space.dim + 1) / 2 >= 2000000) leak = std::max(0.0, 1.0 - kept);
    }
    if (leak > threshold)
        throw TruncationError("squeezed vacuum leaks " + std::to_string(leak) + " beyond dim " + std::to_string(space.dim));
    amp.normalize();
    return {amp, space, leak};
}

StateVector make_gkp_approx(double delta, Logical logical, FockSpace space, double threshold) {
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("GKP delta must lie in (0, 1]");

    // peak positions in units of sqrt(pi) with their envelope weight and sign
    struct Peak {
        double pos, w;
    };
    std::vector<Peak> peaks;
    for (int s = 0; std::exp(-0.5 * delta * delta * s * s * kPi) >= 1e-8; ++s) {
        bool odd = (s % 2) != 0;
        if (logical == Logical::zero && odd) continue;
        if (logical == Logical::one && !odd) continue;
        double w = std::exp(-0.5 * delta * delta * s * s * kPi);
        if (logical == Logical::minus && odd) w = -w;
        peaks.push_back({s * kSqrtPi, w});
        if (s > 0) peaks.push_back({-s * kSqrtPi, w});
    }

    // project the position-space wavefunction onto Hermite functions by trapezoid rule
    double lo = peaks.front().pos, hi = peaks.front().pos;
    for (auto& pk : peaks) {
        lo = std::min(lo, pk.pos);
        hi = std::max(hi, pk.pos);
    }
    lo -= 12.0 * delta;
    hi += 12.0 * delta;
    double h = std::min(delta, 2.0 * kPi / std::sqrt(2.0 * space.dim)) / 8.0;
    int npts = static_cast<int>(std::ceil((hi - lo) / h)) + 1;

    RVec c = RVec::Zero(space.dim);
    double norm2 = 0.0;
    const double big = 1e150, lbig = std::log(big);
    for (int j = 0; j < npts; ++j) {
        double x = lo + j * h;
        double psi = 0.0;
        for (auto& pk : peaks) psi += pk.w * std::exp(-(x - pk.pos) * (x - pk.pos) / (2.0 * delta * delta));
        if (psi == 0.0) continue;
        norm2 += psi * psi * h;
        double scale = -0.5 * x * x - 0.25 * std::log(kPi);
        double es = std::exp(scale);
        double fm1 = 0.0, f = 1.0;
        for (int n = 0; n < space.dim; ++n) {
            c(n) += h * psi * f * es;
            double fn = std::sqrt(2.0 / (n + 1)) * x * f - std::sqrt(static_cast<double>(n) / (n + 1)) * fm1;
            fm1 = f;
            f = fn;
            if (std::abs(f) > big) {
                f /= big;
                fm1 /= big;
                scale += lbig;
                es = std::exp(scale);
            }
        }
    }
    double leak = std::max(0.0, 1.0 - c.squaredNorm() / norm2);
    if (leak > threshold)
        throw TruncationError("GKP state leaks " + std::to_string(leak) + " beyond dim " + std::to_string(space.dim));
    CVec amp = c.cast<cplx>();
    amp.normalize();
    return {amp, space, leak};
}

double unitarity_defect(const CMat& u) {
    int k = std::max<int>(1, u.rows() / 2);
    CMat g = (u.adjoint() * u).topLeftCorner(k, k) - CMat::Identity(k, k);
    return g.cwiseAbs().maxCoeff();
}

namespace {

CMat ladder(int dim) {
    CMat a = CMat::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

CMat displacement_pade(cplx gamma, int dim) {
    CMat a = ladder(dim);
    CMat gen = gamma * a.adjoint() - std::conj(gamma) * a;
    return gen.exp();
}

}  // namespace

CMat displacement_spectral(cplx gamma, int dim) {
    auto qb = QuadratureBasis::get(dim);
    double r = std::abs(gamma);
    double rot = std::arg(gamma) + kPi / 2;
    CMat vc = qb->vectors().cast<cplx>();
    CMat shift = vc * qb->phases(-kSqrt2 * r).asDiagonal() * vc.transpose();
    return fourier_rotate(shift, rot);
}

OperatorHandle build_operator(OpLabel label, FockSpace space, cplx parameter) {
    const int d = space.dim;
    CMat a = ladder(d);
    OperatorHandle out;
    out.label = label;
    cplx gamma;
    switch (label) {
        case OpLabel::a: out.matrix = a; return out;
        case OpLabel::adag: out.matrix = a.adjoint(); return out;
        case OpLabel::n: out.matrix = a.adjoint() * a; return out;
        case OpLabel::q: out.matrix = (a + a.adjoint()) / kSqrt2; return out;
        case OpLabel::p: out.matrix = cplx(0, 1) * (a.adjoint() - a) / kSqrt2; return out;
        case OpLabel::D: gamma = parameter; break;
        case OpLabel::Sq: gamma = cplx(0, std::sqrt(2 * kPi)); break;
        case OpLabel::Sp: gamma = std::sqrt(2 * kPi); break;
        case OpLabel::X: gamma = std::sqrt(kPi / 2); break;
        case OpLabel::Z: gamma = cplx(0, std::sqrt(kPi / 2)); break;
        case OpLabel::custom: throw std::invalid_argument("custom operators are not built by label");
    }
    out.matrix = displacement_pade(gamma, d);
    out.unitarity_defect = unitarity_defect(out.matrix);
    return out;
}

double delta_from_sharpness(double s) {
    if (s <= 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(std::max(0.0, -std::log(s) / kPi));
}

namespace {

SqueezingReport finish_report(cplx sq, cplx sp, double n, double floor) {
    SqueezingReport r;
    r.s_q_expectation = sq;
    r.s_p_expectation = sp;
    r.mean_photons = n;
    r.delta_q = delta_from_sharpness(std::abs(sq));
    r.delta_p = delta_from_sharpness(std::abs(sp));
    r.degenerate_q = std::abs(sq) < floor;
    r.degenerate_p = std::abs(sp) < floor;
    return r;
}

}  // namespace

SqueezingReport squeezing_q(const CVec& psi_q, const QuadratureBasis& qb, double floor) {
    double nrm = psi_q.squaredNorm();
    RVec pop = psi_q.cwiseAbs2() / nrm;
    cplx sq = (pop.cast<cplx>().array() * qb.phases(2.0 * kSqrtPi).array()).sum();
    cplx sp = psi_q.dot(qb.sp_q() * psi_q) / nrm;
    double n = psi_q.dot(qb.n_q().cast<cplx>() * psi_q).real() / nrm;
    return finish_report(sq, sp, n, floor);
}

SqueezingReport squeezing_q(const CMat& rho_q, const QuadratureBasis& qb, double floor) {
    double tr = rho_q.trace().real();
    cplx sq = (rho_q.diagonal().array() * qb.phases(2.0 * kSqrtPi).array()).sum() / tr;
    cplx sp = qb.sp_q().cwiseProduct(rho_q.transpose()).sum() / tr;
    double n = qb.n_q().cast<cplx>().cwiseProduct(rho_q.transpose()).sum().real() / tr;
    return finish_report(sq, sp, n, floor);
}

SqueezingReport effective_squeezing(const DensityOperator& rho, double floor) {
    auto qb = QuadratureBasis::get(rho.space.dim);
    return squeezing_q(qb->to_q(rho.rho), *qb, floor);
}

SqueezingReport effective_squeezing(const StateVector& psi, double floor) {
    auto qb = QuadratureBasis::get(psi.space.dim);
    return squeezing_q(qb->to_q(psi.amp), *qb, floor);
}

PhaseGrid PhaseGrid::uniform(double qmin, double qmax, int nq, double pmin, double pmax, int np) {
    PhaseGrid g;
    for (int i = 0; i < nq; ++i) g.q.push_back(nq == 1 ? qmin : qmin + (qmax - qmin) * i / (nq - 1));
    for (int j = 0; j < np; ++j) g.p.push_back(np == 1 ? pmin : pmin + (pmax - pmin) * j / (np - 1));
    return g;
}

namespace {

int effective_dim(const CMat& rho) {
    int d = static_cast<int>(rho.rows());
    double tr = rho.trace().real(), tail = 0.0;
    while (d > 1) {
        double next = tail + std::abs(rho(d - 1, d - 1).real());
        if (next > 1e-15 * tr) break;
        tail = next;
        --d;
    }
    return d;
}

// displaced parity sum; normalized Laguerre functions by forward recurrence along each diagonal
double wigner_point(const CMat& rho, int d, double q, double p) {
    cplx gamma = kSqrt2 * cplx(q, p);
    double x = std::norm(gamma);
    double th = std::arg(gamma);
    const double big = 1e150, lbig = std::log(big);
    double w = 0.0;
    for (int L = 0; L < d; ++L) {
        if (x == 0.0 && L > 0) break;
        double scale = -0.5 * x - 0.5 * std::lgamma(L + 1.0) + (L > 0 ? 0.5 * L * std::log(x) : 0.0);
        double es = std::exp(scale);
        cplx ph = std::polar(1.0, L * th);
        double gm1 = 0.0, g = 1.0, acc = 0.0;
        for (int n = 0; n + L < d; ++n) {
            double coef = (L == 0) ? rho(n, n).real() : 2.0 * (rho(n, n + L) * ph).real();
            double term = g * es * coef;
            acc += (n % 2 == 0) ? term : -term;
            double gn = ((2.0 * n + 1 + L - x) * g - std::sqrt(static_cast<double>(n) * (n + L)) * gm1) /
                        std::sqrt((n + 1.0) * (n + 1.0 + L));
            gm1 = g;
            g = gn;
            if (std::abs(g) > big) {
                g /= big;
                gm1 /= big;
                scale += lbig;
                es = std::exp(scale);
            }
        }
        w += acc;
    }
    return w / kPi;
}

}  // namespace

RMat phase_space(const DensityOperator& rho, const PhaseGrid& grid, PhaseSpaceKind kind) {
    int d = effective_dim(rho.rho);
    CMat r = rho.rho.topLeftCorner(d, d);
    RMat out(grid.q.size(), grid.p.size());
    for (size_t i = 0; i < grid.q.size(); ++i) {
        for (size_t j = 0; j < grid.p.size(); ++j) {
            if (kind == PhaseSpaceKind::wigner) {
                out(i, j) = wigner_point(r, d, grid.q[i], grid.p[j]);
            } else {
                CVec c = coherent_amplitudes(cplx(grid.q[i], grid.p[j]) / kSqrt2, d);
                out(i, j) = c.dot(r * c).real() / kPi;
            }
        }
    }
    return out;
}

RMat phase_space(const StateVector& psi, const PhaseGrid& grid, PhaseSpaceKind kind) {
    return phase_space(DensityOperator::from_pure(psi), grid, kind);
}

}  // namespace gkpmod
