#pragma once

#include <vector>

#include "gkpmod/modular_measure.hpp"

namespace gkpmod {

enum class ReleaseFilter { exponential, custom };

struct ReleaseConfig {
    double kappa_open = 1.0;  // 1/s
    double t_meas = 10.0;     // s
    int steps = 0;            // 0 picks the smallest J with kappa dt <= 0.01
    ReleaseFilter filter = ReleaseFilter::exponential;
    std::vector<double> custom_filter;  // f_j per step when filter is custom

    int resolved_steps() const;
    double kappa_dt() const;
};

struct IntegratedOutcome {
    double I_out = 0.0;
    double Q_out = 0.0;
    double phi_out = 0.0;
    double K_eff = 0.0;
};

// alpha_j = alpha sqrt(kappa dt) (1 - kappa dt)^{j/2}
std::vector<cplx> release_amplitudes(cplx alpha, const ReleaseConfig& cfg);
double release_completeness(cplx alpha, const ReleaseConfig& cfg);  // sum_j |alpha_j|^2

// draws q from the populations, then every emitted mode beta_j around alpha_j exp(i 2 sqrt(pi) q)
IntegratedOutcome sample_release(const RVec& pop, const QuadratureBasis& qb, const AncillaPrep& prep,
                                 const ReleaseConfig& cfg, Rng& rng);
// q-diagonal of exp(z exp(i 2 sqrt(pi) q)) with z = alpha (I - iQ)/sqrt2, counter-displacement included,
// rescaled so its largest entry has unit modulus
CVec release_kernel(const IntegratedOutcome& out, const AncillaPrep& prep, const QuadratureBasis& qb);

std::pair<IntegratedOutcome, DensityOperator> release_shot(const DensityOperator& rho_in, const AncillaPrep& prep,
                                                           const ReleaseConfig& cfg, Rng& rng);
std::pair<IntegratedOutcome, StateVector> release_shot(const StateVector& psi_in, const AncillaPrep& prep,
                                                       const ReleaseConfig& cfg, Rng& rng);

struct ReleaseMoments {
    double mean_K_sq;
    double bound_delta_q;
};
// <K_eff^2> = 4(S + S^2) with S = |alpha|^2 (1 - exp(-kappa t_meas))
ReleaseMoments release_moments(const AncillaPrep& prep, const ReleaseConfig& cfg);

}  // namespace gkpmod
