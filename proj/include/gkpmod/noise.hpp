#pragma once

#include <string>
#include <vector>

#include "gkpmod/modular_measure.hpp"

namespace gkpmod {

struct LossParams {
    double gamma = 0.0;     // kappa_c * t_coupl
    double eta_eff = 1.0;   // readout efficiency
    bool half_exponent = false;  // damp the no-loss branch by exp(-gamma/2) instead of exp(-gamma)
};

// single-loss weight alpha^2 gamma; throws RegimeError when it reaches 0.5
double single_loss_weight(const AncillaPrep& prep, const LossParams& loss);
// ancilla for the no-loss branch; the counter-displacement stays undamped
AncillaPrep damped_prep(const AncillaPrep& prep, const LossParams& loss);

// time average of exp(-i t q) rho exp(i t q) over the coupling window, in the q eigenbasis:
// rho_kl scaled by exp(-i a (q_k - q_l)) sinc(a (q_k - q_l)) with a = coupling_scale sqrt(pi)
void apply_loss_dephasing_q(CMat& rho_q, double coupling_scale, const QuadratureBasis& qb);

struct LossyPost {
    CMat rho_q;           // normalized post-measurement state in the q eigenbasis
    double density = 0.0; // outcome density of beta
    double no_loss_part = 0.0;  // trace contributed by the no-loss branch before normalization
};
LossyPost lossy_post_q(const CMat& rho_q, const QuadratureBasis& qb, const AncillaPrep& prep, cplx beta,
                       const LossParams& loss);
std::pair<DensityOperator, double> lossy_measurement(const DensityOperator& rho_in, const AncillaPrep& prep,
                                                     cplx beta, const LossParams& loss);
// beta drawn from the branch mixture (1 - w) p_damped + w p_full; both share the q populations
MeasurementRecord sample_lossy_outcome(const RVec& pop, const QuadratureBasis& qb, const AncillaPrep& prep,
                                       const LossParams& loss, Rng& rng);
// sqrt(1 - ln(1 - alpha^2 gamma)/pi) for an input with Delta_p = 1
double lossy_delta_p(double alpha_sq_gamma, double delta_p_in = 1.0);

AncillaPrep readout_loss(const AncillaPrep& prep, double eta_eff);

struct CubicParams {
    double strength_ratio = 1e-3;  // xi_T^2 / xi_A^2
    bool corrected_drive = false;
    double epsilon3() const { return kSqrtPi * strength_ratio / (3.0 * kSqrt2); }
};

// exp(i t H) for Hermitian H by eigendecomposition
CMat hermitian_exp(const CMat& h, double t);

// (a + a^dag)^3 - a^3 - (a^dag)^3 on the truncated space, equal to 2 sqrt2 q^3 - b^3 - (b^dag)^3
CMat cubic_generator(int dim);

struct CubicUnitaries {
    std::vector<CMat> u;  // per ancilla Fock level, Fock basis of the target
    CubicParams params;
};
CubicUnitaries cubic_unitary(const AncillaPrep& prep, const CubicParams& cubic, FockSpace target, int ancilla_cutoff);
// product form used only as a cross-check; no counter-displacement
CMat cubic_factorized_approx(const CubicParams& cubic, int n, FockSpace target);

// measurement with per-level target unitaries: M_beta = sum_n <beta|n><n|alpha> U_n / sqrt(pi)
class CubicMeasurement {
public:
    CubicMeasurement(const StateVector& psi, const AncillaPrep& prep, const CubicUnitaries& unitaries);
    double density(cplx beta) const;
    StateVector post(cplx beta) const;
    cplx max_likelihood(double spacing = 0.05) const;
    // population of the top tenth of Fock levels in the post-measurement state
    double edge_weight(cplx beta) const;

private:
    CVec coefficients_(cplx beta) const;

    StateVector psi_;
    AncillaPrep prep_;
    CMat v_;     // column n is U_n psi
    CMat gram_;  // v^dag v
};

struct CoupledQuadrature {
    double cos_part;
    double sin_part;
    int sign;  // coupled quadrature is cos_part q + sign sin_part p
};
CoupledQuadrature flux_offset_coupling(double epsilon, int half_period_index, int branch = +1);
// mean rotation angle of the coupled quadrature over the first n half-periods
double net_rotation(double epsilon, int n_half_periods, int branch = +1);

struct SweepRow {
    std::string param;
    double value;
    double delta_q;
    double delta_p;
};
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace gkpmod
