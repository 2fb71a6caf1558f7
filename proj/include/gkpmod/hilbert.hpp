#pragma once

#include <memory>
#include <mutex>
#include <vector>

#include "gkpmod/core.hpp"

namespace gkpmod {

struct FockSpace {
    int dim;
    explicit FockSpace(int d);
    bool operator==(const FockSpace&) const = default;
};

struct StateVector {
    CVec amp;
    FockSpace space;
    double leakage = 0.0;  // probability weight lost to levels >= dim

    double norm() const { return amp.norm(); }
};

struct DensityOperator {
    CMat rho;
    FockSpace space;

    static DensityOperator from_pure(const StateVector& psi);
    // throws GkpError when hermiticity, trace or positivity is off by more than tol
    void validate(double tol = 1e-8, double eigen_floor = -1e-8) const;
};

enum class OpLabel { a, adag, n, q, p, D, Sq, Sp, X, Z, custom };

struct OperatorHandle {
    CMat matrix;
    OpLabel label = OpLabel::custom;
    double unitarity_defect = 0.0;  // only filled for unitary labels
};

struct SqueezingReport {
    double delta_q = 0.0;
    double delta_p = 0.0;
    double mean_photons = 0.0;
    cplx s_q_expectation{};
    cplx s_p_expectation{};
    bool degenerate_q = false;
    bool degenerate_p = false;
};

// Eigenbasis of the truncated position operator. Every function of q-hat used by the
// measurement code is diagonal here. One instance per dimension, shared and read-only.
class QuadratureBasis {
public:
    explicit QuadratureBasis(int dim);
    static std::shared_ptr<const QuadratureBasis> get(int dim);

    int dim() const { return dim_; }
    const RVec& q() const { return q_; }
    const RMat& vectors() const { return v_; }  // column k is the eigenvector for q_k, in Fock basis
    double reliable_limit() const { return 0.8 * std::sqrt(2.0 * dim_); }
    bool reliable(int k) const { return std::abs(q_(k)) <= reliable_limit(); }

    CVec to_q(const CVec& fock) const;
    CVec to_fock(const CVec& qamp) const;
    CMat to_q(const CMat& fock) const;
    CMat to_fock(const CMat& qmat) const;

    // diagonal of exp(i t q_k)
    CVec phases(double t) const;

    // operators expressed in this eigenbasis; built on first use
    const CMat& sp_q() const;
    const CMat& x_q() const;
    const RMat& n_q() const;

private:
    CMat rotated_(double t) const;

    int dim_;
    RVec q_;
    RMat v_;
    mutable std::once_flag sp_once_, x_once_, n_once_;
    mutable CMat sp_q_, x_q_;
    mutable RMat n_q_;
};

// exp(i theta n) applied to a Fock vector / conjugation of a Fock-basis matrix
CVec fourier_rotate(const CVec& fock, double theta);
CMat fourier_rotate(const CMat& fock, double theta);

double poisson_tail(double mean, int from);
CVec coherent_amplitudes(cplx alpha, int dim);

StateVector make_vacuum(FockSpace space);
StateVector make_coherent(cplx alpha, FockSpace space, double threshold = 1e-8);
StateVector make_squeezed_vacuum(double delta, FockSpace space, double threshold = 1e-8);

enum class Logical { zero, one, plus, minus };
StateVector make_gkp_approx(double delta, Logical logical, FockSpace space, double threshold = 1e-8);

OperatorHandle build_operator(OpLabel label, FockSpace space, cplx parameter = {});
// max |U^dag U - I| over the lowest dim/2 levels
double unitarity_defect(const CMat& u);
// exact exponential of the truncated generator, assembled from the position eigenbasis
// and Fourier rotations; cross-check for the Pade route in build_operator
CMat displacement_spectral(cplx gamma, int dim);

double delta_from_sharpness(double sharpness);
SqueezingReport effective_squeezing(const DensityOperator& rho, double floor = 5e-3);
SqueezingReport effective_squeezing(const StateVector& psi, double floor = 5e-3);
// fast paths for states already expressed in the position eigenbasis
SqueezingReport squeezing_q(const CVec& psi_q, const QuadratureBasis& qb, double floor = 5e-3);
SqueezingReport squeezing_q(const CMat& rho_q, const QuadratureBasis& qb, double floor = 5e-3);

struct PhaseGrid {
    std::vector<double> q;
    std::vector<double> p;
    static PhaseGrid uniform(double qmin, double qmax, int nq, double pmin, double pmax, int np);
};

enum class PhaseSpaceKind { wigner, husimi };

// value(i, j) at (q[i], p[j]). Wigner integrates to 1 over dq dp; Husimi is per d^2beta
// with beta = (q + i p)/sqrt(2), so it integrates to 1 over dq dp / 2.
RMat phase_space(const DensityOperator& rho, const PhaseGrid& grid, PhaseSpaceKind kind);
RMat phase_space(const StateVector& psi, const PhaseGrid& grid, PhaseSpaceKind kind);

}  // namespace gkpmod
