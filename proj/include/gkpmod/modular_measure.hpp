#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "gkpmod/hilbert.hpp"
#include "gkpmod/rng.hpp"

namespace gkpmod {

struct AncillaPrep {
    cplx alpha{};
    bool counter_displacement_on = true;
    double counter_c = 0.0;    // target is shifted by exp(-i 2 sqrt(pi) c q); |alpha|^2/2 when on
    int fock_cutoff = 20;      // ancilla levels n = 0 .. fock_cutoff-1 enter the Kraus sum
    double leakage = 0.0;      // Poisson weight of the dropped ancilla levels
    double env_amplitude = 0.0;  // amplitude lost to the environment before readout
    double coupling_scale = 1.0;  // 1 measures S_q, 1/2 measures Z

    double mean_photons() const { return std::norm(alpha); }
};

// picks the smallest cutoff with leakage below threshold unless one is given
AncillaPrep make_prep(cplx alpha, bool counter_displacement_on = true, int fock_cutoff = -1,
                      double threshold = 1e-6);

struct MeasurementRecord {
    cplx beta{};
    double phi = 0.0;
    double concentration = 0.0;
    double probability_density = 0.0;
};

MeasurementRecord make_record(cplx beta, const AncillaPrep& prep, double density);

enum class Stabilizer { Sq, Sp };

// Kraus operator of outcome beta as its diagonal in the position eigenbasis
CVec kraus_diagonal(cplx beta, const AncillaPrep& prep, const QuadratureBasis& qb);
OperatorHandle measurement_operator(cplx beta, const AncillaPrep& prep, FockSpace target);

RVec q_populations(const StateVector& psi);
RVec q_populations(const DensityOperator& rho);
double density_from_populations(const RVec& pop, const AncillaPrep& prep, const QuadratureBasis& qb, cplx beta);
double outcome_density(const DensityOperator& rho_in, const AncillaPrep& prep, cplx beta);

// draws the position eigenvalue from the state's diagonal, then beta around alpha*exp(i 2 sqrt(pi) q)
MeasurementRecord sample_from_populations(const RVec& pop, const AncillaPrep& prep, const QuadratureBasis& qb,
                                          Rng& rng);
MeasurementRecord sample_outcome(const DensityOperator& rho_in, const AncillaPrep& prep, Rng& rng);

inline constexpr double kZeroProbabilityFloor = 1e-300;

// q-basis kernels shared with the noise and release modules
CMat apply_diagonal_q(const CMat& rho_q, const CVec& m);
// readout loss: coherence between q_k and q_l is scaled by <a e^{i th_l}|a e^{i th_k}>
void apply_env_dephasing_q(CMat& rho_q, double env_amplitude, double coupling_scale, const QuadratureBasis& qb);

std::pair<DensityOperator, double> post_measurement_state(const DensityOperator& rho_in, const AncillaPrep& prep,
                                                          cplx beta);
std::pair<StateVector, double> post_measurement_state(const StateVector& psi_in, const AncillaPrep& prep, cplx beta);

cplx infer_eigenvalue(const MeasurementRecord& record, const std::optional<DensityOperator>& prior = std::nullopt);

struct LogicalReadout {
    int bit = 0;
    MeasurementRecord record;
    DensityOperator post;
};
LogicalReadout measure_logical_Z(const DensityOperator& rho_in, const AncillaPrep& prep, Rng& rng);

// dense grid at the given spacing over |beta| <= rmax, then pattern-search refinement
cplx maximize_on_disk(const std::function<double(cplx)>& f, double rmax, double spacing);
// maximize_on_disk over |beta| <= |alpha| + 4
cplx max_likelihood_beta(const RVec& pop, const AncillaPrep& prep, const QuadratureBasis& qb, double spacing = 0.05);

struct ProtocolConfig {
    AncillaPrep ancilla;
    int target_dim = 500;
    std::vector<Stabilizer> sequence{Stabilizer::Sq};
    int shots = 200;
    std::uint64_t seed = 1;
    std::optional<StateVector> input;  // vacuum when empty
    int threads = 1;
    std::string stream_tag = "protocol";
};

struct ShotResult {
    std::vector<MeasurementRecord> records;
    SqueezingReport report;
};

std::vector<ShotResult> run_protocol(const ProtocolConfig& config);

// one shot on a pure state: measures S_q directly or S_p through the Fourier rotation
StateVector measure_pure(const StateVector& psi, Stabilizer which, const AncillaPrep& prep, Rng& rng,
                         MeasurementRecord& record);

}  // namespace gkpmod
