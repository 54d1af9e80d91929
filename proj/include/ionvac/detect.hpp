#pragma once

// Perturbative two-probe detection of ground-state entanglement in an N-ion chain.
//
// Two probe ions A and B are driven by a square pulse of amplitude omega over
// [0, T] with detuning delta. In the rotating frame the coupling of probe k is
// omega (e^{i delta t} sigma_+ + h.c.) x_k(t), and the lowest-order qubit state
// is built from
//   X_k  = omega * int_0^T e^{i delta t} x_k(t) dt,
//   E_k  = X_k |vac>               (one-phonon emission),
//   X_AB = <vac| X_A X_B |vac>      (phonon exchange).
// Times are in units of 1/nu_com, probes are 1-based ion labels.

#include <vector>

#include "ionvac/chain.hpp"
#include "ionvac/types.hpp"

namespace ionvac {

enum class ExchangeOrdering {
    Product,      // <X_A X_B>, as in the factorised local evolution
    TimeOrdered,  // full second-order amplitude, including the [x_A(t), x_B(t')] term
};

struct DetectionConfig {
    int n_ions = 20;
    int probe_a = 6;
    int probe_b = 15;
    double duration = 0.8;
    double detuning = 0.0;
    double omega = 1.0;
    bool truncated = false;  // evolve with the chain cut between ions N/2 and N/2+1
    ExchangeOrdering ordering = ExchangeOrdering::Product;
};

/// Throws ConfigError naming the offending field.
void validate(const DetectionConfig& cfg);

/// int_0^T e^{i w t} dt = (e^{iwT} - 1)/(iw), equal to T at w = 0.
Complex oscillation_integral(double w, double duration);

/// int_0^T dt e^{i a t} int_0^t e^{i b s} ds.
Complex nested_integral(double a, double b, double duration);

struct ModeIntegrals {
    ComplexVector plus;   // int e^{i(delta + nu_n)t}
    ComplexVector minus;  // int e^{i(delta - nu_n)t}
};

ModeIntegrals mode_integrals(const NormalModes& modes, double detuning, double duration);

struct PerturbativeAmplitudes {
    Complex exchange;               // <vac|X_A X_B|vac>
    Complex exchange_time_ordered;  // exchange minus the commutator contribution
    ComplexVector emission_a;       // E_A on the chain's vacuum modes
    ComplexVector emission_b;
    Complex overlap_ab;             // <E_A|E_B>
    double norm_a = 0.0;
    double norm_b = 0.0;
};

/// Amplitudes on the untruncated chain from the closed-form mode sums.
PerturbativeAmplitudes mode_sum_amplitudes(const NormalModes& modes, int probe_a, int probe_b, double detuning,
                                           double duration, double omega);

/// Amplitudes when the probes evolve under `dynamics` (possibly truncated) while the
/// initial state is the vacuum of `vacuum`. Heisenberg route: x(t) = C(t) x + S(t) p.
PerturbativeAmplitudes heisenberg_amplitudes(const NormalModes& vacuum, const NormalModes& dynamics, int probe_a,
                                             int probe_b, double detuning, double duration, double omega);

/// Dispatches on cfg.truncated; `modes` are the untruncated chain's modes.
PerturbativeAmplitudes perturbative_amplitudes(const DetectionConfig& cfg, const NormalModes& modes);

/// ||X_A X_B |vac>||^2 by Wick's theorem.
double exchange_norm_squared(const PerturbativeAmplitudes& amps, ExchangeOrdering ordering);

struct DetectionResult {
    ComplexMatrix rho;  // 4 x 4, basis (up,up), (up,down), (down,up), (down,down)
    double eta = 0.0;
    bool eta_defined = false;
    double negativity = 0.0;           // from the partial transpose of rho
    double negativity_estimate = 0.0;  // |<0|X_AB>| - ||E_A|| ||E_B||, unnormalised
    bool entangled = false;            // eta > 1
};

struct RegimeOptions {
    double max_emission = 0.1;  // ||E_A||^2 + ||E_B||^2
};

/// Lowest-order probe density matrix; throws NumericalError outside the weak-drive regime.
DetectionResult assemble_rho(const PerturbativeAmplitudes& amps, ExchangeOrdering ordering = ExchangeOrdering::Product,
                             const RegimeOptions& regime = {});

/// Scales omega so that ||E_A||^2 + ||E_B||^2 equals `target`.
PerturbativeAmplitudes rescale_to_emission(const PerturbativeAmplitudes& amps, double target);

/// eta = |<0|X_AB>| / (||E_A|| ||E_B||); zero when the denominator vanishes.
double eta_ratio(const PerturbativeAmplitudes& amps, ExchangeOrdering ordering = ExchangeOrdering::Product);

struct EtaRow {
    double detuning;
    double eta_full;
    double eta_truncated;
    bool entangled_full;
    bool entangled_truncated;
};

std::vector<EtaRow> eta_sweep(const DetectionConfig& cfg, const std::vector<double>& detunings);

struct CommutatorProfile {
    int reference = 0;
    std::vector<double> times;
    Matrix values;  // (ion, time): [x_ref(t), x_n(0)] / (-i)
};

CommutatorProfile commutator_profile(const NormalModes& modes, int reference, const std::vector<double>& times);

struct Trajectory {
    int kicked = 0;
    std::vector<double> times;
    Matrix displacement;  // (ion, time)
    Matrix velocity;
    std::vector<double> energy;
};

/// Linear dynamics after a unit velocity kick of ion `kicked`.
Trajectory classical_propagation(const NormalModes& modes, int kicked, const std::vector<double>& times);

/// For each time, the largest |n - kicked| over ions whose |displacement| has reached
/// `relative_threshold` times the trajectory's global maximum at some earlier-or-equal slice.
std::vector<int> propagation_front(const Trajectory& traj, double relative_threshold);

/// Ion label at the chain centre (N/2 rounded up for odd N, N/2 for even N).
int center_ion(int n_ions);

}  // namespace ionvac
