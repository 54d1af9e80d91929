#pragma once

// Two-ion entanglement swap in a truncated Fock space.
//
// State layout: qubit_A (x) qubit_B (x) osc_A (x) osc_B, flat index
// ((qa*2 + qb)*d + na)*d + nb. Qubit index 0 is |up>, 1 is |down>.
// sigma_y = i sigma_+ - i sigma_-, the qubit analogue of the oscillator momentum
// i(a^dag - a) so that {|down>,|up>} mirror the number states {|0>,|1>}.
// Local quadratures: x = (a + a^dag)/sqrt(2 g), p = i sqrt(g/2)(a^dag - a)
// with g the gauge frequency of the local number basis.

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ionvac/chain.hpp"
#include "ionvac/types.hpp"

namespace ionvac {

struct LocalModeBasis {
    double gauge_frequency = std::pow(3.0, 0.25);  // sqrt(nu_com * nu_breathing)
    int fock_dim = 16;
};

enum class PulseKind { V, W };
enum class PulseTarget { A, B, Both };

/// V(a) = exp(i a sigma_x x), W(b) = exp(i b sigma_y p) on the targeted ion(s).
struct Pulse {
    PulseKind kind = PulseKind::V;
    PulseTarget target = PulseTarget::Both;
    double strength = 0.0;
};

using PulseSequence = std::vector<Pulse>;

/// "V:0.31,W:0.38" (both ions) or "V@A:0.31" for a single ion.
PulseSequence parse_pulse_sequence(std::string_view text);
std::string format_pulse_sequence(const PulseSequence& seq);

/// V(s0) W(s1) V(s2) ... applied to both ions.
PulseSequence alternating_sequence(const Vector& strengths);

struct MotionalHamiltonian {
    Matrix h;  // on osc_A (x) osc_B, index na*d + nb
    LocalModeBasis basis;
};

/// H = (p_A^2 + p_B^2)/2 + x^T G x / 2 on the truncated local basis.
MotionalHamiltonian build_motional_hamiltonian(const CouplingMatrix& g2, const LocalModeBasis& basis);

struct MotionalGroundState {
    ComplexVector amplitudes;  // index na*d + nb
    int fock_dim = 0;
    double energy = 0.0;
    double gap = 0.0;
    double top_population = 0.0;
};

/// Lowest eigenvector; phase fixed so the largest amplitude is real positive.
MotionalGroundState ground_state_fock(const MotionalHamiltonian& h);

/// Singular values of the d x d amplitude matrix, descending.
Vector schmidt_coefficients(const MotionalGroundState& ground);

/// Entanglement entropy (ebits) of the Schmidt spectrum.
double schmidt_entropy(const Vector& schmidt);

struct FockStateVector {
    ComplexVector amplitudes;
    int fock_dim = 0;

    static Eigen::Index index(int qa, int qb, int na, int nb, int d) {
        return ((static_cast<Eigen::Index>(qa) * 2 + qb) * d + na) * d + nb;
    }
    double norm() const { return amplitudes.norm(); }
    /// Population with either oscillator in its highest retained level.
    double top_population() const;
    /// 4 x d^2 view: rows are qubit configurations.
    ComplexMatrix qubit_rows() const;
};

/// |<a|b>|^2
double state_fidelity(const FockStateVector& a, const FockStateVector& b);

double concurrence(const ComplexMatrix& rho);
double binary_entropy(double p);
/// Wootters entanglement of formation (ebits) of a two-qubit density matrix.
double two_qubit_eof(const ComplexMatrix& rho);

struct SwapResult {
    ComplexMatrix rho;  // 4 x 4, basis (up,up), (up,down), (down,up), (down,down)
    double eof = 0.0;
    double concurrence = 0.0;
    double purity = 0.0;
    /// Largest eigenvalue of rho: best fidelity of a qubit (x) motion product state.
    double residual_motional_overlap = 0.0;
    double top_population = 0.0;
    double ground_entropy = 0.0;
    double ratio_to_ground_entropy = 0.0;
};

class SwapSimulator {
public:
    explicit SwapSimulator(const CouplingMatrix& g2, LocalModeBasis basis = {});

    const LocalModeBasis& basis() const { return basis_; }
    const MotionalHamiltonian& hamiltonian() const { return hamiltonian_; }
    const MotionalGroundState& ground_state() const { return ground_; }
    /// Ground-state entanglement of the two ions from the covariance route.
    double ground_entropy() const { return ground_entropy_; }

    /// Population allowed in the top Fock level before a pulse is rejected.
    double leak_threshold = 1e-6;

    /// Motional ground state (x) |down, down>.
    FockStateVector initial_state() const;

    /// Instantaneous kick; throws TruncationLeak when the top-level population exceeds the threshold.
    FockStateVector apply_pulse(const FockStateVector& state, const Pulse& pulse) const;

    /// Exact evolution under the motional Hamiltonian for time t.
    FockStateVector free_evolution(const FockStateVector& state, double t) const;

    /// Kick exp(-i b' sigma_y x) at t=0, free evolution for tau, kick exp(+i b' sigma_y x) at tau.
    /// Tends to W(b' tau) as tau -> 0 up to a qubit-conditional phase. The large
    /// intermediate displacement is handled through the exact Heisenberg identity
    /// U = F exp(i b' sigma_y (x(tau) - x)) exp(-(i/2) b'^2 sum sigma sigma S),
    /// so the truncated basis only needs to hold the net O(b' tau) kick.
    FockStateVector pulse_pair_w(const FockStateVector& state, PulseTarget target, double beta_prime,
                                 double tau) const;

    SwapResult evaluate(const FockStateVector& state) const;
    SwapResult run(const PulseSequence& sequence) const;

private:
    void check_leak(const FockStateVector& state) const;

    LocalModeBasis basis_;
    CouplingMatrix g2_;
    MotionalHamiltonian hamiltonian_;
    MotionalGroundState ground_;
    double ground_entropy_ = 0.0;

    Matrix x_;          // single oscillator x, d x d
    ComplexMatrix p_;   // single oscillator p, d x d
    Vector x_eval_;
    Matrix x_evec_;
    Vector p_eval_;
    ComplexMatrix p_evec_;
    Vector h_eval_;
    Matrix h_evec_;
};

struct OptimizerOptions {
    int n_pairs = 3;
    int restarts = 32;
    std::uint64_t seed = 20050101;
    int threads = 0;  // 0 = hardware concurrency
    int max_evaluations = 3000;
};

struct OptimizationResult {
    PulseSequence sequence;
    SwapResult result;
    std::vector<double> restart_eof;  // best EoF of each restart, in restart order
    int best_restart = -1;
    int evaluations = 0;
};

/// Maximises EoF over the strengths of V W ... V W (n_pairs pairs) with multi-start simplex
/// search. Restart r starts from a point drawn from a generator seeded by (seed, r), so
/// the result does not depend on thread scheduling.
OptimizationResult optimize_sequence(const SwapSimulator& sim, const OptimizerOptions& options);

}  // namespace ionvac
