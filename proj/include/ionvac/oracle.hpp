#pragma once

// Brute-force reference calculations used to cross-check the closed-form routes.
// They share no code with the Gaussian or mode-sum implementations beyond the
// chain's coupling matrix and normal modes.

#include <vector>

#include "ionvac/chain.hpp"
#include "ionvac/types.hpp"

namespace ionvac::oracle {

/// Ground state of H = sum p^2/2 + x^T G x / 2 in a truncated product Fock basis.
/// Site k uses the local number basis of frequency sqrt(G_kk); site 1 is the most
/// significant digit of the flat index.
struct FockChainState {
    Vector amplitudes;
    int n_sites = 0;
    int fock_dim = 0;
    double energy = 0.0;
    double top_population = 0.0;  // weight with any site in its highest level
};

FockChainState fock_ground_state(const CouplingMatrix& g, int fock_dim);

/// Reduced density matrix of `sites` (1-based, in the given order).
Matrix fock_reduced_density(const FockChainState& state, const std::vector<int>& sites);

/// Von Neumann entropy (ebits) of `partition`.
double fock_entropy(const FockChainState& state, const std::vector<int>& partition);

/// log2 of the trace norm of the partial transpose over group_b.
double fock_log_negativity(const FockChainState& state, const std::vector<int>& group_a,
                           const std::vector<int>& group_b);

enum class DysonSchedule {
    Simultaneous,  // both probes driven together, time-ordered evolution
    BThenA,        // probe B's full pulse, then probe A's
};

struct DysonAmplitudes {
    ComplexVector emission_a;  // i <up,down; 1_n | psi_1>
    ComplexVector emission_b;  // i <down,up; 1_n | psi_1>
    Complex exchange;          // -<up,up; vac | psi_2>
};

/// Integrates the first- and second-order Dyson hierarchy
///   d psi_1/dt = -i H(t) psi_0,  d psi_2/dt = -i H(t) psi_1
/// in the interaction picture, on the product Fock space of the normal modes
/// (`fock_dim` levels per mode; 3 is exact at second order).
DysonAmplitudes dyson_second_order(const NormalModes& modes, int probe_a, int probe_b, double detuning,
                                   double duration, double omega, DysonSchedule schedule, int fock_dim = 3,
                                   double tolerance = 1e-12);

}  // namespace ionvac::oracle
