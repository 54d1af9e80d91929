#pragma once

// Gaussian-state calculus for the chain's motional ground state.
//
// Covariance matrices use xxpp ordering (all positions first, then all
// momenta) and the convention sigma_ij = <{R_i, R_j}>/2, so a single-mode
// vacuum of frequency w has diag(1/(2w), w/2) and symplectic eigenvalue 1/2.

#include <vector>

#include "ionvac/chain.hpp"
#include "ionvac/types.hpp"

namespace ionvac {

/// 1-based ion labels.
using SiteList = std::vector<int>;

struct CovarianceMatrix {
    Matrix sigma;

    int modes() const { return static_cast<int>(sigma.rows() / 2); }
};

struct SymplecticSpectrum {
    Vector mu;  // descending
};

struct TwoIonSqueezing {
    double lambda = 0.0;
    double e_beta = 0.0;  // squeezing ratio q = exp(-beta) of the two-mode squeezed form
    double entropy_ebits = 0.0;
};

struct EntropyRow {
    int n_ions;
    double entropy;
};

struct NegativityRow {
    int separation;
    int group_size;
    double log_negativity;
    SiteList group_a;
    SiteList group_b;
};

/// Standard symplectic form for `modes` modes in xxpp ordering.
Matrix symplectic_form(int modes);

/// Vacuum of H = p^2/2 + x^T G x / 2: x-block G^{-1/2}/2, p-block G^{1/2}/2.
CovarianceMatrix ground_state_covariance(const CouplingMatrix& coupling);

/// Keeps the rows/columns of `sites` (in the order given) in both blocks.
CovarianceMatrix reduce(const CovarianceMatrix& cov, const SiteList& sites);

/// Absolute eigenvalues of i*Omega*sigma, once per mode, descending.
/// Unless `allow_unphysical`, a value below 1/2 - 1e-6 throws NumericalError.
SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& cov, bool allow_unphysical = false);

/// (mu+1/2)log2(mu+1/2) - (mu-1/2)log2(mu-1/2); exactly 0 for mu <= 1/2.
double mode_entropy(double mu);

/// Von Neumann entropy (ebits) of `partition` for a pure global state.
double entanglement_entropy(const CovarianceMatrix& pure_state, const SiteList& partition);

/// Logarithmic negativity (base 2) between two disjoint groups; the state is
/// first reduced to group_a + group_b.
double log_negativity(const CovarianceMatrix& cov, const SiteList& group_a, const SiteList& group_b);

/// lambda, exp(-beta) and entropy from the two mode frequencies.
TwoIonSqueezing squeezing_from_frequencies(double nu0, double nu1);

/// Two-ion chain values, using the numerically solved 2-ion modes.
TwoIonSqueezing two_ion_analytics();

/// Entropy between the left and right halves, for each (even) N.
std::vector<EntropyRow> entropy_vs_chain_size(const std::vector<int>& chain_sizes);

/// Two equal groups placed about the chain centre, `separation` ions between them.
/// For an odd leftover the extra empty site goes to the right end.
std::pair<SiteList, SiteList> centered_groups(int n_ions, int group_size, int separation);

/// Rows for every separation that fits, for each group size.
std::vector<NegativityRow> negativity_vs_separation(int n_ions, const std::vector<int>& group_sizes);

}  // namespace ionvac
