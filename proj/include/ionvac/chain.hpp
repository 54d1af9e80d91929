#pragma once

// Linear ion chain in a harmonic axial trap.
//
// Units are dimensionless throughout: axial (centre-of-mass) trap frequency = 1,
// ion mass = 1, reduced action constant = 1, lengths in the Coulomb length scale
// (e^2 / (4 pi eps0 m w^2))^(1/3). Ions are labelled 1..N from the left end.

#include <string>

#include "ionvac/types.hpp"

namespace ionvac {

struct ChainSpec {
    int n_ions = 2;
};

struct EquilibriumPositions {
    Vector u;              // ascending
    double residual = 0.0; // max |force| at the returned positions
    int iterations = 0;

    int size() const { return static_cast<int>(u.size()); }
};

/// Hessian of the trap + Coulomb potential at equilibrium.
struct CouplingMatrix {
    Matrix g;

    int size() const { return static_cast<int>(g.rows()); }
};

struct NormalModes {
    Vector frequencies;  // ascending, nu_1 = 1 for the untruncated chain
    Matrix vectors;      // column n is the eigenvector with eigenvalue frequencies(n)^2

    int size() const { return static_cast<int>(frequencies.size()); }
};

struct NewtonOptions {
    int max_iterations = 200;
    double tolerance = 1e-12;
};

/// Force on every ion: u_m - sum_{n<m} (u_m-u_n)^-2 + sum_{n>m} (u_n-u_m)^-2.
Vector equilibrium_residual(const Vector& u);

/// Damped Newton iteration from a uniformly spaced seed.
/// Throws NumericalError (with the residual norm) when it does not converge.
EquilibriumPositions solve_equilibrium(const ChainSpec& spec, const NewtonOptions& options = {});

CouplingMatrix coupling_matrix(const EquilibriumPositions& positions);

/// Eigen-decomposition of G. Each column is signed so its largest-magnitude entry is positive.
NormalModes normal_modes(const CouplingMatrix& coupling);

/// Zeroes every coupling between ions 1..cut and cut+1..N; diagonal entries are kept.
CouplingMatrix truncated_coupling(const CouplingMatrix& coupling, int cut);

/// Convenience: equilibrium + coupling matrix for an N-ion chain.
CouplingMatrix chain_coupling(int n_ions);

}  // namespace ionvac
