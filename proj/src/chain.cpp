#include "ionvac/chain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ionvac/errors.hpp"

namespace ionvac {

namespace {

bool strictly_ascending(const Vector& u) {
    for (Eigen::Index i = 1; i < u.size(); ++i) {
        if (!(u(i) > u(i - 1))) return false;
    }
    return true;
}

Matrix potential_hessian(const Vector& u) {
    const Eigen::Index n = u.size();
    Matrix g = Matrix::Identity(n, n);
    for (Eigen::Index m = 0; m < n; ++m) {
        for (Eigen::Index k = m + 1; k < n; ++k) {
            const double d = std::abs(u(m) - u(k));
            const double c = 2.0 / (d * d * d);
            g(m, m) += c;
            g(k, k) += c;
            g(m, k) -= c;
            g(k, m) -= c;
        }
    }
    return g;
}

}  // namespace

Vector equilibrium_residual(const Vector& u) {
    const Eigen::Index n = u.size();
    Vector f = u;
    for (Eigen::Index m = 0; m < n; ++m) {
        double left = 0.0;
        double right = 0.0;
        for (Eigen::Index k = 0; k < m; ++k) {
            const double d = u(m) - u(k);
            left += 1.0 / (d * d);
        }
        for (Eigen::Index k = m + 1; k < n; ++k) {
            const double d = u(k) - u(m);
            right += 1.0 / (d * d);
        }
        f(m) += right - left;
    }
    return f;
}

EquilibriumPositions solve_equilibrium(const ChainSpec& spec, const NewtonOptions& options) {
    const int n = spec.n_ions;
    if (n < 1) throw ConfigError("chain needs at least one ion", "n_ions");

    EquilibriumPositions out;
    if (n == 1) {
        out.u = Vector::Zero(1);
        return out;
    }

    // Half-width of the seed; roughly the N^0.56 growth of the true chain length.
    const double half_width = 1.1 * std::pow(static_cast<double>(n), 0.56);
    Vector u = Vector::LinSpaced(n, -half_width, half_width);
    Vector f = equilibrium_residual(u);
    double res = f.cwiseAbs().maxCoeff();

    int it = 0;
    for (; it < options.max_iterations && res > options.tolerance; ++it) {
        const Matrix jac = potential_hessian(u);
        const Vector step = jac.ldlt().solve(-f);

        double damping = 1.0;
        bool accepted = false;
        for (int tries = 0; tries < 60; ++tries, damping *= 0.5) {
            const Vector trial = u + damping * step;
            if (!strictly_ascending(trial)) continue;
            const Vector ft = equilibrium_residual(trial);
            const double rt = ft.cwiseAbs().maxCoeff();
            if (rt < res) {
                u = trial;
                f = ft;
                res = rt;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;  // at the round-off floor
    }

    // Symmetrise: the exact solution is reflection antisymmetric.
    const Vector mirrored = -u.reverse();
    const Vector sym = 0.5 * (u + mirrored);
    const Vector fsym = equilibrium_residual(sym);
    if (fsym.cwiseAbs().maxCoeff() <= res) {
        u = sym;
        res = fsym.cwiseAbs().maxCoeff();
    }

    if (!(res <= options.tolerance)) {
        std::ostringstream msg;
        msg << "equilibrium solver did not converge for N=" << n << " after " << it
            << " iterations; residual norm " << res;
        throw NumericalError(msg.str());
    }
    out.u = u;
    out.residual = res;
    out.iterations = it;
    return out;
}

CouplingMatrix coupling_matrix(const EquilibriumPositions& positions) {
    const Vector& u = positions.u;
    if (u.size() < 1) throw ConfigError("empty position list", "positions");
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        for (Eigen::Index k = i + 1; k < u.size(); ++k) {
            if (u(i) == u(k)) throw ConfigError("coincident ion positions", "positions");
        }
    }
    return CouplingMatrix{potential_hessian(u)};
}

NormalModes normal_modes(const CouplingMatrix& coupling) {
    const Matrix& g = coupling.g;
    if (g.rows() != g.cols() || g.rows() == 0) throw ConfigError("coupling matrix must be square", "G");

    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (g + g.transpose()));
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on coupling matrix");

    const Vector& w2 = es.eigenvalues();
    if (w2.minCoeff() <= 0.0) {
        std::ostringstream msg;
        msg << "coupling matrix is not positive definite (lowest eigenvalue " << w2.minCoeff()
            << "); unstable configuration";
        throw NumericalError(msg.str());
    }

    NormalModes modes;
    modes.frequencies = w2.cwiseSqrt();
    modes.vectors = es.eigenvectors();
    for (Eigen::Index c = 0; c < modes.vectors.cols(); ++c) {
        Eigen::Index arg = 0;
        modes.vectors.col(c).cwiseAbs().maxCoeff(&arg);
        if (modes.vectors(arg, c) < 0.0) modes.vectors.col(c) *= -1.0;
    }
    return modes;
}

CouplingMatrix truncated_coupling(const CouplingMatrix& coupling, int cut) {
    const int n = coupling.size();
    if (cut < 1 || cut >= n) {
        std::ostringstream msg;
        msg << "cut " << cut << " outside [1, " << n - 1 << "]";
        throw ConfigError(msg.str(), "cut");
    }
    CouplingMatrix out = coupling;
    out.g.topRightCorner(cut, n - cut).setZero();
    out.g.bottomLeftCorner(n - cut, cut).setZero();
    return out;
}

CouplingMatrix chain_coupling(int n_ions) {
    return coupling_matrix(solve_equilibrium(ChainSpec{n_ions}));
}

}  // namespace ionvac
