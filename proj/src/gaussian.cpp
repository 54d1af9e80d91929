#include "ionvac/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ionvac/errors.hpp"

namespace ionvac {

namespace {

constexpr double kPhysicalFloor = 0.5 - 1e-6;

void check_sites(const SiteList& sites, int modes, const char* field) {
    if (sites.empty()) throw ConfigError("site list is empty", field);
    std::set<int> seen;
    for (int s : sites) {
        if (s < 1 || s > modes) {
            std::ostringstream msg;
            msg << "site " << s << " outside 1.." << modes;
            throw ConfigError(msg.str(), field);
        }
        if (!seen.insert(s).second) throw ConfigError("duplicate site in list", field);
    }
}

Matrix psd_sqrt(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on covariance matrix");
    if (es.eigenvalues().minCoeff() <= 0.0) throw NumericalError("covariance matrix is not positive definite");
    return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

}  // namespace

Matrix symplectic_form(int modes) {
    Matrix omega = Matrix::Zero(2 * modes, 2 * modes);
    omega.topRightCorner(modes, modes) = Matrix::Identity(modes, modes);
    omega.bottomLeftCorner(modes, modes) = -Matrix::Identity(modes, modes);
    return omega;
}

CovarianceMatrix ground_state_covariance(const CouplingMatrix& coupling) {
    const NormalModes nm = normal_modes(coupling);
    const int n = nm.size();
    const Matrix& m = nm.vectors;
    CovarianceMatrix cov{Matrix::Zero(2 * n, 2 * n)};
    cov.sigma.topLeftCorner(n, n) = 0.5 * m * nm.frequencies.cwiseInverse().asDiagonal() * m.transpose();
    cov.sigma.bottomRightCorner(n, n) = 0.5 * m * nm.frequencies.asDiagonal() * m.transpose();
    return cov;
}

CovarianceMatrix reduce(const CovarianceMatrix& cov, const SiteList& sites) {
    const int n = cov.modes();
    check_sites(sites, n, "sites");
    const int k = static_cast<int>(sites.size());
    std::vector<int> idx;
    idx.reserve(2 * k);
    for (int s : sites) idx.push_back(s - 1);
    for (int s : sites) idx.push_back(n + s - 1);

    CovarianceMatrix out{Matrix(2 * k, 2 * k)};
    for (int i = 0; i < 2 * k; ++i) {
        for (int j = 0; j < 2 * k; ++j) out.sigma(i, j) = cov.sigma(idx[i], idx[j]);
    }
    return out;
}

SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& cov, bool allow_unphysical) {
    const int n = cov.modes();
    if (n == 0) return {};
    const Matrix root = psd_sqrt(cov.sigma);
    // i * S Omega S is Hermitian with eigenvalues +-mu.
    const ComplexMatrix k = Complex(0.0, 1.0) * (root * symplectic_form(n) * root).cast<Complex>();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(k, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed in symplectic spectrum");

    Vector mu = es.eigenvalues().tail(n).reverse();
    if (!allow_unphysical && mu.minCoeff() < kPhysicalFloor) {
        std::ostringstream msg;
        msg << "invalid covariance matrix: symplectic eigenvalue " << mu.minCoeff() << " < 1/2";
        throw NumericalError(msg.str());
    }
    return SymplecticSpectrum{mu};
}

double mode_entropy(double mu) {
    if (!(mu > 0.5)) return 0.0;
    return xlog2x(mu + 0.5) - xlog2x(mu - 0.5);
}

double entanglement_entropy(const CovarianceMatrix& pure_state, const SiteList& partition) {
    const int n = pure_state.modes();
    const SymplecticSpectrum global = symplectic_eigenvalues(pure_state);
    if ((global.mu.array() - 0.5).abs().maxCoeff() > 1e-6) {
        throw NumericalError("entanglement entropy requires a pure global state");
    }
    if (partition.empty() || static_cast<int>(partition.size()) == n) {
        if (!partition.empty()) check_sites(partition, n, "partition");
        return 0.0;
    }
    const SymplecticSpectrum local = symplectic_eigenvalues(reduce(pure_state, partition));
    double s = 0.0;
    for (Eigen::Index i = 0; i < local.mu.size(); ++i) s += mode_entropy(local.mu(i));
    return s;
}

double log_negativity(const CovarianceMatrix& cov, const SiteList& group_a, const SiteList& group_b) {
    const int n = cov.modes();
    check_sites(group_a, n, "group_a");
    check_sites(group_b, n, "group_b");
    for (int a : group_a) {
        if (std::find(group_b.begin(), group_b.end(), a) != group_b.end()) {
            throw ConfigError("groups overlap", "group_b");
        }
    }
    SiteList both = group_a;
    both.insert(both.end(), group_b.begin(), group_b.end());
    CovarianceMatrix pt = reduce(cov, both);

    // Partial transpose on B: p_B -> -p_B.
    const int k = static_cast<int>(both.size());
    const int ka = static_cast<int>(group_a.size());
    Vector flip = Vector::Ones(2 * k);
    flip.tail(k - ka).setConstant(-1.0);
    pt.sigma = flip.asDiagonal() * pt.sigma * flip.asDiagonal();

    const SymplecticSpectrum spec = symplectic_eigenvalues(pt, true);
    double ln = 0.0;
    for (Eigen::Index i = 0; i < spec.mu.size(); ++i) ln += std::max(0.0, -std::log2(2.0 * spec.mu(i)));
    return ln;
}

TwoIonSqueezing squeezing_from_frequencies(double nu0, double nu1) {
    if (!(nu0 > 0.0) || !(nu1 > 0.0)) throw ConfigError("mode frequencies must be positive", "frequencies");
    TwoIonSqueezing out;
    out.lambda = 0.25 * (std::sqrt(nu0 / nu1) + std::sqrt(nu1 / nu0));
    out.e_beta = std::sqrt((out.lambda - 0.5) / (out.lambda + 0.5));
    out.entropy_ebits = mode_entropy(out.lambda);
    return out;
}

TwoIonSqueezing two_ion_analytics() {
    const NormalModes nm = normal_modes(chain_coupling(2));
    return squeezing_from_frequencies(nm.frequencies(0), nm.frequencies(1));
}

std::vector<EntropyRow> entropy_vs_chain_size(const std::vector<int>& chain_sizes) {
    std::vector<EntropyRow> rows;
    rows.reserve(chain_sizes.size());
    for (int n : chain_sizes) {
        if (n < 2 || n % 2 != 0) throw ConfigError("chain sizes must be even and >= 2", "n_ions");
        const CovarianceMatrix cov = ground_state_covariance(chain_coupling(n));
        SiteList left(n / 2);
        for (int i = 0; i < n / 2; ++i) left[i] = i + 1;
        rows.push_back({n, entanglement_entropy(cov, left)});
    }
    return rows;
}

std::pair<SiteList, SiteList> centered_groups(int n_ions, int group_size, int separation) {
    if (group_size < 1) throw ConfigError("group size must be positive", "group_size");
    if (separation < 0) throw ConfigError("separation must be non-negative", "separation");
    const int span = 2 * group_size + separation;
    if (span > n_ions) {
        std::ostringstream msg;
        msg << "two groups of " << group_size << " separated by " << separation << " do not fit in " << n_ions
            << " ions";
        throw ConfigError(msg.str(), "group_size");
    }
    const int first = (n_ions - span) / 2 + 1;
    SiteList a(group_size);
    SiteList b(group_size);
    for (int i = 0; i < group_size; ++i) {
        a[i] = first + i;
        b[i] = first + group_size + separation + i;
    }
    return {a, b};
}

std::vector<NegativityRow> negativity_vs_separation(int n_ions, const std::vector<int>& group_sizes) {
    if (n_ions < 2) throw ConfigError("need at least two ions", "n_ions");
    const CovarianceMatrix cov = ground_state_covariance(chain_coupling(n_ions));
    std::vector<NegativityRow> rows;
    for (int g : group_sizes) {
        if (g < 1 || 2 * g > n_ions) {
            std::ostringstream msg;
            msg << "group size " << g << " does not fit twice in " << n_ions << " ions";
            throw ConfigError(msg.str(), "group_size");
        }
        for (int s = 0; 2 * g + s <= n_ions; ++s) {
            auto [a, b] = centered_groups(n_ions, g, s);
            rows.push_back({s, g, log_negativity(cov, a, b), a, b});
        }
    }
    return rows;
}

}  // namespace ionvac
