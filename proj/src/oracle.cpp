#include "ionvac/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/numeric/odeint.hpp>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include "ionvac/errors.hpp"

namespace ionvac::oracle {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

long long ipow(int base, int exp) {
    long long r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

// digit of site k (0-based) in a flat index with site 0 most significant
int digit(long long index, int site, int n_sites, int d) {
    for (int s = n_sites - 1; s > site; --s) index /= d;
    return static_cast<int>(index % d);
}

SparseMatrix chain_hamiltonian(const Matrix& g, int d, Vector& gauges) {
    const int n = static_cast<int>(g.rows());
    const long long dim = ipow(d, n);
    gauges = g.diagonal().cwiseSqrt();
    std::vector<long long> stride(n);
    for (int k = 0; k < n; ++k) stride[k] = ipow(d, n - 1 - k);

    std::vector<Triplet> trips;
    for (long long idx = 0; idx < dim; ++idx) {
        std::vector<int> occ(n);
        for (int k = 0; k < n; ++k) occ[k] = static_cast<int>((idx / stride[k]) % d);

        // each site: p^2/2 + G_kk x^2/2 with the gauge chosen so that only n + 1/2 survives
        double diag = 0.0;
        for (int k = 0; k < n; ++k) diag += gauges(k) * (occ[k] + 0.5);
        trips.emplace_back(idx, idx, diag);

        // x_j x_k cross terms, x = (a + a^dag)/sqrt(2 g)
        for (int j = 0; j < n; ++j) {
            for (int k = j + 1; k < n; ++k) {
                const double c = g(j, k) / std::sqrt(4.0 * gauges(j) * gauges(k));
                if (c == 0.0) continue;
                for (int sj : {-1, 1}) {
                    const int nj = occ[j] + sj;
                    if (nj < 0 || nj >= d) continue;
                    const double fj = std::sqrt(static_cast<double>(std::max(occ[j], nj)));
                    for (int sk : {-1, 1}) {
                        const int nk = occ[k] + sk;
                        if (nk < 0 || nk >= d) continue;
                        const double fk = std::sqrt(static_cast<double>(std::max(occ[k], nk)));
                        trips.emplace_back(idx + sj * stride[j] + sk * stride[k], idx, c * fj * fk);
                    }
                }
            }
        }
    }
    SparseMatrix h(dim, dim);
    h.setFromTriplets(trips.begin(), trips.end());
    return h;
}

// Lowest eigenpair by restarted Lanczos with full reorthogonalisation.
std::pair<double, Vector> lowest_eigenpair(const SparseMatrix& h) {
    const Eigen::Index dim = h.rows();
    if (dim <= 1500) {
        Eigen::SelfAdjointEigenSolver<Matrix> es{Matrix(h)};
        return {es.eigenvalues()(0), es.eigenvectors().col(0)};
    }
    Vector start = Vector::Ones(dim).normalized();
    double energy = 0.0;
    const int krylov = 120;
    for (int restart = 0; restart < 50; ++restart) {
        Matrix basis(dim, krylov);
        Vector alpha(krylov);
        Vector beta(krylov);
        basis.col(0) = start;
        int m = krylov;
        for (int j = 0; j < krylov; ++j) {
            Vector w = h * basis.col(j);
            alpha(j) = basis.col(j).dot(w);
            for (int pass = 0; pass < 2; ++pass) w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
            beta(j) = w.norm();
            if (j + 1 == krylov) break;
            if (beta(j) < 1e-13) {
                m = j + 1;
                break;
            }
            basis.col(j + 1) = w / beta(j);
        }
        Matrix tri = Matrix::Zero(m, m);
        for (int j = 0; j < m; ++j) {
            tri(j, j) = alpha(j);
            if (j + 1 < m) tri(j, j + 1) = tri(j + 1, j) = beta(j);
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(tri);
        energy = es.eigenvalues()(0);
        start = (basis.leftCols(m) * es.eigenvectors().col(0)).normalized();
        const double residual = (h * start - energy * start).norm();
        if (residual < 1e-11) break;
    }
    return {energy, start};
}

// Rows indexed by the digits of `rows` (in order), columns by the remaining sites.
Matrix reshape(const FockChainState& s, const std::vector<int>& rows) {
    const int n = s.n_sites;
    const int d = s.fock_dim;
    std::vector<int> cols;
    for (int k = 1; k <= n; ++k) {
        if (std::find(rows.begin(), rows.end(), k) == rows.end()) cols.push_back(k);
    }
    Matrix out = Matrix::Zero(ipow(d, static_cast<int>(rows.size())), ipow(d, static_cast<int>(cols.size())));
    for (long long idx = 0; idx < s.amplitudes.size(); ++idx) {
        long long r = 0;
        long long c = 0;
        for (int site : rows) r = r * d + digit(idx, site - 1, n, d);
        for (int site : cols) c = c * d + digit(idx, site - 1, n, d);
        out(r, c) = s.amplitudes(idx);
    }
    return out;
}

void check_sites(const FockChainState& s, const std::vector<int>& sites) {
    for (int k : sites) {
        if (k < 1 || k > s.n_sites) throw ConfigError("site " + std::to_string(k) + " out of range", "sites");
    }
}

}  // namespace

FockChainState fock_ground_state(const CouplingMatrix& g, int fock_dim) {
    if (fock_dim < 2) throw ConfigError("fock_dim must be at least 2", "fock_dim");
    const int n = g.size();
    if (n < 1 || ipow(fock_dim, n) > 3'000'000) throw ConfigError("Fock oracle dimension too large", "n_ions");
    Vector gauges;
    const SparseMatrix h = chain_hamiltonian(g.g, fock_dim, gauges);
    auto [energy, psi] = lowest_eigenpair(h);
    Eigen::Index imax = 0;
    psi.cwiseAbs().maxCoeff(&imax);
    if (psi(imax) < 0) psi = -psi;

    FockChainState s;
    s.amplitudes = psi;
    s.n_sites = n;
    s.fock_dim = fock_dim;
    s.energy = energy;
    for (long long idx = 0; idx < psi.size(); ++idx) {
        for (int k = 0; k < n; ++k) {
            if (digit(idx, k, n, fock_dim) == fock_dim - 1) {
                s.top_population += psi(idx) * psi(idx);
                break;
            }
        }
    }
    return s;
}

Matrix fock_reduced_density(const FockChainState& state, const std::vector<int>& sites) {
    check_sites(state, sites);
    const Matrix psi = reshape(state, sites);
    return psi * psi.transpose();
}

double fock_entropy(const FockChainState& state, const std::vector<int>& partition) {
    check_sites(state, partition);
    if (partition.empty() || static_cast<int>(partition.size()) == state.n_sites) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(reshape(state, partition));
    double s = 0.0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        const double p = svd.singularValues()(i) * svd.singularValues()(i);
        if (p > 1e-300) s -= p * std::log2(p);
    }
    return s;
}

double fock_log_negativity(const FockChainState& state, const std::vector<int>& group_a,
                           const std::vector<int>& group_b) {
    std::vector<int> both = group_a;
    both.insert(both.end(), group_b.begin(), group_b.end());
    const Matrix rho = fock_reduced_density(state, both);
    const long long da = ipow(state.fock_dim, static_cast<int>(group_a.size()));
    const long long db = ipow(state.fock_dim, static_cast<int>(group_b.size()));
    Matrix pt(rho.rows(), rho.cols());
    for (long long a1 = 0; a1 < da; ++a1)
        for (long long b1 = 0; b1 < db; ++b1)
            for (long long a2 = 0; a2 < da; ++a2)
                for (long long b2 = 0; b2 < db; ++b2) pt(a1 * db + b1, a2 * db + b2) = rho(a1 * db + b2, a2 * db + b1);
    Eigen::SelfAdjointEigenSolver<Matrix> es(pt, Eigen::EigenvaluesOnly);
    return std::log2(es.eigenvalues().cwiseAbs().sum());
}

DysonAmplitudes dyson_second_order(const NormalModes& modes, int probe_a, int probe_b, double detuning,
                                   double duration, double omega, DysonSchedule schedule, int fock_dim,
                                   double tolerance) {
    const int n = modes.size();
    if (probe_a < 1 || probe_a > n || probe_b < 1 || probe_b > n || probe_a == probe_b) {
        throw ConfigError("invalid probe pair", "probes");
    }
    if (fock_dim < 3) throw ConfigError("second order needs at least 3 levels per mode", "fock_dim");
    const long long dim = ipow(fock_dim, n);
    if (dim > 200000) throw ConfigError("Dyson oracle dimension too large", "n_ions");

    // Lowering operator of each mode on the product space.
    std::vector<SparseMatrix> lower(n, SparseMatrix(dim, dim));
    for (int m = 0; m < n; ++m) {
        std::vector<Triplet> trips;
        const long long stride = ipow(fock_dim, n - 1 - m);
        for (long long idx = 0; idx < dim; ++idx) {
            const int occ = static_cast<int>((idx / stride) % fock_dim);
            if (occ > 0) trips.emplace_back(idx - stride, idx, std::sqrt(static_cast<double>(occ)));
        }
        lower[m].setFromTriplets(trips.begin(), trips.end());
    }

    // Qubit raising operators on the 4-dim space, index qa*2 + qb with 0 = up.
    Eigen::Matrix4d raise_a = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d raise_b = Eigen::Matrix4d::Zero();
    for (int q = 0; q < 2; ++q) {
        raise_a(0 * 2 + q, 1 * 2 + q) = 1.0;
        raise_b(q * 2 + 0, q * 2 + 1) = 1.0;
    }

    const Complex i_unit(0.0, 1.0);
    // Layout: psi stored as dim x 4 (column = qubit configuration), flattened column-major.
    using State = std::vector<Complex>;
    auto apply_h = [&](double t, const Complex* in, Complex* out, bool use_a, bool use_b) {
        Eigen::Map<const ComplexMatrix> psi(in, dim, 4);
        Eigen::Map<ComplexMatrix> res(out, dim, 4);
        for (int which = 0; which < 2; ++which) {
            if ((which == 0 && !use_a) || (which == 1 && !use_b)) continue;
            const int site = (which == 0 ? probe_a : probe_b) - 1;
            const Eigen::Matrix4d& up = which == 0 ? raise_a : raise_b;
            const ComplexMatrix q = std::exp(i_unit * detuning * t) * up.cast<Complex>() +
                                    std::exp(-i_unit * detuning * t) * up.transpose().cast<Complex>();
            ComplexMatrix xpsi = ComplexMatrix::Zero(dim, 4);
            for (int m = 0; m < n; ++m) {
                const double amp = modes.vectors(site, m) / std::sqrt(2.0 * modes.frequencies(m));
                const Complex ph = std::exp(-i_unit * modes.frequencies(m) * t);
                const ComplexMatrix lp = lower[m].cast<Complex>() * psi;
                const ComplexMatrix rp = lower[m].transpose().cast<Complex>() * psi;
                xpsi += amp * (ph * lp + std::conj(ph) * rp);
            }
            res += -i_unit * omega * xpsi * q.transpose();
        }
    };

    const std::size_t block = static_cast<std::size_t>(dim) * 4;
    State psi0(block, 0.0);
    psi0[static_cast<std::size_t>(3 * dim)] = 1.0;  // |down,down> (x) vac

    namespace ode = boost::numeric::odeint;
    using Stepper = ode::runge_kutta_dopri5<State>;
    const double dt0 = std::min(0.01, duration / 50.0);

    State psi1(block, 0.0);
    State psi2(block, 0.0);
    if (schedule == DysonSchedule::Simultaneous) {
        State y(2 * block, 0.0);
        auto rhs = [&](const State& s, State& dsdt, double t) {
            std::fill(dsdt.begin(), dsdt.end(), Complex(0.0));
            apply_h(t, psi0.data(), dsdt.data(), true, true);
            apply_h(t, s.data(), dsdt.data() + block, true, true);
        };
        ode::integrate_adaptive(ode::make_controlled<Stepper>(tolerance, tolerance), rhs, y, 0.0, duration, dt0);
        std::copy(y.begin(), y.begin() + block, psi1.begin());
        std::copy(y.begin() + block, y.end(), psi2.begin());
    } else {
        State first(block, 0.0);
        auto rhs_b = [&](const State&, State& dsdt, double t) {
            std::fill(dsdt.begin(), dsdt.end(), Complex(0.0));
            apply_h(t, psi0.data(), dsdt.data(), false, true);
        };
        ode::integrate_adaptive(ode::make_controlled<Stepper>(tolerance, tolerance), rhs_b, first, 0.0, duration, dt0);
        State y(2 * block, 0.0);
        auto rhs_a = [&](const State&, State& dsdt, double t) {
            std::fill(dsdt.begin(), dsdt.end(), Complex(0.0));
            apply_h(t, psi0.data(), dsdt.data(), true, false);
            apply_h(t, first.data(), dsdt.data() + block, true, false);
        };
        ode::integrate_adaptive(ode::make_controlled<Stepper>(tolerance, tolerance), rhs_a, y, 0.0, duration, dt0);
        // first-order part is the sum of both probes' single kicks
        for (std::size_t k = 0; k < block; ++k) psi1[k] = y[k] + first[k];
        std::copy(y.begin() + block, y.end(), psi2.begin());
    }

    DysonAmplitudes out;
    out.emission_a.resize(n);
    out.emission_b.resize(n);
    for (int m = 0; m < n; ++m) {
        const long long one = ipow(fock_dim, n - 1 - m);
        out.emission_a(m) = i_unit * psi1[static_cast<std::size_t>(1 * dim + one)];  // up,down
        out.emission_b(m) = i_unit * psi1[static_cast<std::size_t>(2 * dim + one)];  // down,up
    }
    out.exchange = -psi2[0];  // up,up (x) vac
    return out;
}

}  // namespace ionvac::oracle
