#include "ionvac/swap.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "ionvac/errors.hpp"
#include "ionvac/gaussian.hpp"
#include "ionvac/nelder_mead.hpp"

namespace ionvac {

namespace {

const Complex kI(0.0, 1.0);

Matrix annihilation(int d) {
    Matrix a = Matrix::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

template <class M>
M kron(const M& a, const M& b) {
    M out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

ComplexMatrix sigma_x() {
    ComplexMatrix s(2, 2);
    s << 0.0, 1.0, 1.0, 0.0;
    return s;
}

// i|up><down| - i|down><up| with up = index 0.
ComplexMatrix sigma_y() {
    ComplexMatrix s(2, 2);
    s << 0.0, kI, -kI, 0.0;
    return s;
}

struct QubitEigen {
    Vector values;
    ComplexMatrix vectors;
};

QubitEigen qubit_eigen(const ComplexMatrix& s) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s);
    return {es.eigenvalues(), es.eigenvectors()};
}

using RowMajorComplex = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Applies a 2d x 2d operator (index q*d + n) to the qubit/oscillator pair of one ion.
void apply_local(ComplexVector& psi, int d, const ComplexMatrix& local, PulseTarget ion) {
    ComplexVector slice(2 * d);
    for (int other_q = 0; other_q < 2; ++other_q) {
        for (int other_n = 0; other_n < d; ++other_n) {
            for (int q = 0; q < 2; ++q) {
                for (int n = 0; n < d; ++n) {
                    const auto idx = ion == PulseTarget::A ? FockStateVector::index(q, other_q, n, other_n, d)
                                                           : FockStateVector::index(other_q, q, other_n, n, d);
                    slice(q * d + n) = psi(idx);
                }
            }
            const ComplexVector out = local * slice;
            for (int q = 0; q < 2; ++q) {
                for (int n = 0; n < d; ++n) {
                    const auto idx = ion == PulseTarget::A ? FockStateVector::index(q, other_q, n, other_n, d)
                                                           : FockStateVector::index(other_q, q, other_n, n, d);
                    psi(idx) = out(q * d + n);
                }
            }
        }
    }
}

// exp(i theta sigma (x) O) as a 2d x 2d matrix, O = vecs diag(vals) vecs^dag.
template <class Vecs>
ComplexMatrix coupled_exponential(const ComplexMatrix& sigma, const Vector& vals, const Vecs& vecs, double theta) {
    const int d = static_cast<int>(vals.size());
    const QubitEigen qe = qubit_eigen(sigma);
    const ComplexMatrix v = vecs.template cast<Complex>();
    ComplexMatrix out = ComplexMatrix::Zero(2 * d, 2 * d);
    for (int s = 0; s < 2; ++s) {
        const ComplexVector phase = (kI * theta * qe.values(s) * vals).array().exp().matrix();
        const ComplexMatrix k = v * phase.asDiagonal() * v.adjoint();
        const ComplexMatrix proj = qe.vectors.col(s) * qe.vectors.col(s).adjoint();
        out += kron(proj, k);
    }
    return out;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\n\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\n\r");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

// ---------------------------------------------------------------------------
// Pulse sequences

PulseSequence parse_pulse_sequence(std::string_view text) {
    PulseSequence seq;
    const std::string all = trim(text);
    if (all.empty()) return seq;
    std::size_t pos = 0;
    while (pos <= all.size()) {
        const auto comma = all.find(',', pos);
        const std::string item = trim(std::string_view(all).substr(pos, comma == std::string::npos ? std::string::npos
                                                                                                   : comma - pos));
        pos = comma == std::string::npos ? all.size() + 1 : comma + 1;

        const auto colon = item.find(':');
        if (item.empty() || colon == std::string::npos) {
            throw ConfigError("pulse '" + item + "' is not of the form K:strength", "sequence");
        }
        std::string head = item.substr(0, colon);
        Pulse p;
        if (head.empty()) throw ConfigError("pulse '" + item + "' has no kind", "sequence");
        const char kind = static_cast<char>(std::toupper(static_cast<unsigned char>(head[0])));
        if (kind == 'V') {
            p.kind = PulseKind::V;
        } else if (kind == 'W') {
            p.kind = PulseKind::W;
        } else {
            throw ConfigError("unknown pulse kind in '" + item + "'", "sequence");
        }
        if (head.size() > 1) {
            if (head.size() != 3 || head[1] != '@') throw ConfigError("bad pulse target in '" + item + "'", "sequence");
            const char t = static_cast<char>(std::toupper(static_cast<unsigned char>(head[2])));
            if (t == 'A') {
                p.target = PulseTarget::A;
            } else if (t == 'B') {
                p.target = PulseTarget::B;
            } else {
                throw ConfigError("bad pulse target in '" + item + "'", "sequence");
            }
        }
        const std::string value = trim(std::string_view(item).substr(colon + 1));
        const char* first = value.data();
        const char* last = value.data() + value.size();
        if (!value.empty() && *first == '+') ++first;
        const auto [ptr, ec] = std::from_chars(first, last, p.strength);
        if (ec != std::errc() || ptr != last || !std::isfinite(p.strength)) {
            throw ConfigError("bad pulse strength in '" + item + "'", "sequence");
        }
        seq.push_back(p);
    }
    return seq;
}

std::string format_pulse_sequence(const PulseSequence& seq) {
    std::string out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i) out += ',';
        out += seq[i].kind == PulseKind::V ? 'V' : 'W';
        if (seq[i].target == PulseTarget::A) out += "@A";
        if (seq[i].target == PulseTarget::B) out += "@B";
        out += ':';
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof(buf), seq[i].strength);
        out.append(buf, res.ptr);
    }
    return out;
}

PulseSequence alternating_sequence(const Vector& strengths) {
    PulseSequence seq;
    for (Eigen::Index i = 0; i < strengths.size(); ++i) {
        seq.push_back({i % 2 == 0 ? PulseKind::V : PulseKind::W, PulseTarget::Both, strengths(i)});
    }
    return seq;
}

// ---------------------------------------------------------------------------
// Motional Hamiltonian and ground state

MotionalHamiltonian build_motional_hamiltonian(const CouplingMatrix& g2, const LocalModeBasis& basis) {
    if (g2.size() != 2) throw ConfigError("swap simulation needs a two-ion coupling matrix", "G");
    if (!(basis.gauge_frequency > 0.0)) throw ConfigError("gauge frequency must be positive", "gauge_frequency");
    if (basis.fock_dim < 2) throw ConfigError("Fock dimension must be at least 2", "fock_dim");

    const int d = basis.fock_dim;
    const double nu = basis.gauge_frequency;
    const Matrix a = annihilation(d);
    const Matrix ad = a.transpose();
    const Matrix number = ad * a;
    const Matrix a2 = a * a;
    const Matrix id = Matrix::Identity(d, d);

    // Normal-ordered squares, exact on the truncated space.
    const Matrix x2 = (a2 + a2.transpose() + 2.0 * number + id) / (2.0 * nu);
    const Matrix p2 = 0.5 * nu * (-a2 - a2.transpose() + 2.0 * number + id);
    const Matrix x = (a + ad) / std::sqrt(2.0 * nu);

    const Matrix& g = g2.g;
    Matrix h = 0.5 * (kron(p2, id) + kron(id, p2));
    h += 0.5 * (g(0, 0) * kron(x2, id) + g(1, 1) * kron(id, x2));
    h += 0.5 * (g(0, 1) + g(1, 0)) * kron(x, x);
    return MotionalHamiltonian{h, basis};
}

MotionalGroundState ground_state_fock(const MotionalHamiltonian& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.h);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on motional Hamiltonian");
    const int d = h.basis.fock_dim;

    MotionalGroundState g;
    g.fock_dim = d;
    g.energy = es.eigenvalues()(0);
    g.gap = es.eigenvalues().size() > 1 ? es.eigenvalues()(1) - es.eigenvalues()(0) : 0.0;
    if (es.eigenvalues().size() > 1 && g.gap < 1e-9) throw NumericalError("degenerate motional ground level");

    Vector v = es.eigenvectors().col(0);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    g.amplitudes = v.cast<Complex>();

    double top = 0.0;
    for (int na = 0; na < d; ++na) {
        for (int nb = 0; nb < d; ++nb) {
            if (na == d - 1 || nb == d - 1) top += std::norm(g.amplitudes(na * d + nb));
        }
    }
    g.top_population = top;
    if (top > 1e-6) {
        std::ostringstream msg;
        msg << "motional ground state leaks " << top << " into the top Fock level; increase fock_dim";
        throw TruncationLeak(msg.str(), top);
    }
    return g;
}

Vector schmidt_coefficients(const MotionalGroundState& ground) {
    const int d = ground.fock_dim;
    const ComplexMatrix amp = Eigen::Map<const RowMajorComplex>(ground.amplitudes.data(), d, d);
    Eigen::JacobiSVD<ComplexMatrix> svd(amp);
    return svd.singularValues();
}

double schmidt_entropy(const Vector& schmidt) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < schmidt.size(); ++i) {
        const double p = schmidt(i) * schmidt(i);
        if (p > 0.0) s -= p * std::log2(p);
    }
    return s;
}

// ---------------------------------------------------------------------------
// States and two-qubit measures

double FockStateVector::top_population() const {
    const int d = fock_dim;
    double top = 0.0;
    for (int q = 0; q < 4; ++q) {
        for (int na = 0; na < d; ++na) {
            for (int nb = 0; nb < d; ++nb) {
                if (na == d - 1 || nb == d - 1) top += std::norm(amplitudes((q * d + na) * d + nb));
            }
        }
    }
    return top;
}

ComplexMatrix FockStateVector::qubit_rows() const {
    const Eigen::Index m = static_cast<Eigen::Index>(fock_dim) * fock_dim;
    return Eigen::Map<const RowMajorComplex>(amplitudes.data(), 4, m);
}

double state_fidelity(const FockStateVector& a, const FockStateVector& b) {
    if (a.amplitudes.size() != b.amplitudes.size()) throw ConfigError("state dimensions differ", "state");
    return std::norm(a.amplitudes.dot(b.amplitudes));
}

double concurrence(const ComplexMatrix& rho) {
    if (rho.rows() != 4 || rho.cols() != 4) throw ConfigError("two-qubit density matrix must be 4x4", "rho");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-9) throw NumericalError("density matrix is not Hermitian");

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (rho + rho.adjoint()));
    if (es.eigenvalues().minCoeff() < -1e-9) throw NumericalError("density matrix is not positive semidefinite");
    const Vector clipped = es.eigenvalues().cwiseMax(0.0);
    const ComplexMatrix root = es.eigenvectors() * clipped.cwiseSqrt().cast<Complex>().asDiagonal() *
                               es.eigenvectors().adjoint();

    ComplexMatrix sy(2, 2);
    sy << 0.0, -kI, kI, 0.0;
    const ComplexMatrix yy = kron(sy, sy);
    const ComplexMatrix flipped = yy * rho.conjugate() * yy;
    const ComplexMatrix r = root * flipped * root;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> er(0.5 * (r + r.adjoint()), Eigen::EigenvaluesOnly);
    Vector l = er.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    std::sort(l.data(), l.data() + l.size(), std::greater<>());
    return std::max(0.0, l(0) - l(1) - l(2) - l(3));
}

double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double two_qubit_eof(const ComplexMatrix& rho) {
    const double c = std::min(1.0, concurrence(rho));
    if (c <= 0.0) return 0.0;
    return binary_entropy(0.5 * (1.0 + std::sqrt(1.0 - c * c)));
}

// ---------------------------------------------------------------------------
// Simulator

SwapSimulator::SwapSimulator(const CouplingMatrix& g2, LocalModeBasis basis)
    : basis_(basis), g2_(g2), hamiltonian_(build_motional_hamiltonian(g2, basis)),
      ground_(ground_state_fock(hamiltonian_)) {
    ground_entropy_ = entanglement_entropy(ground_state_covariance(g2), {1});

    const int d = basis_.fock_dim;
    const double nu = basis_.gauge_frequency;
    const Matrix a = annihilation(d);
    x_ = (a + a.transpose()) / std::sqrt(2.0 * nu);
    p_ = kI * std::sqrt(0.5 * nu) * (a.transpose() - a).cast<Complex>();

    Eigen::SelfAdjointEigenSolver<Matrix> ex(x_);
    x_eval_ = ex.eigenvalues();
    x_evec_ = ex.eigenvectors();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> ep(p_);
    p_eval_ = ep.eigenvalues();
    p_evec_ = ep.eigenvectors();
    Eigen::SelfAdjointEigenSolver<Matrix> eh(hamiltonian_.h);
    h_eval_ = eh.eigenvalues();
    h_evec_ = eh.eigenvectors();
}

FockStateVector SwapSimulator::initial_state() const {
    const int d = basis_.fock_dim;
    FockStateVector s{ComplexVector::Zero(4 * d * d), d};
    // |down, down> is qubit row 3.
    s.amplitudes.segment(3 * d * d, d * d) = ground_.amplitudes;
    return s;
}

void SwapSimulator::check_leak(const FockStateVector& state) const {
    const double top = state.top_population();
    if (top > leak_threshold) {
        std::ostringstream msg;
        msg << "pulse leaked population " << top << " into the top Fock level (d=" << basis_.fock_dim << ")";
        throw TruncationLeak(msg.str(), top);
    }
}

FockStateVector SwapSimulator::apply_pulse(const FockStateVector& state, const Pulse& pulse) const {
    if (state.fock_dim != basis_.fock_dim) throw ConfigError("state does not match the simulator basis", "state");
    if (!std::isfinite(pulse.strength)) throw ConfigError("pulse strength must be finite", "strength");
    FockStateVector out = state;
    if (pulse.strength == 0.0) return out;

    const ComplexMatrix local = pulse.kind == PulseKind::V
                                    ? coupled_exponential(sigma_x(), x_eval_, x_evec_, pulse.strength)
                                    : coupled_exponential(sigma_y(), p_eval_, p_evec_, pulse.strength);
    const int d = basis_.fock_dim;
    if (pulse.target != PulseTarget::B) apply_local(out.amplitudes, d, local, PulseTarget::A);
    if (pulse.target != PulseTarget::A) apply_local(out.amplitudes, d, local, PulseTarget::B);
    check_leak(out);
    return out;
}

FockStateVector SwapSimulator::free_evolution(const FockStateVector& state, double t) const {
    const int d = basis_.fock_dim;
    const ComplexVector phase = (-kI * t * h_eval_).array().exp().matrix();
    const ComplexMatrix v = h_evec_.cast<Complex>();
    RowMajorComplex rows = state.qubit_rows();
    // Each row r is a motional vector; r -> (V e^{-iEt} V^T r^T)^T.
    const ComplexMatrix prop = v * phase.asDiagonal() * v.transpose();
    rows = rows * prop.transpose();
    FockStateVector out{ComplexVector(4 * d * d), d};
    Eigen::Map<RowMajorComplex>(out.amplitudes.data(), 4, d * d) = rows;
    return out;
}

FockStateVector SwapSimulator::pulse_pair_w(const FockStateVector& state, PulseTarget target, double beta_prime,
                                            double tau) const {
    if (!(tau > 0.0)) throw ConfigError("free-evolution interval must be positive", "tau");
    const int d = basis_.fock_dim;
    const int m = d * d;

    // Heisenberg propagation of the exact quadratic dynamics: x(t) = C x + S p.
    const NormalModes nm = normal_modes(g2_);
    const Vector w = nm.frequencies;
    const Vector cosw = (w * tau).array().cos().matrix();
    const Vector sinc = ((w * tau).array().sin() / w.array()).matrix();
    const Matrix c = nm.vectors * cosw.asDiagonal() * nm.vectors.transpose();
    const Matrix s = nm.vectors * sinc.asDiagonal() * nm.vectors.transpose();

    const ComplexMatrix id = ComplexMatrix::Identity(d, d);
    const ComplexMatrix xc = x_.cast<Complex>();
    const ComplexMatrix xs[2] = {kron(xc, id), kron(id, xc)};
    const ComplexMatrix ps[2] = {kron(p_, id), kron(id, p_)};

    const QubitEigen qe = qubit_eigen(sigma_y());
    RowMajorComplex rows = state.qubit_rows();

    for (int k = 0; k < 2; ++k) {
        const bool hit = target == PulseTarget::Both || (k == 0 && target == PulseTarget::A) ||
                         (k == 1 && target == PulseTarget::B);
        if (!hit) continue;
        ComplexMatrix gen = ComplexMatrix::Zero(m, m);
        for (int j = 0; j < 2; ++j) gen += (c(k, j) - (j == k ? 1.0 : 0.0)) * xs[j] + s(k, j) * ps[j];
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> eg(0.5 * (gen + gen.adjoint()));

        RowMajorComplex next = RowMajorComplex::Zero(4, m);
        for (int e = 0; e < 2; ++e) {
            const ComplexVector phase = (kI * beta_prime * qe.values(e) * eg.eigenvalues()).array().exp().matrix();
            const ComplexMatrix kmat = eg.eigenvectors() * phase.asDiagonal() * eg.eigenvectors().adjoint();
            const ComplexMatrix proj = qe.vectors.col(e) * qe.vectors.col(e).adjoint();
            const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
            const ComplexMatrix proj4 = k == 0 ? kron(proj, id2) : kron(id2, proj);
            next += proj4 * rows * kmat.transpose();
        }
        rows = next;
    }

    // BCH remainder: exp(-(i/2) b'^2 sum_{jk} sigma_j sigma_k S_jk) over the kicked ions.
    double global = 0.0;
    if (target != PulseTarget::B) global += s(0, 0);
    if (target != PulseTarget::A) global += s(1, 1);
    rows *= std::exp(-0.5 * kI * beta_prime * beta_prime * global);
    if (target == PulseTarget::Both) {
        const double theta = -beta_prime * beta_prime * s(0, 1);
        const ComplexMatrix yy = kron(sigma_y(), sigma_y());
        const ComplexMatrix u = std::cos(theta) * ComplexMatrix::Identity(4, 4) + kI * std::sin(theta) * yy;
        rows = u * rows;
    }

    FockStateVector kicked{ComplexVector(4 * m), d};
    Eigen::Map<RowMajorComplex>(kicked.amplitudes.data(), 4, m) = rows;
    FockStateVector out = free_evolution(kicked, tau);
    check_leak(out);
    return out;
}

SwapResult SwapSimulator::evaluate(const FockStateVector& state) const {
    const ComplexMatrix rows = state.qubit_rows();
    SwapResult r;
    r.rho = rows * rows.adjoint();
    r.purity = (r.rho * r.rho).trace().real();
    r.concurrence = concurrence(r.rho);
    r.eof = two_qubit_eof(r.rho);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(r.rho, Eigen::EigenvaluesOnly);
    r.residual_motional_overlap = es.eigenvalues().maxCoeff();
    r.top_population = state.top_population();
    r.ground_entropy = ground_entropy_;
    r.ratio_to_ground_entropy = ground_entropy_ > 0.0 ? r.eof / ground_entropy_ : 0.0;
    return r;
}

SwapResult SwapSimulator::run(const PulseSequence& sequence) const {
    FockStateVector state = initial_state();
    for (const Pulse& p : sequence) state = apply_pulse(state, p);
    return evaluate(state);
}

// ---------------------------------------------------------------------------
// Optimisation

OptimizationResult optimize_sequence(const SwapSimulator& sim, const OptimizerOptions& options) {
    if (options.n_pairs < 1) throw ConfigError("need at least one V/W pair", "pairs");
    if (options.restarts < 1) throw ConfigError("need at least one restart", "restarts");

    const int dim = 2 * options.n_pairs;
    std::vector<NelderMeadResult> results(options.restarts);

    auto objective = [&sim](const Vector& v) {
        try {
            return -sim.run(alternating_sequence(v)).eof;
        } catch (const TruncationLeak&) {
            return 1.0;
        }
    };

    auto one_restart = [&](int r) {
        std::uint64_t state = options.seed ^ (0xa0761d6478bd642fULL * static_cast<std::uint64_t>(r + 1));
        Vector start(dim);
        for (int i = 0; i < dim; ++i) start(i) = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
        NelderMeadOptions nm;
        nm.max_evaluations = options.max_evaluations;
        results[r] = nelder_mead(objective, start, nm);
    };

    int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, options.restarts);
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int r = next++; r < options.restarts; r = next++) {
                try {
                    one_restart(r);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    OptimizationResult out;
    double best = 2.0;
    for (int r = 0; r < options.restarts; ++r) {
        out.restart_eof.push_back(-results[r].value);
        out.evaluations += results[r].evaluations;
        if (results[r].value < best) {
            best = results[r].value;
            out.best_restart = r;
        }
    }
    out.sequence = alternating_sequence(results[out.best_restart].x);
    out.result = sim.run(out.sequence);
    return out;
}

}  // namespace ionvac
