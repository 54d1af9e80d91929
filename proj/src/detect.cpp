#include "ionvac/detect.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <Eigen/Eigenvalues>

#include "ionvac/errors.hpp"

namespace ionvac {

namespace {

const Complex kI(0.0, 1.0);

// (e^{i theta} - 1)/(i theta), stable near theta = 0.
Complex phase_ramp(double theta) {
    if (std::abs(theta) < 1e-8) return {1.0, 0.5 * theta};
    const double half = std::sin(0.5 * theta);
    return {std::sin(theta) / theta, 2.0 * half * half / theta};
}

void check_probe(int probe, int n, const char* field) {
    if (probe < 1 || probe > n) {
        std::ostringstream msg;
        msg << "probe " << probe << " outside 1.." << n;
        throw ConfigError(msg.str(), field);
    }
}

Matrix coupling_from_modes(const NormalModes& modes) {
    return modes.vectors * modes.frequencies.cwiseAbs2().asDiagonal() * modes.vectors.transpose();
}

double column_norm(const ComplexVector& v) { return v.norm(); }

}  // namespace

void validate(const DetectionConfig& cfg) {
    if (cfg.n_ions < 2) throw ConfigError("detection needs at least two ions", "n_ions");
    check_probe(cfg.probe_a, cfg.n_ions, "probes");
    check_probe(cfg.probe_b, cfg.n_ions, "probes");
    if (!(cfg.probe_a < cfg.probe_b)) throw ConfigError("probes must satisfy probe_a < probe_b", "probes");
    if (!(cfg.duration > 0.0) || !std::isfinite(cfg.duration)) throw ConfigError("duration must be positive", "duration");
    if (!std::isfinite(cfg.detuning)) throw ConfigError("detuning must be finite", "detuning");
    if (!(cfg.omega > 0.0) || !std::isfinite(cfg.omega)) throw ConfigError("omega must be positive", "omega");
}

Complex oscillation_integral(double w, double duration) { return duration * phase_ramp(w * duration); }

Complex nested_integral(double a, double b, double duration) {
    const double t = duration;
    if (std::abs(b) * t > 1e-3) {
        return (oscillation_integral(a + b, t) - oscillation_integral(a, t)) / (kI * b);
    }
    // Inner integral t * phase_ramp(b t) is smooth; fixed-order Gauss-Legendre is exact to round-off here.
    auto f_re = [&](double s) { return (std::exp(kI * a * s) * s * phase_ramp(b * s)).real(); };
    auto f_im = [&](double s) { return (std::exp(kI * a * s) * s * phase_ramp(b * s)).imag(); };
    using Gauss = boost::math::quadrature::gauss<double, 60>;
    const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(a) * t / 20.0)));
    Complex sum = 0.0;
    for (int i = 0; i < pieces; ++i) {
        const double lo = t * i / pieces;
        const double hi = t * (i + 1) / pieces;
        sum += Complex(Gauss::integrate(f_re, lo, hi), Gauss::integrate(f_im, lo, hi));
    }
    return sum;
}

ModeIntegrals mode_integrals(const NormalModes& modes, double detuning, double duration) {
    if (!(duration > 0.0)) throw ConfigError("duration must be positive", "duration");
    const int n = modes.size();
    ModeIntegrals out{ComplexVector(n), ComplexVector(n)};
    for (int m = 0; m < n; ++m) {
        out.plus(m) = oscillation_integral(detuning + modes.frequencies(m), duration);
        out.minus(m) = oscillation_integral(detuning - modes.frequencies(m), duration);
    }
    return out;
}

PerturbativeAmplitudes mode_sum_amplitudes(const NormalModes& modes, int probe_a, int probe_b, double detuning,
                                           double duration, double omega) {
    const int n = modes.size();
    check_probe(probe_a, n, "probes");
    check_probe(probe_b, n, "probes");
    const ModeIntegrals ints = mode_integrals(modes, detuning, duration);
    const int a = probe_a - 1;
    const int b = probe_b - 1;

    PerturbativeAmplitudes amps;
    amps.emission_a.resize(n);
    amps.emission_b.resize(n);
    amps.exchange = 0.0;
    Complex correction = 0.0;
    for (int m = 0; m < n; ++m) {
        const double nu = modes.frequencies(m);
        const double ma = modes.vectors(a, m);
        const double mb = modes.vectors(b, m);
        const double scale = 1.0 / std::sqrt(2.0 * nu);
        amps.emission_a(m) = omega * ma * scale * ints.plus(m);
        amps.emission_b(m) = omega * mb * scale * ints.plus(m);
        // annihilator from X_A, creator from X_B
        amps.exchange += omega * omega * ma * mb / (2.0 * nu) * ints.minus(m) * ints.plus(m);
        correction += ma * mb / nu *
                      (nested_integral(detuning + nu, detuning - nu, duration) -
                       nested_integral(detuning - nu, detuning + nu, duration));
    }
    amps.exchange_time_ordered = amps.exchange - 0.5 * omega * omega * correction;
    amps.overlap_ab = amps.emission_a.dot(amps.emission_b);
    amps.norm_a = column_norm(amps.emission_a);
    amps.norm_b = column_norm(amps.emission_b);
    return amps;
}

PerturbativeAmplitudes heisenberg_amplitudes(const NormalModes& vacuum, const NormalModes& dynamics, int probe_a,
                                             int probe_b, double detuning, double duration, double omega) {
    const int n = vacuum.size();
    if (dynamics.size() != n) throw ConfigError("vacuum and dynamics describe different chains", "modes");
    check_probe(probe_a, n, "probes");
    check_probe(probe_b, n, "probes");

    // Time integrals of e^{i delta t} cos(w t) and e^{i delta t} sin(w t) per dynamics mode.
    ComplexVector cos_int(n);
    ComplexVector sin_int(n);
    for (int m = 0; m < n; ++m) {
        const double w = dynamics.frequencies(m);
        const Complex ip = oscillation_integral(detuning + w, duration);
        const Complex im = oscillation_integral(detuning - w, duration);
        cos_int(m) = 0.5 * (ip + im);
        sin_int(m) = (ip - im) / (2.0 * kI * w);
    }
    const ComplexMatrix md = dynamics.vectors.cast<Complex>();
    const ComplexMatrix mv = vacuum.vectors.cast<Complex>();
    const Vector& nu = vacuum.frequencies;

    // X_k = sum_j xc_j x_j + pc_j p_j, then ladder coefficients on the vacuum modes.
    auto ladder = [&](int probe, ComplexVector& create, ComplexVector& annihilate) {
        const ComplexVector row = md.row(probe - 1).transpose();
        const ComplexVector xc = omega * md * cos_int.cwiseProduct(row);
        const ComplexVector pc = omega * md * sin_int.cwiseProduct(row);
        const ComplexVector xm = mv.transpose() * xc;
        const ComplexVector pm = mv.transpose() * pc;
        create.resize(n);
        annihilate.resize(n);
        for (int m = 0; m < n; ++m) {
            const double sx = 1.0 / std::sqrt(2.0 * nu(m));
            const double sp = std::sqrt(0.5 * nu(m));
            create(m) = xm(m) * sx + kI * pm(m) * sp;
            annihilate(m) = xm(m) * sx - kI * pm(m) * sp;
        }
    };

    PerturbativeAmplitudes amps;
    ComplexVector ann_a;
    ComplexVector ann_b;
    ladder(probe_a, amps.emission_a, ann_a);
    ladder(probe_b, amps.emission_b, ann_b);
    amps.exchange = ann_a.cwiseProduct(amps.emission_b).sum();

    Complex correction = 0.0;
    for (int m = 0; m < n; ++m) {
        const double w = dynamics.frequencies(m);
        const double weight = dynamics.vectors(probe_a - 1, m) * dynamics.vectors(probe_b - 1, m);
        if (weight == 0.0) continue;
        correction += weight / w *
                      (nested_integral(detuning + w, detuning - w, duration) -
                       nested_integral(detuning - w, detuning + w, duration));
    }
    amps.exchange_time_ordered = amps.exchange - 0.5 * omega * omega * correction;
    amps.overlap_ab = amps.emission_a.dot(amps.emission_b);
    amps.norm_a = column_norm(amps.emission_a);
    amps.norm_b = column_norm(amps.emission_b);
    return amps;
}

PerturbativeAmplitudes perturbative_amplitudes(const DetectionConfig& cfg, const NormalModes& modes) {
    validate(cfg);
    if (modes.size() != cfg.n_ions) throw ConfigError("modes do not match n_ions", "n_ions");
    if (!cfg.truncated) {
        return mode_sum_amplitudes(modes, cfg.probe_a, cfg.probe_b, cfg.detuning, cfg.duration, cfg.omega);
    }
    const CouplingMatrix cut = truncated_coupling(CouplingMatrix{coupling_from_modes(modes)}, cfg.n_ions / 2);
    return heisenberg_amplitudes(modes, normal_modes(cut), cfg.probe_a, cfg.probe_b, cfg.detuning, cfg.duration,
                                 cfg.omega);
}

double exchange_norm_squared(const PerturbativeAmplitudes& amps, ExchangeOrdering ordering) {
    const Complex x = ordering == ExchangeOrdering::Product ? amps.exchange : amps.exchange_time_ordered;
    return std::norm(x) + std::norm(amps.overlap_ab) + amps.norm_a * amps.norm_a * amps.norm_b * amps.norm_b;
}

double eta_ratio(const PerturbativeAmplitudes& amps, ExchangeOrdering ordering) {
    const double denom = amps.norm_a * amps.norm_b;
    if (!(denom > 0.0)) return 0.0;
    const Complex x = ordering == ExchangeOrdering::Product ? amps.exchange : amps.exchange_time_ordered;
    return std::abs(x) / denom;
}

DetectionResult assemble_rho(const PerturbativeAmplitudes& amps, ExchangeOrdering ordering,
                             const RegimeOptions& regime) {
    const double ea = amps.norm_a * amps.norm_a;
    const double eb = amps.norm_b * amps.norm_b;
    if (ea + eb > regime.max_emission) {
        std::ostringstream msg;
        msg << "outside the weak-drive regime: ||E_A||^2 + ||E_B||^2 = " << ea + eb << " > " << regime.max_emission
            << "; reduce omega";
        throw NumericalError(msg.str());
    }
    const Complex x = ordering == ExchangeOrdering::Product ? amps.exchange : amps.exchange_time_ordered;

    DetectionResult r;
    r.rho = ComplexMatrix::Zero(4, 4);
    r.rho(0, 0) = exchange_norm_squared(amps, ordering);
    r.rho(0, 3) = -x;
    r.rho(3, 0) = -std::conj(x);
    r.rho(1, 1) = ea;
    r.rho(2, 2) = eb;
    r.rho(1, 2) = std::conj(amps.overlap_ab);  // <E_B|E_A>
    r.rho(2, 1) = amps.overlap_ab;
    r.rho(3, 3) = 1.0 - ea - eb;
    r.rho /= r.rho.trace().real();

    r.eta_defined = amps.norm_a * amps.norm_b > 0.0;
    r.eta = eta_ratio(amps, ordering);
    r.negativity_estimate = std::abs(x) - amps.norm_a * amps.norm_b;

    // Partial transpose on qubit B: swap (qa qb, qa' qb') -> (qa qb', qa' qb).
    ComplexMatrix pt(4, 4);
    for (int qa = 0; qa < 2; ++qa)
        for (int qb = 0; qb < 2; ++qb)
            for (int ra = 0; ra < 2; ++ra)
                for (int rb = 0; rb < 2; ++rb) pt(qa * 2 + qb, ra * 2 + rb) = r.rho(qa * 2 + rb, ra * 2 + qb);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(pt, Eigen::EigenvaluesOnly);
    double neg = 0.0;
    for (Eigen::Index i = 0; i < 4; ++i) neg += std::max(0.0, -es.eigenvalues()(i));
    r.negativity = neg;
    r.entangled = r.eta_defined && r.eta > 1.0;
    return r;
}

PerturbativeAmplitudes rescale_to_emission(const PerturbativeAmplitudes& amps, double target) {
    const double e = amps.norm_a * amps.norm_a + amps.norm_b * amps.norm_b;
    if (!(e > 0.0)) return amps;
    const double s = std::sqrt(target / e);
    PerturbativeAmplitudes out = amps;
    out.emission_a *= s;
    out.emission_b *= s;
    out.norm_a *= s;
    out.norm_b *= s;
    out.overlap_ab *= s * s;
    out.exchange *= s * s;
    out.exchange_time_ordered *= s * s;
    return out;
}

std::vector<EtaRow> eta_sweep(const DetectionConfig& cfg, const std::vector<double>& detunings) {
    validate(cfg);
    const NormalModes full = normal_modes(chain_coupling(cfg.n_ions));
    const NormalModes cut = normal_modes(truncated_coupling(CouplingMatrix{coupling_from_modes(full)}, cfg.n_ions / 2));

    std::vector<EtaRow> rows;
    rows.reserve(detunings.size());
    for (double delta : detunings) {
        if (!std::isfinite(delta)) throw ConfigError("detuning grid contains a non-finite value", "detuning_grid");
        const auto af = mode_sum_amplitudes(full, cfg.probe_a, cfg.probe_b, delta, cfg.duration, cfg.omega);
        const auto at = heisenberg_amplitudes(full, cut, cfg.probe_a, cfg.probe_b, delta, cfg.duration, cfg.omega);
        const double ef = eta_ratio(af, cfg.ordering);
        const double et = eta_ratio(at, cfg.ordering);
        rows.push_back({delta, ef, et, ef > 1.0, et > 1.0});
    }
    return rows;
}

CommutatorProfile commutator_profile(const NormalModes& modes, int reference, const std::vector<double>& times) {
    const int n = modes.size();
    if (n < 2) throw ConfigError("commutator profile needs at least two ions", "n_ions");
    check_probe(reference, n, "reference");
    CommutatorProfile out;
    out.reference = reference;
    out.times = times;
    out.values = Matrix::Zero(n, static_cast<Eigen::Index>(times.size()));
    const Vector row = modes.vectors.row(reference - 1).transpose();
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        if (t == 0.0) continue;
        const Vector weights = ((modes.frequencies * t).array().sin() / modes.frequencies.array()).matrix();
        out.values.col(static_cast<Eigen::Index>(k)) = modes.vectors * weights.cwiseProduct(row);
    }
    return out;
}

Trajectory classical_propagation(const NormalModes& modes, int kicked, const std::vector<double>& times) {
    const int n = modes.size();
    if (n < 2) throw ConfigError("propagation needs at least two ions", "n_ions");
    check_probe(kicked, n, "kicked");
    const Matrix g = coupling_from_modes(modes);
    const Vector row = modes.vectors.row(kicked - 1).transpose();

    Trajectory tr;
    tr.kicked = kicked;
    tr.times = times;
    tr.displacement = Matrix::Zero(n, static_cast<Eigen::Index>(times.size()));
    tr.velocity = Matrix::Zero(n, static_cast<Eigen::Index>(times.size()));
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        const Vector s = ((modes.frequencies * t).array().sin() / modes.frequencies.array()).matrix();
        const Vector c = (modes.frequencies * t).array().cos().matrix();
        const Vector x = modes.vectors * s.cwiseProduct(row);
        const Vector v = modes.vectors * c.cwiseProduct(row);
        tr.displacement.col(static_cast<Eigen::Index>(k)) = x;
        tr.velocity.col(static_cast<Eigen::Index>(k)) = v;
        tr.energy.push_back(0.5 * v.squaredNorm() + 0.5 * x.dot(g * x));
    }
    return tr;
}

std::vector<int> propagation_front(const Trajectory& traj, double relative_threshold) {
    const double peak = traj.displacement.size() ? traj.displacement.cwiseAbs().maxCoeff() : 0.0;
    const double cutoff = relative_threshold * peak;
    std::vector<int> front;
    int reach = 0;
    for (Eigen::Index k = 0; k < traj.displacement.cols(); ++k) {
        for (Eigen::Index i = 0; i < traj.displacement.rows(); ++i) {
            if (peak > 0.0 && std::abs(traj.displacement(i, k)) >= cutoff) {
                reach = std::max(reach, static_cast<int>(std::abs(static_cast<int>(i) + 1 - traj.kicked)));
            }
        }
        front.push_back(reach);
    }
    return front;
}

int center_ion(int n_ions) { return n_ions % 2 == 0 ? n_ions / 2 : (n_ions + 1) / 2; }

}  // namespace ionvac
