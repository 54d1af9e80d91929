#include <cmath>
#include <numbers>

#include <doctest.h>

#include "ionvac/detect.hpp"
#include "ionvac/errors.hpp"

using namespace ionvac;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

}  // namespace

TEST_CASE("oscillation integral") {
    CHECK(std::abs(oscillation_integral(0.0, 0.7) - Complex(0.7, 0.0)) < 1e-15);
    CHECK(std::abs(oscillation_integral(2.0 * std::numbers::pi, 1.0)) < 1e-14);
    const Complex direct = (std::exp(Complex(0.0, 1.3 * 0.9)) - 1.0) / Complex(0.0, 1.3);
    CHECK(std::abs(oscillation_integral(1.3, 0.9) - direct) < 1e-14);
    // small w: T + i w T^2 / 2
    CHECK(std::abs(oscillation_integral(1e-9, 0.5) - Complex(0.5, 1e-9 * 0.125)) < 1e-15);
}

TEST_CASE("resonant mode integral equals the duration") {
    const NormalModes modes = normal_modes(chain_coupling(3));
    const double nu = modes.frequencies(1);
    const ModeIntegrals m = mode_integrals(modes, -nu, 0.6);
    CHECK(std::abs(m.plus(1) - Complex(0.6, 0.0)) < 1e-14);
    CHECK(std::abs(m.minus(1) - oscillation_integral(-2.0 * nu, 0.6)) < 1e-14);
    CHECK_THROWS_AS(mode_integrals(modes, 0.0, 0.0), ConfigError);
}

TEST_CASE("nested integral closed form and small-argument branch agree") {
    const double t = 0.8;
    for (double a : {-2.0, 0.3, 1.7}) {
        const double b = 1e-4;
        const Complex small = nested_integral(a, b, t);
        const Complex limit = nested_integral(a, 0.0, t);
        CHECK(std::abs(small - limit) < 1e-3 * t * t);
    }
    // a = b = 0: T^2 / 2
    CHECK(std::abs(nested_integral(0.0, 0.0, t) - Complex(0.32, 0.0)) < 1e-13);
    // a = -b cancels the outer phase: int_0^T (1 - e^{-i b t}) / (i b) ...
    const double b = 1.1;
    const Complex expected = (Complex(t, 0.0) - oscillation_integral(-b, t)) / Complex(0.0, b);
    CHECK(std::abs(nested_integral(-b, b, t) - expected) < 1e-13);
}

TEST_CASE("Heisenberg route matches the mode sums on the full chain") {
    const NormalModes modes = normal_modes(chain_coupling(8));
    for (double delta : {-2.5, 0.0, 1.2}) {
        const auto a = mode_sum_amplitudes(modes, 2, 7, delta, 0.8, 0.3);
        const auto b = heisenberg_amplitudes(modes, modes, 2, 7, delta, 0.8, 0.3);
        CAPTURE(delta);
        CHECK(std::abs(a.exchange - b.exchange) < 1e-12);
        CHECK(std::abs(a.exchange_time_ordered - b.exchange_time_ordered) < 1e-12);
        CHECK(std::abs(a.overlap_ab - b.overlap_ab) < 1e-12);
        CHECK(std::abs(a.norm_a - b.norm_a) < 1e-12);
        CHECK(std::abs(a.norm_b - b.norm_b) < 1e-12);
    }
}

TEST_CASE("emission norms follow from the vacuum correlations") {
    const NormalModes modes = normal_modes(chain_coupling(5));
    const auto a = mode_sum_amplitudes(modes, 1, 4, 0.4, 0.5, 0.2);
    CHECK(std::abs(a.norm_a - a.emission_a.norm()) < 1e-14);
    CHECK(std::abs(a.overlap_ab - a.emission_a.dot(a.emission_b)) < 1e-14);
    CHECK(std::abs(exchange_norm_squared(a, ExchangeOrdering::Product) -
                   (std::norm(a.exchange) + std::norm(a.overlap_ab) + std::pow(a.norm_a * a.norm_b, 2))) < 1e-16);
}

TEST_CASE("eta is invariant under drive strength") {
    DetectionConfig cfg;
    cfg.n_ions = 10;
    cfg.probe_a = 3;
    cfg.probe_b = 8;
    cfg.duration = 0.5;
    cfg.detuning = -2.0;
    const NormalModes modes = normal_modes(chain_coupling(10));
    cfg.omega = 0.01;
    const double e1 = eta_ratio(perturbative_amplitudes(cfg, modes));
    cfg.omega = 3.0;
    const double e2 = eta_ratio(perturbative_amplitudes(cfg, modes));
    CHECK(std::abs(e1 - e2) < 1e-12 * e1);
    cfg.truncated = true;
    const double t1 = eta_ratio(perturbative_amplitudes(cfg, modes));
    cfg.omega = 0.01;
    const double t2 = eta_ratio(perturbative_amplitudes(cfg, modes));
    CHECK(std::abs(t1 - t2) < 1e-12 * t1);

    const auto base = perturbative_amplitudes(cfg, modes);
    const auto scaled = rescale_to_emission(base, 0.02);
    CHECK(std::abs(scaled.norm_a * scaled.norm_a + scaled.norm_b * scaled.norm_b - 0.02) < 1e-15);
    CHECK(std::abs(eta_ratio(scaled) - eta_ratio(base)) < 1e-12);
}

TEST_CASE("zero emission leaves eta undefined") {
    PerturbativeAmplitudes zero;
    zero.emission_a = ComplexVector::Zero(2);
    zero.emission_b = ComplexVector::Zero(2);
    CHECK(eta_ratio(zero) == 0.0);
    const DetectionResult r = assemble_rho(zero);
    CHECK_FALSE(r.eta_defined);
    CHECK_FALSE(r.entangled);
    CHECK(r.negativity == 0.0);
    CHECK(std::abs(r.rho(3, 3) - 1.0) < 1e-15);
}

TEST_CASE("probe density matrix is a state and its negativity tracks eta") {
    const NormalModes modes = normal_modes(chain_coupling(20));
    const NormalModes cut = normal_modes(truncated_coupling(chain_coupling(20), 10));
    int entangled = 0, separable = 0;
    for (double delta : linspace(-6.0, 6.0, 49)) {
        for (int route = 0; route < 2; ++route) {
            for (auto ordering : {ExchangeOrdering::Product, ExchangeOrdering::TimeOrdered}) {
                const auto raw = route == 0 ? mode_sum_amplitudes(modes, 6, 15, delta, 0.8, 1.0)
                                            : heisenberg_amplitudes(modes, cut, 6, 15, delta, 0.8, 1.0);
                const auto amps = rescale_to_emission(raw, 1e-3);
                const DetectionResult r = assemble_rho(amps, ordering);
                CAPTURE(delta);
                CHECK((r.rho - r.rho.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
                CHECK(std::abs(r.rho.trace() - Complex(1.0, 0.0)) < 1e-14);
                Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(r.rho);
                CHECK(es.eigenvalues().minCoeff() > -1e-15);
                CHECK(r.entangled == (r.negativity > 0.0));
                CHECK(r.entangled == (r.eta > 1.0));
                CHECK(r.entangled == (r.negativity_estimate > 0.0));
                (r.entangled ? entangled : separable)++;
            }
        }
    }
    CHECK(entangled > 0);
    CHECK(separable > 0);
}

TEST_CASE("strong drive is rejected") {
    const NormalModes modes = normal_modes(chain_coupling(4));
    const auto amps = mode_sum_amplitudes(modes, 1, 4, 0.0, 1.0, 5.0);
    CHECK_THROWS_AS(assemble_rho(amps), NumericalError);
    CHECK_NOTHROW(assemble_rho(amps, ExchangeOrdering::Product, RegimeOptions{1e9}));
}

TEST_CASE("detection config validation names the field") {
    DetectionConfig cfg;
    auto field_of = [](const DetectionConfig& c) {
        try {
            validate(c);
        } catch (const ConfigError& e) {
            return std::string(e.field());
        }
        return std::string();
    };
    CHECK(field_of(cfg).empty());
    DetectionConfig c = cfg;
    c.n_ions = 1;
    CHECK(field_of(c) == "n_ions");
    c = cfg;
    c.probe_b = 21;
    CHECK(field_of(c) == "probes");
    c = cfg;
    c.probe_a = 15;
    CHECK(field_of(c) == "probes");
    c = cfg;
    c.duration = 0.0;
    CHECK(field_of(c) == "duration");
    c = cfg;
    c.omega = -1.0;
    CHECK(field_of(c) == "omega");
    c = cfg;
    c.detuning = std::nan("");
    CHECK(field_of(c) == "detuning");
    CHECK_THROWS_AS(eta_sweep(cfg, {0.0, std::nan("")}), ConfigError);
}

TEST_CASE("eta sweep rows") {
    DetectionConfig cfg;
    const auto rows = eta_sweep(cfg, {-1.0, 0.0, 1.0});
    REQUIRE(rows.size() == 3);
    const NormalModes modes = normal_modes(chain_coupling(20));
    for (const auto& row : rows) {
        CHECK(row.entangled_full == (row.eta_full > 1.0));
        CHECK(row.entangled_truncated == (row.eta_truncated > 1.0));
        CHECK(std::abs(row.eta_full - eta_ratio(mode_sum_amplitudes(modes, 6, 15, row.detuning, 0.8, 1.0))) < 1e-12);
    }
}

TEST_CASE("commutator profile") {
    const NormalModes two = normal_modes(chain_coupling(2));
    const auto p = commutator_profile(two, 1, {0.0, 1e-3});
    CHECK(p.values.col(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(p.values(0, 1) - 1e-3) < 1e-9);
    CHECK(std::abs(p.values(1, 1)) < 1e-9);

    // at long times the N = 2 closed form holds
    const double t = 2.3;
    CHECK(std::abs(p.values(0, 1) - 0.5 * (std::sin(1e-3) + std::sin(std::sqrt(3.0) * 1e-3) / std::sqrt(3.0))) < 1e-15);
    const auto q = commutator_profile(two, 2, {t});
    CHECK(std::abs(q.values(0, 0) - 0.5 * (std::sin(t) - std::sin(std::sqrt(3.0) * t) / std::sqrt(3.0))) < 1e-12);

    CHECK_THROWS_AS(commutator_profile(normal_modes(chain_coupling(1)), 1, {0.1}), ConfigError);
    CHECK_THROWS_AS(commutator_profile(two, 3, {0.1}), ConfigError);
}

TEST_CASE("truncated chain halves do not communicate") {
    const int n = 12;
    const NormalModes cut = normal_modes(truncated_coupling(chain_coupling(n), n / 2));
    const auto p = commutator_profile(cut, 3, linspace(0.0, 5.0, 11));
    for (int ion = n / 2; ion < n; ++ion) CHECK(p.values.row(ion).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(p.values.row(3).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("classical propagation") {
    const int n = 30;
    const NormalModes modes = normal_modes(chain_coupling(n));
    const int c = center_ion(n);
    const auto times = linspace(0.0, 3.0, 61);
    const Trajectory tr = classical_propagation(modes, c, times);
    const auto prof = commutator_profile(modes, c, times);
    CHECK((tr.displacement - prof.values).cwiseAbs().maxCoeff() < 1e-14);

    CHECK(std::abs(tr.velocity(c - 1, 0) - 1.0) < 1e-13);
    for (double e : tr.energy) CHECK(std::abs(e - 0.5) < 1e-12);

    const auto front = propagation_front(tr, 1e-3);
    REQUIRE(front.size() == times.size());
    CHECK(front.front() == 0);
    for (std::size_t k = 1; k < front.size(); ++k) CHECK(front[k] >= front[k - 1]);
    CHECK(front.back() > 0);
    CHECK(front.back() <= n - c);

    CHECK(center_ion(20) == 10);
    CHECK(center_ion(21) == 11);
}
