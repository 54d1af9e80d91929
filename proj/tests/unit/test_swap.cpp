#include <cmath>

#include <doctest.h>

#include "ionvac/errors.hpp"
#include "ionvac/gaussian.hpp"
#include "ionvac/swap.hpp"

using namespace ionvac;

namespace {

const char* kReference = "V:0.31,W:0.38,V:0.50,W:0.39,V:0.53,W:0.16";

ComplexMatrix pure(const ComplexVector& v) { return v * v.adjoint(); }

}  // namespace

TEST_CASE("motional Hamiltonian of two uncoupled unit oscillators") {
    const auto h = build_motional_hamiltonian(CouplingMatrix{Matrix::Identity(2, 2)}, LocalModeBasis{1.0, 8});
    CHECK((h.h - Matrix(h.h.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-14);
    for (int na = 0; na < 8; ++na)
        for (int nb = 0; nb < 8; ++nb) CHECK(std::abs(h.h(na * 8 + nb, na * 8 + nb) - (na + nb + 1.0)) < 1e-12);
    const auto g = ground_state_fock(h);
    CHECK(std::abs(std::abs(g.amplitudes(0)) - 1.0) < 1e-12);
}

TEST_CASE("two-ion ground energy is gauge independent") {
    const CouplingMatrix g = chain_coupling(2);
    const double exact = (1.0 + std::sqrt(3.0)) / 2.0;
    const auto e1 = ground_state_fock(build_motional_hamiltonian(g, LocalModeBasis{std::pow(3.0, 0.25), 16})).energy;
    const auto e2 = ground_state_fock(build_motional_hamiltonian(g, LocalModeBasis{2.0, 16})).energy;
    CHECK(std::abs(e1 - exact) < 1e-6);
    CHECK(std::abs(e2 - exact) < 1e-6);
}

TEST_CASE("ground state is the two-mode squeezed state") {
    const SwapSimulator sim(chain_coupling(2));
    const Vector s = schmidt_coefficients(sim.ground_state());
    for (int k = 0; k < 4; ++k) CHECK(std::abs(s(k + 1) / s(k) - 0.1366) < 1e-3);
    CHECK(std::abs(schmidt_entropy(s) - sim.ground_entropy()) < 1e-9);
    CHECK(sim.ground_state().top_population < 1e-6);
}

TEST_CASE("too small a basis is reported as a truncation leak") {
    CHECK_THROWS_AS(SwapSimulator(chain_coupling(2), LocalModeBasis{20.0, 4}), TruncationLeak);
}

TEST_CASE("pulse sequence text round trip") {
    const PulseSequence seq = parse_pulse_sequence(kReference);
    REQUIRE(seq.size() == 6);
    CHECK(seq[0].kind == PulseKind::V);
    CHECK(seq[1].kind == PulseKind::W);
    CHECK(seq[2].strength == 0.50);
    CHECK(seq[0].target == PulseTarget::Both);
    CHECK(parse_pulse_sequence(format_pulse_sequence(seq)).size() == 6);

    const PulseSequence single = parse_pulse_sequence("V@A:0.3, W@B:-0.2");
    CHECK(single[0].target == PulseTarget::A);
    CHECK(single[1].target == PulseTarget::B);
    CHECK(single[1].strength == -0.2);
    CHECK(parse_pulse_sequence("").empty());

    for (const char* bad : {"X:0.3", "V0.3", "V:abc", "V@C:0.1", "V:nan", "V:0.1,,W:0.2"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_pulse_sequence(bad), ConfigError);
    }
}

TEST_CASE("alternating sequence layout") {
    Vector v(4);
    v << 0.1, 0.2, 0.3, 0.4;
    const PulseSequence seq = alternating_sequence(v);
    REQUIRE(seq.size() == 4);
    CHECK(seq[0].kind == PulseKind::V);
    CHECK(seq[3].kind == PulseKind::W);
    CHECK(seq[3].strength == 0.4);
}

TEST_CASE("pulses are unitary and zero strength is the identity") {
    const SwapSimulator sim(chain_coupling(2));
    const FockStateVector psi = sim.initial_state();
    const FockStateVector same = sim.apply_pulse(psi, Pulse{PulseKind::W, PulseTarget::Both, 0.0});
    CHECK((same.amplitudes - psi.amplitudes).norm() == 0.0);

    FockStateVector s = psi;
    const double strengths[] = {0.3, -0.2, 0.45, 0.1, -0.35, 0.25, 0.2, -0.15, 0.4, 0.05};
    for (int k = 0; k < 10; ++k) {
        const Pulse p{k % 2 ? PulseKind::W : PulseKind::V, k % 3 == 0 ? PulseTarget::A : PulseTarget::Both,
                      strengths[k]};
        s = sim.apply_pulse(s, p);
        CHECK(std::abs(s.norm() - 1.0) < 1e-9);
    }
}

TEST_CASE("empty sequence leaves both qubits down") {
    const SwapSimulator sim(chain_coupling(2));
    const SwapResult r = sim.run({});
    CHECK(std::abs(r.rho(3, 3) - 1.0) < 1e-12);
    CHECK(r.eof == 0.0);
    CHECK(std::abs(r.purity - 1.0) < 1e-12);
}

TEST_CASE("reference sequence swaps most of the motional entanglement") {
    const SwapSimulator sim(chain_coupling(2));
    const SwapResult r = sim.run(parse_pulse_sequence(kReference));
    CHECK(r.ratio_to_ground_entropy > 0.94);
    CHECK(r.ratio_to_ground_entropy < 0.99);
    CHECK(r.purity > 0.994);
    CHECK(r.purity <= 1.0 + 1e-12);
    CHECK(std::abs(r.rho.trace().real() - 1.0) < 1e-9);
    CHECK((r.rho - r.rho.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.eof <= 1.0);
    CHECK(r.residual_motional_overlap <= 1.0 + 1e-12);

    // populations and the down-down / up-up coherence carry the state
    const double corner = std::abs(r.rho(0, 3));
    CHECK(corner > std::abs(r.rho(0, 1)));
    CHECK(corner > std::abs(r.rho(1, 2)));
    CHECK(r.rho(3, 3).real() > r.rho(0, 0).real());
}

TEST_CASE("swap result is converged in the Fock cutoff") {
    const PulseSequence seq = parse_pulse_sequence(kReference);
    const double e16 = SwapSimulator(chain_coupling(2), LocalModeBasis{std::pow(3.0, 0.25), 16}).run(seq).eof;
    const double e32 = SwapSimulator(chain_coupling(2), LocalModeBasis{std::pow(3.0, 0.25), 32}).run(seq).eof;
    CHECK(std::abs(e16 - e32) < 1e-5);
}

TEST_CASE("two-qubit entanglement of formation") {
    ComplexVector prod = ComplexVector::Zero(4);
    prod(3) = 1.0;
    CHECK(two_qubit_eof(pure(prod)) < 1e-12);

    ComplexVector bell = ComplexVector::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(two_qubit_eof(pure(bell)) - 1.0) < 1e-12);
    CHECK(std::abs(concurrence(pure(bell)) - 1.0) < 1e-12);

    const double q = 0.1366;
    ComplexVector target = ComplexVector::Zero(4);
    target(3) = 1.0;
    target(0) = q;
    target.normalize();
    CHECK(std::abs(concurrence(pure(target)) - 2.0 * q / (1.0 + q * q)) < 1e-9);
    CHECK(std::abs(two_qubit_eof(pure(target)) - 0.132) < 1e-3);

    CHECK(std::abs(binary_entropy(0.5) - 1.0) < 1e-15);
    CHECK(binary_entropy(0.0) == 0.0);

    ComplexMatrix bad = ComplexMatrix::Zero(4, 4);
    bad(0, 0) = 1.5;
    bad(1, 1) = -0.5;
    CHECK_THROWS_AS(two_qubit_eof(bad), NumericalError);
}

TEST_CASE("pulse pair converges to W at second order") {
    const SwapSimulator sim(chain_coupling(2));
    const FockStateVector psi = sim.initial_state();
    const double beta = 0.38;
    const FockStateVector ideal = sim.apply_pulse(psi, Pulse{PulseKind::W, PulseTarget::Both, beta});

    auto infidelity = [&](double tau) {
        const FockStateVector pair = sim.pulse_pair_w(psi, PulseTarget::Both, beta / tau, tau);
        return 1.0 - state_fidelity(pair, ideal);
    };
    const double i1 = infidelity(0.05);
    const double i2 = infidelity(0.025);
    CHECK(i2 < i1);
    CHECK(i1 / i2 == doctest::Approx(4.0).epsilon(0.15));
    CHECK(1.0 - infidelity(0.01) >= 0.9999);

    // no kick: pure free evolution
    const FockStateVector free = sim.pulse_pair_w(psi, PulseTarget::A, 0.0, 0.3);
    CHECK((free.amplitudes - sim.free_evolution(psi, 0.3).amplitudes).norm() < 1e-12);
    CHECK_THROWS_AS(sim.pulse_pair_w(psi, PulseTarget::A, 1.0, 0.0), ConfigError);
}

TEST_CASE("optimiser is deterministic and independent of the thread count") {
    const SwapSimulator sim(chain_coupling(2), LocalModeBasis{std::pow(3.0, 0.25), 12});
    OptimizerOptions o;
    o.n_pairs = 1;
    o.restarts = 3;
    o.max_evaluations = 150;
    o.threads = 1;
    const auto a = optimize_sequence(sim, o);
    o.threads = 3;
    const auto b = optimize_sequence(sim, o);
    CHECK(a.restart_eof == b.restart_eof);
    CHECK(a.best_restart == b.best_restart);
    CHECK(format_pulse_sequence(a.sequence) == format_pulse_sequence(b.sequence));
    CHECK(a.result.eof > 0.0);

    o.seed += 1;
    const auto c = optimize_sequence(sim, o);
    CHECK(c.restart_eof != a.restart_eof);

    o.n_pairs = 0;
    CHECK_THROWS_AS(optimize_sequence(sim, o), ConfigError);
}
