#include <cmath>

#include <doctest.h>

#include "ionvac/errors.hpp"
#include "ionvac/gaussian.hpp"

using namespace ionvac;

TEST_CASE("ground-state covariance of one and two ions") {
    const CovarianceMatrix c1 = ground_state_covariance(chain_coupling(1));
    CHECK((c1.sigma - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

    const CovarianceMatrix c2 = ground_state_covariance(chain_coupling(2));
    const double r3 = std::sqrt(3.0);
    CHECK(std::abs(c2.sigma(0, 0) - (1.0 + 1.0 / r3) / 4.0) < 1e-12);
    CHECK(std::abs(c2.sigma(2, 2) - (1.0 + r3) / 4.0) < 1e-12);
    CHECK(c2.sigma.topRightCorner(2, 2).isZero(1e-14));
}

TEST_CASE("global ground state is pure up to N = 30") {
    for (int n = 1; n <= 30; ++n) {
        CAPTURE(n);
        const auto mu = symplectic_eigenvalues(ground_state_covariance(chain_coupling(n))).mu;
        CHECK((mu.array() - 0.5).abs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("reduce keeps rows of both blocks") {
    const CovarianceMatrix c = ground_state_covariance(chain_coupling(2));
    const CovarianceMatrix all = reduce(c, {1, 2});
    CHECK(all.sigma == c.sigma);
    const CovarianceMatrix one = reduce(c, {1});
    CHECK(one.sigma.rows() == 2);
    CHECK(std::abs(one.sigma(0, 0) - (1.0 + 1.0 / std::sqrt(3.0)) / 4.0) < 1e-12);
    CHECK(std::abs(one.sigma(1, 1) - (1.0 + std::sqrt(3.0)) / 4.0) < 1e-12);
    CHECK(std::abs(one.sigma(0, 1)) < 1e-14);

    const CovarianceMatrix c20 = ground_state_covariance(chain_coupling(20));
    const CovarianceMatrix pair = reduce(c20, {6, 15});
    CHECK(pair.sigma.rows() == 4);
    CHECK((pair.sigma - pair.sigma.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(symplectic_eigenvalues(pair).mu.minCoeff() >= 0.5 - 1e-9);

    CHECK_THROWS_AS(reduce(c, {}), ConfigError);
    CHECK_THROWS_AS(reduce(c, {3}), ConfigError);
    CHECK_THROWS_AS(reduce(c, {0}), ConfigError);
}

TEST_CASE("symplectic eigenvalues") {
    CovarianceMatrix vac{0.5 * Matrix::Identity(2, 2)};
    CHECK(std::abs(symplectic_eigenvalues(vac).mu(0) - 0.5) < 1e-12);

    const auto red = reduce(ground_state_covariance(chain_coupling(2)), {1});
    CHECK(std::abs(symplectic_eigenvalues(red).mu(0) - 0.5189) < 5e-4);

    // single mode: mu = sqrt(det sigma)
    CovarianceMatrix thermal{Matrix(2, 2)};
    thermal.sigma << 1.3, 0.2, 0.2, 0.9;
    CHECK(std::abs(symplectic_eigenvalues(thermal).mu(0) - std::sqrt(1.3 * 0.9 - 0.04)) < 1e-12);

    CovarianceMatrix bad{0.3 * Matrix::Identity(2, 2)};
    CHECK_THROWS_AS(symplectic_eigenvalues(bad), NumericalError);
    CHECK(std::abs(symplectic_eigenvalues(bad, true).mu(0) - 0.3) < 1e-12);
}

TEST_CASE("mode entropy is continuous at the vacuum") {
    CHECK(mode_entropy(0.5) == 0.0);
    CHECK(mode_entropy(0.4) == 0.0);
    CHECK(mode_entropy(0.5 + 1e-15) < 1e-12);
    CHECK(!std::isnan(mode_entropy(0.5 + 1e-300)));
}

TEST_CASE("two-ion entropy and analytics") {
    const CovarianceMatrix c = ground_state_covariance(chain_coupling(2));
    const double e = entanglement_entropy(c, {1});
    CHECK(std::abs(e - 0.136) < 1e-3);
    CHECK(std::abs(entanglement_entropy(c, {1, 2})) < 1e-12);

    const TwoIonSqueezing s = two_ion_analytics();
    CHECK(std::abs(s.lambda - 0.5189) < 5e-4);
    CHECK(std::abs(s.entropy_ebits - 0.136) < 1e-3);
    CHECK(std::abs(s.e_beta - 0.1366) < 5e-4);
    CHECK(std::abs(s.e_beta - std::sqrt((s.lambda - 0.5) / (s.lambda + 0.5))) < 1e-12);
    const double exact = (std::pow(3.0, 0.25) + std::pow(3.0, -0.25)) / 4.0;
    CHECK(std::abs(s.lambda - exact) < 1e-12);
    CHECK(std::abs(s.entropy_ebits - e) < 1e-12);

    // swapping the two frequencies changes nothing
    const TwoIonSqueezing swapped = squeezing_from_frequencies(std::sqrt(3.0), 1.0);
    CHECK(std::abs(swapped.lambda - s.lambda) < 1e-13);
}

TEST_CASE("entropy of a partition equals that of its complement") {
    const CovarianceMatrix c = ground_state_covariance(chain_coupling(9));
    CHECK(std::abs(entanglement_entropy(c, {1, 2, 3, 7}) - entanglement_entropy(c, {4, 5, 6, 8, 9})) < 1e-9);
    CHECK(std::abs(entanglement_entropy(c, {5}) - entanglement_entropy(c, {1, 2, 3, 4, 6, 7, 8, 9})) < 1e-9);
}

TEST_CASE("impure state is rejected by the entropy") {
    CovarianceMatrix c{Matrix::Identity(4, 4)};
    CHECK_THROWS_AS(entanglement_entropy(c, {1}), NumericalError);
}

TEST_CASE("log-negativity") {
    const CovarianceMatrix c2 = ground_state_covariance(chain_coupling(2));
    CHECK(std::abs(log_negativity(c2, {1}, {2}) - std::log2(std::pow(3.0, 0.25))) < 1e-12);
    CHECK_THROWS_AS(log_negativity(c2, {1}, {1}), ConfigError);
    CHECK_THROWS_AS(log_negativity(c2, {}, {2}), ConfigError);

    const CovarianceMatrix c20 = ground_state_covariance(chain_coupling(20));
    CHECK(log_negativity(c20, {10}, {11}) > 0.0);
    CHECK(log_negativity(c20, {9}, {12}) < 1e-9);
    CHECK(log_negativity(c20, {6}, {15}) < 1e-9);
}

TEST_CASE("log-negativity is invariant under a local symplectic rescaling") {
    const CovarianceMatrix c = ground_state_covariance(chain_coupling(8));
    const SiteList a{2, 3};
    const SiteList b{5, 6, 7};
    const double before = log_negativity(c, a, b);
    // reduced state ordering is a then b; rescale x -> s x, p -> p/s on group a
    CovarianceMatrix red = reduce(c, {2, 3, 5, 6, 7});
    Vector scale = Vector::Ones(10);
    const double s = 1.7;
    for (int k : {0, 1}) {
        scale(k) = s;
        scale(5 + k) = 1.0 / s;
    }
    red.sigma = scale.asDiagonal() * red.sigma * scale.asDiagonal();
    const double after = log_negativity(red, {1, 2}, {3, 4, 5});
    CHECK(std::abs(before - after) < 1e-9);
}

TEST_CASE("entropy versus chain size") {
    const auto rows = entropy_vs_chain_size({2, 4, 20});
    REQUIRE(rows.size() == 3);
    CHECK(std::abs(rows[0].entropy - two_ion_analytics().entropy_ebits) < 1e-12);
    CHECK(rows[1].entropy > 0.136);
    CHECK(rows[2].entropy < 2.0);
    CHECK(std::isfinite(rows[2].entropy));
    CHECK_THROWS_AS(entropy_vs_chain_size({3}), ConfigError);
}

TEST_CASE("centred groups") {
    auto [a, b] = centered_groups(20, 1, 0);
    CHECK(a == SiteList{10});
    CHECK(b == SiteList{11});
    std::tie(a, b) = centered_groups(20, 1, 1);
    CHECK(a == SiteList{9});
    CHECK(b == SiteList{11});
    std::tie(a, b) = centered_groups(20, 5, 10);
    CHECK(a == SiteList{1, 2, 3, 4, 5});
    CHECK(b == SiteList{16, 17, 18, 19, 20});
    CHECK_THROWS_AS(centered_groups(20, 5, 11), ConfigError);
}

TEST_CASE("negativity versus separation for groups of 1, 3, 5") {
    const auto rows = negativity_vs_separation(20, {1, 3, 5});
    double adjacent = -1.0;
    double far_single = 0.0;
    double size5_where_single_vanishes = 0.0;
    for (const auto& r : rows) {
        if (r.group_size == 1 && r.separation == 0) adjacent = r.log_negativity;
        if (r.group_size == 1 && r.separation == 3) far_single = r.log_negativity;
        if (r.group_size == 5 && r.separation == 3) size5_where_single_vanishes = r.log_negativity;
        CHECK(r.log_negativity >= 0.0);
    }
    CHECK(adjacent > 0.0);
    CHECK(far_single == 0.0);
    CHECK(size5_where_single_vanishes > 0.0);
    CHECK_THROWS_AS(negativity_vs_separation(20, {11}), ConfigError);
}
