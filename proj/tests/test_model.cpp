#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <polytrap/energy.hpp>
#include <polytrap/errors.hpp>
#include <polytrap/model.hpp>
#include <polytrap/rng.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace polytrap;

namespace {

System make_system(const Confinement& c, double lambda, int n) {
    return {n, c, Coupling::from_lambda(lambda)};
}

} // namespace

TEST_CASE("confinement evaluation matches hand values") {
    // quartic gamma=1, a1=2 at x=1: P = x^3 - 2x
    auto q = eval_confinement(Confinement::quartic(1.0, 2.0), 1.0);
    CHECK(q.p == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(q.dp == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(q.integral == doctest::Approx(-0.75).epsilon(1e-14));

    // harmonic gamma=2 at x=3: P = 2x
    auto h = eval_confinement(Confinement::harmonic(2.0), 3.0);
    CHECK(h.p == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(h.dp == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(h.integral == doctest::Approx(9.0).epsilon(1e-14));

    // sextic gamma=0.5, P = 0.5 (x^5 + 4x^3 + 3x) at x=1
    auto s = eval_confinement(Confinement::sextic(0.5, 4.0, 3.0), 1.0);
    CHECK(s.p == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(s.dp == doctest::Approx(10.0).epsilon(1e-14)); // 0.5 (5 + 12 + 3)
    CHECK(s.integral == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("confinement validation") {
    CHECK_THROWS_AS(Confinement::harmonic(0.0), InvalidParameterError);
    CHECK_THROWS_AS(Confinement::harmonic(-1.0), InvalidParameterError);

    Confinement bad = Confinement::quartic(1.0, 2.0);
    bad.coeffs[1] = 2.0; // top coefficient must stay 1
    CHECK_THROWS_AS(validate(bad), InvalidParameterError);
    bad = Confinement::quartic(1.0, 2.0);
    bad.coeffs.push_back(0.0);
    CHECK_THROWS_AS(validate(bad), InvalidParameterError);
}

TEST_CASE("coupling from lambda") {
    auto c1 = Coupling::from_lambda(1.0);
    CHECK(c1.g == 0.0);
    CHECK(c1.h == -2.0);
    CHECK(c1.beta == 2.0);
    CHECK_FALSE(c1.at_boundary());

    auto c2 = Coupling::from_lambda(2.0);
    CHECK(c2.g == 4.0);
    CHECK(c2.h == -4.0);
    CHECK(c2.beta == 4.0);

    auto ch = Coupling::from_lambda(0.5);
    CHECK(ch.g == -0.5);
    CHECK(ch.h == -1.0);
    CHECK(ch.beta == 1.0);
    CHECK(ch.at_boundary());

    CHECK_THROWS_AS(Coupling::from_lambda(0.0), InvalidParameterError);
    CHECK_THROWS_AS(Coupling::from_lambda(-0.3), InvalidParameterError);

    // identities over a lambda grid
    for (double lam : {0.3, 0.5, 0.77, 1.0, 1.5, 2.0, 3.25}) {
        auto c = Coupling::from_lambda(lam);
        CHECK(c.g == 2.0 * lam * (lam - 1.0));
        CHECK(c.h == -2.0 * lam);
        CHECK(c.beta == 2.0 * lam);
        CHECK(c.g >= -0.5);
    }
}

TEST_CASE("log ground state hand values") {
    auto csm = make_system(Confinement::harmonic(1.0), 1.0, 2);
    CHECK(log_ground_state(csm, {1.0, -1.0}) ==
          doctest::Approx(std::log(2.0) - 1.0).epsilon(1e-14));

    auto quart = make_system(Confinement::quartic(1.0, 2.0), 2.0, 3);
    CHECK(log_ground_state(quart, {0.0, 1.0, 2.0}) ==
          doctest::Approx(2.0 * std::log(2.0) + 0.75).epsilon(1e-14));

    // coincident pair is the -inf sentinel, not an error
    CHECK(log_ground_state(csm, {0.5, 0.5}) ==
          -std::numeric_limits<double>::infinity());
}

TEST_CASE("log ground state is permutation symmetric") {
    auto s = make_system(Confinement::sextic(0.5, -4.0, 2.0), 1.5, 5);
    Configuration x = random_configuration(s, 42);
    const double ref = log_ground_state(s, x);
    Configuration p = x;
    std::rotate(p.begin(), p.begin() + 2, p.end());
    CHECK(log_ground_state(s, p) == doctest::Approx(ref).epsilon(1e-12));
    std::reverse(p.begin(), p.end());
    CHECK(log_ground_state(s, p) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("canonical local energy vanishes") {
    for (int n : {2, 3, 4, 5, 6}) {
        for (double lam : {0.5, 1.0, 2.0}) {
            for (int shape = 0; shape < 2; ++shape) {
                auto s = make_system(shape == 0 ? Confinement::quartic(1.0, 2.5)
                                                : Confinement::sextic(0.7, -4.0, 2.0),
                                     lam, n);
                for (int k = 0; k < 10; ++k) {
                    auto x = random_configuration(s, chain_seed(9, k));
                    auto t = local_energy_terms(s, x, EnergyForm::canonical);
                    REQUIRE(t.scale > 0.0);
                    CHECK(std::abs(t.total) / t.scale < 1e-9);
                }
            }
        }
    }
}

TEST_CASE("expanded local energy is the ground state constant") {
    // one particle, quartic: E0 = -gamma a1
    auto s1 = make_system(Confinement::quartic(1.0, 2.0), 1.0, 1);
    CHECK(local_energy(s1, {0.7}, EnergyForm::expanded) ==
          doctest::Approx(-2.0).epsilon(1e-12));

    // harmonic (m=0) keeps the expanded grouping too: N=2, lambda=1 -> 4 gamma
    auto s0 = make_system(Confinement::harmonic(2.5), 1.0, 2);
    CHECK(ground_state_energy(s0) == doctest::Approx(10.0).epsilon(1e-14));
    for (int k = 0; k < 3; ++k) {
        auto x = random_configuration(s0, chain_seed(4, k));
        CHECK(local_energy(s0, x, EnergyForm::expanded) ==
              doctest::Approx(10.0).epsilon(1e-10));
    }

    Confinement octic;
    octic.m = 3;
    octic.gamma = 1.0;
    octic.coeffs = {0.0, 0.0, 0.0, 1.0};
    auto s3 = make_system(octic, 1.0, 2);
    CHECK_THROWS_AS(local_energy(s3, {0.1, 0.9}, EnergyForm::expanded),
                    UnsupportedFormError);

    auto s = make_system(Confinement::quartic(1.0, 3.0), 2.0, 4);
    CHECK_THROWS_AS(local_energy(s, {0.1, 0.1, 0.5, 0.9}, EnergyForm::canonical),
                    SingularInputError);
}

TEST_CASE("ground state energy closed form") {
    CHECK(ground_state_energy(make_system(Confinement::harmonic(1.0), 1.0, 1)) == 1.0);
    CHECK(ground_state_energy(make_system(Confinement::quartic(1.0, 3.0), 1.0, 2)) ==
          doctest::Approx(-12.0).epsilon(1e-14));
    CHECK(ground_state_energy(make_system(Confinement::quartic(2.0, 0.0), 1.5, 7)) == 0.0);
    // gamma * l * N (1 + lambda (N-1)), sextic stores the linear coefficient as passed
    CHECK(ground_state_energy(make_system(Confinement::sextic(0.7, -4.0, 2.0), 0.5, 6)) ==
          doctest::Approx(0.7 * 2.0 * 6.0 * 3.5).epsilon(1e-14));
}

TEST_CASE("N=2 energy magnitude against the central-potential closed form") {
    // gamma a1^2 = 6 lambda + 3  ==>  |E0| = 2 (1+lambda) sqrt(3 gamma (2 lambda + 1))
    for (double lam : {0.5, 1.0, 2.0}) {
        for (double gamma : {1.0, 2.0}) {
            const double a1 = std::sqrt((6.0 * lam + 3.0) / gamma);
            auto s = make_system(Confinement::quartic(gamma, a1), lam, 2);
            const double ref = 2.0 * (1.0 + lam) * std::sqrt(3.0 * gamma * (2.0 * lam + 1.0));
            CHECK(std::abs(ground_state_energy(s)) == doctest::Approx(ref).epsilon(1e-12));
        }
    }
    auto s = make_system(Confinement::quartic(1.0, 3.0), 1.0, 2);
    CHECK(std::abs(ground_state_energy(s)) == doctest::Approx(12.0).epsilon(1e-14));
}

TEST_CASE("rescale to monic") {
    Confinement c = Confinement::quartic(1.0, -2.0); // stored linear coeff +2
    auto r = rescale_to_monic(c, 4.0);
    CHECK(r.scale == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(r.monic.coeffs[0] == doctest::Approx(1.0).epsilon(1e-14)); // 2 * 4^{-1/2}
    CHECK(r.monic.coeffs[1] == 1.0);

    auto id = rescale_to_monic(Confinement::sextic(0.5, -4.0, 2.0), 1.0);
    CHECK(id.scale == 1.0);
    CHECK(id.monic.coeffs[0] == 2.0);
    CHECK(id.monic.coeffs[1] == -4.0);

    auto h = rescale_to_monic(Confinement::harmonic(3.0), 4.0);
    CHECK(h.scale == 2.0);
    CHECK(h.monic.coeffs[0] == 1.0);

    // V_c(scale*y) = lambda * V_monic(y): the substitution that removes lambda
    for (double lam : {0.25, 4.0}) {
        for (const auto& base : {Confinement::harmonic(2.0), Confinement::quartic(1.3, 5.0),
                                 Confinement::sextic(0.5, -4.0, 2.0)}) {
            auto m = rescale_to_monic(base, lam);
            for (double y : {-1.7, 0.3, 2.1}) {
                CHECK(confinement_integral(base, m.scale * y) ==
                      doctest::Approx(lam * confinement_integral(m.monic, y)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("expanded constant check") {
    auto cq = expanded_constant_check(make_system(Confinement::quartic(1.0, 3.0), 2.0, 4),
                                      100, 11);
    CHECK(cq.samples == 100);
    CHECK(cq.mean == doctest::Approx(-84.0).epsilon(1e-10));
    CHECK(cq.max_spread < 1e-9 * std::abs(cq.mean));

    auto cs = expanded_constant_check(make_system(Confinement::sextic(0.5, -4.0, 2.0), 1.0, 3),
                                      100, 12);
    CHECK(cs.mean == doctest::Approx(9.0).epsilon(1e-10));
    CHECK(cs.max_spread < 1e-9 * std::abs(cs.mean));

    auto c1 = expanded_constant_check(make_system(Confinement::quartic(1.0, 2.0), 1.0, 1),
                                      10, 13);
    CHECK(c1.mean == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("random configurations") {
    auto s = make_system(Confinement::quartic(1.0, 5.0), 1.0, 6);
    const double w = support_halfwidth(s.trap, s.coupling.lambda, s.n);
    auto a = random_configuration(s, 77);
    auto b = random_configuration(s, 77);
    auto c = random_configuration(s, 78);
    CHECK(a == b);
    CHECK(a != c);
    REQUIRE(a.size() == 6);
    for (double x : a) CHECK(std::abs(x) <= w);
    std::sort(a.begin(), a.end());
    for (size_t i = 1; i < a.size(); ++i) CHECK(a[i] - a[i - 1] > 1e-6);
}

TEST_CASE("support halfwidth brackets the outer turning point") {
    // deep double well: the box must clear the outer band edge, not the
    // inner well wall
    const auto deep = Confinement::quartic(1.0, 60.0);
    const double w = support_halfwidth(deep, 1.0, 50);
    CHECK(w > 8.37); // outer band edge sqrt(60 + 10)
    CHECK(confinement_integral(deep, w / 1.1) - potential_minimum(deep) > 60.0);

    const double wh = support_halfwidth(Confinement::harmonic(1.0), 1.0, 50);
    CHECK(wh > 10.0); // semicircle edge sqrt(2N/gamma)
    CHECK(wh < 30.0);
}

TEST_CASE("potential minimum") {
    CHECK(potential_minimum(Confinement::harmonic(3.0)) == 0.0);
    CHECK(potential_minimum(Confinement::quartic(2.0, 3.0)) ==
          doctest::Approx(-4.5).epsilon(1e-13)); // -gamma a1^2 / 4
    CHECK(potential_minimum(Confinement::quartic(1.0, 60.0)) ==
          doctest::Approx(-900.0).epsilon(1e-13));
    // triple well, outer wells at u = 2 + sqrt(2): V = -2 (1 + sqrt(2)) / 3
    CHECK(potential_minimum(Confinement::sextic(1.0, -4.0, 2.0)) ==
          doctest::Approx(-2.0 * (1.0 + std::sqrt(2.0)) / 3.0).epsilon(1e-12));
}
