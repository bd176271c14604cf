#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <polytrap/analytic_density.hpp>
#include <polytrap/errors.hpp>
#include <polytrap/model.hpp>

#include <cmath>
#include <functional>
#include <vector>

using namespace polytrap;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Integral over [lo, hi] through y = mid + half sin(theta); the substitution
// soaks up sqrt endpoint behavior, so the trapezoid rule converges fast.
double arc_integral(const std::function<double(double)>& f, double lo, double hi, int n = 4001) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double th = -0.5 * kPi + kPi * i / (n - 1);
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        acc += w * f(mid + half * std::sin(th)) * half * std::cos(th);
    }
    return acc * kPi / (n - 1);
}

} // namespace

TEST_CASE("critical parameters") {
    CHECK(quartic_critical_a1(1.0, 50) == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(quartic_critical_a1(2.0, 4) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(sextic_critical_a1({1.0, -4.0, 3.0, 50}) == doctest::Approx(4.0).epsilon(1e-14));

    auto cq = critical_params({50, Confinement::quartic(1.0, 7.0), Coupling::from_lambda(1.0)});
    CHECK(cq.a_c == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(cq.e0_c == doctest::Approx(-25000.0).epsilon(1e-12)); // stored l = -a_c

    auto cs = critical_params({3, Confinement::sextic(2.0, -4.0, 1.0), Coupling::from_lambda(2.0)});
    CHECK(cs.a_c == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(cs.e0_c == doctest::Approx(120.0).epsilon(1e-12)); // 2 * 4 * 3 * (1 + 2*2)

    CHECK_THROWS_AS(critical_params({3, Confinement::harmonic(1.0), Coupling::from_lambda(1.0)}),
                    UnsupportedFormError);
}

TEST_CASE("quartic density closed forms") {
    QuarticDensityParams two{1.0, 12.0, 50};
    CHECK(quartic_density(two, 0.0) == 0.0);
    CHECK(quartic_density(two, 2.0) > 0.0);
    CHECK(quartic_density(two, 1.4) == 0.0);  // inside the gap, below sqrt(2)
    CHECK(quartic_density(two, 4.7) == 0.0);  // beyond sqrt(22)
    CHECK(quartic_density(two, 3.0) == doctest::Approx(quartic_density(two, -3.0)).epsilon(1e-14));

    // mass: arcs [sqrt(2), sqrt(22)] and its mirror
    const double mass2 = 2.0 * arc_integral([&](double y) { return quartic_density(two, y); },
                                            std::sqrt(2.0), std::sqrt(22.0));
    CHECK(mass2 == doctest::Approx(50.0).epsilon(1e-6));

    QuarticDensityParams one{1.0, 5.0, 50};
    const double s = std::sqrt(25.0 + 300.0);
    const double edge = std::sqrt(2.0 * (s + 5.0) / 3.0);
    CHECK(quartic_density(one, 0.0) > 0.0);
    CHECK(quartic_density(one, edge + 1e-9) == 0.0);
    const double mass1 =
        arc_integral([&](double y) { return quartic_density(one, y); }, -edge, edge);
    CHECK(mass1 == doctest::Approx(50.0).epsilon(1e-6));

    // at the threshold the single-band form pinches to zero at the origin
    QuarticDensityParams crit{1.0, 10.0, 50};
    CHECK(quartic_density(crit, 0.0) == doctest::Approx(0.0).epsilon(1e-10));

    // continuity across the threshold: the two branches stay L1-close
    QuarticDensityParams lo{1.0, 10.0 - 1e-4, 50}, hi{1.0, 10.0 + 1e-4, 50};
    double l1 = 0.0;
    const int pts = 20001;
    for (int i = 0; i < pts; ++i) {
        const double y = -5.0 + 10.0 * i / (pts - 1.0);
        l1 += std::abs(quartic_density(lo, y) - quartic_density(hi, y)) * 10.0 / (pts - 1.0);
    }
    CHECK(l1 / 50.0 < 0.005);
}

TEST_CASE("quartic band decomposition") {
    auto b2 = quartic_bands({1.0, 12.0, 50});
    REQUIRE(b2.count() == 2);
    CHECK(b2.intervals[0].lo == doctest::Approx(-std::sqrt(22.0)).epsilon(1e-12));
    CHECK(b2.intervals[0].hi == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
    CHECK(b2.intervals[1].lo == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(b2.intervals[1].hi == doctest::Approx(std::sqrt(22.0)).epsilon(1e-12));
    CHECK_FALSE(b2.dip);

    auto b1 = quartic_bands({1.0, 5.0, 50});
    REQUIRE(b1.count() == 1);
    CHECK(b1.dip); // local minimum at the origin, not yet split

    auto bc = quartic_bands({1.0, 10.0, 50});
    CHECK(bc.count() == 1);

    // single well still dips at the origin until the harmonic part dominates:
    // the center flattens out only for a1 <= -sqrt(2N/gamma)
    auto b0 = quartic_bands({1.0, -3.0, 50});
    REQUIRE(b0.count() == 1);
    CHECK(b0.dip);

    auto bh = quartic_bands({1.0, -12.0, 50});
    REQUIRE(bh.count() == 1);
    CHECK_FALSE(bh.dip);
}

TEST_CASE("quartic moments") {
    // two-band: M2 = a1 N and M4 = N (a1^2 + N / (2 gamma)) exactly
    auto m2band = quartic_moments({1.0, 12.0, 50});
    CHECK(m2band[0] == doctest::Approx(600.0).epsilon(1e-10));
    CHECK(m2band[1] == doctest::Approx(8450.0).epsilon(1e-10));

    auto mg = quartic_moments({2.0, 9.0, 36});
    CHECK(mg[0] == doctest::Approx(9.0 * 36.0).epsilon(1e-10));
    CHECK(mg[1] == doctest::Approx(36.0 * (81.0 + 9.0)).epsilon(1e-10));

    // single band, frozen from the Wallis-integral closed form
    auto m1band = quartic_moments({1.0, 5.0, 50});
    CHECK(m1band[0] == doctest::Approx(304.963734171443832).epsilon(1e-10));
    CHECK(m1band[1] == doctest::Approx(2774.818670857219).epsilon(1e-10));
}

TEST_CASE("band structure from sampled profiles") {
    DensityProfile p;
    for (int i = 0; i <= 100; ++i) {
        const double y = -5.0 + 0.1 * i;
        p.y.push_back(y);
        p.value.push_back(std::abs(y) > 1.0 && std::abs(y) < 3.0 ? 1.0 : 0.0);
    }
    // edges land on the outermost grid points above the floor
    auto b = band_structure(p);
    REQUIRE(b.count() == 2);
    CHECK(b.intervals[0].lo == doctest::Approx(-2.9));
    CHECK(b.intervals[0].hi == doctest::Approx(-1.1));
    CHECK(b.intervals[1].hi == doctest::Approx(2.9));

    // a single-cell notch does not split a band
    DensityProfile notch = p;
    for (size_t i = 0; i < notch.value.size(); ++i)
        notch.value[i] = std::abs(notch.y[i]) < 3.0 ? 1.0 : 0.0;
    notch.value[50] = 0.0;
    CHECK(band_structure(notch).count() == 1);

    DensityProfile zero = p;
    for (auto& v : zero.value) v = 0.0;
    CHECK(band_structure(zero).count() == 0);
}

TEST_CASE("sextic density from a fixed moment pair") {
    SexticParams p{1.0, -4.0, 3.0, 50};
    SexticDensity d(p, 30.0, 1500.0);

    // ascending radicand coefficients in u, straight from the moment algebra
    const auto& r = d.radicand();
    CHECK(r[0] == doctest::Approx(3060.0).epsilon(1e-12));
    CHECK(r[1] == doctest::Approx(-349.0).epsilon(1e-12));
    CHECK(r[2] == doctest::Approx(124.0).epsilon(1e-12));
    CHECK(r[3] == doctest::Approx(-22.0).epsilon(1e-12));
    CHECK(r[4] == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(r[5] == doctest::Approx(-1.0).epsilon(1e-12));

    CHECK(d(0.0) == doctest::Approx(std::sqrt(3060.0) / kPi).epsilon(1e-12));
    CHECK(d(1.3) == doctest::Approx(d(-1.3)).epsilon(1e-14));
    CHECK(d.feasible());
    CHECK(d.mass() > 0.0);
}

TEST_CASE("sextic self-consistent solve, single band") {
    SexticParams p{1.0, -4.0, 3.0, 50};
    auto res = sextic_density_solve(p);
    CHECK(res.state.converged);
    CHECK(res.state.residual < 1e-8);
    CHECK(std::abs(res.state.mass - 50.0) / 50.0 < 1e-4);
    CHECK(res.density.bands().count() == 1);

    // returned state reproduces itself through the density construction
    SexticDensity d(p, res.state.m2, res.state.m4);
    CHECK(std::abs(d.moment2() - res.state.m2) <= res.state.residual + 1e-12);
    CHECK(std::abs(d.moment4() - res.state.m4) <= res.state.residual + 1e-12);
    CHECK(d(0.0) ==
          doctest::Approx(std::sqrt(d.radicand()[0]) / kPi).epsilon(1e-12));

    // mass from the class matches a direct integral over the support
    const auto& arcs = res.density.support_u();
    REQUIRE(!arcs.empty());
    double mass = 0.0;
    for (const auto& a : arcs) {
        // each u-arc covers the positive-y half of its band; double for the mirror
        const double lo = std::sqrt(std::max(0.0, a[0])), hi = std::sqrt(a[1]);
        mass += 2.0 * arc_integral([&](double y) { return res.density(y); }, lo, hi);
    }
    CHECK(mass == doctest::Approx(res.state.mass).epsilon(1e-5));
}

TEST_CASE("sextic solve resolves band counts across the cascade") {
    CHECK(sextic_density_solve({135.0, -4.0, 4.6, 50}).density.bands().count() == 1);
    CHECK(sextic_density_solve({135.0, -4.0, 4.0, 50}).density.bands().count() == 3);
    CHECK(sextic_density_solve({135.0, -4.0, 2.0, 50}).density.bands().count() == 2);
}

TEST_CASE("sextic solve honors its iteration budget") {
    SexticParams p{135.0, -4.0, 4.0, 50};
    try {
        sextic_density_solve(p, 1e-14, 3);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.residual > 0.0);
        CHECK(e.residual < 1e-6); // carries the best state seen
    }
    CHECK_THROWS_AS(sextic_density_solve(p, -1.0, 10), InvalidParameterError);
}

TEST_CASE("quartic phase scan") {
    PhaseScanParams p;
    p.trap_case = TrapCase::quartic;
    p.gamma = 1.0;
    p.n = 50;
    p.lambda = 1.0;
    for (double a1 = 15.0; a1 > 4.99; a1 -= 0.5) p.a1_values.push_back(a1);

    auto rows = phase_scan(p);
    REQUIRE(rows.size() == 21);
    int first_single = -1;
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].converged);
        if (first_single < 0 && rows[i].band_count == 1) first_single = int(i);
    }
    REQUIRE(first_single > 0);
    CHECK(rows[first_single].a1 == doctest::Approx(10.0)); // threshold hit on the grid
    CHECK(rows[first_single - 1].band_count == 2);

    // E0 is affine in a1 with slope -gamma N (1 + lambda (N-1))
    for (size_t i = 1; i < rows.size(); ++i)
        CHECK(rows[i].e0 - rows[i - 1].e0 ==
              doctest::Approx(0.5 * 2500.0).epsilon(1e-12));
}

TEST_CASE("sextic phase scan walks the band cascade") {
    PhaseScanParams p;
    p.trap_case = TrapCase::sextic;
    p.gamma = 135.0;
    p.a3 = -4.0;
    p.n = 50;
    for (double a1 = 5.0; a1 > 0.99; a1 -= 0.1) p.a1_values.push_back(a1);

    auto rows = phase_scan(p);
    std::vector<int> seq;
    for (const auto& r : rows) {
        REQUIRE(r.converged);
        if (seq.empty() || seq.back() != r.band_count) seq.push_back(r.band_count);
    }
    CHECK(seq == std::vector<int>{1, 3, 2});

    CHECK_THROWS_AS(phase_scan(PhaseScanParams{}), InvalidParameterError);
}

TEST_CASE("failed rows are marked without aborting a scan") {
    PhaseScanParams p;
    p.trap_case = TrapCase::sextic;
    p.gamma = 135.0;
    p.a3 = -4.0;
    p.n = 50;
    p.tol = 1e-14;
    p.max_iter = 3;
    p.a1_values = {4.6, 4.0, 2.0};

    auto rows = phase_scan(p);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].converged); // one-cut guess is already the fixed point
    CHECK_FALSE(rows[1].converged);
    CHECK(rows[1].band_count == 0);
}
