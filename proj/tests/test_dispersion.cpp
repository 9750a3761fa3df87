#include <cmath>

#include "doctest.h"
#include "nlskg/dispersion.hpp"

using namespace nlskg;

TEST_CASE("carrier closed forms at k0 = 1") {
    const CarrierData c = carrier(1.0);
    CHECK(c.omega0 == doctest::Approx(1.4142135623730951).epsilon(1e-14));
    CHECK(c.cg == doctest::Approx(0.7071067811865475).epsilon(1e-14));
    CHECK(c.omega2 == doctest::Approx(0.3535533905932738).epsilon(1e-14));
}

TEST_CASE("carrier derivatives agree with finite differences") {
    for (double k0 : {0.7, 1.0, 2.3}) {
        const CarrierData c = carrier(k0);
        const double h = 1e-5;
        const double cg_fd = (omega(k0 + h) - omega(k0 - h)) / (2.0 * h);
        CHECK(c.cg == doctest::Approx(cg_fd).epsilon(1e-8));
        // Richardson-extrapolated second difference
        auto d2 = [k0](double hh) {
            return (omega(k0 + hh) - 2.0 * omega(k0) + omega(k0 - hh)) / (hh * hh);
        };
        const double w2_fd = (4.0 * d2(5e-4) - d2(1e-3)) / 3.0;
        CHECK(c.omega2 == doctest::Approx(w2_fd).epsilon(1e-7));
    }
}

TEST_CASE("carrier limits and identities") {
    const CarrierData c = carrier(1e-8);
    CHECK(c.omega0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.cg == doctest::Approx(0.0).epsilon(1e-7));
    for (double k0 : {0.5, 1.0, 2.0, 5.0})
        CHECK(carrier(k0).omega0 * carrier(k0).cg == doctest::Approx(k0).epsilon(1e-14));
    CHECK_THROWS_AS((void)carrier(0.0), DomainError);
    CHECK_THROWS_AS((void)carrier(-1.0), DomainError);
}

TEST_CASE("harmonic gaps at k0 = 1") {
    const auto gaps = harmonic_nonresonance(1.0, 10);
    CHECK(gaps.size() == 9);
    CHECK(gaps[0].first == 2);
    CHECK(gaps[0].second == doctest::Approx(0.5923591472464004).epsilon(1e-12));
    CHECK(gaps[1].second ==
          doctest::Approx(std::abs(std::sqrt(10.0) - 3.0 * std::sqrt(2.0))).epsilon(1e-12));
    for (double k0 : {0.5, 1.0, 2.0})
        for (const auto& [m, gap] : harmonic_nonresonance(k0, 10)) CHECK(gap > 0.0);
    CHECK_THROWS_AS((void)harmonic_nonresonance(1.0, 1), DomainError);
}

TEST_CASE("one-sided limit at the sign discontinuity") {
    // k -> 0+, p = 1, j1 = j2 = 1: |-omega(0+) - omega(1) + omega(-1)| = 1 + 2 sqrt(2)
    const double value =
        std::abs(-omega_branch(0.0, +1) - omega(1.0) + omega(-1.0));
    CHECK(value == doctest::Approx(3.8284271247461903).epsilon(1e-14));
    CHECK(omega_branch(0.0, -1) == -1.0);
    CHECK(omega_branch(2.0, -1) == omega(2.0));
}

TEST_CASE("nonresonance scan: positive constant, argmin structure") {
    const NonresonanceScan scan = nonresonance_constant(1.0, 3.0, 250);
    CHECK(scan.min_gap > 0.0);
    // the infimum region: p at the band edge, k at the far end of the scan,
    // value slightly above omega(k1) - k1
    CHECK(std::abs(scan.p_at) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(scan.min_gap > std::sqrt(10.0) - 3.0);
    CHECK(scan.min_gap < 0.17);
}

TEST_CASE("nonresonance scan decreases with k1") {
    const NonresonanceScan a = nonresonance_constant(1.0, 2.0, 150);
    const NonresonanceScan b = nonresonance_constant(1.0, 5.0, 150);
    CHECK(b.min_gap < a.min_gap);
    CHECK_THROWS_AS((void)nonresonance_constant(1.0, 3.0, 50), DomainError);
    CHECK_THROWS_AS((void)nonresonance_constant(1.0, -1.0, 200), DomainError);
}

TEST_CASE("omega monotone, asymptotics, rho bounds") {
    double prev = 0.0;
    for (double k = 0.1; k < 30.0; k += 0.1) {
        CHECK(omega(k) > prev);
        prev = omega(k);
    }
    for (double k = 1.0; k < 50.0; k *= 1.5) CHECK(std::abs(omega(k) - k) * k <= 1.0);
    for (double k : {-7.0, -1.0, 0.3, 2.0, 11.0}) {
        if (k != 0.0)
            CHECK(rho(k) / omega(k) == doctest::Approx(k * k / (1.0 + k * k)).epsilon(1e-15));
        CHECK(rho(-k) == -rho(k));
        if (k > 0.0) CHECK(omega(-k) == -omega(k));
    }
}
