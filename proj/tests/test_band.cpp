#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "metacrystal/band.hpp"

using namespace metacrystal;
using band::DispersionSpec;

namespace {
constexpr double kPi = std::numbers::pi;

// J_n = (-1)^{n+1} J / (pi i n): the closed-form hopping amplitude of the
// linear one-way band.
band::cplx sawtooth_hopping(double J, int n) {
    if (n == 0) return {0.0, 0.0};
    const double sign = (n % 2 == 0) ? -1.0 : 1.0;
    return sign * J / (kPi * band::cplx{0.0, 1.0} * static_cast<double>(n));
}
}  // namespace

TEST_CASE("evaluate: closed-form bands") {
    const auto saw = DispersionSpec::sawtooth(1.0, 1.0);
    const auto sin = DispersionSpec::sinusoidal(1.0, 1.0);
    CHECK(band::evaluate(saw, kPi / 2) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(band::evaluate(saw, 0.0) == 0.0);
    CHECK(band::evaluate(sin, 0.0) == doctest::Approx(-1.0).epsilon(1e-14));
    // zone edge takes the Fourier-midpoint value 0
    CHECK(band::evaluate(saw, -kPi) == 0.0);
    CHECK(band::evaluate_phase(saw, kPi) == 0.0);
    CHECK(band::evaluate_phase(saw, -kPi) == 0.0);
    // 2*pi/a periodicity
    CHECK(band::evaluate(saw, 0.3 + 2 * kPi) ==
          doctest::Approx(band::evaluate(saw, 0.3)).epsilon(1e-12));
    CHECK(band::evaluate(sin, -4.0) ==
          doctest::Approx(band::evaluate(sin, -4.0 + 2 * kPi)).epsilon(1e-12));
}

TEST_CASE("evaluate: lattice constant scaling") {
    const auto saw = DispersionSpec::sawtooth(2.0, 0.5);
    CHECK(band::evaluate(saw, kPi) ==
          doctest::Approx(2.0 * 0.5 * kPi / kPi).epsilon(1e-14));
}

TEST_CASE("evaluate: custom partial sum and Hermiticity guard") {
    // nearest-neighbor pair reproduces the cosine band
    auto nn = DispersionSpec::custom({{1, {-0.5, 0.0}}, {-1, {-0.5, 0.0}}});
    CHECK(band::evaluate(nn, 0.7) ==
          doctest::Approx(-std::cos(0.7)).epsilon(1e-14));
    // a lone complex coefficient leaves an imaginary residue
    auto bad = DispersionSpec::custom({{1, {0.0, 1.0}}});
    CHECK_THROWS_AS(band::evaluate(bad, 1.0), band::NonHermitianCustomError);
}

TEST_CASE("hoppings: sawtooth closed form term by term") {
    const auto hops = band::hoppings(DispersionSpec::sawtooth(1.0), 64);
    for (int n = -64; n <= 64; ++n) {
        const auto expected = sawtooth_hopping(1.0, n);
        CHECK(std::abs(hops.at(n) - expected) <= 1e-15);
    }
    // spot values: J_1 = -i/pi, J_{-1} = +i/pi, J_2 = +i/(2 pi)
    CHECK(std::abs(hops.at(1) - band::cplx{0.0, -1.0 / kPi}) <= 1e-15);
    CHECK(std::abs(hops.at(-1) - band::cplx{0.0, 1.0 / kPi}) <= 1e-15);
    CHECK(std::abs(hops.at(2) - band::cplx{0.0, 1.0 / (2 * kPi)}) <= 1e-15);
    CHECK(std::abs(hops.at(0)) == 0.0);
}

TEST_CASE("hoppings: sinusoidal is nearest-neighbor only") {
    const auto hops = band::hoppings(DispersionSpec::sinusoidal(1.0), 3);
    CHECK(std::abs(hops.at(1) - band::cplx{-0.5, 0.0}) <= 1e-15);
    CHECK(std::abs(hops.at(-1) - band::cplx{-0.5, 0.0}) <= 1e-15);
    for (int n : {0, 2, -2, 3, -3}) CHECK(std::abs(hops.at(n)) == 0.0);
}

TEST_CASE("hoppings: Hermiticity for every built-in spec") {
    for (const auto& spec :
         {DispersionSpec::sawtooth(0.7), DispersionSpec::sinusoidal(1.3),
          DispersionSpec::custom({{1, {-0.5, 0.0}}, {-1, {-0.5, 0.0}}})}) {
        const auto hops = band::hoppings(spec, 16);
        CHECK(hops.hermitian(1e-15));
        for (const auto& [n, J_n] : hops.entries)
            CHECK(std::abs(hops.at(-n) - std::conj(J_n)) <= 1e-15);
    }
}

TEST_CASE("reconstruct: exact for finite bands, O(1/M) near a jump") {
    const auto sin_hops = band::hoppings(DispersionSpec::sinusoidal(1.0), 3);
    CHECK(band::reconstruct(sin_hops, 0.0) == doctest::Approx(-1.0).epsilon(1e-15));

    const auto saw = DispersionSpec::sawtooth(1.0);
    const double k = kPi / 2;
    const double e200 =
        std::abs(band::reconstruct(band::hoppings(saw, 200), k) - 0.5);
    CHECK(e200 <= 2e-3);
    // interior-point convergence: error shrinks with M (1e-3 noise floor)
    const double e16 =
        std::abs(band::reconstruct(band::hoppings(saw, 16), k) - 0.5);
    const double e64 =
        std::abs(band::reconstruct(band::hoppings(saw, 64), k) - 0.5);
    CHECK(e64 <= e16 + 1e-3);
    CHECK(e200 <= e64 + 1e-3);
    // the sine series vanishes identically at the zone edge
    CHECK(std::abs(band::reconstruct(band::hoppings(saw, 37), -kPi)) <= 1e-12);
}

TEST_CASE("reconstruct: rejects tampered non-Hermitian sets") {
    auto hops = band::hoppings(DispersionSpec::sawtooth(1.0), 4);
    hops.entries[2] = {0.25, 0.0};  // breaks J_{-2} == conj(J_2)
    CHECK_THROWS_AS(band::reconstruct(hops, 0.3), band::NonHermitianError);
}

TEST_CASE("time_reversal_symmetric: even bands only") {
    CHECK(band::time_reversal_symmetric(DispersionSpec::sinusoidal(1.0), 64,
                                        1e-12));
    CHECK_FALSE(band::time_reversal_symmetric(DispersionSpec::sawtooth(1.0), 64,
                                              1e-12));
    CHECK(band::time_reversal_symmetric(
        DispersionSpec::custom({{1, {-0.5, 0.0}}, {-1, {-0.5, 0.0}}}), 64,
        1e-12));
}

TEST_CASE("parity link: symmetric under time reversal iff hoppings real") {
    for (const auto& spec :
         {DispersionSpec::sawtooth(1.0), DispersionSpec::sinusoidal(1.0),
          DispersionSpec::custom({{1, {-0.5, 0.0}}, {-1, {-0.5, 0.0}}})}) {
        const auto hops = band::hoppings(spec, 16);
        bool all_real = true;
        for (const auto& [n, J_n] : hops.entries)
            if (std::abs(J_n.imag()) > 1e-12) all_real = false;
        CHECK(band::time_reversal_symmetric(spec, 64, 1e-12) == all_real);
    }
}

TEST_CASE("one_way_certificate: uniform velocity of the linear band") {
    const auto rep = band::one_way_certificate(DispersionSpec::sawtooth(1.0), 64);
    CHECK(rep.one_way);
    CHECK(rep.v_min == doctest::Approx(1.0 / kPi).epsilon(1e-12));
    CHECK(rep.v_max == doctest::Approx(1.0 / kPi).epsilon(1e-12));
}

TEST_CASE("one_way_certificate: even bands move both ways") {
    const auto rep =
        band::one_way_certificate(DispersionSpec::sinusoidal(1.0), 256);
    CHECK_FALSE(rep.one_way);
    CHECK(rep.v_min < 0.0);
    CHECK(rep.v_max > 0.0);
    CHECK(rep.v_min == doctest::Approx(-rep.v_max).epsilon(1e-9));

    const auto custom = band::one_way_certificate(
        DispersionSpec::custom({{1, {-0.5, 0.0}}, {-1, {-0.5, 0.0}}}), 256);
    CHECK_FALSE(custom.one_way);
    // finite-difference branch agrees with the analytic sinusoidal one
    CHECK(custom.v_max == doctest::Approx(rep.v_max).epsilon(1e-4));
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(DispersionSpec::sawtooth(1.0, 0.0).validate(),
                    std::invalid_argument);
    CHECK_THROWS_AS(band::hoppings(DispersionSpec::sawtooth(1.0), 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        band::time_reversal_symmetric(DispersionSpec::sawtooth(1.0), 4, 1e-12),
        std::invalid_argument);
    CHECK_THROWS_AS(band::one_way_certificate(DispersionSpec::sawtooth(1.0), 8),
                    std::invalid_argument);
}
