#include "crnoma/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace crnoma;

TEST_SUITE("geometry") {

TEST_CASE("path_gain basic values") {
    CHECK(path_gain(1.0, 3.5) == doctest::Approx(1.0));
    CHECK(path_gain(80.0, 3.5) == doctest::Approx(std::pow(80.0, -3.5)).epsilon(1e-12));
    CHECK(path_gain(80.0, 3.5) == doctest::Approx(2.18e-7).epsilon(2e-3));
    CHECK(path_gain(2.0, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("path_gain rejects non-positive distance") {
    CHECK_THROWS_AS(path_gain(0.0, 3.5), std::domain_error);
    CHECK_THROWS_AS(path_gain(-1.0, 3.5), std::domain_error);
}

TEST_CASE("path_gain strictly decreases in distance") {
    double prev = path_gain(1.0, 3.5);
    for (double d = 2.0; d <= 400.0; d += 7.0) {
        double g = path_gain(d, 3.5);
        CHECK(g < prev);
        prev = g;
    }
}

TEST_CASE("node layout collapses to pairwise distances") {
    NodeLayout l;
    l.pap = {0.0, 0.0};
    l.sap = {30.0, 40.0}; // 50 m from PAP
    l.pue = {80.0, 0.0};
    l.sue = {30.0, 15.0}; // 25 m from SAP
    l.eve = {160.0, 0.0};
    auto d = l.to_distances();
    CHECK(d.pap_sap == doctest::Approx(50.0));
    CHECK(d.pap_pue == doctest::Approx(80.0));
    CHECK(d.pap_eve == doctest::Approx(160.0));
    CHECK(d.sap_sue == doctest::Approx(25.0));
}

TEST_CASE("nominal gains follow d^-lambda on every link") {
    LinkDistances d; // defaults
    auto g = nominal_gains(d, 3.5);
    CHECK(g.pap_pue == doctest::Approx(path_gain(d.pap_pue, 3.5)));
    CHECK(g.pap_sap == doctest::Approx(path_gain(d.pap_sap, 3.5)));
    CHECK(g.pap_eve == doctest::Approx(path_gain(d.pap_eve, 3.5)));
    CHECK(g.sap_pue == doctest::Approx(path_gain(d.sap_pue, 3.5)));
    CHECK(g.sap_sue == doctest::Approx(path_gain(d.sap_sue, 3.5)));
    CHECK(g.sap_eve == doctest::Approx(path_gain(d.sap_eve, 3.5)));
}

TEST_CASE("uncertainty bounds scale each nominal gain") {
    LinkGains nom{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    auto b = uncertainty_bounds(nom, 0.1);
    CHECK(b.pap_pue == doctest::Approx(0.1));
    CHECK(b.sap_eve == doctest::Approx(0.6));
    auto z = uncertainty_bounds(nom, 0.0);
    CHECK(z.pap_pue == 0.0);
    CHECK(z.sap_eve == 0.0);
}

TEST_CASE("zero bounds give exact estimates") {
    LinkDistances d;
    auto nom = nominal_gains(d, 3.5);
    FadingConfig fading;
    LinkGains zero{};
    Rng rng(17);
    for (int i = 0; i < 100; ++i) {
        auto ch = draw_channel_set(nom, fading, zero, ErrorClass::bounded, rng);
        CHECK(ch.est_pap_pue == ch.gain.pap_pue);
        CHECK(ch.est_pap_sap == ch.gain.pap_sap);
        CHECK(ch.est_sap_pue == ch.gain.sap_pue);
        CHECK(ch.est_sap_sue == ch.gain.sap_sue);
    }
}

TEST_CASE("fixed seed reproduces the channel sequence bitwise") {
    LinkDistances d;
    auto nom = nominal_gains(d, 3.5);
    auto bounds = uncertainty_bounds(nom, 0.1);
    FadingConfig fading;
    Rng a(99), b(99);
    for (int i = 0; i < 50; ++i) {
        auto ca = draw_channel_set(nom, fading, bounds, ErrorClass::bounded, a);
        auto cb = draw_channel_set(nom, fading, bounds, ErrorClass::bounded, b);
        CHECK(ca.gain.pap_pue == cb.gain.pap_pue);
        CHECK(ca.gain.sap_eve == cb.gain.sap_eve);
        CHECK(ca.est_pap_sap == cb.est_pap_sap);
        CHECK(ca.est_sap_sue == cb.est_sap_sue);
    }
}

TEST_CASE("estimates stay within the per-link bound over many draws") {
    LinkDistances d;
    auto nom = nominal_gains(d, 3.5);
    auto bounds = uncertainty_bounds(nom, 0.1);
    FadingConfig fading;
    Rng rng(31);
    const double tol = 1e-15;
    for (int i = 0; i < 100000; ++i) {
        auto ch = draw_channel_set(nom, fading, bounds, ErrorClass::bounded, rng);
        CHECK(std::abs(ch.gain.pap_pue - ch.est_pap_pue) <= bounds.pap_pue + tol);
        CHECK(std::abs(ch.gain.pap_sap - ch.est_pap_sap) <= bounds.pap_sap + tol);
        CHECK(std::abs(ch.gain.sap_pue - ch.est_sap_pue) <= bounds.sap_pue + tol);
        CHECK(std::abs(ch.gain.sap_sue - ch.est_sap_sue) <= bounds.sap_sue + tol);
        CHECK(ch.est_pap_pue >= 0.0);
        CHECK(ch.est_pap_sap >= 0.0);
        CHECK(ch.est_sap_pue >= 0.0);
        CHECK(ch.est_sap_sue >= 0.0);
    }
}

TEST_CASE("rayleigh power fades preserve the configured mean") {
    LinkGains nom{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    FadingConfig fading;
    fading.mean = 2.0;
    LinkGains zero{};
    Rng rng(57);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i)
        sum += draw_channel_set(nom, fading, zero, ErrorClass::bounded, rng).gain.pap_pue;
    CHECK(sum / n == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("disabled fading returns the deterministic mean gain") {
    LinkDistances d;
    auto nom = nominal_gains(d, 3.5);
    FadingConfig fading;
    fading.family = FadingFamily::none;
    LinkGains zero{};
    Rng rng(3);
    auto ch = draw_channel_set(nom, fading, zero, ErrorClass::bounded, rng);
    CHECK(ch.gain.pap_pue == doctest::Approx(nom.pap_pue));
    CHECK(ch.gain.sap_eve == doctest::Approx(nom.sap_eve));
}

TEST_CASE("estimated gains expose nominals for the eavesdropper links") {
    LinkDistances d;
    auto nom = nominal_gains(d, 3.5);
    auto bounds = uncertainty_bounds(nom, 0.1);
    FadingConfig fading;
    Rng rng(5);
    auto ch = draw_channel_set(nom, fading, bounds, ErrorClass::bounded, rng);
    auto est = estimated_gains(ch, nom);
    CHECK(est.pap_pue == ch.est_pap_pue);
    CHECK(est.pap_sap == ch.est_pap_sap);
    CHECK(est.sap_pue == ch.est_sap_pue);
    CHECK(est.sap_sue == ch.est_sap_sue);
    CHECK(est.pap_eve == nom.pap_eve);
    CHECK(est.sap_eve == nom.sap_eve);
}

} // TEST_SUITE
