#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "satqkd/counts.hpp"

using namespace satqkd;

TEST_SUITE("counts") {
  TEST_CASE("pair-number distribution") {
    CHECK(pair_number_probability(0, 0.0) == 1.0);
    CHECK(pair_number_probability(3, 0.0) == 0.0);
    double total = 0.0;
    for (int n = 0; n < 200; ++n) total += pair_number_probability(n, 0.3);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    const double multi = multi_pair_probability(0.01);
    CHECK(multi < 1e-3);
    CHECK(multi == doctest::Approx(1.0 - pair_number_probability(0, 0.01) - pair_number_probability(1, 0.01)).epsilon(1e-6));
    CHECK_THROWS_AS(pair_number_probability(-1, 0.1), std::invalid_argument);
  }

  TEST_CASE("background click probability") {
    DetectorModel det;
    CHECK(background_click_prob(0.0, det, 0.7, 785e-9) == 0.0);
    CHECK(background_click_prob(default_night_radiance(), det, 0.7, 785e-9) == doctest::Approx(1e-7).epsilon(1e-12));

    // Independent evaluation: photon energy hc/lambda, area in cm^2.
    const double h = 6.62607015e-34, c = 299792458.0;
    const double area = kPi * 35.0 * 35.0;
    const double expect = 5e-9 / (h * c / 785e-9) * 1e-15 * area * 5e-8 * 10.0;
    CHECK(background_click_prob(1e-15, det, 0.7, 785e-9) == doctest::Approx(expect).epsilon(1e-12));

    const double base = background_click_prob(1e-15, det, 0.7, 785e-9);
    det.background_scale = 100.0;
    CHECK(background_click_prob(1e-15, det, 0.7, 785e-9) == doctest::Approx(100.0 * base).epsilon(1e-14));
    det.background_scale = 1e30;
    CHECK(background_click_prob(1e-15, det, 0.7, 785e-9) == 1.0);
  }

  TEST_CASE("extraneous probability") {
    CHECK(extraneous_prob(0.0, 0.3) == 0.3);
    CHECK(extraneous_prob(1.0, 1.0) == 1.0);
    CHECK(extraneous_prob(5e-7, 1e-7) == doctest::Approx(5.9999995e-7).epsilon(1e-15));
  }

  TEST_CASE("coincidence and error anchors") {
    CHECK(coincidence_rate({1, 1, 0, 0}, 0.0) == 1.0);
    CHECK(coincidence_rate({0, 0, 0.2, 0.3}, 0.0) == doctest::Approx(0.06).epsilon(1e-15));
    const LinkPair pt{0.5, 0.25, 1e-6, 2e-6};
    const double d = coincidence_rate(pt, 1e-3);
    const double expect = (1 + 1e-6) * (0.125 + 0.5 * 0.75 * 2e-6 + 0.25 * 0.5 * 1e-6 + 0.875 * 2e-12);
    CHECK(d == doctest::Approx(expect).epsilon(1e-15));
    CHECK(d == doctest::Approx(0.125001000).epsilon(1e-9));

    CHECK(error_rate({0.3, 0.2, 0, 0}, 0.0, 0.01, coincidence_rate({0.3, 0.2, 0, 0}, 0.0)) == doctest::Approx(0.01 * 0.06));
    const LinkPair noise{0, 0, 0.2, 0.3};
    CHECK(error_rate(noise, 0.0, 0.01, coincidence_rate(noise, 0.0)) == doctest::Approx(0.06));
  }

  TEST_CASE("zenith-like bin has QBER close to the intrinsic floor") {
    const double eta = std::pow(10.0, -2.204);
    const double pec = extraneous_prob(5e-7, 1e-7);
    const LinkPair in{eta, eta, pec, pec};
    const double d = coincidence_rate(in, 1e-3);
    const double q = error_rate(in, 1e-3, 1e-3, d) / d;
    CHECK(q > 1e-3);
    CHECK(q < 1.2e-3);
  }

  TEST_CASE("property: 0 <= e <= D") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100000; ++i) {
      const LinkPair in{u(rng), u(rng), u(rng), u(rng)};
      const double pap = u(rng), qi = u(rng);
      const double d = coincidence_rate(in, pap);
      const double e = error_rate(in, pap, qi, d);
      REQUIRE(e >= 0.0);
      REQUIRE(e <= d * (1 + 1e-15));
    }
  }

  TEST_CASE("property: monotone in each extraneous probability") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20000; ++i) {
      LinkPair in{u(rng), u(rng), u(rng), u(rng)};
      const double pap = 0.1 * u(rng), qi = 0.5 * u(rng);
      const double d0 = coincidence_rate(in, pap), e0 = error_rate(in, pap, qi, d0);
      LinkPair up_a = in, up_b = in;
      up_a.p_ec_a = in.p_ec_a + (1 - in.p_ec_a) * u(rng);
      up_b.p_ec_b = in.p_ec_b + (1 - in.p_ec_b) * u(rng);
      for (const auto& up : {up_a, up_b}) {
        const double d1 = coincidence_rate(up, pap), e1 = error_rate(up, pap, qi, d1);
        REQUIRE(d1 >= d0 - 1e-15);
        REQUIRE(e1 >= e0 - 1e-15);
      }
    }
  }

  TEST_CASE("property: noiseless coincidence equals the transmittance product") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const double a = u(rng), b = u(rng);
      CHECK(coincidence_rate({a, b, 0, 0}, 0.0) == a * b);
    }
  }

  TEST_CASE("Monte Carlo click simulator (1e7 windows)") {
    // The acceptance suite runs 1e8 windows; a lighter run keeps unit tests quick.
    const LinkPair in{0.2, 0.1, 1e-4, 5e-5};
    const double pap = 0.02, qi = 0.01;
    const double d = coincidence_rate(in, pap), e = error_rate(in, pap, qi, d);
    const auto t = oracle::simulate_clicks(in.eta_a, in.eta_b, in.p_ec_a, in.p_ec_b, pap, qi, 10'000'000, 42);
    CHECK(std::abs(t.coincidences - d * t.windows) <= 3.0 * std::sqrt(d * t.windows));
    CHECK(std::abs(t.errors - e * t.windows) <= 3.0 * std::sqrt(e * t.windows));
  }

  TEST_CASE("radiance tables") {
    Radiance constant(2e-15);
    CHECK(constant.is_constant());
    CHECK(constant.at(45.0) == 2e-15);
    Radiance table({0.0, 30.0, 90.0}, {3e-15, 2e-15, 1e-15});
    CHECK(table.at(15.0) == doctest::Approx(2.5e-15));
    CHECK(table.at(-5.0) == 3e-15);
    CHECK(table.at(95.0) == 1e-15);
    CHECK_THROWS_AS(Radiance(-1.0), std::invalid_argument);

    const auto bundled = Radiance::load_csv(std::filesystem::path(SATQKD_DEFAULT_DATA_DIR) / "radiance_night_785nm.csv");
    CHECK(bundled.is_constant());
    CHECK(bundled.at(40.0) == doctest::Approx(default_night_radiance()).epsilon(1e-14));
  }

  TEST_CASE("build_counts on a synthetic profile") {
    LossProfile loss;
    LinkProfile link;
    for (int i = 0; i < 4; ++i) {
      const double ea = 0.01 * (i + 1), eb = 0.02;
      loss.eta_a.push_back(ea);
      loss.eta_b.push_back(eb);
      loss.eta.push_back(ea * eb);
      loss.loss_a_db.push_back(-10 * std::log10(ea));
      loss.loss_b_db.push_back(-10 * std::log10(eb));
      loss.visible.push_back(i != 3);
      link.times_s.push_back(i);
      link.range_a_m.push_back(5e5);
      link.range_b_m.push_back(5e5);
      link.elev_a_deg.push_back(60);
      link.elev_b_deg.push_back(60);
      link.visible.push_back(i != 3);
    }
    DetectorModel det;
    SourceModel src;
    const SiteBackground sky{Radiance(default_night_radiance()), Radiance(default_night_radiance())};
    const auto c = build_counts(loss, link, det, src, sky, OpticalSystem{});
    const double pec = extraneous_prob(det.p_dark, 1e-7);
    for (int i = 0; i < 3; ++i) {
      CHECK(c.p_ec_a[i] == doctest::Approx(pec).epsilon(1e-9));
      const double d = coincidence_rate({loss.eta_a[i], loss.eta_b[i], c.p_ec_a[i], c.p_ec_b[i]}, det.p_afterpulse);
      CHECK(c.d[i] == d);
      CHECK(c.coincidences[i] == doctest::Approx(src.pair_rate_hz * d));
      CHECK(c.e[i] <= c.d[i]);
    }
    CHECK(c.d[3] == 0.0);
    CHECK(c.visible_indices().size() == 3);

    det.background_scale = 10.0;
    const auto c10 = build_counts(loss, link, det, src, sky, OpticalSystem{});
    CHECK(c10.p_ec_a[0] == doctest::Approx(extraneous_prob(det.p_dark, 1e-6)).epsilon(1e-9));

    // Zero transmittance leaves only extraneous coincidences.
    LossProfile dark = loss;
    for (auto* v : {&dark.eta_a, &dark.eta_b, &dark.eta}) std::fill(v->begin(), v->end(), 0.0);
    const auto cd = build_counts(dark, link, DetectorModel{}, src, sky, OpticalSystem{});
    CHECK(cd.d[0] == doctest::Approx((1 + 1e-6) * pec * pec).epsilon(1e-9));
  }
}
