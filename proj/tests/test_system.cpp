#include <doctest.h>

#include <cmath>

#include "swiptnoma/system.hpp"
#include "test_util.hpp"

using namespace swiptnoma;

namespace {

MisoInstance make_inst(CVec h1, CVec h2, double g) { return MisoInstance{h1, h2, g}; }

CVec cvec2(std::complex<double> a, std::complex<double> b) {
  CVec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("stage-1 SINR at user 1") {
  // matched filter, no interference: |h1|^2 = 4
  CVec h1 = cvec2(2.0, 0.0);
  auto inst = make_inst(h1, cvec2(1.0, 1.0), 0.5);
  CHECK(sinr_stage1_user1(inst, h1 / h1.norm(), CVec::Zero(2)) == doctest::Approx(4.0));
  CHECK(sinr_stage1_user1(inst, CVec::Zero(2), cvec2(0.3, 0.1)) == 0.0);

  // orthogonal beam carries no signal
  auto inst2 = make_inst(cvec2(1.0, 0.0), cvec2(1.0, 1.0), 0.5);
  CHECK(sinr_stage1_user1(inst2, cvec2(0.0, 1.0), cvec2(0.7, 0.0)) == 0.0);

  CVec w3(3);
  w3.setZero();
  CHECK_THROWS_AS(sinr_stage1_user1(inst, w3, w3), std::invalid_argument);
}

TEST_CASE("equivalent SINR combines both stages") {
  auto inst = make_inst(cvec2(1.0, 0.5), cvec2(1.0, -0.5), 2.0);
  CVec w1 = cvec2(0.6, 0.1), w2 = cvec2(0.2, -0.3);
  CHECK(equivalent_sinr_user1(inst, w1, w2, 0.0) ==
        doctest::Approx(sinr_stage1_user1(inst, w1, w2)));

  auto dead_relay = make_inst(inst.h1_vec, inst.h2_vec, 0.0);
  CHECK(equivalent_sinr_user1(dead_relay, w1, w2, 0.7) ==
        doctest::Approx(sinr_stage1_user1(dead_relay, w1, w2)));

  // zero direct link, relay only: 0 + 0.5 * 2 * (1 + 0) = 1
  auto relay_only = make_inst(cvec2(0.0, 0.0), cvec2(1.0, 0.0), 2.0);
  CHECK(equivalent_sinr_user1(relay_only, cvec2(1.0, 0.0), CVec::Zero(2), 0.5) ==
        doctest::Approx(1.0));

  CHECK_THROWS_AS(equivalent_sinr_user1(inst, w1, w2, 1.5), std::invalid_argument);
}

TEST_CASE("equivalent SINR additivity, monotonicity, phase invariance") {
  Rng rng(77);
  for (int k = 0; k < 50; ++k) {
    CVec h1(2), h2(2), w1(2), w2(2);
    for (int i = 0; i < 2; ++i) {
      h1(i) = rng.cnormal();
      h2(i) = rng.cnormal();
      w1(i) = 0.5 * rng.cnormal();
      w2(i) = 0.5 * rng.cnormal();
    }
    auto inst = make_inst(h1, h2, std::abs(rng.normal()));
    const double base = equivalent_sinr_user1(inst, w1, w2, 0.0);
    double prev = base;
    for (double beta : {0.25, 0.5, 0.75, 1.0}) {
      const double val = equivalent_sinr_user1(inst, w1, w2, beta);
      const double relay = inst.g * (std::norm(h2.dot(w1)) + std::norm(h2.dot(w2)));
      CHECK(val - base == doctest::Approx(beta * relay).epsilon(1e-12));
      CHECK(val >= prev - 1e-12);
      prev = val;
    }
    const std::complex<double> phase = std::polar(1.0, rng.uniform(0.0, 6.28));
    CHECK(equivalent_sinr_user1(inst, phase * w1, phase * w2, 0.5) ==
          doctest::Approx(equivalent_sinr_user1(inst, w1, w2, 0.5)).epsilon(1e-12));
  }
}

TEST_CASE("harvested transmit power") {
  auto inst = make_inst(cvec2(1.0, 0.0), cvec2(1.0, 1.0), 1.0);
  CHECK(harvested_transmit_power(inst, cvec2(0.3, 0.2), cvec2(0.1, 0.1), 0.0) == 0.0);

  // beta = 1, w2 = 0, |h2^H w1|^2 = 3
  CVec w1 = std::sqrt(1.5) * cvec2(1.0, 1.0) / std::sqrt(2.0);
  CHECK(harvested_transmit_power(inst, w1, CVec::Zero(2), 1.0) == doctest::Approx(3.0));

  // 0.4 * (1 + 2) = 1.2
  auto inst2 = make_inst(cvec2(1.0, 0.0), cvec2(1.0, 0.0), 1.0);
  CHECK(harvested_transmit_power(inst2, cvec2(1.0, 0.0), cvec2(std::sqrt(2.0), 0.0),
                                 0.4) == doctest::Approx(1.2));
}

TEST_CASE("two-stage rate accounting") {
  SystemParams p;
  p.bandwidth_hz = 1.0;
  auto r = rates_from_sinr(1.0, 0.0, p);
  CHECK(r.r1_bps == doctest::Approx(0.5));
  CHECK(r.r2_bps == 0.0);
  CHECK(r.rsum_bps == doctest::Approx(0.5));

  r = rates_from_sinr(3.0, 3.0, p);
  CHECK(r.rsum_bps == doctest::Approx(2.0));

  p.bandwidth_hz = 1e6;
  r = rates_from_sinr(1.0, 15.0, p);
  CHECK(r.rsum_bps == doctest::Approx(2.5e6));

  CHECK_THROWS_AS(rates_from_sinr(-1.0, 0.0, p), std::invalid_argument);
}

TEST_CASE("joint-design feasibility report") {
  auto inst = make_inst(cvec2(1.0, 0.0), cvec2(2.0, 0.0), 1.0);
  auto rep = check_p1_feasibility(inst, CVec::Zero(2), CVec::Zero(2), 0.5, 1.0);
  CHECK_FALSE(rep.feasible);
  CHECK(rep.slack_sic < 0.0);  // decode constraint is the violated one

  CHECK_THROWS_AS(check_p1_feasibility(inst, CVec::Zero(2), CVec::Zero(2), 1.5, 1.0),
                  std::invalid_argument);
}

TEST_CASE("instance and parameter validation") {
  CHECK_THROWS_AS(SisoInstance::checked(0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SisoInstance::checked(1.0, 1.0, -1.0), std::invalid_argument);
  CHECK_NOTHROW(SisoInstance::checked(1.0, 2.0, 3.0));
  CHECK_THROWS_AS(MisoInstance::checked(CVec::Zero(2), cvec2(1.0, 0.0), 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(MisoInstance::checked(cvec2(1.0, 0.0), cvec2(1.0, 0.0), -2.0),
                  std::invalid_argument);

  SystemParams p;
  p.sinr_target_gamma1 = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
