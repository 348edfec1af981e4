#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "regge/verify.hpp"
#include "support.hpp"

using namespace regge;
using namespace regge::testing;

namespace {

double value(const CheckResult& c, const std::string& key) {
  for (const auto& [k, v] : c.values)
    if (k == key) return v;
  FAIL("missing value " << key);
  return 0.0;
}

Jet2 test_function(const Jet2& x, const Jet2& y) { return 1.0 + 0.5 * x - y * y + x * y; }

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("central differences and Richardson extrapolation") {
  const FdSchedule s;
  const FdResult good = fd_compare([](double e) { return std::exp(0.7 + 3.0 * e); }, 3.0 * std::exp(0.7), s);
  CHECK(good.pass);
  CHECK(good.order_gated);
  for (double o : good.orders) CHECK(o == doctest::Approx(2.0).epsilon(0.02));
  CHECK(good.richardson_error < 1e-8);
  const FdResult wrong = fd_compare([](double e) { return std::exp(0.7 + 3.0 * e); }, 3.0 * std::exp(0.7) * (1 + 1e-4), s);
  CHECK_FALSE(wrong.pass);
  // quadratic in e: central differences are exact and orders are not gated
  const FdResult quad = fd_compare([](double e) { return 2.0 + 5.0 * e + e * e; }, 5.0, s);
  CHECK(quad.pass);
  CHECK_FALSE(quad.order_gated);
  FdSchedule bad;
  bad.steps = {1e-2, 5e-3};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.steps = {1e-2, 2e-2, 1e-3};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("report JSON lists every check") {
  VerifyReport rep;
  CheckResult a;
  a.name = "a";
  a.pass = true;
  a.add("x", 1.5);
  CheckResult b;
  b.name = "b";
  b.add("y", std::nan(""));
  b.detail = "broken";
  rep.append(a);
  rep.append(b);
  CHECK_FALSE(rep.pass());
  CHECK(rep.failures() == 1);
  const auto j = nlohmann::json::parse(rep.to_json());
  CHECK(j["pass"] == false);
  CHECK(j["failures"] == 1);
  REQUIRE(j["checks"].size() == 2);
  CHECK(j["checks"][0]["name"] == "a");
  CHECK(j["checks"][0]["values"]["x"] == 1.5);
  CHECK(j["checks"][1]["values"]["y"].is_null());
  CHECK(j["checks"][1]["detail"] == "broken");
}

TEST_CASE("direction scaling keeps the path positive definite") {
  auto m = square(2);
  auto rs = regge_space(m, 1);
  const ReggeField g = random_metric(rs, 4);
  const ReggeField s(rs, 50.0 * random_vector(rs->ndofs(), 5));
  const double c = spd_direction_scale(*m, g, s, 1e-2);
  const ReggeField cs(rs, c * s.coeffs());
  for (double e : {1e-2, -1e-2}) {
    const LinearTensor p(Mat2d{}, {{1.0, &g}, {e, &cs}});
    CHECK(is_metric(p, *m).ok);
  }
  CHECK_THROWS_AS(spd_direction_scale(*m, ConstantTensor({{{-1.0, 0.0}, {0.0, 1.0}}}), s, 1e-2), std::invalid_argument);
}

TEST_CASE("evolution formulas along the path catalog") {
  for (const TensorPath& p : path_catalog()) {
    CAPTURE(p.name);
    CHECK(check_kappavoldot(p, test_function).pass);
    CHECK(check_klengthdot(p, test_function).pass);
  }
  // the non-harmonic conformal path is not trivially flat
  const auto cat = path_catalog();
  for (const TensorPath& p : cat)
    if (p.name == "conformal_nonharmonic") CHECK(std::abs(value(check_kappavoldot(p, test_function), "exact")) > 1e-2);
  for (int r = 0; r <= 2; ++r) CHECK(check_klengthdot_jump(r, 5 + r).pass);
  for (const AnglePath& a : angle_catalog()) {
    CAPTURE(a.name);
    const CheckResult c = check_angledot(a);
    CHECK(c.pass);
    if (a.expected_sign != 0) CHECK(value(c, "sign_matches") == 1.0);
  }
}

TEST_CASE("a wrong rate formula is detected") {
  // a rate computed from the negated direction must not match
  for (const AnglePath& a : angle_catalog()) {
    if (a.expected_sign == 0) continue;
    AnglePath flipped = a;
    flipped.gdot = [g = a.gdot](double t) {
      Mat2d m = g(t);
      for (auto& row : m)
        for (double& x : row) x = -x;
      return m;
    };
    CHECK_FALSE(check_angledot(flipped).pass);
  }
}

TEST_CASE("linearization and its mutation guard") {
  const auto cases = linearization_cases(7, 5);
  REQUIRE(cases.size() == 5);
  for (const auto& c : cases) {
    CAPTURE(c.name);
    CHECK(check_linearization(c).pass);
  }
  CHECK_FALSE(check_linearization(cases[1], {}, true).pass);
}

TEST_CASE("identity checks on small meshes") {
  CHECK(check_guise(2, 1, 3).pass);
  CHECK(check_commuting_divergence(2, 1, 3).pass);
  CHECK(check_commuting_divdiv(2, 1, 3).pass);
  CHECK(check_commuting_deformation(2, 1).pass);
  CHECK(check_euclidean_kernel(2, 1, 4).pass);
  CHECK(check_kappa_u(2, 1, 4).pass);
  CHECK(check_cone_decomposition().pass);
  CHECK(check_flat_reports(3).pass);
  CHECK(check_discrete_curvature(4, 1).pass);
  CHECK(check_connection_compatibility(3, 1, 11).pass);
}

TEST_CASE("complex ranks with vanishing boundary traces") {
  for (int r = 0; r <= 1; ++r) {
    const CheckResult c = check_complex_exactness(2, r, 9);
    CHECK(value(c, "d1d0_rel") < 1e-12);
    CHECK(value(c, "nullity_d0") == 0.0);
    CHECK(value(c, "nullity_d1") == value(c, "rank_d0"));
    CHECK(value(c, "coexact_residual") < 1e-10);
    // d1 of a one-form with vanishing tangential trace has zero integral, so one X direction is missed
    CHECK(value(c, "rank_d1") == value(c, "dim_x") - 1);
    CHECK_FALSE(c.pass);
  }
}

}  // TEST_SUITE
