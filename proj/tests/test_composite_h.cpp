#include <doctest.h>

#include <vector>

#include "arqpc/composite_h.hpp"

using namespace arqpc;

TEST_CASE("bundled h values") {
  CHECK(HFunction::abs()(std::vector<double>{-3.0}) == 3.0);
  CHECK(HFunction::relu()(std::vector<double>{-0.7}) == 0.0);
  CHECK(HFunction::relu()(std::vector<double>{0.7}) == 0.7);
  CHECK(HFunction::l1(3)(std::vector<double>{1.0, -2.0, 0.5}) == 3.5);
  CHECK(HFunction::l2(2)(std::vector<double>{3.0, -4.0}) == doctest::Approx(5.0));
  CHECK(HFunction::linf(3)(std::vector<double>{1.0, -2.0, 0.5}) == 2.0);
  CHECK(HFunction::zero()(std::vector<double>{}) == 0.0);
}

TEST_CASE("h rejects vectors of the wrong size") {
  CHECK_THROWS_AS(HFunction::l1(3)(std::vector<double>{1.0, 2.0}), InvalidArgument);
  CHECK_THROWS_AS(HFunction::abs()(std::vector<double>{1.0, 2.0}), InvalidArgument);
}

TEST_CASE("metadata and names") {
  for (const char* name : {"zero", "abs", "l1", "l2", "linf", "relu"}) {
    HFunction h = HFunction::from_name(name, 2);
    CHECK(h.name() == name);
    CHECK(h.is_convex());
  }
  CHECK(HFunction::abs().lipschitz() == 1.0);
  CHECK(HFunction::zero().lipschitz() == 0.0);
  CHECK(HFunction::zero().kind() == HKind::zero);
  CHECK_THROWS_AS(HFunction::from_name("square", 1), InvalidArgument);
}

TEST_CASE("sampled subadditivity and Lipschitz checks on bundled kinds") {
  std::vector<HFunction> kinds = {HFunction::abs(), HFunction::relu(), HFunction::l1(3), HFunction::l2(3),
                                  HFunction::linf(2)};
  for (const HFunction& h : kinds) {
    As3Report r = check_as3(h, 10000, 10.0, 42);
    CHECK(r.h_at_zero == 0.0);
    CHECK(r.max_subadditivity_violation <= 1e-12);
    CHECK(r.max_lipschitz_violation <= 1e-12);
  }
}

TEST_CASE("a square is flagged as neither subadditive nor 1-Lipschitz") {
  HFunction sq = HFunction::custom(
      1, [](std::span<const double> v) { return v[0] * v[0]; }, 1.0, true);
  As3Report r = check_as3(sq, 2000, 2.0, 3);
  // Witness x = y = 1: (x+y)^2 - x^2 - y^2 = 2.
  CHECK(r.max_subadditivity_violation > 0.0);
  CHECK(r.max_lipschitz_violation > 0.0);
  CHECK(sq(std::vector<double>{2.0}) == 4.0);
}

TEST_CASE("an odd h is additive on samples") {
  HFunction id = HFunction::custom(
      1, [](std::span<const double> v) { return v[0]; }, 1.0, true);
  for (double x : {-2.5, -0.25, 0.0, 0.75, 3.0})
    for (double y : {-1.0, 0.5, 2.0}) CHECK(id(std::vector<double>{x + y}) == x + y);
  As3Report r = check_as3(id, 1000, 10.0, 5);
  CHECK(r.max_subadditivity_violation <= 1e-12);
}

TEST_CASE("custom h validation") {
  CHECK_THROWS_AS(HFunction::custom(1, nullptr, 1.0, true), InvalidArgument);
  CHECK_THROWS_AS(HFunction::custom(
                      1, [](std::span<const double>) { return 0.0; }, -1.0, true),
                  InvalidArgument);
}
