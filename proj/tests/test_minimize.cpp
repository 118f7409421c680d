#include <gtest/gtest.h>

#include <cmath>

#include "progeny/fluid.hpp"

using namespace progeny::fluid;
using progeny::DomainError;
using progeny::models::Model2;

namespace ref {
constexpr double y2star_min = 888.4340632983524026;
constexpr double lambda_min = 813.2484436411026688;
constexpr double t_min = 7.697316475728397995;
constexpr double t_at_600 = 7.852776437652753909;
constexpr double t_at_888 = 7.697316475762308035;
constexpr double t_at_1200 = 7.753181241064688619;
}  // namespace ref

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST(LambdaOfY2star, KnownPoint) {
  EXPECT_NEAR(lambda_of_y2star(100.0, 1.0, 1.0, 888.44), 813.3, 0.05);
  EXPECT_THROW((void)lambda_of_y2star(100.0, 1.0, 2.0, 2.0), DomainError);
  EXPECT_GT(lambda_of_y2star(100.0, 1.0, 2.0, 2.0 + 1e-9), 1e6);
}

TEST(LambdaOfY2star, RoundTrip) {
  for (double eps : {1.0, 2.0, 5.0}) {
    for (double lambda : {200.0, 1000.0, 5000.0}) {
      const auto c = t_eps(Model2{lambda, 100.0, 1.0}, eps);
      EXPECT_LT(rel(lambda_of_y2star(100.0, 1.0, eps, c.y2), lambda), 1e-8) << eps << " " << lambda;
    }
  }
}

TEST(TEpsOfY2star, AgreesWithLambdaParametrisation) {
  for (double eps : {1.0, 2.0}) {
    const auto c = t_eps(Model2{1000.0, 100.0, 1.0}, eps);
    EXPECT_LT(rel(t_eps_of_y2star(100.0, 1.0, eps, c.y2), c.t), 1e-8) << eps;
  }
  for (double y : {600.0, 888.44, 1200.0}) {
    const double lambda = lambda_of_y2star(100.0, 1.0, 1.0, y);
    EXPECT_LT(rel(t_eps_of_y2star(100.0, 1.0, 1.0, y), t_eps(Model2{lambda, 100.0, 1.0}, 1.0).t), 1e-8) << y;
  }
}

TEST(TEpsOfY2star, ReferenceValuesAndVShape) {
  const double a = t_eps_of_y2star(100.0, 1.0, 1.0, 600.0);
  const double b = t_eps_of_y2star(100.0, 1.0, 1.0, 888.44);
  const double c = t_eps_of_y2star(100.0, 1.0, 1.0, 1200.0);
  EXPECT_LT(rel(a, ref::t_at_600), 1e-9);
  EXPECT_LT(rel(b, ref::t_at_888), 1e-9);
  EXPECT_LT(rel(c, ref::t_at_1200), 1e-9);
  EXPECT_LT(b, a);
  EXPECT_LT(b, c);
}

TEST(Minimize, ReferenceMinimum) {
  const auto r = minimize_t_eps(100.0, 1.0, 1.0);
  ASSERT_TRUE(r.interior);
  EXPECT_NEAR(r.y2star, 888.44, 0.5);
  EXPECT_NEAR(r.lambda, 813.3, 1.0);
  EXPECT_NEAR(r.y2star, ref::y2star_min, 1e-3);
  EXPECT_NEAR(r.lambda, ref::lambda_min, 1e-3);
  EXPECT_LT(rel(r.t_eps, ref::t_min), 1e-10);
  EXPECT_LT(r.t_eps, t_eps(Model2{400.0, 100.0, 1.0}, 1.0).t);
  EXPECT_LT(r.t_eps, t_eps(Model2{2000.0, 100.0, 1.0}, 1.0).t);
}

TEST(Minimize, EpsTwoBothRoutesAgree) {
  const auto r = minimize_t_eps(100.0, 1.0, 2.0);
  ASSERT_TRUE(r.interior);
  EXPECT_LT(rel(t_eps(Model2{r.lambda, 100.0, 1.0}, 2.0).t, r.t_eps), 1e-8);
}

TEST(Minimize, RejectsEpsBelowOne) {
  EXPECT_THROW((void)minimize_t_eps(100.0, 1.0, 0.5), DomainError);
}

TEST(CrossingProgeny, IncreasesWithLambda) {
  for (double eps : {1.0, 2.0, 5.0}) {
    for (double lambda = 400.0; lambda <= 4800.0; lambda += 200.0) {
      const double up = t_eps(Model2{lambda + 200.0, 100.0, 1.0}, eps).y2;
      const double down = t_eps(Model2{lambda - 200.0, 100.0, 1.0}, eps).y2;
      EXPECT_GT(up - down, 0.0) << eps << " " << lambda;
    }
  }
}
