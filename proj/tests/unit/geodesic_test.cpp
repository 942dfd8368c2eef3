#include "finslerkit/geodesic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "finslerkit/builtins.hpp"
#include "finslerkit/errors.hpp"
#include "finslerkit/projective.hpp"
#include "oracles.hpp"

namespace finslerkit {
namespace {

using testing::Vec;

/// Conformally flat (1 + |x|^2)|y|: not projective, so geodesics curve.
SphericalMetric curved_control() { return SphericalMetric::from_expression("conformal", "u*(1+r^2)"); }

TEST(Spray, Examples) {
  const Vector e = spray_general(builtin("euclidean"), Vec{0.3, 0.4}, Vec{1, 2});
  EXPECT_LE(e.cwiseAbs().maxCoeff(), 1e-15);
  const Vector f = spray_general(builtin("funk"), Vec{0.5, 0}, Vec{1, 0});
  EXPECT_NEAR(f(0), 1.0, 1e-12);
  EXPECT_NEAR(f(1), 0.0, 1e-12);
  const Metric klein = builtin("klein");
  const Vec x = {0.5, 0}, y = {0, 1};
  const Vector k = spray_general(klein, x, y);
  const double P = projective_factor_xy(klein, x, y);
  EXPECT_NEAR(k(0), P * y[0], 1e-8);
  EXPECT_NEAR(k(1), P * y[1], 1e-8);
}

TEST(Spray, TwoHomogeneousInY) {
  const Metric m = builtin("bryant", {{"alpha", 0.7}});
  const Vec x = {0.3, -0.6, 0.2}, y = {0.5, 0.9, -0.4};
  Vec y2 = y;
  for (double& t : y2) t *= 2;
  const Vector G = spray_general(m, x, y);
  const Vector G2 = spray_general(m, x, y2);
  EXPECT_LE((G2 - 4 * G).norm(), 1e-9 * (4 * G).norm());
}

TEST(Spray, ProjectivityResidual) {
  for (const auto& entry : testing::curvature_zoo()) {
    const Metric m = builtin(entry.name, entry.params());
    for (const auto& s : testing::samples_for(*m.spherical(), 3, 50, 61)) {
      // The spray needs a positive definite g (see BryantLosesConvexity).
      if (!convexity_report(*m.spherical(), s.x, s.y).direct_pd) continue;
      EXPECT_LE(spray_projectivity_residual(m, s.x, s.y), 1e-8) << entry.label();
    }
  }
  EXPECT_GT(spray_projectivity_residual(curved_control(), Vec{0.5, 0.2}, Vec{0.3, 1.0}), 1e-3);
  EXPECT_EQ(spray_projectivity_residual(builtin("euclidean"), Vec{0.5, 0.2}, Vec{0.3, 1.0}), 0.0);
}

TEST(Spray, BryantLosesConvexityAtLargeAngleAndRadius) {
  // The closed form with alpha = 1.2 has an indefinite g at this point; an
  // independent finite-difference Hessian of the textbook formula agrees.
  const SphericalMetric bryant = builtin("bryant", {{"alpha", 1.2}});
  const double r = 1.9312449859538801, u = 1.0268508053548142, v = 0.15055036038465952;
  const Vec x = {r, 0}, y = {v / r, std::sqrt(u * u - (v / r) * (v / r))};
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(fundamental_tensor(bryant, x, y));
  const Eigen::SelfAdjointEigenSolver<Matrix> fd(testing::finite_difference_g(
      [&](const Vec& yy) { return testing::reference_F("bryant", 1.2, x, yy); }, y));
  EXPECT_NEAR(eig.eigenvalues()(0), -0.0503213, 1e-6);
  EXPECT_NEAR(fd.eigenvalues()(0), eig.eigenvalues()(0), 1e-7);
  EXPECT_FALSE(convexity_report(bryant, x, y).direct_pd);
  EXPECT_THROW(spray_general(bryant, x, y), ConvexityError);
  // Curvature does not need convexity and is still 1 there.
  EXPECT_NEAR(flag_curvature(bryant, r, u, v), 1.0, 1e-9);
  // Near the origin the same metric is strongly convex.
  EXPECT_TRUE(convexity_report(bryant, Vec{0.3, 0}, Vec{0.2, 1}).direct_pd);
}

TEST(Spray, IndefiniteTensorIsAConvexityError) {
  const Metric bad = SphericalMetric::from_expression("bad", "u - 2*v*(v/u)");
  EXPECT_THROW(spray_general(bad, Vec{0.9, 0}, Vec{0.1, std::sqrt(0.99)}), ConvexityError);
}

TEST(Integrate, EuclideanIsUniformStraightMotion) {
  const Vec x0 = {0.2, -0.1, 0.3}, y0 = {0.5, 1.0, -0.7};
  const GeodesicPath path = integrate_geodesic(builtin("euclidean"), x0, y0, 1.0, 100);
  ASSERT_EQ(path.points.size(), 101u);
  EXPECT_FALSE(path.exit_time);
  for (std::size_t s = 0; s < path.points.size(); ++s) {
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(path.points[s][i], x0[i] + path.times[s] * y0[i], 1e-14);
      EXPECT_NEAR(path.velocities[s][i], y0[i], 1e-14);
    }
    if (s > 0) {
      EXPECT_GT(path.times[s], path.times[s - 1]);
    }
  }
  // Zero up to rounding in the projection onto the line.
  EXPECT_LE(straightness_deviation(path, x0, y0), 1e-15);
}

TEST(Integrate, FunkGeodesicIsStraightAndConverged) {
  const Metric funk = builtin("funk");
  const Vec x0 = {0.1, 0.2}, y0 = {0.6, -0.3};
  const GeodesicPath path = integrate_geodesic(funk, x0, y0, 0.5, 2000);
  ASSERT_FALSE(path.exit_time);
  EXPECT_LE(straightness_deviation(path, x0, y0), 1e-6);
  // Step-halving oracle: the endpoint barely moves, so the path is resolved.
  const GeodesicPath half = integrate_geodesic(funk, x0, y0, 0.5, 1000);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(path.points.back()[i], half.points.back()[i], 1e-10);
  }
}

TEST(Integrate, BryantGeodesicsInThreeDimensionsAreStraight) {
  const SphericalMetric bryant = builtin("bryant", {{"alpha", std::numbers::pi / 6}});
  for (const auto& s : testing::samples_for(bryant, 3, 5, 62)) {
    const GeodesicPath path = integrate_geodesic(bryant, s.x, s.y, 0.5, 2000);
    EXPECT_LE(straightness_deviation(path, s.x, s.y), 1e-6);
  }
}

TEST(Integrate, DomainExitIsReported) {
  const Metric small =
      SphericalMetric::from_expression("small-ball", "u", /*domain_radius=*/0.5);
  // Steps of 0.01 from 0.405: the tenth step lands at 0.505, outside.
  const GeodesicPath path = integrate_geodesic(small, Vec{0.405, 0}, Vec{1, 0}, 1.0, 100);
  ASSERT_TRUE(path.exit_time);
  EXPECT_NEAR(*path.exit_time, 0.1, 1e-12);
  EXPECT_EQ(path.points.size(), 10u);
  EXPECT_LT(path.points.back()[0], 0.5);
}

TEST(Integrate, BadArguments) {
  const Metric e = builtin("euclidean");
  EXPECT_THROW(integrate_geodesic(e, Vec{0.1, 0}, Vec{1, 0}, 0.0, 10), std::invalid_argument);
  EXPECT_THROW(integrate_geodesic(e, Vec{0.1, 0}, Vec{1, 0}, 1.0, 0), std::invalid_argument);
  EXPECT_THROW(integrate_geodesic(e, Vec{0.1, 0}, Vec{0, 0}, 1.0, 10), std::invalid_argument);
}

TEST(Integrate, FourthOrderConvergenceOnCurvedControl) {
  const Metric m = curved_control();
  const Vec x0 = {0.5, 0.1}, y0 = {0.2, 1.0};
  const double horizon = 2.0;
  const GeodesicPath reference = integrate_geodesic(m, x0, y0, horizon, 6400);
  EXPECT_GT(straightness_deviation(reference, x0, y0), 1e-3);
  auto endpoint_error = [&](int steps) {
    const GeodesicPath p = integrate_geodesic(m, x0, y0, horizon, steps);
    double e = 0.0;
    for (int i = 0; i < 2; ++i) e = std::max(e, std::abs(p.points.back()[i] - reference.points.back()[i]));
    return e;
  };
  for (int steps : {10, 20, 40}) {
    const double coarse = endpoint_error(steps);
    const double fine = endpoint_error(2 * steps);
    ASSERT_GT(coarse, 1e-10);
    EXPECT_GE(coarse / fine, 8.0) << steps << " steps";
  }
}

TEST(Straightness, CircleArcOracle) {
  // Quarter unit circle from angle 0 to 90 degrees, tangent line at (1, 0).
  GeodesicPath path;
  const int n = 20000;
  for (int k = 0; k <= n; ++k) {
    const double a = 0.5 * std::numbers::pi * k / n;
    path.times.push_back(a);
    path.points.push_back({std::cos(a), std::sin(a)});
    path.velocities.push_back({-std::sin(a), std::cos(a)});
  }
  // Line: through x0 along the chord (-1, 1).
  const double expected = (1 - std::sqrt(2.0) / 2) / (std::numbers::pi / 2);
  EXPECT_NEAR(straightness_deviation(path, Vec{1, 0}, Vec{-1, 1}), expected, 1e-8);
}

TEST(Straightness, ExactLineIsZero) {
  GeodesicPath path;
  for (int k = 0; k <= 10; ++k) {
    path.times.push_back(k);
    path.points.push_back({1.0 + 0.5 * k, -2.0 + 0.25 * k});
  }
  EXPECT_LE(straightness_deviation(path, Vec{1, -2}, Vec{2, 1}), 1e-15);
}

TEST(Horizon, ShrinksForBallMetrics) {
  EXPECT_EQ(shrink_horizon(builtin("spherical"), Vec{0.5, 0}, Vec{1, 0}, 3.0), 3.0);
  EXPECT_NEAR(shrink_horizon(builtin("funk"), Vec{0.5, 0}, Vec{1, 0}, 3.0), 0.45, 1e-15);
  EXPECT_EQ(shrink_horizon(builtin("funk"), Vec{0.5, 0}, Vec{1, 0}, 0.1), 0.1);
}

TEST(GeodesicCsv, HeaderAndPrecision) {
  GeodesicPath path;
  path.times = {0.0, 0.1};
  path.points = {{0.1, 0.2}, {1.0 / 3.0, 0.25}};
  path.velocities = {{1, 0}, {1, 0}};
  std::ostringstream out;
  write_geodesic_csv(out, path);
  std::istringstream in(out.str());
  std::string header, row0, row1;
  std::getline(in, header);
  std::getline(in, row0);
  std::getline(in, row1);
  EXPECT_EQ(header, "t,x1,x2,y1,y2");
  EXPECT_EQ(row0, "0,0.10000000000000001,0.20000000000000001,1,0");
  EXPECT_EQ(row1, "0.10000000000000001,0.33333333333333331,0.25,1,0");
}

}  // namespace
}  // namespace finslerkit
