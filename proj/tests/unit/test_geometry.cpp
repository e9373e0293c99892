#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>
#include <numbers>

#include "linenet/geometry.hpp"
#include "linenet/rng.hpp"

using namespace linenet;

namespace {

constexpr double pi = std::numbers::pi;

// Independent closed form for the sphere area: 2 pi^{d/2} / Gamma(d/2).
double sphere_area_oracle(int d) { return 2.0 * std::pow(pi, d / 2.0) / std::tgamma(d / 2.0); }

Line axis_line(int d, int axis, const Vec& through) {
  Vec u = Vec::Zero(d);
  u[axis] = 1.0;
  return Line(Direction(u), through);
}

}  // namespace

TEST(Geometry, SphereAreaMatchesGammaFunction) {
  for (int d = 2; d <= 7; ++d) EXPECT_NEAR(unit_sphere_area(d), sphere_area_oracle(d), 1e-12) << d;
  EXPECT_NEAR(unit_sphere_area(2), 2 * pi, 1e-14);
  EXPECT_NEAR(unit_sphere_area(3), 4 * pi, 1e-14);
}

TEST(Geometry, BallVolumeMatchesGammaFunction) {
  for (int k = 1; k <= 6; ++k) {
    EXPECT_NEAR(unit_ball_volume(k), std::pow(pi, k / 2.0) / std::tgamma(k / 2.0 + 1.0), 1e-12) << k;
  }
}

TEST(Geometry, HittingMeasureExamples) {
  EXPECT_NEAR(hitting_measure(Ball(origin(2), 1.0), 2), pi, 1e-12);
  EXPECT_NEAR(hitting_measure(Ball(origin(3), 2.0), 3), 8 * pi, 1e-12);
  EXPECT_NEAR(hitting_measure(Ball(point2(5, -3), 1.0), 2), pi, 1e-12);
  EXPECT_THROW(hitting_measure(Ball(Vec::Zero(1), 1.0), 1), Error);
}

TEST(Geometry, HittingMeasureScalesAsPowerOfRadius) {
  for (int d = 2; d <= 5; ++d) {
    for (double a : {0.3, 2.0, 7.5}) {
      const double base = hitting_measure(Ball(origin(d), 1.3), d);
      const double scaled = hitting_measure(Ball(origin(d), 1.3 * a), d);
      EXPECT_LT(std::abs(scaled - std::pow(a, d - 1) * base) / scaled, 1e-12);
    }
  }
}

TEST(Geometry, ConeMeasureExamples) {
  for (int d = 2; d <= 5; ++d) {
    EXPECT_NEAR(cone_measure(pi / 2, d), 1.0, 1e-15);
    EXPECT_EQ(cone_measure(0.0, d), 0.0);
  }
  EXPECT_NEAR(cone_measure(pi / 6, 3), 0.25, 1e-15);
  EXPECT_THROW(cone_measure(-0.1, 3), Error);
  EXPECT_THROW(cone_measure(2.0, 3), Error);
}

TEST(Geometry, ConeMeasureMonotone) {
  for (int d = 2; d <= 5; ++d) {
    double prev = 0.0;
    for (int i = 0; i <= 100; ++i) {
      const double v = cone_measure(pi / 2 * i / 100.0, d);
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(Geometry, ConeMeasureAgreesWithMonteCarlo) {
  // Directions of lines crossing a flat disk normal to the first axis carry
  // density proportional to |u_0|; draw them by rejection from uniform u.
  Stream rng(derive_key({77}));
  const int n = 100000;
  for (int d : {2, 3, 4}) {
    std::vector<double> cosines;
    while (static_cast<int>(cosines.size()) < n) {
      const Vec u = random_unit_vector(rng, d);
      if (rng.uniform() < std::abs(u[0])) cosines.push_back(std::abs(u[0]));
    }
    for (double theta : {pi / 8, pi / 6, pi / 3}) {
      const auto hits = std::count_if(cosines.begin(), cosines.end(), [&](double c) { return c >= std::cos(theta); });
      const double f = static_cast<double>(hits) / n;
      const double se = std::sqrt(f * (1 - f) / n);
      EXPECT_LT(std::abs(f - cone_measure(theta, d)), 4 * se) << d << " " << theta;
    }
  }
}

TEST(Geometry, BallSolidAngleExamples) {
  EXPECT_NEAR(ball_solid_angle(origin(3), Ball(point3(2, 0, 0), 1.0), 3), 0.25, 1e-15);
  EXPECT_NEAR(ball_solid_angle(origin(2), Ball(point2(0, 2), 1.0), 2), 0.5, 1e-15);
  EXPECT_NEAR(ball_solid_angle(origin(3), Ball(point3(1e6, 0, 0), 1.0), 3), 1e-12, 1e-24);
  EXPECT_THROW(ball_solid_angle(origin(3), Ball(point3(0.5, 0, 0), 1.0), 3), Error);
  EXPECT_THROW(ball_solid_angle(origin(2), Ball(point2(1, 0), 1.0), 2), Error);
}

TEST(Geometry, BallSolidAngleIsConeOfTangentAngle) {
  for (double dist : {1.5, 3.0, 40.0}) {
    for (int d = 2; d <= 4; ++d) {
      Vec c = Vec::Zero(d);
      c[d - 1] = dist;
      EXPECT_NEAR(ball_solid_angle(origin(d), Ball(c, 1.0), d), cone_measure(std::asin(1.0 / dist), d), 1e-14);
    }
  }
}

TEST(Geometry, DirectionIsCanonicalAndUnit) {
  Stream rng(derive_key({3}));
  for (int i = 0; i < 2000; ++i) {
    const int d = 2 + i % 4;
    const Vec u = random_unit_vector(rng, d);
    const Direction a(u);
    const Direction b(-u);
    EXPECT_EQ(a.vec(), b.vec());
    EXPECT_NEAR(a.vec().norm(), 1.0, 1e-12);
    EXPECT_EQ(canonical(a.vec()), a.vec());
    int first = 0;
    while (std::abs(a[first]) <= 1e-12) ++first;
    EXPECT_GT(a[first], 0.0);
  }
}

TEST(Geometry, DirectionSignScanSkipsTinyCoordinates) {
  const Direction d(point3(1e-14, -1.0, 0.0));
  EXPECT_GT(d[1], 0.0);
  EXPECT_THROW(Direction(Vec::Zero(3)), Error);
  EXPECT_THROW(Direction::from_canonical(point2(-1, 0)), Error);
  EXPECT_THROW(Direction::from_canonical(point2(2, 0)), Error);
}

TEST(Geometry, LineFootInvariant) {
  Stream rng(derive_key({4}));
  for (int i = 0; i < 1000; ++i) {
    const int d = 2 + i % 3;
    const Direction dir(random_unit_vector(rng, d));
    const Vec through = random_in_ball(rng, d, 5.0);
    const Line l(dir, through);
    EXPECT_LE(std::abs(l.foot().dot(dir.vec())), 1e-9);
    EXPECT_NEAR(l.distance_to(origin(d)), l.foot().norm(), 1e-12);
    EXPECT_NEAR(l.distance_to(through), 0.0, 1e-12);
  }
  EXPECT_THROW(Line::from_parts(Direction(point2(1, 0)), point2(1, 1)), Error);
}

TEST(Geometry, ClosestApproachExamples) {
  const auto xy = closest_approach(axis_line(2, 0, origin(2)), axis_line(2, 1, origin(2)));
  EXPECT_NEAR(xy.distance, 0.0, 1e-15);
  EXPECT_NEAR(xy.on_a.norm(), 0.0, 1e-15);
  EXPECT_NEAR(xy.on_b.norm(), 0.0, 1e-15);

  const auto skew = closest_approach(axis_line(3, 0, origin(3)), axis_line(3, 1, point3(0, 0, 1)));
  EXPECT_NEAR(skew.distance, 1.0, 1e-15);
  EXPECT_NEAR((skew.on_a - point3(0, 0, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((skew.on_b - point3(0, 0, 1)).norm(), 0.0, 1e-15);
  EXPECT_FALSE(skew.parallel);

  const auto par = closest_approach(axis_line(2, 0, origin(2)), axis_line(2, 0, point2(0, 1)));
  EXPECT_TRUE(par.parallel);
  EXPECT_NEAR(par.distance, 1.0, 1e-15);
  EXPECT_NEAR((par.on_a - par.on_b).norm(), 1.0, 1e-15);

  const auto same = closest_approach(axis_line(3, 2, point3(1, 1, 0)), axis_line(3, 2, point3(1, 1, 5)));
  EXPECT_TRUE(same.identical);
  EXPECT_EQ(same.distance, 0.0);
  EXPECT_EQ(same.on_a, same.on_b);
}

TEST(Geometry, ClosestApproachSymmetricAndMinimal) {
  Stream rng(derive_key({5}));
  for (int i = 0; i < 2000; ++i) {
    const int d = 2 + i % 3;
    const Line a(Direction(random_unit_vector(rng, d)), random_in_ball(rng, d, 2.0));
    const Line b(Direction(random_unit_vector(rng, d)), random_in_ball(rng, d, 2.0));
    const auto ab = closest_approach(a, b);
    const auto ba = closest_approach(b, a);
    EXPECT_NEAR(ab.distance, ba.distance, 1e-12);
    EXPECT_NEAR((ab.on_a - ba.on_b).norm(), 0.0, 1e-9);
    EXPECT_NEAR((ab.on_b - ba.on_a).norm(), 0.0, 1e-9);
    EXPECT_NEAR(a.distance_to(ab.on_a), 0.0, 1e-9);
    EXPECT_NEAR(b.distance_to(ab.on_b), 0.0, 1e-9);
    // No sampled pair of points is closer.
    for (int k = 0; k < 5; ++k) {
      const Vec p = a.at(rng.uniform() * 6 - 3);
      EXPECT_GE(b.distance_to(p) + 1e-12, ab.distance);
    }
  }
}

TEST(Geometry, LineHitsBallExamples) {
  const Line x = axis_line(2, 0, origin(2));
  EXPECT_TRUE(line_hits_ball(x, Ball(origin(2), 1.0)));
  EXPECT_FALSE(line_hits_ball(x, Ball(point2(0, 2), 1.0)));
  EXPECT_TRUE(line_hits_ball(x, Ball(point2(0, 1), 1.0)));
  EXPECT_TRUE(line_hits_ball(x, Ball(point2(3, -1), 1.0)));
}

TEST(Geometry, ChordOfLineThroughBall) {
  const auto [t0, t1] = chord(axis_line(2, 0, origin(2)), Ball(point2(1, 0.6), 1.0));
  EXPECT_NEAR(t0, 0.2, 1e-12);
  EXPECT_NEAR(t1, 1.8, 1e-12);
  const auto miss = chord(axis_line(2, 0, origin(2)), Ball(point2(0, 3), 1.0));
  EXPECT_GT(miss.first, miss.second);
}
