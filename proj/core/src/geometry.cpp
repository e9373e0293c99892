#include "linenet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace linenet {

double unit_ball_volume(int k) {
  if (k < 0) throw Error("unit_ball_volume: negative dimension");
  return std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

double unit_sphere_area(int d) {
  if (d < 1) throw Error("unit_sphere_area: dimension must be >= 1");
  return d * unit_ball_volume(d);
}

Vec canonical(const Vec& u) {
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(u[i]) > kCanonicalZero) {
      return u[i] > 0.0 ? Vec(u) : Vec(-u);
    }
  }
  return u;
}

Direction::Direction(const Vec& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw Error("Direction: zero or non-finite vector");
  u_ = canonical(v / n);
}

Direction Direction::from_canonical(const Vec& u) {
  if (std::abs(u.norm() - 1.0) > 1e-12) throw Error("Direction: not a unit vector");
  if (canonical(u) != u) throw Error("Direction: not in canonical antipodal form");
  Direction out;
  out.u_ = u;
  return out;
}

double angle_between(const Direction& a, const Direction& b) {
  const double c = std::min(1.0, std::abs(a.vec().dot(b.vec())));
  return std::acos(c);
}

Line::Line(const Direction& dir, const Vec& through) : dir_(dir) {
  if (through.size() != dir.vec().size()) throw Error("Line: dimension mismatch");
  foot_ = through - through.dot(dir_.vec()) * dir_.vec();
}

Line Line::from_parts(const Direction& dir, const Vec& foot) {
  if (foot.size() != dir.vec().size()) throw Error("Line: dimension mismatch");
  if (std::abs(foot.dot(dir.vec())) > kGeomSlack) throw Error("Line: foot not normal to direction");
  Line out;
  out.dir_ = dir;
  out.foot_ = foot;
  return out;
}

Ball::Ball(Vec c, double r) : center(std::move(c)), radius(r) {
  if (!(r > 0.0)) throw Error("Ball: radius must be positive");
}

Vec origin(int d) { return Vec::Zero(d); }

Vec point2(double x, double y) {
  Vec p(2);
  p << x, y;
  return p;
}

Vec point3(double x, double y, double z) {
  Vec p(3);
  p << x, y, z;
  return p;
}

double hitting_measure(const Ball& ball, int d) {
  if (d < 2) throw Error("hitting_measure: d must be >= 2");
  return 0.5 * unit_sphere_area(d) * std::pow(ball.radius, d - 1);
}

double cone_measure(double theta0, int d) {
  if (d < 2) throw Error("cone_measure: d must be >= 2");
  if (!(theta0 >= 0.0) || theta0 > std::numbers::pi / 2) {
    throw Error("cone_measure: theta0 must lie in [0, pi/2]");
  }
  return std::pow(std::sin(theta0), d - 1);
}

double ball_solid_angle(const Vec& x, const Ball& ball, int d) {
  if (d < 2) throw Error("ball_solid_angle: d must be >= 2");
  const double dist = (ball.center - x).norm();
  if (dist <= ball.radius) {
    throw Error("ball_solid_angle: point lies inside or on the ball");
  }
  return std::pow(ball.radius / dist, d - 1);
}

ClosestApproach closest_approach(const Line& a, const Line& b) {
  const Vec& ua = a.dir().vec();
  const Vec& ub = b.dir().vec();
  const Vec w0 = a.foot() - b.foot();
  const double c = ua.dot(ub);

  ClosestApproach out;
  if (std::abs(1.0 - std::abs(c)) < kParallelTol) {
    out.parallel = true;
    out.on_a = a.foot();
    out.on_b = b.project(a.foot());
    out.distance = (out.on_a - out.on_b).norm();
    if (out.distance <= kGeomSlack) {
      out.identical = true;
      out.on_b = out.on_a;
      out.distance = 0.0;
    }
    return out;
  }
  const double da = ua.dot(w0);
  const double eb = ub.dot(w0);
  const double denom = 1.0 - c * c;
  const double s = (c * eb - da) / denom;
  const double t = (eb - c * da) / denom;
  out.on_a = a.at(s);
  out.on_b = b.at(t);
  out.distance = (out.on_a - out.on_b).norm();
  if (out.distance <= kGeomSlack) {
    out.on_b = out.on_a;
    out.distance = 0.0;
  }
  return out;
}

bool line_hits_ball(const Line& l, const Ball& ball) {
  return l.distance_to(ball.center) <= ball.radius;
}

std::pair<double, double> chord(const Line& l, const Ball& ball) {
  const double t = l.param_of(ball.center);
  const double h = l.distance_to(ball.center);
  if (h > ball.radius) return {1.0, 0.0};
  const double half = std::sqrt(std::max(0.0, ball.radius * ball.radius - h * h));
  return {t - half, t + half};
}

}  // namespace linenet
