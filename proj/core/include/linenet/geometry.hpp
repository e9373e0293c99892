#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace linenet {

using Vec = Eigen::VectorXd;

// Every precondition violation in the library surfaces as this type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kGeomSlack = 1e-9;
inline constexpr double kParallelTol = 1e-10;
inline constexpr double kCanonicalZero = 1e-12;

// Hyperarea of the unit sphere S^{d-1} (omega_{d-1}); 2*pi for d = 2, 4*pi for d = 3.
double unit_sphere_area(int d);
// Volume of the unit ball in R^k (nu_k).
double unit_ball_volume(int k);

// Unit vector with the antipodal sign fixed: first coordinate with
// |u_i| > 1e-12 is positive. Lines are un-sensed, so u and -u name the same
// direction.
class Direction {
 public:
  Direction() = default;
  // Normalizes and canonicalizes; throws on a zero vector.
  explicit Direction(const Vec& v);
  // Adopts u bit-for-bit; throws unless it is unit length (1e-12) and canonical.
  static Direction from_canonical(const Vec& u);

  const Vec& vec() const { return u_; }
  int dim() const { return static_cast<int>(u_.size()); }
  double operator[](int i) const { return u_[i]; }

 private:
  Vec u_;
};

Vec canonical(const Vec& u);

// Angle in [0, pi/2] between two un-sensed directions.
double angle_between(const Direction& a, const Direction& b);

class Line {
 public:
  Line() = default;
  // Any point on the line; stored as the foot in the hyperplane through the
  // origin normal to dir.
  Line(const Direction& dir, const Vec& through);
  // Adopts foot bit-for-bit; throws unless |foot . dir| <= 1e-9.
  static Line from_parts(const Direction& dir, const Vec& foot);

  const Direction& dir() const { return dir_; }
  const Vec& foot() const { return foot_; }
  int dim() const { return dir_.dim(); }

  Vec at(double t) const { return foot_ + t * dir_.vec(); }
  // Signed coordinate of the orthogonal projection of p along dir.
  double param_of(const Vec& p) const { return (p - foot_).dot(dir_.vec()); }
  Vec project(const Vec& p) const { return at(param_of(p)); }
  double distance_to(const Vec& p) const { return (p - project(p)).norm(); }

 private:
  Direction dir_;
  Vec foot_;
};

struct MarkedLine {
  Line line;
  double speed = 1.0;
};

struct Ball {
  Vec center;
  double radius = 1.0;

  Ball() = default;
  Ball(Vec c, double r);
  int dim() const { return static_cast<int>(center.size()); }
  bool contains(const Vec& p, double slack = kGeomSlack) const {
    return (p - center).norm() <= radius + slack;
  }
};

Vec origin(int d);
Vec point2(double x, double y);
Vec point3(double x, double y, double z);

// mu_d([B(x, r)]) = (omega_{d-1} / 2) r^{d-1}.
double hitting_measure(const Ball& ball, int d);

// Cone measure sin^{d-1}(theta0) for 0 <= theta0 <= pi/2.
double cone_measure(double theta0, int d);

// (radius / |center - x|)^{d-1}; x must lie strictly outside the ball.
double ball_solid_angle(const Vec& x, const Ball& ball, int d);

struct ClosestApproach {
  Vec on_a;
  Vec on_b;
  double distance = 0.0;
  bool parallel = false;
  bool identical = false;
};

// Mutually nearest points of two lines. Parallel lines (within
// kParallelTol on |dir_a . dir_b|) return a's foot and its projection on b.
ClosestApproach closest_approach(const Line& a, const Line& b);

// Closed-ball convention: a tangent line hits.
bool line_hits_ball(const Line& l, const Ball& ball);

// Interval [t0, t1] of line parameters inside the ball; empty when t0 > t1.
std::pair<double, double> chord(const Line& l, const Ball& ball);

}  // namespace linenet
