#include "linenet/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "linenet/format.hpp"
#include "linenet/rng.hpp"

namespace linenet {

namespace {

// Block 0 covers s in (0, 2^kFirstExp]; block b >= 1 covers
// (2^(kFirstExp+b-1), 2^(kFirstExp+b)].
constexpr int kFirstExp = -40;
constexpr std::uint64_t kCountTag = 0xc0ffee;

double block_lo(int b) { return b == 0 ? 0.0 : std::ldexp(1.0, kFirstExp + b - 1); }
double block_hi(int b) { return std::ldexp(1.0, kFirstExp + b); }

double s_of_speed(double v, double gamma) { return std::pow(v, -(gamma - 1.0)); }

// Householder basis: columns 1..d-1 span the hyperplane normal to u.
Eigen::MatrixXd normal_basis(const Vec& u) {
  const int d = static_cast<int>(u.size());
  Vec w = u;
  w[0] += (u[0] >= 0.0 ? 1.0 : -1.0);
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(d, d) - 2.0 * w * w.transpose() / w.squaredNorm();
  return h.rightCols(d - 1);
}

// Visits every line whose speed lies in [v_lo, v_hi), in block order.
template <typename Fn>
void for_each_line(const ProcessParams& p, double v_lo, double v_hi, Fn&& fn) {
  const double rate = p.window_measure();
  const double s_hi = s_of_speed(v_lo, p.gamma) * (1.0 + 1e-9);
  const double s_lo = std::isinf(v_hi) ? 0.0 : s_of_speed(v_hi, p.gamma) * (1.0 - 1e-9);
  const double inv = 1.0 / (p.gamma - 1.0);
  for (int b = 0; block_lo(b) < s_hi; ++b) {
    const double lo = block_lo(b);
    const double hi = block_hi(b);
    if (hi < s_lo) continue;
    Stream count_stream(derive_key({p.seed, static_cast<std::uint64_t>(b), kCountTag}));
    const std::uint64_t n = count_stream.poisson(rate * (hi - lo));
    for (std::uint64_t j = 0; j < n; ++j) {
      Stream rng(derive_key({p.seed, static_cast<std::uint64_t>(b), j}));
      const double s = lo + rng.uniform_open_closed() * (hi - lo);
      const double v = std::pow(s, -inv);
      if (!(v >= v_lo && v < v_hi)) continue;
      fn(MarkedLine{random_line_hitting(rng, p.window), v});
    }
  }
}

}  // namespace

Line random_line_hitting(Stream& rng, const Ball& ball) {
  const int d = ball.dim();
  const Vec u = random_unit_vector(rng, d);
  const Vec h = random_in_ball(rng, d - 1, ball.radius);
  const Direction dir(u);
  return Line(dir, ball.center + normal_basis(dir.vec()) * h);
}

void ProcessParams::validate() const {
  if (d < 2) throw Error("d must be >= 2");
  if (!(gamma > d)) throw Error("gamma must exceed d (gamma > d is required for a scale-invariant network)");
  if (window.dim() != d) throw Error("window center dimension must equal d");
  if (!(window.radius > 0.0)) throw Error("window radius must be positive");
  if (!(v_min > 0.0) || !std::isfinite(v_min)) throw Error("v_min must be positive and finite");
}

double ProcessParams::window_measure() const { return hitting_measure(window, d); }

double ProcessParams::expected_count(double v) const {
  return window_measure() * s_of_speed(v, gamma);
}

double pareto_speed(double u, double v_min, double gamma) {
  if (!(u > 0.0) || u > 1.0) throw Error("pareto_speed: u must lie in (0, 1]");
  if (!(gamma > 1.0)) throw Error("pareto_speed: gamma must exceed 1");
  return v_min * std::pow(u, -1.0 / (gamma - 1.0));
}

LineSample sample_process(const ProcessParams& params) {
  params.validate();
  const double lambda = params.expected_count(params.v_min);
  if (lambda > kMaxExpectedLines) {
    std::ostringstream msg;
    msg << "sample_process: expected line count " << lambda << " exceeds " << kMaxExpectedLines
        << "; raise v_min or shrink the window";
    throw Error(msg.str());
  }
  LineSample out;
  out.params = params;
  out.layers.push_back(SpeedLayer{params.v_min, std::numeric_limits<double>::infinity()});
  for_each_line(params, params.v_min, std::numeric_limits<double>::infinity(),
                [&](MarkedLine&& l) {
                  out.lines.push_back(std::move(l));
                  out.line_layer.push_back(0);
                });
  return out;
}

LineSample refine(const LineSample& sample, double v_min_new) {
  const double v_old = sample.params.v_min;
  if (!(v_min_new > 0.0) || !(v_min_new < v_old)) {
    throw Error("refine: new cutoff must be positive and below the current v_min");
  }
  ProcessParams next = sample.params;
  next.v_min = v_min_new;
  const double lambda = next.expected_count(v_min_new);
  if (lambda > kMaxExpectedLines) {
    throw Error("refine: expected line count exceeds the cap; cutoff too aggressive");
  }
  LineSample out = sample;
  out.params = next;
  const int layer = static_cast<int>(out.layers.size());
  out.layers.push_back(SpeedLayer{v_min_new, v_old});
  for_each_line(next, v_min_new, v_old, [&](MarkedLine&& l) {
    out.lines.push_back(std::move(l));
    out.line_layer.push_back(layer);
  });
  return out;
}

FastLineCount count_fast_lines(const LineSample& sample, double v0, const Ball& ball) {
  if (v0 < sample.params.v_min) throw Error("count_fast_lines: v0 below the sample cutoff");
  FastLineCount out;
  const Ball& w = sample.params.window;
  out.censored = (ball.center - w.center).norm() + ball.radius > w.radius + kGeomSlack;
  for (const auto& l : sample.lines) {
    if (l.speed >= v0 && line_hits_ball(l.line, ball)) ++out.count;
  }
  return out;
}

void write_sample(std::ostream& out, const LineSample& s) {
  const auto& p = s.params;
  out << "# linenet line sample v1\n";
  out << "d," << p.d << "\n";
  out << "gamma," << fmt_g17(p.gamma) << "\n";
  out << "v_min," << fmt_g17(p.v_min) << "\n";
  out << "seed," << p.seed << "\n";
  out << "window_center";
  for (int i = 0; i < p.d; ++i) out << "," << fmt_g17(p.window.center[i]);
  out << "\nwindow_radius," << fmt_g17(p.window.radius) << "\n";
  for (std::size_t k = 0; k < s.layers.size(); ++k) {
    out << "layer," << k << "," << fmt_g17(s.layers[k].lo) << "," << fmt_g17(s.layers[k].hi) << "\n";
  }
  out << "lines," << s.lines.size() << "\n";
  for (int i = 0; i < p.d; ++i) out << "dir" << i << ",";
  for (int i = 0; i < p.d; ++i) out << "foot" << i << ",";
  out << "speed,layer\n";
  for (std::size_t i = 0; i < s.lines.size(); ++i) {
    const auto& l = s.lines[i];
    for (int k = 0; k < p.d; ++k) out << fmt_g17(l.line.dir()[k]) << ",";
    for (int k = 0; k < p.d; ++k) out << fmt_g17(l.line.foot()[k]) << ",";
    out << fmt_g17(l.speed) << "," << s.line_layer[i] << "\n";
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw Error("read_sample: bad number '" + s + "'");
  return v;
}

}  // namespace

LineSample read_sample(std::istream& in) {
  LineSample s;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# linenet line sample", 0) != 0) {
    throw Error("read_sample: missing header");
  }
  ProcessParams& p = s.params;
  Vec center;
  double radius = 0.0;
  std::size_t n_lines = 0;
  bool have_lines = false;
  try {
    while (!have_lines && std::getline(in, line)) {
      const auto f = split_csv(line);
      if (f.empty()) continue;
      if (f[0] == "d") {
        p.d = std::stoi(f.at(1));
      } else if (f[0] == "gamma") {
        p.gamma = to_double(f.at(1));
      } else if (f[0] == "v_min") {
        p.v_min = to_double(f.at(1));
      } else if (f[0] == "seed") {
        p.seed = std::stoull(f.at(1));
      } else if (f[0] == "window_center") {
        center.resize(static_cast<Eigen::Index>(f.size() - 1));
        for (std::size_t i = 1; i < f.size(); ++i) center[static_cast<Eigen::Index>(i - 1)] = to_double(f[i]);
      } else if (f[0] == "window_radius") {
        radius = to_double(f.at(1));
      } else if (f[0] == "layer") {
        s.layers.push_back(SpeedLayer{to_double(f.at(2)), to_double(f.at(3))});
      } else if (f[0] == "lines") {
        n_lines = std::stoull(f.at(1));
        have_lines = true;
      } else {
        throw Error("read_sample: unknown header field '" + f[0] + "'");
      }
    }
    if (!have_lines) throw Error("read_sample: missing lines record");
    p.window = Ball(center, radius);
    p.validate();
    std::getline(in, line);  // column names
    s.lines.reserve(n_lines);
    for (std::size_t i = 0; i < n_lines; ++i) {
      if (!std::getline(in, line)) throw Error("read_sample: truncated line table");
      const auto f = split_csv(line);
      if (f.size() != static_cast<std::size_t>(2 * p.d + 2)) throw Error("read_sample: bad line record");
      Vec u(p.d), foot(p.d);
      for (int k = 0; k < p.d; ++k) {
        u[k] = to_double(f[static_cast<std::size_t>(k)]);
        foot[k] = to_double(f[static_cast<std::size_t>(p.d + k)]);
      }
      MarkedLine ml{Line::from_parts(Direction::from_canonical(u), foot), to_double(f[static_cast<std::size_t>(2 * p.d)])};
      s.lines.push_back(std::move(ml));
      s.line_layer.push_back(std::stoi(f.back()));
    }
  } catch (const std::logic_error& e) {
    throw Error(std::string("read_sample: malformed input (") + e.what() + ")");
  }
  return s;
}

}  // namespace linenet
