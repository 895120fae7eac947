#include "platecol/sampling.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace platecol {

namespace {

// uniform in the open interval (0, 1)
double open_unit(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  double u = dist(rng);
  while (u == 0.0) u = dist(rng);
  return u;
}

void format_double(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

}  // namespace

CollocationSet sample_square(double a, double b, int n_interior,
                             int n_per_edge, std::uint64_t seed) {
  if (a <= 0.0 || b <= 0.0 || n_interior <= 0 || n_per_edge <= 0)
    throw std::invalid_argument("sample_square: positive extents and counts");
  CollocationSet set;
  set.seed = seed;
  std::mt19937_64 rng(seed);
  set.interior.reserve(n_interior);
  for (int i = 0; i < n_interior; ++i) {
    const double x = a * open_unit(rng);
    const double y = b * open_unit(rng);
    set.interior.push_back({x, y});
  }
  // segment order matches PlateProblem: x=0, x=a, y=0, y=b
  struct Edge {
    double nx, ny;
  };
  const Edge edges[4] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  set.boundary.reserve(std::size_t(n_per_edge) * 4);
  for (int e = 0; e < 4; ++e) {
    for (int i = 0; i < n_per_edge; ++i) {
      const double t = open_unit(rng);
      double x, y;
      switch (e) {
        case 0: x = 0.0; y = b * t; break;
        case 1: x = a;   y = b * t; break;
        case 2: x = a * t; y = 0.0; break;
        default: x = a * t; y = b;  break;
      }
      set.boundary.push_back({x, y, edges[e].nx, edges[e].ny, e});
    }
  }
  return set;
}

CollocationSet sample_disk(double radius, int n_interior, int n_boundary,
                           std::uint64_t seed) {
  if (radius <= 0.0 || n_interior <= 0 || n_boundary <= 0)
    throw std::invalid_argument("sample_disk: positive radius and counts");
  CollocationSet set;
  set.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  set.interior.reserve(n_interior);
  for (int i = 0; i < n_interior; ++i) {
    const double r = radius * std::sqrt(open_unit(rng));
    const double t = angle(rng);
    set.interior.push_back({r * std::cos(t), r * std::sin(t)});
  }
  set.boundary.reserve(n_boundary);
  for (int i = 0; i < n_boundary; ++i) {
    const double t = angle(rng);
    const double nx = std::cos(t);
    const double ny = std::sin(t);
    set.boundary.push_back({radius * nx, radius * ny, nx, ny, 0});
  }
  return set;
}

CollocationSet sample_problem(const PlateProblem& problem, int n_interior,
                              int n_boundary, std::uint64_t seed) {
  if (problem.shape == PlateProblem::Shape::Rectangle) {
    const int per_edge = std::max(1, n_boundary / 4);
    return sample_square(problem.a, problem.b, n_interior, per_edge, seed);
  }
  return sample_disk(problem.radius, n_interior, n_boundary, seed);
}

void write_points_csv(std::ostream& out, const CollocationSet& points) {
  out << "x,y,nx,ny,segment\n";
  for (const Vec2& p : points.interior) {
    format_double(out, p.x);
    out << ',';
    format_double(out, p.y);
    out << ",0,0,-1\n";
  }
  for (const BoundaryPoint& p : points.boundary) {
    format_double(out, p.x);
    out << ',';
    format_double(out, p.y);
    out << ',';
    format_double(out, p.nx);
    out << ',';
    format_double(out, p.ny);
    out << ',' << p.segment << '\n';
  }
}

CollocationSet read_points_csv(std::istream& in) {
  CollocationSet set;
  std::string line;
  if (!std::getline(in, line) || line != "x,y,nx,ny,segment")
    throw std::runtime_error("points csv: bad header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    double v[4];
    int segment;
    char comma;
    for (double& f : v) {
      if (!(row >> f >> comma) || comma != ',')
        throw std::runtime_error("points csv: malformed row: " + line);
    }
    if (!(row >> segment))
      throw std::runtime_error("points csv: malformed row: " + line);
    if (segment < 0)
      set.interior.push_back({v[0], v[1]});
    else
      set.boundary.push_back({v[0], v[1], v[2], v[3], segment});
  }
  return set;
}

}  // namespace platecol
