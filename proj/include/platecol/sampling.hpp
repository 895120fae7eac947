#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "platecol/plate.hpp"

namespace platecol {

struct BoundaryPoint {
  double x, y;
  double nx, ny;  // outward unit normal
  int segment;
};

// Random collocation points of one problem instance. Reproducible from
// (domain, counts, seed); boundary points carry their segment's normal.
struct CollocationSet {
  std::vector<Vec2> interior;
  std::vector<BoundaryPoint> boundary;
  std::uint64_t seed = 0;
};

// Interior points uniform in (0,a) x (0,b); boundary points uniform on each
// of the four edges (segments 0: x=0, 1: x=a, 2: y=0, 3: y=b), corners
// excluded.
CollocationSet sample_square(double a, double b, int n_interior,
                             int n_per_edge, std::uint64_t seed);

// Interior points uniform by area (radius via sqrt of a uniform draw);
// boundary points uniform in angle with normal (x,y)/R.
CollocationSet sample_disk(double radius, int n_interior, int n_boundary,
                           std::uint64_t seed);

// Dispatch on the problem's shape. For rectangles n_boundary is split evenly
// across the four edges (at least one point each).
CollocationSet sample_problem(const PlateProblem& problem, int n_interior,
                              int n_boundary, std::uint64_t seed);

// CSV schema: header x,y,nx,ny,segment; interior rows carry nx=ny=0 and
// segment=-1. Doubles are written with round-trip precision.
void write_points_csv(std::ostream& out, const CollocationSet& points);
CollocationSet read_points_csv(std::istream& in);

}  // namespace platecol
