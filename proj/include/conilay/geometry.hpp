#pragma once

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace conilay::geometry {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

enum class Shape { MeridianGuide, Triangle, ScaledGuide, ScaledTriangle };

// Boundary classification. Axis edges carry no essential condition for the
// axisymmetric fiber; walls and the artificial truncation are Dirichlet.
enum class EdgeTag : int {
  Interior = 0,
  DirichletWall = 1,
  Axis = 2,
  Truncation = 3,
};

struct DomainSpec {
  double theta = 0.0;
  double truncation_s = 0.0;
  Shape shape = Shape::MeridianGuide;
  std::vector<Vec2> polygon;  // positively oriented
};

struct GradingInfo {
  double h_near = 0.0;
  double ratio = 1.0;
};

struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;
  // tag k of a triangle classifies the edge (v_k, v_{k+1 mod 3})
  std::vector<std::array<EdgeTag, 3>> edge_tags;
  GradingInfo grading;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  double signed_area(int t) const;
};

struct MeshParams {
  double h_near = 0.1;
  double ratio = 1.2;
  int max_cells = 2000000;
};

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Truncated meridian domains in rotated (s,u) coordinates and the
/// theta-independent scaled (x,y) variants.
DomainSpec build_domain(double theta, double truncation_s, Shape shape);

/// (s,u) -> (r,z): r = s sin(theta) + u cos(theta), z = s cos(theta) - u sin(theta).
Vec2 to_cylindrical(Vec2 su, double theta);
Vec2 from_cylindrical(Vec2 rz, double theta);

/// Structured conforming triangulation, uniform h_near within distance pi
/// of the corner and geometric coarsening (factor `ratio` per band) toward
/// the truncation and the apex.
Mesh generate_mesh(const DomainSpec& spec, const MeshParams& params);

/// Uniform nx-by-ny split of a rectangle, every boundary edge tagged
/// DirichletWall. Test and oracle helper.
Mesh rect_mesh(double x0, double x1, double y0, double y1, int nx, int ny);

/// Split every triangle into 4 congruent children; parent nodes are kept.
Mesh uniform_refine(const Mesh& mesh);

/// Scale the longitudinal (first) coordinate. Maps a reference mesh of
/// Omega(pi/4) onto Omega(theta) with scale = cot(theta).
Mesh map_longitudinal(const Mesh& mesh, double scale);

void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

double boundary_length(const Mesh& mesh, EdgeTag tag);
double polygon_perimeter(const DomainSpec& spec);
int euler_characteristic(const Mesh& mesh);  // V - E + F

}  // namespace conilay::geometry
