#include "conilay/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>

namespace conilay::geometry {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;

void check_theta(double theta) {
  if (!(theta > 0.0) || !(theta < kPi / 2.0))
    throw std::domain_error("theta must lie in (0, pi/2)");
}

bool is_scaled(Shape s) {
  return s == Shape::ScaledGuide || s == Shape::ScaledTriangle;
}

bool has_strip(Shape s) {
  return s == Shape::MeridianGuide || s == Shape::ScaledGuide;
}

// Longitudinal extent of the corner triangle (apex at -L, corner at 0).
double apex_extent(double theta, Shape shape) {
  return is_scaled(shape) ? kPi * kSqrt2 : kPi / std::tan(theta);
}

double transverse_width(Shape shape) {
  return is_scaled(shape) ? kPi * kSqrt2 : kPi;
}

// Transverse interval at longitudinal position zeta.
std::pair<double, double> transverse_interval(double zeta, double theta,
                                              Shape shape) {
  if (is_scaled(shape)) return {std::max(0.0, zeta), zeta + kPi * kSqrt2};
  return {std::max(0.0, -zeta * std::tan(theta)), kPi};
}

// Column positions: uniform h_near out to distance pi from the corner,
// then geometric bands. The end point is hit exactly; a final band shorter
// than a quarter step is merged into its neighbour.
std::vector<double> columns_one_side(double extent, double h_near,
                                     double ratio) {
  std::vector<double> cols;
  double pos = 0.0;
  double step = h_near;
  while (pos < extent) {
    if (pos >= kPi - 1e-12) step *= ratio;
    double next = pos + step;
    if (next > extent - 0.25 * step) next = extent;
    cols.push_back(next);
    pos = next;
  }
  return cols;
}

}  // namespace

double Mesh::signed_area(int t) const {
  const auto& tri = triangles[t];
  const Vec2& a = nodes[tri[0]];
  const Vec2& b = nodes[tri[1]];
  const Vec2& c = nodes[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

DomainSpec build_domain(double theta, double truncation_s, Shape shape) {
  check_theta(theta);
  if (has_strip(shape) && !(truncation_s > 0.0))
    throw std::domain_error("truncation must be positive");

  DomainSpec spec;
  spec.theta = theta;
  spec.truncation_s = has_strip(shape) ? truncation_s : 0.0;
  spec.shape = shape;

  const double L = apex_extent(theta, shape);
  const double w = transverse_width(shape);
  const double S = spec.truncation_s;
  switch (shape) {
    case Shape::MeridianGuide:
      spec.polygon = {{-L, w}, {0.0, 0.0}, {S, 0.0}, {S, w}};
      break;
    case Shape::Triangle:
      spec.polygon = {{-L, w}, {0.0, 0.0}, {0.0, w}};
      break;
    case Shape::ScaledGuide:
      spec.polygon = {{-L, 0.0}, {0.0, 0.0}, {S, S}, {S, S + w}};
      break;
    case Shape::ScaledTriangle:
      spec.polygon = {{-L, 0.0}, {0.0, 0.0}, {0.0, w}};
      break;
  }
  return spec;
}

Vec2 to_cylindrical(Vec2 su, double theta) {
  double st = std::sin(theta), ct = std::cos(theta);
  return {su.x * st + su.y * ct, su.x * ct - su.y * st};
}

Vec2 from_cylindrical(Vec2 rz, double theta) {
  double st = std::sin(theta), ct = std::cos(theta);
  return {rz.y * ct + rz.x * st, -rz.y * st + rz.x * ct};
}

Mesh generate_mesh(const DomainSpec& spec, const MeshParams& params) {
  if (!(params.h_near > 0.0)) throw std::domain_error("h_near must be positive");
  if (!(params.ratio >= 1.0)) throw std::domain_error("ratio must be >= 1");

  const Shape shape = spec.shape;
  const double theta = spec.theta;
  const double L = apex_extent(theta, shape);
  const double width = transverse_width(shape);

  // Columns: apex (-L) .. 0 .. truncation, corner at zero.
  std::vector<double> left = columns_one_side(L, params.h_near, params.ratio);
  std::vector<double> cols;
  for (auto it = left.rbegin(); it != left.rend(); ++it) cols.push_back(-*it);
  cols.push_back(0.0);
  if (has_strip(shape)) {
    for (double c :
         columns_one_side(spec.truncation_s, params.h_near, params.ratio))
      cols.push_back(c);
  }

  const int n_u = std::max(2, (int)std::lround(width / params.h_near));
  const int n_cols = static_cast<int>(cols.size());
  const long cells = 2L * (n_cols - 2) * n_u + n_u;
  if (cells > params.max_cells)
    throw ResourceError("cell budget exceeded: " + std::to_string(cells) +
                        " > " + std::to_string(params.max_cells));

  Mesh mesh;
  mesh.grading = {params.h_near, params.ratio};
  mesh.nodes.reserve(1 + (n_cols - 1) * (n_u + 1));

  // Node 0 is the apex; column i >= 1 holds n_u+1 nodes bottom to top.
  mesh.nodes.push_back(
      {cols[0], transverse_interval(cols[0], theta, shape).first});
  auto node_id = [n_u](int col, int j) { return 1 + (col - 1) * (n_u + 1) + j; };
  for (int i = 1; i < n_cols; ++i) {
    auto [lo, hi] = transverse_interval(cols[i], theta, shape);
    for (int j = 0; j <= n_u; ++j) {
      double u = lo + (hi - lo) * j / n_u;
      mesh.nodes.push_back({cols[i], u});
    }
  }

  const EdgeTag right_tag =
      has_strip(shape) ? EdgeTag::Truncation : EdgeTag::DirichletWall;
  const int last = n_cols - 1;

  auto push = [&](int a, int b, int c, EdgeTag t0, EdgeTag t1, EdgeTag t2) {
    mesh.triangles.push_back({a, b, c});
    mesh.edge_tags.push_back({t0, t1, t2});
  };

  // Apex fan.
  for (int j = 0; j < n_u; ++j) {
    EdgeTag t0 = (j == 0) ? EdgeTag::Axis : EdgeTag::Interior;
    EdgeTag t1 = (1 == last) ? right_tag : EdgeTag::Interior;
    EdgeTag t2 = (j == n_u - 1) ? EdgeTag::DirichletWall : EdgeTag::Interior;
    push(0, node_id(1, j), node_id(1, j + 1), t0, t1, t2);
  }

  // Column strips.
  for (int i = 1; i < n_cols - 1; ++i) {
    double mid = 0.5 * (cols[i] + cols[i + 1]);
    EdgeTag bottom = mid < 0.0 ? EdgeTag::Axis : EdgeTag::DirichletWall;
    for (int j = 0; j < n_u; ++j) {
      int l0 = node_id(i, j), l1 = node_id(i, j + 1);
      int r0 = node_id(i + 1, j), r1 = node_id(i + 1, j + 1);
      EdgeTag b = (j == 0) ? bottom : EdgeTag::Interior;
      EdgeTag r = (i + 1 == last) ? right_tag : EdgeTag::Interior;
      EdgeTag t = (j == n_u - 1) ? EdgeTag::DirichletWall : EdgeTag::Interior;
      push(l0, r0, r1, b, r, EdgeTag::Interior);
      push(l0, r1, l1, EdgeTag::Interior, t, EdgeTag::Interior);
    }
  }
  return mesh;
}

Mesh rect_mesh(double x0, double x1, double y0, double y1, int nx, int ny) {
  Mesh mesh;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.nodes.push_back({x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny});
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  const EdgeTag W = EdgeTag::DirichletWall, I = EdgeTag::Interior;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1),
          d = id(i, j + 1);
      mesh.triangles.push_back({a, b, c});
      mesh.edge_tags.push_back({j == 0 ? W : I, i == nx - 1 ? W : I, I});
      mesh.triangles.push_back({a, c, d});
      mesh.edge_tags.push_back({I, j == ny - 1 ? W : I, i == 0 ? W : I});
    }
  return mesh;
}

Mesh uniform_refine(const Mesh& mesh) {
  Mesh out;
  out.nodes = mesh.nodes;
  out.grading = {mesh.grading.h_near / 2.0, mesh.grading.ratio};
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Vec2 pa = mesh.nodes[a], pb = mesh.nodes[b];
    out.nodes.push_back({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
    int idx = static_cast<int>(out.nodes.size()) - 1;
    midpoint.emplace(key, idx);
    return idx;
  };
  const EdgeTag I = EdgeTag::Interior;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    auto [v0, v1, v2] = mesh.triangles[t];
    auto [t0, t1, t2] = mesh.edge_tags[t];
    int m01 = mid(v0, v1), m12 = mid(v1, v2), m20 = mid(v2, v0);
    out.triangles.push_back({v0, m01, m20});
    out.edge_tags.push_back({t0, I, t2});
    out.triangles.push_back({v1, m12, m01});
    out.edge_tags.push_back({t1, I, t0});
    out.triangles.push_back({v2, m20, m12});
    out.edge_tags.push_back({t2, I, t1});
    out.triangles.push_back({m01, m12, m20});
    out.edge_tags.push_back({I, I, I});
  }
  return out;
}

Mesh map_longitudinal(const Mesh& mesh, double scale) {
  Mesh out = mesh;
  for (auto& p : out.nodes) p.x *= scale;
  return out;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << "nodes " << mesh.num_nodes() << " triangles " << mesh.num_triangles()
     << "\n";
  char buf[80];
  for (const auto& p : mesh.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
    os << buf;
  }
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const auto& tag = mesh.edge_tags[t];
    os << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' ' << int(tag[0]) << ' '
       << int(tag[1]) << ' ' << int(tag[2]) << "\n";
  }
}

Mesh read_mesh(std::istream& is) {
  std::string word;
  int nn = 0, nt = 0;
  is >> word >> nn >> word >> nt;
  if (!is) throw std::runtime_error("read_mesh: bad header");
  Mesh mesh;
  mesh.nodes.resize(nn);
  for (auto& p : mesh.nodes) is >> p.x >> p.y;
  mesh.triangles.resize(nt);
  mesh.edge_tags.resize(nt);
  for (int t = 0; t < nt; ++t) {
    int tags[3];
    is >> mesh.triangles[t][0] >> mesh.triangles[t][1] >>
        mesh.triangles[t][2] >> tags[0] >> tags[1] >> tags[2];
    for (int k = 0; k < 3; ++k) mesh.edge_tags[t][k] = EdgeTag(tags[k]);
  }
  if (!is) throw std::runtime_error("read_mesh: truncated file");
  return mesh;
}

double boundary_length(const Mesh& mesh, EdgeTag tag) {
  double len = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (int k = 0; k < 3; ++k)
      if (mesh.edge_tags[t][k] == tag) {
        Vec2 a = mesh.nodes[mesh.triangles[t][k]];
        Vec2 b = mesh.nodes[mesh.triangles[t][(k + 1) % 3]];
        len += std::hypot(b.x - a.x, b.y - a.y);
      }
  return len;
}

double polygon_perimeter(const DomainSpec& spec) {
  double len = 0.0;
  int n = static_cast<int>(spec.polygon.size());
  for (int i = 0; i < n; ++i) {
    Vec2 a = spec.polygon[i], b = spec.polygon[(i + 1) % n];
    len += std::hypot(b.x - a.x, b.y - a.y);
  }
  return len;
}

int euler_characteristic(const Mesh& mesh) {
  std::set<std::pair<int, int>> edges;
  for (const auto& tri : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      auto key = std::minmax(tri[k], tri[(k + 1) % 3]);
      edges.insert(key);
    }
  return mesh.num_nodes() - static_cast<int>(edges.size()) +
         mesh.num_triangles();
}

}  // namespace conilay::geometry
