#include "conilay/assembly.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>

namespace conilay::assembly {

namespace {

using geometry::EdgeTag;
using geometry::Mesh;
using geometry::Vec2;

struct QuadRule {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weights;  // sum to 1
};

// 7-point degree-5 rule (Radon); weights normalized to unit total.
QuadRule base_rule() {
  const double s15 = std::sqrt(15.0);
  const double a1 = (6.0 - s15) / 21.0, w1 = (155.0 - s15) / 1200.0;
  const double a2 = (6.0 + s15) / 21.0, w2 = (155.0 + s15) / 1200.0;
  QuadRule r;
  r.bary.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(9.0 / 40.0);
  for (int i = 0; i < 3; ++i) {
    std::array<double, 3> p{a1, a1, a1};
    p[i] = 1.0 - 2.0 * a1;
    r.bary.push_back(p);
    r.weights.push_back(w1);
    std::array<double, 3> q{a2, a2, a2};
    q[i] = 1.0 - 2.0 * a2;
    r.bary.push_back(q);
    r.weights.push_back(w2);
  }
  return r;
}

// Same rule applied on the four congruent children of the reference
// triangle; used for the quadrature self-consistency check.
QuadRule composite_rule() {
  QuadRule base = base_rule();
  // children in barycentric coordinates: rows are child vertices
  const std::array<std::array<std::array<double, 3>, 3>, 4> kids = {{
      {{{1, 0, 0}, {0.5, 0.5, 0}, {0.5, 0, 0.5}}},
      {{{0, 1, 0}, {0, 0.5, 0.5}, {0.5, 0.5, 0}}},
      {{{0, 0, 1}, {0.5, 0, 0.5}, {0, 0.5, 0.5}}},
      {{{0.5, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5}}},
  }};
  QuadRule r;
  for (const auto& kid : kids)
    for (size_t q = 0; q < base.bary.size(); ++q) {
      std::array<double, 3> p{0, 0, 0};
      for (int v = 0; v < 3; ++v)
        for (int c = 0; c < 3; ++c) p[c] += base.bary[q][v] * kid[v][c];
      r.bary.push_back(p);
      r.weights.push_back(base.weights[q] / 4.0);
    }
  return r;
}

struct ShapeValues {
  std::vector<double> n;  // nodal basis values at a point
};

void eval_shapes(int degree, const std::array<double, 3>& l, ShapeValues& out) {
  if (degree == 1) {
    out.n = {l[0], l[1], l[2]};
    return;
  }
  out.n = {l[0] * (2 * l[0] - 1), l[1] * (2 * l[1] - 1), l[2] * (2 * l[2] - 1),
           4 * l[1] * l[2],       4 * l[2] * l[0],       4 * l[0] * l[1]};
}

int local_edge_dof(int side) {
  // side k joins local vertices (k, k+1): edge dofs are numbered opposite
  static const int table[3] = {5, 3, 4};
  return table[side];
}

}  // namespace

Eigen::SparseMatrix<double> SparseSymmetricMatrix::full() const {
  Eigen::SparseMatrix<double> f(n, n);
  f = lower.selfadjointView<Eigen::Lower>();
  return f;
}

void SparseSymmetricMatrix::dump_coo(std::ostream& os) const {
  char buf[96];
  for (int k = 0; k < lower.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(lower, k); it; ++it) {
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", long(it.row()),
                    long(it.col()), it.value());
      os << buf;
    }
}

Assembled assemble(const Mesh& mesh, const FiberProblem& problem) {
  if (problem.degree != 1 && problem.degree != 2)
    throw std::invalid_argument("assemble: degree must be 1 or 2");
  if (problem.coords == CoordinateSystem::ScaledXY) {
    if (!(problem.h > 0.0))
      throw std::invalid_argument("assemble: ScaledXY requires h > 0");
    if (problem.m != 0)
      throw std::invalid_argument("assemble: fiber index must be 0 in ScaledXY");
  }

  const int degree = problem.degree;
  const int nv = mesh.num_nodes();
  const int per_elem = degree == 1 ? 3 : 6;

  Assembled out;
  out.degree = degree;
  out.problem = problem;
  out.dof_coords.assign(mesh.nodes.begin(), mesh.nodes.end());
  out.elem_dofs.resize(mesh.num_triangles());

  std::map<std::pair<int, int>, int> edge_dof;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    auto& dofs = out.elem_dofs[t];
    for (int k = 0; k < 3; ++k) dofs[k] = tri[k];
    if (degree == 2) {
      // local edge dofs 3,4,5 sit opposite vertices 0,1,2
      const int pairs[3][2] = {{1, 2}, {2, 0}, {0, 1}};
      for (int e = 0; e < 3; ++e) {
        auto key = std::minmax(tri[pairs[e][0]], tri[pairs[e][1]]);
        auto it = edge_dof.find(key);
        int idx;
        if (it == edge_dof.end()) {
          idx = nv + static_cast<int>(edge_dof.size());
          edge_dof.emplace(key, idx);
          Vec2 a = mesh.nodes[key.first], b = mesh.nodes[key.second];
          out.dof_coords.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
        } else {
          idx = it->second;
        }
        dofs[3 + e] = idx;
      }
    } else {
      dofs[3] = dofs[4] = dofs[5] = -1;
    }
  }
  out.n_dofs = static_cast<int>(out.dof_coords.size());

  // boundary membership
  out.on_wall.assign(out.n_dofs, false);
  out.on_axis.assign(out.n_dofs, false);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      EdgeTag tag = mesh.edge_tags[t][k];
      if (tag == EdgeTag::Interior) continue;
      bool wall = tag == EdgeTag::DirichletWall || tag == EdgeTag::Truncation;
      int ids[3] = {tri[k], tri[(k + 1) % 3],
                    degree == 2 ? out.elem_dofs[t][local_edge_dof(k)] : -1};
      for (int id : ids) {
        if (id < 0) continue;
        if (wall)
          out.on_wall[id] = true;
        else
          out.on_axis[id] = true;
      }
    }
  }

  const QuadRule rule =
      problem.quadrature_refine > 0 ? composite_rule() : base_rule();
  const double st = std::sin(problem.theta), ct = std::cos(problem.theta);
  const bool scaled = problem.coords == CoordinateSystem::ScaledXY;
  const double cx = scaled ? problem.h * problem.h : problem.grad_coeff[0];
  const double cy = scaled ? 1.0 : problem.grad_coeff[1];
  const double m2 = double(problem.m) * double(problem.m);

  std::vector<Eigen::Triplet<double>> tk, tm;
  tk.reserve(size_t(mesh.num_triangles()) * per_elem * per_elem / 2);
  tm.reserve(tk.capacity());

  ShapeValues sv;
  std::vector<std::array<double, 2>> grads(per_elem);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec2 p0 = mesh.nodes[tri[0]], p1 = mesh.nodes[tri[1]],
               p2 = mesh.nodes[tri[2]];
    const double area = 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) -
                               (p2.x - p0.x) * (p1.y - p0.y));
    if (!(area > 0.0)) throw std::runtime_error("assemble: degenerate element");
    const double inv2a = 1.0 / (2.0 * area);
    const std::array<std::array<double, 2>, 3> gl = {{
        {(p1.y - p2.y) * inv2a, (p2.x - p1.x) * inv2a},
        {(p2.y - p0.y) * inv2a, (p0.x - p2.x) * inv2a},
        {(p0.y - p1.y) * inv2a, (p1.x - p0.x) * inv2a},
    }};

    double ke[6][6] = {};
    double me[6][6] = {};
    for (size_t q = 0; q < rule.bary.size(); ++q) {
      const auto& l = rule.bary[q];
      eval_shapes(degree, l, sv);
      if (degree == 1) {
        for (int i = 0; i < 3; ++i) grads[i] = gl[i];
      } else {
        for (int i = 0; i < 3; ++i) {
          double c = 4 * l[i] - 1;
          grads[i] = {c * gl[i][0], c * gl[i][1]};
        }
        const int pairs[3][2] = {{1, 2}, {2, 0}, {0, 1}};
        for (int e = 0; e < 3; ++e) {
          int a = pairs[e][0], b = pairs[e][1];
          grads[3 + e] = {4 * (l[a] * gl[b][0] + l[b] * gl[a][0]),
                          4 * (l[a] * gl[b][1] + l[b] * gl[a][1])};
        }
      }
      Vec2 pos{l[0] * p0.x + l[1] * p1.x + l[2] * p2.x,
               l[0] * p0.y + l[1] * p1.y + l[2] * p2.y};
      double w = scaled ? pos.y : pos.x * st + pos.y * ct;
      double dv = rule.weights[q] * area;
      double wk = dv * w;
      for (int i = 0; i < per_elem; ++i)
        for (int j = 0; j <= i; ++j) {
          double stiff =
              (cx * grads[i][0] * grads[j][0] + cy * grads[i][1] * grads[j][1]) *
              wk;
          if (m2 > 0.0) stiff += m2 * sv.n[i] * sv.n[j] * dv / w;
          ke[i][j] += stiff;
          me[i][j] += sv.n[i] * sv.n[j] * wk;
        }
    }
    const auto& dofs = out.elem_dofs[t];
    for (int i = 0; i < per_elem; ++i)
      for (int j = 0; j <= i; ++j) {
        int I = dofs[i], J = dofs[j];
        int r = std::max(I, J), c = std::min(I, J);
        tk.emplace_back(r, c, ke[i][j]);
        tm.emplace_back(r, c, me[i][j]);
      }
  }

  out.K.n = out.M.n = out.n_dofs;
  out.K.lower.resize(out.n_dofs, out.n_dofs);
  out.M.lower.resize(out.n_dofs, out.n_dofs);
  out.K.lower.setFromTriplets(tk.begin(), tk.end());
  out.M.lower.setFromTriplets(tm.begin(), tm.end());
  return out;
}

Reduced apply_dirichlet(const Assembled& a, int m) {
  Reduced red;
  red.full_to_free.assign(a.n_dofs, -1);
  for (int i = 0; i < a.n_dofs; ++i) {
    bool fixed = a.on_wall[i] || (m != 0 && a.on_axis[i]);
    if (!fixed) {
      red.full_to_free[i] = static_cast<int>(red.free_dofs.size());
      red.free_dofs.push_back(i);
    }
  }
  const int nf = static_cast<int>(red.free_dofs.size());
  if (nf == 0)
    throw std::runtime_error(
        "apply_dirichlet: no interior dofs left (degenerate mesh)");

  auto shrink = [&](const SparseSymmetricMatrix& src) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(src.lower.nonZeros());
    for (int k = 0; k < src.lower.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(src.lower, k); it;
           ++it) {
        int r = red.full_to_free[it.row()], c = red.full_to_free[it.col()];
        if (r < 0 || c < 0) continue;
        trips.emplace_back(std::max(r, c), std::min(r, c), it.value());
      }
    SparseSymmetricMatrix out;
    out.n = nf;
    out.lower.resize(nf, nf);
    out.lower.setFromTriplets(trips.begin(), trips.end());
    return out;
  };
  red.K = shrink(a.K);
  red.M = shrink(a.M);
  return red;
}

Eigen::VectorXd expand(const Reduced& r, int n_full, const Eigen::VectorXd& x) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_full);
  for (size_t i = 0; i < r.free_dofs.size(); ++i)
    out[r.free_dofs[i]] = x[static_cast<int>(i)];
  return out;
}

void for_each_quad_sample(const Mesh& mesh, const Assembled& a,
                          const Eigen::VectorXd& full_coeffs,
                          const std::function<void(const QuadSample&)>& fn) {
  const int degree = a.degree;
  const int per_elem = degree == 1 ? 3 : 6;
  const QuadRule rule = base_rule();
  const double st = std::sin(a.problem.theta), ct = std::cos(a.problem.theta);
  const bool scaled = a.problem.coords == CoordinateSystem::ScaledXY;

  ShapeValues sv;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec2 p0 = mesh.nodes[tri[0]], p1 = mesh.nodes[tri[1]],
               p2 = mesh.nodes[tri[2]];
    const double area = 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) -
                               (p2.x - p0.x) * (p1.y - p0.y));
    const double inv2a = 1.0 / (2.0 * area);
    const std::array<std::array<double, 2>, 3> gl = {{
        {(p1.y - p2.y) * inv2a, (p2.x - p1.x) * inv2a},
        {(p2.y - p0.y) * inv2a, (p0.x - p2.x) * inv2a},
        {(p0.y - p1.y) * inv2a, (p1.x - p0.x) * inv2a},
    }};
    const auto& dofs = a.elem_dofs[t];
    for (size_t q = 0; q < rule.bary.size(); ++q) {
      const auto& l = rule.bary[q];
      eval_shapes(degree, l, sv);
      QuadSample s;
      s.pos = {l[0] * p0.x + l[1] * p1.x + l[2] * p2.x,
               l[0] * p0.y + l[1] * p1.y + l[2] * p2.y};
      double w = scaled ? s.pos.y : s.pos.x * st + s.pos.y * ct;
      s.wdet = rule.weights[q] * area * w;
      s.value = 0.0;
      s.grad = {0.0, 0.0};
      for (int i = 0; i < per_elem; ++i) {
        std::array<double, 2> gi;
        if (degree == 1) {
          gi = gl[i];
        } else if (i < 3) {
          double c = 4 * l[i] - 1;
          gi = {c * gl[i][0], c * gl[i][1]};
        } else {
          const int pairs[3][2] = {{1, 2}, {2, 0}, {0, 1}};
          int aa = pairs[i - 3][0], bb = pairs[i - 3][1];
          gi = {4 * (l[aa] * gl[bb][0] + l[bb] * gl[aa][0]),
                4 * (l[aa] * gl[bb][1] + l[bb] * gl[aa][1])};
        }
        double c = full_coeffs[dofs[i]];
        s.value += c * sv.n[i];
        s.grad[0] += c * gi[0];
        s.grad[1] += c * gi[1];
      }
      fn(s);
    }
  }
}

}  // namespace conilay::assembly
