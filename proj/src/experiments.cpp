#include "conilay/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <thread>

#include "conilay/potential1d.hpp"
#include "conilay/specfun.hpp"
#include "conilay/verify.hpp"
#include "conilay/version.hpp"

namespace conilay::experiments {

namespace {

constexpr double kPi = 3.14159265358979323846;
using nlohmann::json;

double deg2rad(double d) { return d * kPi / 180.0; }

void check_angle_deg(double deg) {
  if (!(deg >= 0.25) || !(deg <= 89.5))
    throw std::invalid_argument("theta_deg outside the supported range "
                                "[0.25, 89.5]: " +
                                std::to_string(deg));
}

json config_to_json(const Config& c) {
  json j;
  j["experiment"] = c.experiment;
  j["theta_deg"] = c.theta_deg;
  j["h_list"] = c.h_list;
  j["theta"] = c.theta_single_deg;
  j["truncation"] = c.truncation;
  j["mesh"] = {{"h_near", c.mesh.h_near},
               {"ratio", c.mesh.ratio},
               {"max_cells", c.mesh.max_cells}};
  j["solver"] = {
      {"k", c.solver.k}, {"tol", c.solver.tol}, {"shift", c.solver.shift}};
  j["count_k"] = c.count_k;
  j["out_dir"] = c.out_dir;
  j["workers"] = c.workers;
  return j;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvFile {
 public:
  CsvFile(const Config& cfg, const std::string& name,
          const std::string& columns) {
    std::filesystem::create_directories(cfg.out_dir);
    path_ = cfg.out_dir + "/" + name;
    os_.open(path_);
    if (!os_) throw std::runtime_error("cannot open " + path_);
    os_ << "# conilay " << kVersion << " experiment=" << cfg.experiment
        << " config_hash=" << config_hash(cfg) << "\n";
    os_ << "# columns: " << columns << "\n";
  }
  template <class... Ts>
  void row(Ts... vals) {
    bool first = true;
    auto emit = [&](auto v) {
      if (!first) os_ << ",";
      first = false;
      if constexpr (std::is_floating_point_v<decltype(v)>)
        os_ << format_double(v);
      else
        os_ << v;
    };
    (emit(vals), ...);
    os_ << "\n";
  }
  void comment(const std::string& line) { os_ << "# " << line << "\n"; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream os_;
};

}  // namespace

Config default_config(const std::string& experiment) {
  Config c;
  c.experiment = experiment;
  if (experiment == "sweep") {
    c.truncation = 2.0 * kPi;  // reference truncation, scaled by cot(theta)
    c.mesh = {0.08, 1.2, 4000000};
    c.solver = {6, 1e-9, 0.0};
  } else if (experiment == "counting") {
    c.theta_single_deg = 5.0;
    c.truncation = 15000.0;
    c.mesh = {0.07, 1.04, 8000000};
    c.count_k = 12;
  } else if (experiment == "potential") {
    // x grid handled internally
  } else if (experiment == "modes") {
    c.theta_single_deg = 2.5;
    c.truncation = 40.0;
    c.mesh = {0.1, 1.2, 4000000};
    c.solver = {6, 1e-10, 0.0};
  } else if (experiment == "semicl") {
    c.h_list = {0.2, 0.1, 0.05};
    c.truncation = 3.0;
    c.mesh = {0.04, 1.2, 4000000};
    c.solver = {3, 1e-10, 0.0};
  } else if (experiment == "agmon") {
    c.h_list = {0.1, 0.05, 0.025};
    c.truncation = 2.5;
    c.solver = {1, 1e-10, 0.0};
  } else if (experiment == "verify") {
    // verify drives its own sub-configurations
  } else {
    throw std::invalid_argument("unknown experiment: " + experiment);
  }
  c.canonical = config_to_json(c).dump();
  return c;
}

Config load_config(const std::string& experiment, const std::string& path) {
  Config c = default_config(experiment);
  if (!path.empty()) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read config " + path);
    json j = json::parse(is);
    if (j.contains("experiment")) c.experiment = j["experiment"];
    if (j.contains("theta_deg")) c.theta_deg = j["theta_deg"].get<std::vector<double>>();
    if (j.contains("h_list")) c.h_list = j["h_list"].get<std::vector<double>>();
    if (j.contains("theta")) c.theta_single_deg = j["theta"];
    if (j.contains("truncation")) c.truncation = j["truncation"];
    if (j.contains("mesh")) {
      auto m = j["mesh"];
      if (m.contains("h_near")) c.mesh.h_near = m["h_near"];
      if (m.contains("ratio")) c.mesh.ratio = m["ratio"];
      if (m.contains("max_cells")) c.mesh.max_cells = m["max_cells"];
    }
    if (j.contains("solver")) {
      auto s = j["solver"];
      if (s.contains("k")) c.solver.k = s["k"];
      if (s.contains("tol")) c.solver.tol = s["tol"];
      if (s.contains("shift")) c.solver.shift = s["shift"];
    }
    if (j.contains("count_k")) c.count_k = j["count_k"];
    if (j.contains("out_dir")) c.out_dir = j["out_dir"];
    if (j.contains("workers")) c.workers = j["workers"];
  }
  for (double d : c.theta_deg) check_angle_deg(d);
  if (c.experiment != "semicl" && c.experiment != "agmon" &&
      c.experiment != "verify")
    check_angle_deg(c.theta_single_deg);
  if (c.solver.k < 1) throw std::invalid_argument("solver.k must be >= 1");
  if (c.workers < 1) c.workers = 1;
  c.canonical = config_to_json(c).dump();
  return c;
}

std::string config_hash(const Config& cfg) {
  // FNV-1a 64
  unsigned long long h = 14695981039346656037ULL;
  for (unsigned char ch : cfg.canonical) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", h);
  return buf;
}

void parallel_for(int n, int workers, const std::function<void(int)>& body) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int i = next++; i < n; i = next++) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

PencilSolve solve_meridian(double theta, int m, double truncation,
                           const MeshConfig& mc, int k, double tol,
                           double shift) {
  PencilSolve out;
  auto spec =
      geometry::build_domain(theta, truncation, geometry::Shape::MeridianGuide);
  out.mesh = geometry::generate_mesh(spec, {mc.h_near, mc.ratio, mc.max_cells});
  assembly::FiberProblem p;
  p.m = m;
  p.theta = theta;
  out.assembled = assembly::assemble(out.mesh, p);
  out.reduced = assembly::apply_dirichlet(out.assembled, m);
  out.eig = eigensolve::smallest_eigenpairs(out.reduced.K, out.reduced.M, k,
                                            tol, shift);
  return out;
}

PencilSolve solve_scaled(geometry::Shape shape, double h, double truncation,
                         const MeshConfig& mc, int k, double tol,
                         double shift) {
  PencilSolve out;
  auto spec = geometry::build_domain(kPi / 4, truncation, shape);
  out.mesh = geometry::generate_mesh(spec, {mc.h_near, mc.ratio, mc.max_cells});
  assembly::FiberProblem p;
  p.coords = assembly::CoordinateSystem::ScaledXY;
  p.h = h;
  out.assembled = assembly::assemble(out.mesh, p);
  out.reduced = assembly::apply_dirichlet(out.assembled, 0);
  out.eig = eigensolve::smallest_eigenpairs(out.reduced.K, out.reduced.M, k,
                                            tol, shift);
  return out;
}

std::vector<std::vector<double>> sweep_reference(
    const std::vector<double>& theta_rad, double ref_truncation,
    const MeshConfig& mc, int k, double tol, int workers) {
  auto ref_spec = geometry::build_domain(kPi / 4, ref_truncation,
                                         geometry::Shape::MeridianGuide);
  geometry::Mesh ref =
      geometry::generate_mesh(ref_spec, {mc.h_near, mc.ratio, mc.max_cells});

  std::vector<std::vector<double>> values(theta_rad.size());
  parallel_for(
      static_cast<int>(theta_rad.size()), workers, [&](int i) {
        double theta = theta_rad[i];
        geometry::Mesh mesh =
            geometry::map_longitudinal(ref, 1.0 / std::tan(theta));
        assembly::FiberProblem p;
        p.theta = theta;
        auto a = assembly::assemble(mesh, p);
        auto r = assembly::apply_dirichlet(a, 0);
        eigensolve::SolveOptions opts;
        opts.max_iter = 600;
        try {
          auto eig =
              eigensolve::smallest_eigenpairs(r.K, r.M, k, tol, 0.0, opts);
          values[i] = eig.values;
        } catch (const eigensolve::ConvergenceError& e) {
          std::cerr << "sweep: partial convergence at theta=" << theta << ": "
                    << e.what() << "\n";
          values[i] = e.partial.values;
        }
      });
  return values;
}

CountingResult counting_jumps(double theta, double truncation,
                              const MeshConfig& mc, int max_jumps,
                              double E_floor) {
  auto spec =
      geometry::build_domain(theta, truncation, geometry::Shape::MeridianGuide);
  auto mesh = geometry::generate_mesh(spec, {mc.h_near, mc.ratio, mc.max_cells});
  assembly::FiberProblem p;
  p.theta = theta;
  auto a = assembly::assemble(mesh, p);
  auto r = assembly::apply_dirichlet(a, 0);

  eigensolve::InertiaProber prober(r.K, r.M);
  CountingResult out;
  out.dofs = r.K.n;

  auto count_at = [&](double E) { return prober.count_below(1.0 - E); };

  std::vector<double> jumps;
  // recursive splitting in log E; emit a jump when the bracket is tight
  std::function<void(double, double, int, int)> rec =
      [&](double Ehi, double Elo, int chi, int clo) {
        // counts: chi = N(Ehi) (fewer), clo = N(Elo)
        if (clo == chi) return;
        if (Ehi / Elo < 1.0 + 3e-3) {
          double E = std::sqrt(Ehi * Elo);
          for (int i = chi; i < clo; ++i) jumps.push_back(E);
          return;
        }
        double Emid = std::sqrt(Ehi * Elo);
        int cmid = count_at(Emid);
        rec(Ehi, Emid, chi, cmid);
        rec(Emid, Elo, cmid, clo);
      };

  int n_top = count_at(0.999999);  // mu < 1e-6: none
  int n_bot = count_at(E_floor);
  rec(0.999999, E_floor, n_top, n_bot);
  std::sort(jumps.rbegin(), jumps.rend());
  if (static_cast<int>(jumps.size()) > max_jumps) jumps.resize(max_jumps);
  out.jumps_E = jumps;
  for (auto it = jumps.rbegin(); it != jumps.rend(); ++it)
    out.mu.push_back(1.0 - *it);
  std::sort(out.mu.begin(), out.mu.end());
  if (jumps.size() >= 3) out.fit = asymptotics::staircase_slope(jumps);
  out.factorizations = prober.factorization_count();
  return out;
}

namespace {

int run_sweep(const Config& cfg) {
  std::vector<double> theta;
  for (double d : cfg.theta_deg) theta.push_back(deg2rad(d));
  auto values = sweep_reference(theta, cfg.truncation, cfg.mesh, cfg.solver.k,
                                cfg.solver.tol, cfg.workers);
  CsvFile csv(cfg, "sweep_theta.csv", "theta_deg, n, mu_n");
  for (int n = 1; n <= cfg.solver.k; ++n)
    csv.row(0.0, n, asymptotics::two_term_beta0());  // theta->0 reference row
  for (size_t i = 0; i < theta.size(); ++i)
    for (size_t n = 0; n < values[i].size(); ++n)
      csv.row(cfg.theta_deg[i], int(n + 1), values[i][n]);
  std::cout << "sweep: wrote " << csv.path() << "\n";
  return 0;
}

int run_counting(const Config& cfg) {
  double theta = deg2rad(cfg.theta_single_deg);
  double E_floor = 64.0 / (cfg.truncation * cfg.truncation);
  auto res =
      counting_jumps(theta, cfg.truncation, cfg.mesh, cfg.count_k, E_floor);

  CsvFile csv(cfg, "counting.csv", "log10E, N, asymptote");
  if (!res.jumps_E.empty()) {
    double Emax = res.jumps_E.front() * 2.0;
    double Emin = res.jumps_E.back() * 0.5;
    const int grid = 200;
    for (int i = 0; i <= grid; ++i) {
      double lg = std::log10(Emax) +
                  (std::log10(Emin) - std::log10(Emax)) * i / grid;
      double E = std::pow(10.0, lg);
      int N = 0;
      for (double mu : res.mu) N += (mu < 1.0 - E) ? 1 : 0;
      csv.row(lg, N, asymptotics::counting_asymptote(theta, E));
    }
  }
  double target = 1.0 / (4.0 * kPi * std::tan(theta));
  csv.comment("jumps: " + std::to_string(res.jumps_E.size()) +
              ", dofs: " + std::to_string(res.dofs) +
              ", factorizations: " + std::to_string(res.factorizations));
  csv.comment("slope=" + format_double(res.fit.slope) +
              " target=" + format_double(target) +
              " rel_err=" + format_double(res.fit.slope / target - 1.0));
  std::cout << "counting: wrote " << csv.path() << " (slope "
            << res.fit.slope << ", target " << target << ")\n";
  return 0;
}

int run_potential(const Config& cfg) {
  CsvFile csv(cfg, "potential.csv", "x, v, residual");
  const double a = -kPi * 1.41421356237309504880;
  for (int i = 0; i <= 2800; ++i) {
    double x = a + 0.005 + (10.0 - a - 0.005) * i / 2800.0;
    auto s = potential1d::effective_potential(x);
    csv.row(x, s.v, s.residual);
  }
  std::cout << "potential: wrote " << csv.path() << "\n";
  return 0;
}

int run_modes(const Config& cfg) {
  double theta = deg2rad(cfg.theta_single_deg);
  auto s = solve_meridian(theta, 0, cfg.truncation, cfg.mesh, cfg.solver.k,
                          cfg.solver.tol, cfg.solver.shift);
  std::filesystem::create_directories(cfg.out_dir);
  {
    std::ofstream os(cfg.out_dir + "/mesh.txt");
    geometry::write_mesh(os, s.mesh);
  }
  CsvFile manifest(cfg, "modes_manifest.csv", "n, mu, residual");
  for (int n = 0; n < cfg.solver.k; ++n) {
    manifest.row(n + 1, s.eig.values[n], s.eig.residuals[n]);
    CsvFile mode(cfg, "mode_" + std::to_string(n + 1) + ".csv",
                 "x y psi  (x=z, y=r, physical meridian coordinates)");
    Eigen::VectorXd full =
        assembly::expand(s.reduced, s.assembled.n_dofs, s.eig.vectors.col(n));
    for (int d = 0; d < s.assembled.n_dofs; ++d) {
      auto rz = geometry::to_cylindrical(s.assembled.dof_coords[d], theta);
      mode.row(rz.y, rz.x, full[d]);  // columns x=z, y=r
    }
  }
  std::cout << "modes: wrote " << cfg.solver.k << " mode files under "
            << cfg.out_dir << "\n";
  return 0;
}

int run_semicl(const Config& cfg) {
  CsvFile csv(cfg, "semiclassical.csv", "h, n, lambda, lambda_tri, expansion");
  for (double h : cfg.h_list) {
    auto gui = solve_scaled(geometry::Shape::ScaledGuide, h, cfg.truncation,
                            cfg.mesh, cfg.solver.k, cfg.solver.tol, 0.0);
    auto tri = solve_scaled(geometry::Shape::ScaledTriangle, h, cfg.truncation,
                            cfg.mesh, cfg.solver.k, cfg.solver.tol, 0.0);
    for (int n = 0; n < cfg.solver.k; ++n)
      csv.row(h, n + 1, gui.eig.values[n], tri.eig.values[n],
              asymptotics::lambda_delta_expansion(n + 1, h));
  }
  std::cout << "semicl: wrote " << csv.path() << "\n";
  return 0;
}

int run_agmon(const Config& cfg) {
  CsvFile csv(cfg, "agmon.csv", "h, agmon_ratio, clamped");
  asymptotics::AgmonWeightParams params;
  params.x1 = potential1d::x1_grid_verified();
  params.amplitude_floor = 1e-8;
  csv.comment("amplitude_floor=1e-8 (sub-noise quadrature points excluded)");
  for (double h : cfg.h_list) {
    MeshConfig mc = cfg.mesh;
    mc.h_near = std::max(0.03, std::cbrt(h * h) / 4.0);
    auto gui = solve_scaled(geometry::Shape::ScaledGuide, h, cfg.truncation, mc,
                            1, cfg.solver.tol, 0.0);
    Eigen::VectorXd full = assembly::expand(gui.reduced, gui.assembled.n_dofs,
                                            gui.eig.vectors.col(0));
    auto res = asymptotics::agmon_ratio(gui.mesh, gui.assembled, full, h, params);
    csv.row(h, res.ratio, res.clamped ? 1 : 0);
  }
  std::cout << "agmon: wrote " << csv.path() << "\n";
  return 0;
}

}  // namespace

int run_experiment(const Config& cfg) {
  if (cfg.experiment == "sweep") return run_sweep(cfg);
  if (cfg.experiment == "counting") return run_counting(cfg);
  if (cfg.experiment == "potential") return run_potential(cfg);
  if (cfg.experiment == "modes") return run_modes(cfg);
  if (cfg.experiment == "semicl") return run_semicl(cfg);
  if (cfg.experiment == "agmon") return run_agmon(cfg);
  if (cfg.experiment == "verify") return verify::run_and_report(cfg);
  throw std::invalid_argument("unknown experiment: " + cfg.experiment);
}

}  // namespace conilay::experiments
