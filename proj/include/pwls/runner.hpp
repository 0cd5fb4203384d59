#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "pwls/assembly.hpp"
#include "pwls/config.hpp"
#include "pwls/reference.hpp"
#include "pwls/solution_io.hpp"
#include "pwls/solver.hpp"

namespace pwls {

struct ResultRow {
  std::string variant;
  double omega = 0.0;
  int q = 0;
  int p = 0;
  double h = 0.0;
  int n_elements = 0;
  long long dofs = 0;
  double error = std::numeric_limits<double>::quiet_NaN();  // rel_l2_error or vertex_error
  double residual = std::numeric_limits<double>::quiet_NaN();
  double assembly_seconds = 0.0;
  double solve_seconds = 0.0;
  double regularization_used = 0.0;
  std::string status = "ok";  // anything else marks a failed or degraded triple

  bool failed() const { return status.rfind("error", 0) == 0; }
};

// Experiment-wide state resolved once: the field errors are measured
// against (if any) and the field that generates g.
struct ExperimentContext {
  std::optional<ExactField> reference;
  std::optional<ExactField> boundary_field;
  std::string custom_g;
  std::string note;  // set when the reference was dropped (failed PDE gate)
};

// Maximum relative Maxwell residual over `count` random points of the box.
inline double pde_gate_residual(const ExactField& f, const Box& box, double omega, cplx eps, double mu, int count = 50,
                                unsigned seed = 7) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const Vec3 t(u(rng), u(rng), u(rng));
    const Vec3 x = box.min_corner + t.cwiseProduct(box.extent());
    worst = std::max(worst, maxwell_residual(f.eval, x, omega, eps, mu));
  }
  return worst;
}

inline constexpr double pde_gate_tolerance = 1e-5;

inline ExperimentContext make_context(const ExperimentConfig& cfg) {
  ExperimentContext ctx;
  const BoundarySource& b = cfg.exact.boundary;
  const cplx eps0 = cfg.epsilon.is_constant() ? std::get<cplx>(cfg.epsilon.data) : cplx{1.0, 0.0};
  switch (b.kind) {
    case ExactKind::dipole: {
      DipoleParams prm = b.dipole;
      if (!b.dipole_epsilon_given && cfg.epsilon.is_constant()) prm.epsilon = eps0;
      prm.omega = cfg.omega;
      prm.mu = cfg.mu;
      ctx.boundary_field = make_dipole(prm);
      break;
    }
    case ExactKind::trig: {
      ctx.boundary_field = make_trig(cfg.omega, eps0, cfg.mu);
      break;
    }
    case ExactKind::plane_wave:
      ctx.boundary_field = make_plane_wave(cfg.omega * std::sqrt(cfg.mu * eps0), cfg.mu, b.wave_q, b.wave_index);
      break;
    case ExactKind::custom_g:
    case ExactKind::reference_file:
      ctx.custom_g = b.custom_name;
      break;
  }

  if (cfg.exact.kind == ExactKind::reference_file) {
    SolutionExpectations ex;
    ex.domain = cfg.domain;
    ex.omega = cfg.omega;
    ex.mu = cfg.mu;
    ex.epsilon = cfg.epsilon;
    ctx.reference = as_exact_field(load_solution(cfg.exact.reference_path, ex));
  } else if (b.kind == ExactKind::trig) {
    // the trig field is only trusted as an exact solution if it passes the
    // Maxwell residual check; otherwise it only supplies boundary data
    const double res = pde_gate_residual(*ctx.boundary_field, cfg.domain, cfg.omega, eps0, cfg.mu);
    if (res <= pde_gate_tolerance) {
      ctx.reference = ctx.boundary_field;
    } else {
      ctx.note = "boundary data only: trig field Maxwell residual " + std::to_string(res);
    }
  } else if (b.kind == ExactKind::dipole) {
    // a dipole in a homogeneous medium of another permittivity (or in a
    // layered one) only generates boundary data
    const bool matches = cfg.epsilon.is_constant() && (!b.dipole_epsilon_given || b.dipole.epsilon == eps0);
    if (matches) ctx.reference = ctx.boundary_field;
    else ctx.note = "boundary data only: dipole permittivity differs from the medium";
  } else if (b.kind == ExactKind::plane_wave) {
    ctx.reference = ctx.boundary_field;
  }
  return ctx;
}

inline BoundaryData boundary_data_for(const ExperimentContext& ctx, const MaterialField& field, double omega) {
  if (ctx.boundary_field) return boundary_data_from(*ctx.boundary_field, field, omega);
  if (ctx.custom_g == "linear")
    return [](const Vec3& x, const Vec3&, int) { return CVec3(x.x(), x.y(), x.x() + x.y() + x.z()); };
  return [](const Vec3&, const Vec3&, int) { return CVec3(CVec3::Zero()); };
}

// Everything built for one (variant, q, n) triple.
struct TripleRun {
  Variant variant;
  int q;
  Mesh mesh;
  MaterialField field;
  std::vector<PWBasis> bases;
  PenaltyWeights weights;
  BoundaryData g;
  int n1d = 0;
  HermitianBlockSystem sys;
  SolveReport report;
  double assembly_seconds = 0.0;
  double solve_seconds = 0.0;
};

inline int quadrature_order_for(const ExperimentConfig& cfg, const MaterialField& field, int q, double h) {
  if (cfg.quadrature_override) return *cfg.quadrature_override;
  double kmax = 0.0;
  for (int k = 0; k < field.size(); ++k) kmax = std::max(kmax, std::abs(kappa_of(field, k, cfg.omega)));
  return default_quadrature_order(q, kmax, h);
}

inline std::unique_ptr<TripleRun> build_and_solve(const ExperimentConfig& cfg, const ExperimentContext& ctx,
                                                  Variant variant, int q, int n) {
  using clock = std::chrono::steady_clock;
  Mesh mesh(cfg.domain, n);
  MaterialField field = MaterialField::from_spec(mesh, cfg.epsilon, cfg.mu);
  auto run = std::unique_ptr<TripleRun>(new TripleRun{variant, q, std::move(mesh), std::move(field), {}, {}, {}, 0,
                                                      HermitianBlockSystem(1, 1), {}, 0.0, 0.0});
  const auto t0 = clock::now();
  run->bases = build_bases(run->field, q, cfg.omega);
  run->weights = penalty_parameters(run->field, variant);
  run->g = boundary_data_for(ctx, run->field, cfg.omega);
  run->n1d = quadrature_order_for(cfg, run->field, q, run->mesh.h());
  run->sys = assemble_system(run->mesh, run->field, run->bases, cfg.omega, run->weights, run->g, run->n1d);
  const auto t1 = clock::now();
  run->report = solve(run->sys, cfg.solver);
  const auto t2 = clock::now();
  run->assembly_seconds = std::chrono::duration<double>(t1 - t0).count();
  run->solve_seconds = std::chrono::duration<double>(t2 - t1).count();
  return run;
}

inline double measure_error(const ExperimentConfig& cfg, const ExactField& ref, const TripleRun& run) {
  if (cfg.metric == ErrorMetric::vertex) return vertex_error(run.mesh, run.report.X, run.bases, ref);
  return relative_l2_error(run.mesh, run.report.X, run.bases, ref, std::min(32, run.n1d + 4));
}

inline std::string solution_file_name(Variant v, int q, int n) {
  return std::string(to_string(v)) + "_q" + std::to_string(q) + "_n" + std::to_string(n) + ".sol";
}

struct SweepEntry {
  Variant variant;
  int q;
  int n;
};

/// Sweep order: variant, then q, then n (as listed in the config).
inline std::vector<SweepEntry> sweep_order(const ExperimentConfig& cfg) {
  std::vector<SweepEntry> out;
  for (Variant v : cfg.variants)
    for (int q : cfg.q_list)
      for (int n : cfg.subdivisions) out.push_back({v, q, n});
  return out;
}

/// One row of the sweep. If `keep` is given the assembled system and
/// solution are handed back for further checks.
inline ResultRow run_triple(const ExperimentConfig& cfg, const ExperimentContext& ctx, const SweepEntry& e,
                            std::unique_ptr<TripleRun>* keep = nullptr) {
  ResultRow row;
  row.variant = to_string(e.variant);
  row.omega = cfg.omega;
  row.q = e.q;
  row.p = (e.q + 1) * (e.q + 1);
  row.h = cfg.domain.extent().x() / e.n;
  row.n_elements = e.n * e.n * e.n;
  row.dofs = 2LL * row.p * row.n_elements;
  try {
    auto run = build_and_solve(cfg, ctx, e.variant, e.q, e.n);
    row.residual = run->report.relative_residual;
    row.regularization_used = run->report.regularization_used;
    row.assembly_seconds = run->assembly_seconds;
    row.solve_seconds = run->solve_seconds;
    if (ctx.reference) {
      row.error = measure_error(cfg, *ctx.reference, *run);
    } else {
      row.status = ctx.note.empty() ? "no reference field" : ctx.note;
    }
    if (!cfg.save_solutions.empty()) {
      std::filesystem::create_directories(cfg.save_solutions);
      SolutionMeta meta{cfg.domain, e.n, e.q, cfg.omega, cfg.mu, cfg.epsilon, to_string(e.variant)};
      save_solution((std::filesystem::path(cfg.save_solutions) / solution_file_name(e.variant, e.q, e.n)).string(),
                    meta, run->report.X);
    }
    if (keep) *keep = std::move(run);
  } catch (const std::exception& ex) {
    row.status = std::string("error: ") + ex.what();
  }
  return row;
}

/// Runs every triple; a failing triple yields a row with an error status and
/// the sweep goes on. Rows come back in sweep order whatever the thread count.
inline std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  const ExperimentContext ctx = make_context(cfg);
  const auto entries = sweep_order(cfg);
  std::vector<ResultRow> rows(entries.size());
  const int nthreads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(entries.size())));
  if (nthreads == 1) {
    for (size_t i = 0; i < entries.size(); ++i) rows[i] = run_triple(cfg, ctx, entries[i]);
    return rows;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t)
    pool.emplace_back([&] {
      for (size_t i = next++; i < entries.size(); i = next++) rows[i] = run_triple(cfg, ctx, entries[i]);
    });
  for (auto& th : pool) th.join();
  return rows;
}

// ---- CSV -----------------------------------------------------------------

inline std::string csv_header(ErrorMetric metric = ErrorMetric::l2) {
  return std::string("variant,omega,q,p,h,n_elements,dofs,") +
         (metric == ErrorMetric::l2 ? "rel_l2_error" : "vertex_error") +
         ",residual,assembly_seconds,solve_seconds,regularization_used,status";
}

inline std::string csv_line(const ResultRow& r) {
  auto g6 = [](double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.6g", v);
    return std::string(b);
  };
  auto e6 = [](double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.5e", v);
    return std::string(b);
  };
  std::string status = r.status;
  std::replace(status.begin(), status.end(), ',', ';');
  std::replace(status.begin(), status.end(), '\n', ' ');
  return r.variant + "," + g6(r.omega) + "," + std::to_string(r.q) + "," + std::to_string(r.p) + "," + g6(r.h) + "," +
         std::to_string(r.n_elements) + "," + std::to_string(r.dofs) + "," + e6(r.error) + "," + e6(r.residual) + "," +
         g6(r.assembly_seconds) + "," + g6(r.solve_seconds) + "," + g6(r.regularization_used) + "," + status;
}

inline void emit_csv(const std::vector<ResultRow>& rows, const std::string& path, ErrorMetric metric = ErrorMetric::l2) {
  if (rows.empty()) throw Error("emit_csv: no rows");
  std::ofstream out(path);
  if (!out) throw Error("emit_csv: cannot write " + path);
  out << csv_header(metric) << '\n';
  for (const auto& r : rows) out << csv_line(r) << '\n';
  if (!out) throw Error("emit_csv: write failed for " + path);
}

// ---- verify ----------------------------------------------------------------

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

inline CVector random_cvector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = {nd(rng), nd(rng)};
  return v;
}

// Structure and quadratic-form checks on one assembled system.
inline std::vector<CheckResult> check_system(const HermitianBlockSystem& sys, const std::string& tag, int samples,
                                             std::mt19937_64& rng) {
  std::vector<CheckResult> out;
  bool herm = true;
  for (int k = 0; k < sys.num_elements() && herm; ++k) herm = sys.diagonal(k) == sys.diagonal(k).adjoint();
  out.push_back({tag + " diagonal blocks Hermitian", herm, ""});

  const double fro = sys.frobenius_norm();
  double worst_re = std::numeric_limits<double>::infinity(), worst_im = 0.0;
  for (int s = 0; s < samples; ++s) {
    const CVector x = random_cvector(sys.dimension(), rng);
    const cplx form = x.dot(sys.apply(x));  // x^H A x
    const double scale = fro * x.squaredNorm();
    worst_re = std::min(worst_re, form.real() / scale);
    worst_im = std::max(worst_im, std::abs(form.imag()) / scale);
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "min Re/(|A|F|x|^2) = %.2e, max |Im|/(|A|F|x|^2) = %.2e", worst_re, worst_im);
  out.push_back({tag + " x^H A x real and non-negative", worst_re >= -1e-10 && worst_im <= 1e-10, buf});
  return out;
}

inline CheckResult check_galerkin(const HermitianBlockSystem& sys, const CVector& X, const std::string& tag,
                                  int samples, std::mt19937_64& rng) {
  const CVector r = sys.apply(X) - sys.rhs();
  const double bn = sys.rhs().norm();
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const CVector y = random_cvector(sys.dimension(), rng);
    worst = std::max(worst, std::abs(y.dot(r)) / (y.norm() * std::max(bn, std::numeric_limits<double>::min())));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max |y^H(AX-b)|/(|y||b|) = %.2e", worst);
  return {tag + " Galerkin orthogonality", worst <= 1e-8, buf};
}

// Ordering checks over a finished sweep.
inline std::vector<CheckResult> check_sweep(const ExperimentConfig& cfg, const std::vector<ResultRow>& rows) {
  std::vector<CheckResult> out;
  auto find = [&](const std::string& v, int q, int n) -> const ResultRow* {
    for (const auto& r : rows)
      if (r.variant == v && r.q == q && r.n_elements == n * n * n) return &r;
    return nullptr;
  };
  auto usable = [](const ResultRow* r) { return r && !r->failed() && std::isfinite(r->error); };
  char buf[160];

  for (const auto& r : rows) {
    const int n = static_cast<int>(std::lround(std::cbrt(r.n_elements)));
    out.push_back({r.variant + " q=" + std::to_string(r.q) + " n=" + std::to_string(n) + " solved", !r.failed(), r.status});
  }

  std::vector<int> ns = cfg.subdivisions;
  std::sort(ns.begin(), ns.end());
  for (Variant v : cfg.variants)
    for (int q : cfg.q_list)
      for (size_t i = 1; i < ns.size(); ++i) {
        const ResultRow* a = find(to_string(v), q, ns[i - 1]);
        const ResultRow* b = find(to_string(v), q, ns[i]);
        if (!usable(a) || !usable(b)) continue;
        std::snprintf(buf, sizeof buf, "n=%d: %.4e, n=%d: %.4e", ns[i - 1], a->error, ns[i], b->error);
        out.push_back({std::string(to_string(v)) + " q=" + std::to_string(q) + " error decreases under h-refinement",
                       b->error < a->error, buf});
      }

  std::vector<int> qs = cfg.q_list;
  std::sort(qs.begin(), qs.end());
  for (Variant v : cfg.variants)
    for (int n : cfg.subdivisions)
      for (size_t i = 1; i < qs.size(); ++i) {
        const ResultRow* a = find(to_string(v), qs[i - 1], n);
        const ResultRow* b = find(to_string(v), qs[i], n);
        if (!usable(a) || !usable(b)) continue;
        std::snprintf(buf, sizeof buf, "q=%d: %.4e, q=%d: %.4e", qs[i - 1], a->error, qs[i], b->error);
        out.push_back({std::string(to_string(v)) + " n=" + std::to_string(n) + " error decreases under p-refinement",
                       b->error < a->error, buf});
      }

  for (int q : cfg.q_list)
    for (int n : cfg.subdivisions) {
      const ResultRow* a = find("new", q, n);
      const ResultRow* b = find("old", q, n);
      if (!usable(a) || !usable(b)) continue;
      std::snprintf(buf, sizeof buf, "new %.4e, old %.4e", a->error, b->error);
      out.push_back({"q=" + std::to_string(q) + " n=" + std::to_string(n) + " new <= 1.05 old",
                     a->error <= 1.05 * b->error, buf});
    }
  return out;
}

/// Invariant suite for a config: per-triple algebraic checks, a repeat solve
/// of the first triple for determinism, then ordering checks on the errors.
inline std::vector<CheckResult> verify_experiment(const ExperimentConfig& cfg, int samples = 20) {
  std::vector<CheckResult> out;
  const ExperimentContext ctx = make_context(cfg);
  std::mt19937_64 rng(12345);
  std::vector<ResultRow> rows;
  bool first = true;
  for (const auto& e : sweep_order(cfg)) {
    const std::string tag =
        std::string(to_string(e.variant)) + " q=" + std::to_string(e.q) + " n=" + std::to_string(e.n);
    std::unique_ptr<TripleRun> run;
    ResultRow row = run_triple(cfg, ctx, e, &run);
    if (run) {
      try {
        for (auto& c : check_system(run->sys, tag, samples, rng)) out.push_back(std::move(c));
        out.push_back(check_galerkin(run->sys, run->report.X, tag, samples, rng));
        if (first) {
          const SolveReport again = solve(run->sys, cfg.solver);
          out.push_back({tag + " repeated solve is bitwise identical", again.X == run->report.X, ""});
          first = false;
        }
      } catch (const std::exception& ex) {
        out.push_back({tag + " checks", false, ex.what()});
      }
    }
    rows.push_back(std::move(row));
  }
  for (auto& c : check_sweep(cfg, rows)) out.push_back(std::move(c));
  return out;
}

}  // namespace pwls
