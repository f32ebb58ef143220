#include "crvex/duality.hpp"
#include "crvex/io.hpp"
#include "crvex/report.hpp"
#include "crvex/study.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace crvex;

namespace {

struct CaseFlags {
  double p_min = 1.5;
  double alpha = 1.0;
  double eps = 1.0;
  double delta = 1e-4;
  double beta = 1.01;
};

void add_case_flags(CLI::App* app, CaseFlags& f) {
  app->add_option("--p-min", f.p_min, "Lower exponent bound p-")->capture_default_str();
  app->add_option("--alpha", f.alpha, "Hoelder exponent of p")->capture_default_str();
  app->add_option("--eps", f.eps, "Amplitude of the exponent variation")->capture_default_str();
  app->add_option("--delta", f.delta, "Regularization delta")->capture_default_str();
  app->add_option("--beta", f.beta, "Exponent of the manufactured solution")->capture_default_str();
}

ManufacturedCase make_case(const CaseFlags& f) {
  ManufacturedCase c;
  c.beta = f.beta;
  c.delta = f.delta;
  c.exponent.p_min = f.p_min;
  c.exponent.alpha = f.alpha;
  c.exponent.eps = f.eps;
  c.exponent.validate();
  return c;
}

void print_audit(const DualityAudit& a) {
  std::cout << "primal energy     " << a.primal << '\n'
            << "dual energy       " << (a.dual_feasible ? std::to_string(a.dual) : "-inf") << '\n'
            << "relative gap      " << a.relative_gap << '\n'
            << "div residual      " << a.div_residual << '\n'
            << "proj residual     " << a.projection_residual << '\n'
            << "jump residual     " << a.normal_jump_residual << '\n'
            << "flux residual     " << a.side_flux_residual << '\n'
            << "F-Y residual      " << a.fenchel_young_residual << '\n';
}

template <class T>
T read_file(const std::string& path, T (*reader)(std::istream&)) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return reader(in);
}

void write_file(const std::filesystem::path& path, const ExportedField& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_field(out, f);
}

int run_study_command(StudyConfig config, bool serial) {
  if (serial) config.policy = ExecPolicy::Serial;
  const auto reports = run_study(config);
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!config.out.empty()) {
    file.open(config.out);
    if (!file) throw std::runtime_error("cannot write " + config.out);
    os = &file;
  }
  if (config.format == "markdown") {
    write_markdown(*os, reports);
  } else {
    write_csv(*os, reports);
  }
  bool all_ok = true;
  for (const auto& r : reports) {
    if (!r.ok()) {
      all_ok = false;
      std::cerr << "p-=" << r.p_min << " alpha=" << r.alpha << " eps=" << r.eps << ": "
                << (r.converged() ? "duality audit failed" : r.failure) << '\n';
    }
  }
  return all_ok ? 0 : 1;
}

int run_solve_command(const CaseFlags& flags, int n0, int level, const std::string& out_dir,
                      const SolverConfig& solver) {
  const auto c = make_case(flags);
  Triangulation mesh = build_criss_cross(n0, Rectangle{});
  for (int k = 0; k < level; ++k) mesh = red_refine(mesh);
  const auto metrics = compute_metrics(mesh);
  const CRSpace space(mesh, metrics);
  const auto exponents = discretize_exponent(c.exponent, metrics);
  const auto f_h = project_load(mesh, c, ExecPolicy::OpenMP);
  const auto sys = NonlinearSystem::crouzeix_raviart(space, exponents, c.delta, f_h,
                                                     ExecPolicy::OpenMP);
  SolveResult solved;
  try {
    solved = newton_solve(sys, solver);
  } catch (const ConvergenceError& err) {
    std::cerr << err.what() << '\n';
    return 1;
  }
  const CRField u{solved.u};
  const auto z = marini_flux(space, u, f_h, exponents, c.delta);
  const auto a = audit(space, u, z, f_h, exponents, c.delta);

  std::cout << "level " << level << ", " << mesh.num_elements() << " elements, "
            << space.dof_map().num_free() << " unknowns\n"
            << "Newton iterations " << solved.report.iterations << ", residual "
            << solved.report.residual << '\n'
            << "e_F               " << error_F(space, u, c, exponents) << '\n'
            << "e_F*              " << error_Fstar(mesh, metrics, z, c, exponents) << '\n';
  print_audit(a);

  if (!out_dir.empty()) {
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    {
      std::ofstream m(dir / "mesh.txt");
      write_mesh(m, mesh);
    }
    write_file(dir / "u.txt", {"CR", level, u.dofs});
    write_file(dir / "z.txt", export_field(z, level));
    write_file(dir / "f.txt", {"P0", level, f_h});
    std::cout << "fields written to " << dir.string() << '\n';
  }
  return a.passed() ? 0 : 1;
}

int run_verify_command(const CaseFlags& flags, const std::string& mesh_path,
                       const std::string& u_path, const std::string& z_path,
                       const std::string& f_path) {
  const auto c = make_case(flags);
  const auto u_field = read_file(u_path, &read_field);
  const auto z_field = read_file(z_path, &read_field);
  const auto f_field = read_file(f_path, &read_field);
  std::ifstream mesh_in(mesh_path);
  if (!mesh_in) throw std::runtime_error("cannot open " + mesh_path);
  const auto mesh = read_mesh(mesh_in, u_field.level);
  const auto metrics = compute_metrics(mesh);
  const CRSpace space(mesh, metrics);
  if (u_field.space != "CR" || static_cast<int>(u_field.values.size()) != mesh.num_sides()) {
    throw std::runtime_error("u must be a CR field on the mesh");
  }
  if (f_field.space != "P0" || static_cast<int>(f_field.values.size()) != mesh.num_elements()) {
    throw std::runtime_error("f must be a P0 field on the mesh");
  }
  ElementwiseRT0 z;
  if (z_field.space == "RT0B") {
    z = import_elementwise(z_field);
  } else if (z_field.space == "RT0") {
    z = to_elementwise(mesh, metrics, RT0Field{z_field.values});
  } else {
    throw std::runtime_error("z must be an RT0 or RT0B field");
  }
  if (static_cast<int>(z.a.size()) != mesh.num_elements()) {
    throw std::runtime_error("z does not match the mesh");
  }
  const auto exponents = discretize_exponent(c.exponent, metrics);
  const auto a = audit(space, CRField{u_field.values}, z, f_field.values, exponents, c.delta);
  print_audit(a);
  const bool ok = a.passed();
  std::cout << (ok ? "audit passed" : "audit FAILED") << '\n';
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crouzeix-Raviart solver for the variable-exponent Dirichlet problem"};
  app.require_subcommand(1);

  // study
  auto* study = app.add_subcommand("study", "Convergence study over a parameter grid");
  StudyConfig sc;
  std::string config_path;
  bool serial = false;
  auto* o_pmin = study->add_option("--p-min", sc.p_min, "Comma-separated p- values")->delimiter(',');
  auto* o_alpha = study->add_option("--alpha", sc.alpha, "Comma-separated alpha values")->delimiter(',');
  auto* o_eps = study->add_option("--eps", sc.eps, "Comma-separated eps values")->delimiter(',');
  auto* o_delta = study->add_option("--delta", sc.delta, "Regularization delta");
  auto* o_beta = study->add_option("--beta", sc.beta, "Exponent of the manufactured solution");
  auto* o_levels = study->add_option("--levels", sc.levels, "Number of refinement levels");
  auto* o_n0 = study->add_option("--n0", sc.n0, "Cells per direction of the initial mesh");
  auto* o_format = study->add_option("--format", sc.format, "csv or markdown")
                       ->check(CLI::IsMember({"csv", "markdown"}));
  auto* o_out = study->add_option("--out", sc.out, "Output file (default stdout)");
  auto* o_threads = study->add_option("--threads", sc.threads, "OpenMP threads (0: default)");
  study->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  study->add_flag("--serial", serial, "Run all loops serially");

  // solve
  auto* solve = app.add_subcommand("solve", "Solve one configuration and export the fields");
  CaseFlags solve_flags;
  int solve_level = 3, solve_n0 = 2;
  std::string out_dir;
  SolverConfig solver;
  add_case_flags(solve, solve_flags);
  solve->add_option("--level", solve_level, "Refinement level")->capture_default_str();
  solve->add_option("--n0", solve_n0, "Cells per direction of the initial mesh")->capture_default_str();
  solve->add_option("--abs-tol", solver.abs_tol, "Newton absolute tolerance")->capture_default_str();
  solve->add_option("--rel-tol", solver.rel_tol, "Newton relative tolerance")->capture_default_str();
  solve->add_option("--export", out_dir, "Directory for mesh.txt, u.txt, z.txt, f.txt");

  // verify
  auto* verify = app.add_subcommand("verify", "Duality audit of exported fields");
  CaseFlags verify_flags;
  std::string mesh_path, u_path, z_path, f_path;
  add_case_flags(verify, verify_flags);
  verify->add_option("--mesh", mesh_path, "Mesh file")->required()->check(CLI::ExistingFile);
  verify->add_option("--u", u_path, "CR solution")->required()->check(CLI::ExistingFile);
  verify->add_option("--z", z_path, "Flux (RT0 or RT0B)")->required()->check(CLI::ExistingFile);
  verify->add_option("--f", f_path, "Projected load (P0)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*study) {
      StudyConfig config;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        config = read_study_config(in);
      }
      if (o_pmin->count()) config.p_min = sc.p_min;
      if (o_alpha->count()) config.alpha = sc.alpha;
      if (o_eps->count()) config.eps = sc.eps;
      if (o_delta->count()) config.delta = sc.delta;
      if (o_beta->count()) config.beta = sc.beta;
      if (o_levels->count()) config.levels = sc.levels;
      if (o_n0->count()) config.n0 = sc.n0;
      if (o_format->count()) config.format = sc.format;
      if (o_out->count()) config.out = sc.out;
      if (o_threads->count()) config.threads = sc.threads;
      return run_study_command(config, serial);
    }
    if (*solve) return run_solve_command(solve_flags, solve_n0, solve_level, out_dir, solver);
    if (*verify) return run_verify_command(verify_flags, mesh_path, u_path, z_path, f_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
