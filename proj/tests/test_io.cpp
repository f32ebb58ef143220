#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crvex/io.hpp"
#include "crvex/report.hpp"
#include "problem.hpp"

#include <sstream>

using namespace crvex;
using crvex::testing::Problem;

TEST_CASE("mesh round trip is exact") {
  const Triangulation mesh = red_refine(build_criss_cross(
      2, Rectangle{}, dirichlet_where([](const Vec2& m) { return m.x() < 0.99; })));
  std::stringstream ss;
  write_mesh(ss, mesh);
  const Triangulation back = read_mesh(ss, 1);
  CHECK(back.level() == 1);
  CHECK(back.vertices() == mesh.vertices());
  CHECK(back.elements() == mesh.elements());
  CHECK(back.sides() == mesh.sides());
  CHECK(back.side_elements() == mesh.side_elements());
  CHECK(back.boundary_labels() == mesh.boundary_labels());
  int neumann = 0;
  for (auto l : back.boundary_labels()) neumann += l == BoundaryLabel::Neumann;
  CHECK(neumann == 4);
}

TEST_CASE("malformed meshes are rejected") {
  const Triangulation mesh = build_criss_cross(1, Rectangle{});
  std::stringstream ss;
  write_mesh(ss, mesh);
  const std::string text = ss.str();

  auto reject = [](const std::string& s) {
    std::istringstream in(s);
    CHECK_THROWS_AS(read_mesh(in), std::runtime_error);
  };
  reject("");
  reject("4 5");
  reject(text.substr(0, text.size() / 2));
  // wrong side count in the header
  std::string bad = text;
  bad.replace(0, bad.find('\n'), "4 6 2");
  reject(bad);
  // a vertex index out of range
  bad = text;
  bad.replace(bad.rfind('\n', bad.size() - 2) + 1, std::string::npos, "0 1 9\n");
  reject(bad);
}

TEST_CASE("field round trips") {
  const Problem P(2, {1.5, 0.5, 1.0});
  const auto sol = P.solve();
  const CRField u{sol.u};
  const auto z = P.flux(u);

  std::stringstream ss;
  write_field(ss, {"CR", 2, u.dofs});
  const ExportedField uf = read_field(ss);
  CHECK(uf.space == "CR");
  CHECK(uf.level == 2);
  CHECK(uf.values == u.dofs);

  std::stringstream zs;
  write_field(zs, export_field(z, 2));
  const ExportedField zf = read_field(zs);
  CHECK(zf.space == "RT0B");
  const ElementwiseRT0 back = import_elementwise(zf);
  CHECK(back.a == z.a);
  CHECK(back.b == z.b);

  // the audit of the re-imported fields is identical
  const auto a0 = audit(*P.space, u, z, P.f_h, P.exponents, P.c.delta);
  const auto a1 = audit(*P.space, CRField{uf.values}, back, P.f_h, P.exponents, P.c.delta);
  CHECK(a0.primal == a1.primal);
  CHECK(a0.dual == a1.dual);
  CHECK(a1.passed());
}

TEST_CASE("malformed fields are rejected") {
  std::istringstream truncated("CR 1 3\n0.5\n0.25\n");
  CHECK_THROWS_AS(read_field(truncated), std::runtime_error);
  std::istringstream header("CR x\n");
  CHECK_THROWS_AS(read_field(header), std::runtime_error);
  CHECK_THROWS_AS(import_elementwise({"CR", 0, {1.0, 2.0, 3.0}}), std::runtime_error);
  CHECK_THROWS_AS(import_elementwise({"RT0B", 0, {1.0, 2.0}}), std::runtime_error);
}

TEST_CASE("JSON study configuration") {
  std::istringstream in(R"({
    "p_min": [1.5, 2.0], "alpha": 0.25, "eps": [0.5],
    "delta": 1e-3, "beta": 1.1, "levels": 3, "n0": 4,
    "format": "markdown", "out": "r.md", "threads": 2, "seed": 7,
    "solver": {"abs_tol": 1e-9, "max_newton_iters": 20}
  })");
  const StudyConfig c = read_study_config(in);
  CHECK(c.p_min == std::vector<double>{1.5, 2.0});
  CHECK(c.alpha == std::vector<double>{0.25});
  CHECK(c.eps == std::vector<double>{0.5});
  CHECK(c.delta == 1e-3);
  CHECK(c.beta == 1.1);
  CHECK(c.levels == 3);
  CHECK(c.n0 == 4);
  CHECK(c.format == "markdown");
  CHECK(c.out == "r.md");
  CHECK(c.threads == 2);
  CHECK(c.seed == 7);
  CHECK(c.solver.abs_tol == 1e-9);
  CHECK(c.solver.max_newton_iters == 20);
  CHECK(c.solver.rel_tol == SolverConfig{}.rel_tol);

  StudyConfig base;
  base.levels = 4;
  std::istringstream partial(R"({"eps": 0.5})");
  const StudyConfig d = read_study_config(partial, base);
  CHECK(d.levels == 4);
  CHECK(d.eps == std::vector<double>{0.5});
}

TEST_CASE("JSON configuration errors") {
  auto reject = [](const char* text) {
    std::istringstream in(text);
    CHECK_THROWS(read_study_config(in));
  };
  reject(R"({"levles": 3})");
  reject(R"({"solver": {"tol": 1e-3}})");
  reject(R"([1, 2])");
  reject(R"({"levels": 0})");
  reject(R"({"alpha": [2.0]})");
  reject(R"({"format": "xml"})");
  reject(R"({"levels": "six"})");
  reject("{");
}

TEST_CASE("markdown report has one EOC table pair per eps") {
  StudyConfig cfg;
  cfg.p_min = {2.0};
  cfg.eps = {0.5, 1.0};
  cfg.levels = 2;
  std::ostringstream os;
  write_markdown(os, run_study(cfg));
  const std::string md = os.str();
  auto count = [&](const std::string& needle) {
    int n = 0;
    for (auto pos = md.find(needle); pos != std::string::npos; pos = md.find(needle, pos + 1)) ++n;
    return n;
  };
  CHECK(count("### EOC of e_F,") == 2);
  CHECK(count("### EOC of e_F*,") == 2);
  CHECK(count("### Solver and duality audit") == 1);
}
