#include "crvex/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace crvex {

void write_mesh(std::ostream& os, const Triangulation& mesh) {
  os << mesh.num_vertices() << ' ' << mesh.num_sides() << ' ' << mesh.num_elements() << '\n';
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& v : mesh.vertices()) os << v.x() << ' ' << v.y() << '\n';
  for (int s = 0; s < mesh.num_sides(); ++s) {
    const int label = mesh.is_boundary_side(s) ? static_cast<int>(mesh.boundary_labels()[s]) : 0;
    os << mesh.sides()[s][0] << ' ' << mesh.sides()[s][1] << ' ' << label << '\n';
  }
  for (const auto& e : mesh.elements()) os << e[0] << ' ' << e[1] << ' ' << e[2] << '\n';
}

Triangulation read_mesh(std::istream& is, int level) {
  int nv = 0, ns = 0, nt = 0;
  if (!(is >> nv >> ns >> nt) || nv < 3 || ns < 3 || nt < 1) {
    throw std::runtime_error("mesh: bad header");
  }
  std::vector<Vec2> vertices(nv);
  for (auto& v : vertices) {
    if (!(is >> v.x() >> v.y())) throw std::runtime_error("mesh: bad vertex line");
  }
  std::map<std::pair<int, int>, BoundaryLabel> labels;
  for (int s = 0; s < ns; ++s) {
    int a = 0, b = 0, label = 0;
    if (!(is >> a >> b >> label) || label < 0 || label > 2) {
      throw std::runtime_error("mesh: bad side line");
    }
    labels[{std::min(a, b), std::max(a, b)}] = static_cast<BoundaryLabel>(label);
  }
  std::vector<std::array<int, 3>> elements(nt);
  for (auto& e : elements) {
    if (!(is >> e[0] >> e[1] >> e[2])) throw std::runtime_error("mesh: bad element line");
    for (int v : e) {
      if (v < 0 || v >= nv) throw std::runtime_error("mesh: vertex index out of range");
    }
  }
  auto mesh = Triangulation::from_elements(
      std::move(vertices), std::move(elements),
      [&](int a, int b) {
        auto it = labels.find({std::min(a, b), std::max(a, b)});
        if (it == labels.end() || it->second == BoundaryLabel::Interior) {
          throw std::runtime_error("mesh: boundary side without a boundary label");
        }
        return it->second;
      },
      level);
  if (mesh.num_sides() != ns) throw std::runtime_error("mesh: side count mismatch");
  for (const auto& side : mesh.sides()) {
    if (!labels.count({side[0], side[1]})) throw std::runtime_error("mesh: side list mismatch");
  }
  mesh.validate();
  return mesh;
}

void write_field(std::ostream& os, const ExportedField& field) {
  os << field.space << ' ' << field.level << ' ' << field.values.size() << '\n';
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (double v : field.values) os << v << '\n';
}

ExportedField read_field(std::istream& is) {
  static const std::set<std::string> tags{"CR", "P1", "RT0", "RT0B", "P0"};
  ExportedField f;
  std::size_t n = 0;
  if (!(is >> f.space >> f.level >> n) || !tags.count(f.space)) {
    throw std::runtime_error("field: bad header");
  }
  f.values.resize(n);
  for (auto& v : f.values) {
    if (!(is >> v)) throw std::runtime_error("field: truncated values");
  }
  return f;
}

ExportedField export_field(const ElementwiseRT0& z, int level) {
  ExportedField f{"RT0B", level, {}};
  f.values.reserve(3 * z.a.size());
  for (std::size_t t = 0; t < z.a.size(); ++t) {
    f.values.push_back(z.a[t].x());
    f.values.push_back(z.a[t].y());
    f.values.push_back(z.b[t]);
  }
  return f;
}

ElementwiseRT0 import_elementwise(const ExportedField& field) {
  if (field.space != "RT0B" || field.values.size() % 3 != 0) {
    throw std::runtime_error("field: not an element-wise RT0 field");
  }
  ElementwiseRT0 z;
  const std::size_t nt = field.values.size() / 3;
  for (std::size_t t = 0; t < nt; ++t) {
    z.a.emplace_back(field.values[3 * t], field.values[3 * t + 1]);
    z.b.push_back(field.values[3 * t + 2]);
  }
  return z;
}

namespace {

std::vector<double> number_list(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>()};
  return j.get<std::vector<double>>();
}

}  // namespace

StudyConfig read_study_config(std::istream& is, StudyConfig base) {
  const auto j = nlohmann::json::parse(is);
  if (!j.is_object()) throw std::runtime_error("config: expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "p_min") base.p_min = number_list(value);
    else if (key == "alpha") base.alpha = number_list(value);
    else if (key == "eps") base.eps = number_list(value);
    else if (key == "delta") base.delta = value.get<double>();
    else if (key == "beta") base.beta = value.get<double>();
    else if (key == "levels") base.levels = value.get<int>();
    else if (key == "n0") base.n0 = value.get<int>();
    else if (key == "format") base.format = value.get<std::string>();
    else if (key == "out") base.out = value.get<std::string>();
    else if (key == "threads") base.threads = value.get<int>();
    else if (key == "seed") base.seed = value.get<std::uint64_t>();
    else if (key == "solver") {
      for (const auto& [k, v] : value.items()) {
        auto& s = base.solver;
        if (k == "abs_tol") s.abs_tol = v.get<double>();
        else if (k == "rel_tol") s.rel_tol = v.get<double>();
        else if (k == "max_newton_iters") s.max_newton_iters = v.get<int>();
        else if (k == "armijo") s.armijo = v.get<double>();
        else if (k == "backtrack") s.backtrack = v.get<double>();
        else if (k == "max_halvings") s.max_halvings = v.get<int>();
        else if (k == "linear_tol") s.linear_tol = v.get<double>();
        else throw std::runtime_error("config: unknown solver key '" + k + "'");
      }
    } else {
      throw std::runtime_error("config: unknown key '" + key + "'");
    }
  }
  base.validate();
  return base;
}

}  // namespace crvex
