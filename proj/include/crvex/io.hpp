#pragma once

#include "crvex/fem.hpp"
#include "crvex/mesh.hpp"
#include "crvex/study.hpp"

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace crvex {

/// Plain-text mesh: a header line "V S T", V lines "x y", S lines
/// "v0 v1 label" (0 interior, 1 Dirichlet, 2 Neumann), T lines "v0 v1 v2".
void write_mesh(std::ostream& os, const Triangulation& mesh);
/// Throws std::runtime_error on malformed input or a side list that does not
/// match the element topology.
Triangulation read_mesh(std::istream& is, int level = 0);

/// Exported field: a line "<space> <level> <count>", then one value per line.
/// Space tags: CR, P1, RT0 (side fluxes), P0 (element values) and RT0B
/// (element-wise RT0, three values a_x a_y b per element).
struct ExportedField {
  std::string space;
  int level = 0;
  std::vector<double> values;
};

void write_field(std::ostream& os, const ExportedField& field);
ExportedField read_field(std::istream& is);

ExportedField export_field(const ElementwiseRT0& z, int level);
ElementwiseRT0 import_elementwise(const ExportedField& field);

/// Reads a JSON study configuration whose keys mirror the CLI flags
/// (p_min, alpha, eps, delta, beta, levels, n0, format, out, threads, seed,
/// and an optional "solver" object). Unknown keys are rejected.
StudyConfig read_study_config(std::istream& is, StudyConfig base = {});

}  // namespace crvex
