#pragma once

#include "crvex/study.hpp"

#include <ostream>
#include <vector>

namespace crvex {

/// One row per (triple, level) with errors, rates, solver statistics and the
/// duality audit (columns gap, div_res, proj_res, jump_res, fy_res).
void write_csv(std::ostream& os, const std::vector<ConvergenceReport>& reports);

/// EOC tables for e_F and e_F*, one pair per eps value: rows are levels,
/// columns are (alpha, p_min). Followed by an audit summary.
void write_markdown(std::ostream& os, const std::vector<ConvergenceReport>& reports);

}  // namespace crvex
