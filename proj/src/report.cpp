#include "crvex/report.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

namespace crvex {

namespace {

std::string num(double v, const char* fmt = "%.10e") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string rate(const std::optional<double>& v, const char* fmt = "%.4f") {
  return v ? num(*v, fmt) : std::string("-");
}

std::string short_num(double v) { return num(v, "%g"); }

}  // namespace

void write_csv(std::ostream& os, const std::vector<ConvergenceReport>& reports) {
  os << "p_min,alpha,eps,delta,beta,level,h,h_avg,elements,dofs,e_F,eoc_F,eoc_F_sq,e_Fstar,eoc_Fstar,"
        "eoc_Fstar_sq,"
        "newton_its,residual,gap,div_res,proj_res,jump_res,flux_res,fy_res,status\n";
  for (const auto& r : reports) {
    for (const auto& l : r.levels) {
      const bool solved = l.solve.converged;
      os << short_num(r.p_min) << ',' << short_num(r.alpha) << ',' << short_num(r.eps) << ','
         << short_num(r.delta) << ',' << short_num(r.beta) << ',' << l.level << ','
         << num(l.h) << ',' << num(l.h_avg) << ',' << l.elements << ',' << l.dofs << ',';
      if (solved) {
        os << num(l.e_F) << ',' << rate(l.eoc_F, "%.6f") << ','
           << rate(l.eoc_F_squared, "%.6f") << ',' << num(l.e_Fstar) << ','
           << rate(l.eoc_Fstar, "%.6f") << ',' << rate(l.eoc_Fstar_squared, "%.6f") << ',';
      } else {
        os << "-,-,-,-,-,-,";
      }
      os << l.solve.iterations << ',' << num(l.solve.residual, "%.3e") << ',';
      if (solved) {
        os << num(l.audit.relative_gap, "%.3e") << ',' << num(l.audit.div_residual, "%.3e")
           << ',' << num(l.audit.projection_residual, "%.3e") << ','
           << num(l.audit.normal_jump_residual, "%.3e") << ','
           << num(l.audit.side_flux_residual, "%.3e") << ','
           << num(l.audit.fenchel_young_residual, "%.3e") << ','
           << (l.audit_passed ? "ok" : "audit-failed");
      } else {
        os << "-,-,-,-,-,-,solver-failed";
      }
      os << '\n';
    }
  }
}

void write_markdown(std::ostream& os, const std::vector<ConvergenceReport>& reports) {
  std::vector<double> eps_values;
  for (const auto& r : reports) {
    if (std::find(eps_values.begin(), eps_values.end(), r.eps) == eps_values.end()) {
      eps_values.push_back(r.eps);
    }
  }
  int max_level = 0;
  for (const auto& r : reports) max_level = std::max(max_level, static_cast<int>(r.levels.size()));

  for (double eps : eps_values) {
    std::vector<const ConvergenceReport*> cols;
    for (const auto& r : reports) {
      if (r.eps == eps) cols.push_back(&r);
    }
    for (int which = 0; which < 2; ++which) {
      os << "### EOC of " << (which == 0 ? "e_F" : "e_F*") << ", eps = " << short_num(eps)
         << ", delta = " << short_num(cols.front()->delta) << "\n\n";
      os << "| k |";
      for (const auto* c : cols) {
        os << " a=" << short_num(c->alpha) << ", p-=" << short_num(c->p_min) << " |";
      }
      os << "\n|---|";
      for (std::size_t i = 0; i < cols.size(); ++i) os << "---|";
      os << '\n';
      for (int k = 2; k <= max_level; ++k) {
        os << "| " << k << " |";
        for (const auto* c : cols) {
          std::string cell = "-";
          if (k <= static_cast<int>(c->levels.size()) && c->levels[k - 1].solve.converged) {
            const auto& l = c->levels[k - 1];
            cell = rate(which == 0 ? l.eoc_F : l.eoc_Fstar, "%.3f");
          }
          os << ' ' << cell << " |";
        }
        os << '\n';
      }
      os << "| expected |";
      for (const auto* c : cols) os << ' ' << num(c->alpha, "%.2f") << " |";
      os << "\n\n";
    }
  }

  os << "### Solver and duality audit\n\n";
  os << "| p- | alpha | eps | max Newton its | max rel. gap | max jump res. | max flux res. | status |\n";
  os << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : reports) {
    int its = 0;
    double gap = 0.0, jump = 0.0, flux = 0.0;
    for (const auto& l : r.levels) {
      its = std::max(its, l.solve.iterations);
      gap = std::max(gap, l.audit.relative_gap);
      jump = std::max(jump, l.audit.normal_jump_residual);
      flux = std::max(flux, l.audit.side_flux_residual);
    }
    os << "| " << short_num(r.p_min) << " | " << short_num(r.alpha) << " | "
       << short_num(r.eps) << " | " << its << " | " << num(gap, "%.2e") << " | "
       << num(jump, "%.2e") << " | " << num(flux, "%.2e") << " | "
       << (r.ok() ? std::string("ok") : (r.converged() ? "audit failed" : r.failure)) << " |\n";
  }
}

}  // namespace crvex
