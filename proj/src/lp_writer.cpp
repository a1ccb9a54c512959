#include <charconv>
#include <cmath>

#include "pwfit/instance_io.hpp"

namespace pwfit {

namespace {

std::string num(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void append_expr(std::string& out, const ModelDescription& model,
                 const std::vector<LinearTerm>& terms) {
  bool first = true;
  for (const LinearTerm& t : terms) {
    if (t.coef == 0.0) continue;
    out += t.coef < 0 ? (first ? "-" : " - ") : (first ? "" : " + ");
    const double a = std::abs(t.coef);
    if (a != 1.0) out += num(a) + " ";
    out += model.variables[t.col].name;
    first = false;
  }
  if (first) out += "0 " + model.variables.front().name;
}

}  // namespace

std::string to_lp_format(const ModelDescription& model) {
  std::string out = "Minimize\n obj: ";
  std::vector<LinearTerm> objective;
  for (int c = 0; c < static_cast<int>(model.variables.size()); ++c)
    if (model.variables[c].cost != 0.0) objective.push_back({c, model.variables[c].cost});
  append_expr(out, model, objective);
  out += "\nSubject To\n";

  for (std::size_t r = 0; r < model.constraints.size(); ++r) {
    const LinearConstraint& row = model.constraints[r];
    const std::string name = " c" + std::to_string(r);
    auto emit = [&](const std::string& label, const char* sense, double rhs) {
      out += label + ": ";
      append_expr(out, model, row.terms);
      out += std::string(" ") + sense + " " + num(rhs) + "\n";
    };
    const bool has_lower = std::isfinite(row.lower), has_upper = std::isfinite(row.upper);
    if (has_lower && has_upper && row.lower == row.upper) {
      emit(name, "=", row.lower);
    } else if (has_lower && has_upper) {
      emit(name + "_lo", ">=", row.lower);
      emit(name + "_up", "<=", row.upper);
    } else if (has_lower) {
      emit(name, ">=", row.lower);
    } else if (has_upper) {
      emit(name, "<=", row.upper);
    }
  }

  out += "Bounds\n";
  std::string binaries, generals;
  for (const Variable& v : model.variables) {
    const bool binary = v.integer && v.lower == 0.0 && v.upper == 1.0;
    if (binary) {
      binaries += " " + v.name + "\n";
      continue;
    }
    if (v.integer) generals += " " + v.name + "\n";
    const bool lo = std::isfinite(v.lower), up = std::isfinite(v.upper);
    if (!lo && !up) out += " " + v.name + " free\n";
    else if (lo && up) out += " " + num(v.lower) + " <= " + v.name + " <= " + num(v.upper) + "\n";
    else if (lo && v.lower != 0.0) out += " " + v.name + " >= " + num(v.lower) + "\n";
    else if (!lo) out += " -inf <= " + v.name + " <= " + num(v.upper) + "\n";
  }
  if (!generals.empty()) out += "Generals\n" + generals;
  if (!binaries.empty()) out += "Binaries\n" + binaries;
  out += "End\n";
  return out;
}

}  // namespace pwfit
