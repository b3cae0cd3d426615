#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hvacdro/milp.hpp"

namespace hvacdro::milp {

namespace {

std::string lp_name(const std::string& name, int index, char prefix) {
  std::string out;
  for (char c : name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front())) || out.front() == '.') {
    out = std::string(1, prefix) + std::to_string(index) + (out.empty() ? "" : "_" + out);
  }
  return out;
}

void write_terms(std::ostream& out, const std::vector<std::pair<double, std::string>>& terms) {
  bool first = true;
  for (const auto& [coef, name] : terms) {
    if (coef == 0.0) continue;
    if (first) {
      out << (coef < 0 ? "- " : "");
    } else {
      out << (coef < 0 ? " - " : " + ");
    }
    out << std::abs(coef) << ' ' << name;
    first = false;
  }
  if (first) out << "0";
}

}  // namespace

void write_lp_format(const ModelSpec& spec, std::ostream& out) {
  out << std::setprecision(17);
  std::vector<std::string> names;
  for (int j = 0; j < spec.variable_count(); ++j) {
    names.push_back(lp_name(spec.variables()[j].name, j, 'v'));
  }

  out << "\\ hvacdro model export\n";
  out << "Minimize\n obj: ";
  std::vector<std::pair<double, std::string>> terms;
  for (int j = 0; j < spec.variable_count(); ++j) terms.emplace_back(spec.objective()[j], names[j]);
  write_terms(out, terms);
  if (spec.objective_offset() != 0.0) {
    out << (spec.objective_offset() < 0 ? " - " : " + ") << std::abs(spec.objective_offset());
  }
  out << "\nSubject To\n";
  for (int r = 0; r < spec.constraint_count(); ++r) {
    const auto& c = spec.constraints()[r];
    out << ' ' << lp_name(c.family, r, 'c') << '_' << r << ": ";
    terms.clear();
    for (const auto& t : c.terms) terms.emplace_back(t.coef, names[t.var]);
    write_terms(out, terms);
    switch (c.relation) {
      case Relation::kLessEqual: out << " <= "; break;
      case Relation::kGreaterEqual: out << " >= "; break;
      case Relation::kEqual: out << " = "; break;
    }
    out << c.rhs << '\n';
  }
  out << "Bounds\n";
  for (int j = 0; j < spec.variable_count(); ++j) {
    const auto& v = spec.variables()[j];
    if (v.is_binary) continue;
    if (!std::isfinite(v.lower) && !std::isfinite(v.upper)) {
      out << ' ' << names[j] << " free\n";
      continue;
    }
    out << ' ';
    if (std::isfinite(v.lower)) {
      out << v.lower;
    } else {
      out << "-inf";
    }
    out << " <= " << names[j] << " <= ";
    if (std::isfinite(v.upper)) {
      out << v.upper;
    } else {
      out << "+inf";
    }
    out << '\n';
  }
  const auto binaries = spec.binary_indices();
  if (!binaries.empty()) {
    out << "Binaries\n";
    for (int j : binaries) out << ' ' << names[j] << '\n';
  }
  out << "End\n";
}

std::string to_lp_format(const ModelSpec& spec) {
  std::ostringstream out;
  write_lp_format(spec, out);
  return out.str();
}

}  // namespace hvacdro::milp
