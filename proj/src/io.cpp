#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "saddlestat/constrained.hpp"
#include "saddlestat/index_distribution.hpp"
#include "saddlestat/version.hpp"

namespace saddlestat {

void IndexDistribution::write_csv(std::ostream& os) const {
  os << "# tool_version: " << kVersion << "\n";
  os << "# model: " << model << "\n";
  os << "# regime: " << regime << "\n";
  os << "# kind: " << kind << "\n";
  os << "# value_kind: " << value_kind << "\n";
  os.precision(17);
  os << "# scale_exponent: " << scale_exponent << "\n";
  for (const auto& [key, v] : params) os << "# " << key << ": " << v << "\n";
  os << "# normalized: " << (normalized ? "true" : "false") << "\n";
  if (has_atom)
    os << "# atom: location=" << atom_location << " mass=" << atom_mass << "\n";
  os << "index_or_kappa,prob_or_density,stderr\n";
  for (std::size_t i = 0; i < support.size(); ++i)
    os << support[i] << "," << value[i] << ","
       << (i < se.size() ? se[i] : 0.0) << "\n";
}

std::string IndexDistribution::to_json_string() const {
  nlohmann::json j;
  j["schema_version"] = kOutputSchemaVersion;
  j["tool_version"] = kVersion;
  j["model"] = model;
  j["regime"] = regime;
  j["kind"] = kind;
  j["value_kind"] = value_kind;
  j["scale_exponent"] = scale_exponent;
  nlohmann::json pj = nlohmann::json::object();
  for (const auto& [key, v] : params) pj[key] = v;
  j["params"] = pj;
  j["normalized"] = normalized;
  if (has_atom)
    j["atom"] = {{"location", atom_location}, {"mass", atom_mass}};
  else
    j["atom"] = nullptr;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < support.size(); ++i)
    rows.push_back({{"support", support[i]},
                    {"value", value[i]},
                    {"stderr", i < se.size() ? se[i] : 0.0}});
  j["rows"] = rows;
  return j.dump(2);
}

void constrained::PhaseDiagram::write_csv(std::ostream& os) const {
  os << "# tool_version: " << kVersion << "\n";
  os.precision(17);
  os << "# q: " << q << "\n";
  os << "# line_level: " << line_level << "\n";
  os << "# critical_point: m=" << critical_point.first
     << " eps0=" << critical_point.second << "\n";
  os << "# threshold: " << threshold << "\n";
  os << "# toppling_boundary_slope: " << toppling_boundary_slope << "\n";
  os << "m,eps_minus,eps_plus\n";
  for (std::size_t i = 0; i < m_grid.size(); ++i)
    os << m_grid[i] << "," << eps_minus[i] << "," << eps_plus[i] << "\n";
}

std::string constrained::PhaseDiagram::to_json_string() const {
  nlohmann::json j;
  j["schema_version"] = kOutputSchemaVersion;
  j["tool_version"] = kVersion;
  j["model"] = "constrained";
  j["q"] = q;
  j["line_level"] = line_level;
  j["critical_point"] = {{"m", critical_point.first},
                         {"eps0", critical_point.second}};
  j["threshold"] = threshold;
  j["toppling_boundary_slope"] = toppling_boundary_slope;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m_grid.size(); ++i)
    rows.push_back({{"m", m_grid[i]},
                    {"eps_minus", eps_minus[i]},
                    {"eps_plus", eps_plus[i]}});
  j["curves"] = rows;
  return j.dump(2);
}

}  // namespace saddlestat
