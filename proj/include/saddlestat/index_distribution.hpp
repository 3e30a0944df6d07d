#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace saddlestat {

// Distribution of the instability index, either over the integer index k
// (kind "discrete") or over the rescaled index kappa = k / n^scale_exponent
// (kind "continuous"). Degenerate point masses are carried as an explicit
// atom record, never as a numeric spike in `value`.
struct IndexDistribution {
  std::string model;
  std::string regime;
  std::string kind;                 // "discrete" | "continuous"
  std::string value_kind = "prob";  // "prob" | "density" | "cdf"
  double scale_exponent = 0.0;
  std::vector<std::pair<std::string, double>> params;
  std::vector<double> support;
  std::vector<double> value;
  std::vector<double> se;  // empty for deterministic sources
  bool normalized = true;
  bool has_atom = false;
  double atom_location = 0.0;
  double atom_mass = 0.0;

  void write_csv(std::ostream& os) const;
  std::string to_json_string() const;
};

}  // namespace saddlestat
