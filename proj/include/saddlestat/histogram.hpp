#pragma once

// Binned Monte Carlo density estimate with integer counts. Counts merge
// associatively, which is what makes threaded accumulation bit-reproducible.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "saddlestat/errors.hpp"

namespace saddlestat {

// sigma = scale * lambda + shift applied to raw eigenvalues before binning
struct Transform {
  double scale = 1.0;
  double shift = 0.0;
  std::string kind = "identity";
};

struct BinSpec {
  double lo = 0.0;
  double hi = 1.0;
  int nbins = 1;

  // bin width rule: (hi - lo) / ceil(n_samples^(1/3))
  static BinSpec auto_rule(double lo, double hi, std::int64_t n_samples);
};

class EmpiricalDensity {
 public:
  EmpiricalDensity() = default;
  EmpiricalDensity(const BinSpec& spec);

  void add(double x);
  void merge(const EmpiricalDensity& other);

  int nbins() const { return nbins_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double bin_width() const { return width_; }
  double bin_left(int i) const { return lo_ + i * width_; }
  double bin_right(int i) const { return lo_ + (i + 1) * width_; }
  double bin_center(int i) const { return lo_ + (i + 0.5) * width_; }
  std::int64_t count(int i) const { return counts_[static_cast<std::size_t>(i)]; }
  std::int64_t underflow() const { return underflow_; }
  std::int64_t overflow() const { return overflow_; }
  std::int64_t entries() const;

  // density normalized so the estimate integrates to multiplicity
  double density(int i) const;
  double stderr_density(int i) const;
  // fraction of entries that landed inside [lo, hi)
  double coverage_fraction() const;

  // metadata carried into serialized output
  int matrix_n = 0;
  int k = -1;  // order-statistic index; -1 means whole spectrum
  int multiplicity = 1;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
  Transform transform;

  void write_csv(std::ostream& os,
                 const std::vector<std::pair<std::string, std::string>>& meta) const;
  std::string to_json_string() const;

 private:
  double lo_ = 0.0, hi_ = 1.0, width_ = 1.0;
  int nbins_ = 0;
  std::vector<std::int64_t> counts_;
  std::int64_t underflow_ = 0, overflow_ = 0;
};

}  // namespace saddlestat
