#include "saddlestat/histogram.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "saddlestat/version.hpp"

namespace saddlestat {

BinSpec BinSpec::auto_rule(double lo, double hi, std::int64_t n_samples) {
  if (!(hi > lo)) throw DomainError("BinSpec: hi must exceed lo");
  if (n_samples < 1) throw DomainError("BinSpec: n_samples < 1");
  const int nbins = static_cast<int>(
      std::ceil(std::cbrt(static_cast<double>(n_samples))));
  return BinSpec{lo, hi, nbins < 1 ? 1 : nbins};
}

EmpiricalDensity::EmpiricalDensity(const BinSpec& spec)
    : lo_(spec.lo), hi_(spec.hi), nbins_(spec.nbins) {
  if (!(spec.hi > spec.lo)) throw DomainError("EmpiricalDensity: hi <= lo");
  if (spec.nbins < 1) throw DomainError("EmpiricalDensity: nbins < 1");
  width_ = (hi_ - lo_) / nbins_;
  counts_.assign(static_cast<std::size_t>(nbins_), 0);
}

void EmpiricalDensity::add(double x) {
  if (x < lo_) {
    ++underflow_;
    return;
  }
  const int i = static_cast<int>((x - lo_) / width_);
  if (i >= nbins_) {
    ++overflow_;
    return;
  }
  ++counts_[static_cast<std::size_t>(i)];
}

void EmpiricalDensity::merge(const EmpiricalDensity& other) {
  if (other.nbins_ != nbins_ || other.lo_ != lo_ || other.hi_ != hi_)
    throw DomainError("EmpiricalDensity::merge: incompatible binning");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  underflow_ += other.underflow_;
  overflow_ += other.overflow_;
  n_samples += other.n_samples;
}

std::int64_t EmpiricalDensity::entries() const {
  std::int64_t total = underflow_ + overflow_;
  for (auto c : counts_) total += c;
  return total;
}

double EmpiricalDensity::density(int i) const {
  if (n_samples < 1) return 0.0;
  return static_cast<double>(count(i)) /
         (static_cast<double>(n_samples) * width_);
}

double EmpiricalDensity::stderr_density(int i) const {
  if (n_samples < 1) return 0.0;
  const double m = static_cast<double>(n_samples);
  const double c = static_cast<double>(count(i));
  if (multiplicity == 1) {
    const double p = c / m;
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / m) / width_;
  }
  return std::sqrt(c) / (m * width_);  // Poisson regime for stacked spectra
}

double EmpiricalDensity::coverage_fraction() const {
  const std::int64_t total = entries();
  if (total == 0) return 0.0;
  return 1.0 -
         static_cast<double>(underflow_ + overflow_) / static_cast<double>(total);
}

void EmpiricalDensity::write_csv(
    std::ostream& os,
    const std::vector<std::pair<std::string, std::string>>& meta) const {
  os << "# tool_version: " << kVersion << "\n";
  for (const auto& [key, value] : meta) os << "# " << key << ": " << value << "\n";
  os << "# matrix_n: " << matrix_n << "\n";
  os << "# k: " << k << "\n";
  os << "# n_samples: " << n_samples << "\n";
  os << "# seed: " << seed << "\n";
  os << "# transform: " << transform.kind << " scale=" << transform.scale
     << " shift=" << transform.shift << "\n";
  os << "# underflow: " << underflow_ << " overflow: " << overflow_ << "\n";
  os << "bin_left,bin_right,density,stderr\n";
  os.precision(17);
  for (int i = 0; i < nbins_; ++i)
    os << bin_left(i) << "," << bin_right(i) << "," << density(i) << ","
       << stderr_density(i) << "\n";
}

std::string EmpiricalDensity::to_json_string() const {
  nlohmann::json j;
  j["schema_version"] = kOutputSchemaVersion;
  j["tool_version"] = kVersion;
  j["matrix_n"] = matrix_n;
  j["k"] = k;
  j["multiplicity"] = multiplicity;
  j["n_samples"] = n_samples;
  j["seed"] = seed;
  j["transform"] = {{"kind", transform.kind},
                    {"scale", transform.scale},
                    {"shift", transform.shift}};
  j["underflow"] = underflow_;
  j["overflow"] = overflow_;
  nlohmann::json bins = nlohmann::json::array();
  for (int i = 0; i < nbins_; ++i) {
    bins.push_back({{"left", bin_left(i)},
                    {"right", bin_right(i)},
                    {"count", count(i)},
                    {"density", density(i)},
                    {"stderr", stderr_density(i)}});
  }
  j["bins"] = bins;
  return j.dump(2);
}

}  // namespace saddlestat
