#pragma once

#include <stdexcept>
#include <string>

namespace saddlestat {

// Out-of-domain or non-finite argument to a closed-form evaluation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// An empirical density does not cover the region where an integrand lives.
class CoverageError : public std::runtime_error {
 public:
  explicit CoverageError(const std::string& what) : std::runtime_error(what) {}
};

// A saddle-point branch was requested outside its validity region.
class BranchError : public std::runtime_error {
 public:
  explicit BranchError(const std::string& what) : std::runtime_error(what) {}
};

// Root finding / scan failed to bracket a solution; diagnostic in message.
class RootFindError : public std::runtime_error {
 public:
  explicit RootFindError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace saddlestat
