#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace omegaforge {

// Error taxonomy mirrors the CLI exit codes:
//   schema_error        -> 2  (malformed input, unknown keys, bad encodings)
//   domain_error        -> 3  (precondition violated: budget, headroom, ranges)
//   invariant_violation -> 4  (a machine or structure broke its own contract at run time)

class schema_error : public std::runtime_error {
public:
  explicit schema_error(const std::string& what) : std::runtime_error(what) {}
};

class domain_error : public std::runtime_error {
public:
  explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

class invariant_violation : public std::runtime_error {
public:
  explicit invariant_violation(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a weight request would push the running allocation sum above 1.
class kraft_budget_error : public domain_error {
public:
  kraft_budget_error(std::size_t index, unsigned length, const std::string& what)
      : domain_error(what), index_(index), length_(length) {}
  std::size_t index() const { return index_; }
  unsigned length() const { return length_; }

private:
  std::size_t index_;
  unsigned length_;
};

}  // namespace omegaforge
