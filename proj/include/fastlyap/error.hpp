#ifndef FASTLYAP_ERROR_HPP
#define FASTLYAP_ERROR_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace fastlyap {

enum class ErrorKind {
  usage,              // bad caller input (flags, preconditions)
  malformed,          // unparseable or inconsistent document
  boundary,           // point lies on a branch boundary or outside the domain
  exceptional_orbit,  // some T^k(x) lies in the exceptional set Q
  truncation,         // a finite horizon or table is too short
  construction,       // an explicit construction has no valid choice
  hypothesis,         // a sequence/map hypothesis failed
  bit_budget,         // exact representation exceeds the configured budget
  non_contracting,    // cylinders stopped shrinking before the iteration cap
  out_of_range        // parameter outside the documented range
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::optional<std::size_t> step = {})
      : std::runtime_error(what), kind_(kind), step_(step) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Orbit step (exceptional_orbit) or sequence index (construction, truncation).
  std::optional<std::size_t> step() const noexcept { return step_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> step_;
};

}  // namespace fastlyap

#endif  // FASTLYAP_ERROR_HPP
