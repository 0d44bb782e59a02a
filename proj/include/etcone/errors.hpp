#pragma once

#include <stdexcept>
#include <string>

namespace etcone {

// Input is well formed but exceeds a documented size limit.
struct capacity_error : std::runtime_error {
  explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

// A support-relative operation hit a support part of measure zero.
struct degenerate_support_error : std::invalid_argument {
  explicit degenerate_support_error(const std::string& what)
      : std::invalid_argument(what) {}
};

}  // namespace etcone
