#pragma once

#include <stdexcept>

namespace gbdp {

// Invalid argument or out-of-domain input. The CLI maps these to exit code 2.
class domain_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Evaluation requested at a singular point (v = 1, u at a root, ...).
class singular_error : public domain_error {
 public:
  using domain_error::domain_error;
};

// A numerical tolerance could not be met. The CLI maps these to exit code 3.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Truncation limit reached before the requested tolerance.
class truncation_error : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

}  // namespace gbdp
