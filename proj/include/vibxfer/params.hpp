#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "vibxfer/error.hpp"

namespace vibxfer {

struct TransferParams {
  double alpha_f = 1.0; // FM depth, scales the delay deviation
  double alpha_a = 1.0; // AM depth, scales the envelope

  void validate() const
  {
    auto ok = [] (double v) { return std::isfinite (v) && v >= 0.0; };
    if (!ok (alpha_f) || !ok (alpha_a)) {
      throw ParameterError (
        "transfer params must be finite and >= 0 (alpha_f=" + std::to_string (alpha_f)
        + ", alpha_a=" + std::to_string (alpha_a) + ")");
    }
  }
};

// Linear ramp to a target over a fixed number of samples. Lands exactly on
// the target so a settled value is bit-identical to an unsmoothed one.
class LinearSmoother {
public:
  LinearSmoother() = default;
  LinearSmoother (double initial, std::size_t ramp_samples)
    : current_ {initial}, target_ {initial}, ramp_ {ramp_samples > 0 ? ramp_samples : 1}
  {}

  void set_target (double target)
  {
    if (target == target_) {
      return;
    }
    target_    = target;
    remaining_ = ramp_;
    step_      = (target_ - current_) / static_cast<double> (ramp_);
  }

  double next()
  {
    if (remaining_ > 0) {
      --remaining_;
      current_ = remaining_ == 0 ? target_ : current_ + step_;
    }
    return current_;
  }

  double current() const { return current_; }
  double target() const { return target_; }
  bool   settled() const { return remaining_ == 0; }

private:
  double      current_   = 0.0;
  double      target_    = 0.0;
  double      step_      = 0.0;
  std::size_t ramp_      = 1;
  std::size_t remaining_ = 0;
};

} // namespace vibxfer
