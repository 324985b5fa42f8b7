#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lanslab {

// Field shapes or grids do not match.
class ShapeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A negative multiplier power met a nonzero mean mode.
class SingularModeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Index parameters violate the hypotheses of an inequality.
class HypothesisViolation : public std::invalid_argument {
 public:
  HypothesisViolation(std::string condition, const std::string& detail)
      : std::invalid_argument(detail), condition_(std::move(condition)) {}
  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

// Input to a solenoidal-only operation has a divergence above tolerance.
class NotSolenoidal : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Picard iteration failed to reach its tolerance.
class PicardNonConvergence : public std::runtime_error {
 public:
  PicardNonConvergence(const std::string& what, double last_ratio, int iterations)
      : std::runtime_error(what), last_ratio_(last_ratio), iterations_(iterations) {}
  double last_ratio() const noexcept { return last_ratio_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_ratio_;
  int iterations_;
};

// Time marcher produced a non-finite state.
class SolverBlowup : public std::runtime_error {
 public:
  SolverBlowup(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

// Interpolation split cannot reach the requested smallness on this grid.
class SplitUnreachable : public std::runtime_error {
 public:
  SplitUnreachable(const std::string& what, double achievable)
      : std::runtime_error(what), achievable_(achievable) {}
  double achievable_minimum() const noexcept { return achievable_; }

 private:
  double achievable_;
};

}  // namespace lanslab
