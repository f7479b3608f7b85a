#pragma once

#include <cstddef>
#include <exception>
#include <stdexcept>
#include <string>
#include <utility>

namespace kgl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A metric field has a non-positive eigenvalue somewhere (the potential
/// left the Kähler cone, or the input was never a metric).
class NonPositiveMetric : public Error {
 public:
  NonPositiveMetric(std::size_t point, double min_eigenvalue);
  std::size_t point() const noexcept { return point_; }
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  std::size_t point_;
  double min_eigenvalue_;
};

class NotConverged : public Error {
 public:
  NotConverged(const std::string& what, int iterations, double residual);
  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// No Newton damping factor keeps the updated form positive definite.
class LeftKahlerCone : public Error {
 public:
  using Error::Error;
};

class ClassViolation : public Error {
 public:
  using Error::Error;
};

class RecursionViolated : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

class BudgetDrift : public Error {
 public:
  using Error::Error;
};

class ConfigInvalid : public Error {
 public:
  using Error::Error;
};

class CacheCorrupt : public Error {
 public:
  using Error::Error;
};

/// A sweep job failed; carries the member coordinates and the original error.
class JobFailed : public Error {
 public:
  JobFailed(std::string coordinates, const std::string& what, std::exception_ptr cause)
      : Error(coordinates + ": " + what), coordinates_(std::move(coordinates)), cause_(std::move(cause)) {}
  const std::string& coordinates() const noexcept { return coordinates_; }
  std::exception_ptr cause() const noexcept { return cause_; }

 private:
  std::string coordinates_;
  std::exception_ptr cause_;
};

}  // namespace kgl
