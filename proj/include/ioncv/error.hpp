#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ioncv {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class LayoutMismatch : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  NotHermitian(const std::string& what, double deviation)
      : Error(what), deviation_(deviation) {}
  double deviation() const { return deviation_; }

 private:
  double deviation_;
};

// Raised when a state constructor would discard more than the allowed
// population above the Fock cutoff.
class CutoffTooSmall : public Error {
 public:
  CutoffTooSmall(const std::string& what, double leaked)
      : Error(what), leaked_(leaked) {}
  double leaked() const { return leaked_; }

 private:
  double leaked_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double previous, double last)
      : Error(what), previous_(previous), last_(last) {}
  double previous_fidelity() const { return previous_; }
  double last_fidelity() const { return last_; }

 private:
  double previous_;
  double last_;
};

class IncompatibleGate : public Error {
 public:
  using Error::Error;
};

class NonFiniteLoss : public Error {
 public:
  NonFiniteLoss(const std::string& what, std::size_t coordinate)
      : Error(what), coordinate_(coordinate) {}
  std::size_t coordinate() const { return coordinate_; }

 private:
  std::size_t coordinate_;
};

class TrainingDiverged : public Error {
 public:
  TrainingDiverged(const std::string& what, std::size_t iteration)
      : Error(what), iteration_(iteration) {}
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ioncv
