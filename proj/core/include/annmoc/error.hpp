#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace annmoc {

/// Invalid problem data, configuration values or argument shapes.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Adaptive quadrature ran out of panels before reaching its tolerance.
class IntegrationError : public std::runtime_error {
  public:
    IntegrationError(const std::string& what, double estimate, double error_estimate)
        : std::runtime_error(what), estimate_(estimate), error_estimate_(error_estimate) {}

    double estimate() const { return estimate_; }
    double error_estimate() const { return error_estimate_; }

  private:
    double estimate_;
    double error_estimate_;
};

/// An integration failure inside a sweep, tagged with the sample and
/// direction indices that produced it.
class SweepError : public std::runtime_error {
  public:
    SweepError(const std::string& what, std::size_t sample, std::size_t direction)
        : std::runtime_error(what), sample_(sample), direction_(direction) {}

    std::size_t sample() const { return sample_; }
    std::size_t direction() const { return direction_; }

  private:
    std::size_t sample_;
    std::size_t direction_;
};

/// Training produced a non-finite loss.
class TrainingDivergence : public std::runtime_error {
  public:
    TrainingDivergence(const std::string& what, std::size_t epoch, std::size_t iteration = 0)
        : std::runtime_error(what), epoch_(epoch), iteration_(iteration) {}

    std::size_t epoch() const { return epoch_; }
    /// Source iteration during which the divergence happened (0 = initial fit).
    std::size_t iteration() const { return iteration_; }

  private:
    std::size_t epoch_;
    std::size_t iteration_;
};

}  // namespace annmoc
