#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace ospectra {

// Bad arguments or configuration. Maps to exit status 1 in the CLI.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Requested minimax level i exceeds the Galerkin dimension k.
class LevelError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, Eigen::VectorXd best, double lambda, double residual,
                     int iterations)
        : std::runtime_error(what), best_(std::move(best)), lambda_(lambda),
          residual_(residual), iterations_(iterations) {}

    const Eigen::VectorXd& best_iterate() const noexcept { return best_; }
    double lambda() const noexcept { return lambda_; }
    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    Eigen::VectorXd best_;
    double lambda_;
    double residual_;
    int iterations_;
};

} // namespace ospectra
