#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace ofo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

/// A plant whose transition matrix is not Schur stable.
class UnstablePlant : public Error {
public:
    UnstablePlant(double spectral_radius)
        : Error("transition matrix is not Schur stable (spectral radius " +
                std::to_string(spectral_radius) + ")"),
          spectral_radius_(spectral_radius) {}

    double spectral_radius() const noexcept { return spectral_radius_; }

private:
    double spectral_radius_;
};

class NoConvergence : public Error {
public:
    NoConvergence(std::size_t iterations, double residual)
        : Error("solver did not converge after " + std::to_string(iterations) +
                " iterations (residual " + std::to_string(residual) + ")"),
          iterations_(iterations),
          residual_(residual) {}

    std::size_t iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    std::size_t iterations_;
    double residual_;
};

/// Raised when the coupling penalty eats the whole strong-monotonicity margin.
class CouplingTooStrong : public Error {
public:
    using Error::Error;
};

class NotCertifiable : public Error {
public:
    using Error::Error;
};

class UnstableDiscretization : public Error {
public:
    explicit UnstableDiscretization(double spectral_radius)
        : Error("Euler discretization is not Schur stable (spectral radius " +
                std::to_string(spectral_radius) + ")"),
          spectral_radius_(spectral_radius) {}

    double spectral_radius() const noexcept { return spectral_radius_; }

private:
    double spectral_radius_;
};

/// Malformed input file or configuration. `key()` names the offending entry.
class ParseError : public Error {
public:
    ParseError(std::string key, const std::string& what)
        : Error("'" + key + "': " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace ofo
