#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace diraclab {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: unknown preset, invalid grid, unsupported integrator choice...
class configuration_error : public error {
public:
    using error::error;
};

/// A custom nonlinearity that fails the null-structure (charge) identity.
class model_rejected : public error {
public:
    using error::error;
};

/// Sampled constant ratio is unbounded or non-finite.
class numerical_degeneracy : public error {
public:
    using error::error;
};

/// Initial support (plus light cone) does not fit inside the computational domain.
class domain_too_small : public error {
public:
    using error::error;
};

/// Errors that abort a time integration, tagged with the step that triggered them.
class numerical_abort : public error {
public:
    numerical_abort(const std::string &what, std::size_t step) : error(what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class light_cone_overflow : public numerical_abort {
public:
    using numerical_abort::numerical_abort;
};

class non_finite_field : public numerical_abort {
public:
    using numerical_abort::numerical_abort;
};

} // namespace diraclab
