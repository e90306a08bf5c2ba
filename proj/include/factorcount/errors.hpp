#pragma once

#include <stdexcept>
#include <string>

namespace fc {

// Invalid or non-finite input data (bad CSV cells, NaN entries, ...).
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Dimension constraints violated (N or T too small, m out of range, ...).
class dimension_error : public input_error {
public:
    explicit dimension_error(const std::string& msg) : input_error(msg) {}
};

// Numerical failure: solver non-convergence, quadrature failure, ...
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg, double residual = 0.0)
        : std::runtime_error(msg), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// A population spike coincides with a bulk atom, making the bias sum singular.
class singularity_error : public numerical_error {
public:
    explicit singularity_error(const std::string& msg) : numerical_error(msg) {}
};

// A candidate spike sits below the detection threshold (phase transition).
class subcritical_error : public numerical_error {
public:
    explicit subcritical_error(const std::string& msg) : numerical_error(msg) {}
};

// An observed eigenvalue lies inside the bulk support, so it is not a spike.
class not_a_spike_error : public numerical_error {
public:
    explicit not_a_spike_error(const std::string& msg) : numerical_error(msg) {}
};

}  // namespace fc
