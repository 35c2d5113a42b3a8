#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace fraclap {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Invalid or inconsistent parameters (parameter structs, configs, files).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Adaptive quadrature stopped before reaching the requested tolerance.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what_integral, double estimate, double target)
        : std::runtime_error(what_integral + ": quadrature did not converge (error estimate " + sci(estimate)
                             + " > " + sci(target) + ")"),
          label_(what_integral), estimate_(estimate), target_(target) {}
    const std::string& label() const noexcept { return label_; }
    double estimate() const noexcept { return estimate_; }
    double target() const noexcept { return target_; }

private:
    static std::string sci(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", v);
        return buf;
    }
    std::string label_;
    double estimate_;
    double target_;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& msg, int iterations, double increment)
        : std::runtime_error(msg), iterations_(iterations), increment_(increment) {}
    int iterations() const noexcept { return iterations_; }
    double increment() const noexcept { return increment_; }

private:
    int iterations_;
    double increment_;
};

// An iterate left the order interval [subsolution, supersolution].
class OrderingError : public std::runtime_error {
public:
    OrderingError(const std::string& msg, int node, double excess)
        : std::runtime_error(msg), node_(node), excess_(excess) {}
    int node() const noexcept { return node_; }
    double excess() const noexcept { return excess_; }

private:
    int node_;
    double excess_;
};

// The primitive condition F(t) < F(rho) on [0, rho) fails, or rho is not a zero of f.
class ConditionFError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A profile whose data cannot support the requested computation.
class ProfileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fraclap
