#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace sirlat {

/// Raised when an argument lies outside the domain where a quantity is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when a lattice window would exceed its configured maximum.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an iterative solver exhausts its budget.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Supercriticality theta and village size N of the epidemic.
///
/// Every pair of individuals living at the same site or at l1-adjacent sites
/// carries an infection probability (1+theta)/(5N).
class ModelParams {
public:
    ModelParams(double theta, int village_size) : theta_(theta), village_size_(village_size)
    {
        if (!(theta > 0.0) || !std::isfinite(theta)) {
            throw DomainError("theta must be a positive finite number");
        }
        if (village_size < 1) {
            throw DomainError("village size must be at least 1");
        }
        p_edge_ = (1.0 + theta) / (5.0 * village_size);
        if (p_edge_ > 1.0) {
            throw DomainError("(1+theta)/(5N) exceeds 1 for theta=" + std::to_string(theta) +
                              ", N=" + std::to_string(village_size));
        }
    }

    double theta() const { return theta_; }
    int village_size() const { return village_size_; }
    double p_edge() const { return p_edge_; }

    /// (1+theta)/5, the per-neighbour infection rate of the large-N limit.
    double rate() const { return (1.0 + theta_) / 5.0; }

private:
    double theta_;
    int village_size_;
    double p_edge_;
};

/// (1+theta)/5 with the same positivity check as ModelParams but no N.
inline double limit_rate(double theta)
{
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        throw DomainError("theta must be a positive finite number");
    }
    return (1.0 + theta) / 5.0;
}

}  // namespace sirlat
