#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace mpclt {

using cplx = std::complex<double>;

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Evaluation hit a pole or a zero denominator of a transform.
class SingularityError : public std::runtime_error {
public:
    explicit SingularityError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {
std::string format_sci(double v);
}

/// Adaptive quadrature stopped before reaching the requested tolerance.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved abs error " + detail::format_sci(achieved) + ")"),
          achieved_error(achieved) {}
    double achieved_error;
};

/// A tracked complex logarithm / argument jumped between adjacent nodes,
/// i.e. the discretization straddled a branch cut.
class BranchTrackingError : public std::runtime_error {
public:
    explicit BranchTrackingError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mpclt
