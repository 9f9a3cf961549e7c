#pragma once

#include <vector>

#include "mpclt/common.hpp"
#include "mpclt/test_functions.hpp"

namespace mpclt {

/// Linear change of variables u = L x + c mapping [a_l, b_r] onto
/// [eps, 1-eps], with 0 < eps < 1/2.
struct AffineMap {
    double a_l = 0.0, b_r = 1.0;
    double eps = 0.25;
    double L = 0.5, c = 0.25;

    static AffineMap create(double a_l, double b_r, double eps);
    double to_unit(double x) const { return L * x + c; }
    cplx to_unit(cplx z) const { return L * z + c; }
    double from_unit(double u) const { return (u - c) / L; }
};

/// Degree-m Bernstein polynomial of a rescaled sample vector: stores the m+1
/// values b_k and evaluates sum_k C(m,k) u^k (1-u)^{m-k} b_k at u = Lx + c.
/// Real evaluation runs the de Casteljau recursion; complex evaluation uses
/// direct summation with log-binomial coefficients. Immutable after
/// construction.
class BernsteinApprox {
public:
    BernsteinApprox(AffineMap map, std::vector<double> samples);

    /// Samples f on the mapped lattice: b_k = f((k/m - c)/L), k = 0..m.
    static BernsteinApprox build(const TestFunction& f, double a_l, double b_r, double eps,
                                 int m);

    /// Bernstein approximation of h(x) = u(1-u) f''(x)/L^2 at u = Lx + c,
    /// the correction polynomial; f_m - h_m/(2m) approximates f at O(1/m^2).
    static BernsteinApprox correction(const TestFunction& f, double a_l, double b_r, double eps,
                                      int m);

    /// The combined polynomial f_m - h_m/(2m), still in degree-m Bernstein
    /// form (coefficient-wise combination on the shared basis).
    BernsteinApprox corrected_by(const BernsteinApprox& h) const;

    int degree() const { return static_cast<int>(samples_.size()) - 1; }
    const AffineMap& map() const { return map_; }
    const std::vector<double>& samples() const { return samples_; }
    /// Half-height 1/sqrt(m) of the complex strip on which evaluation is
    /// guaranteed bounded.
    double strip_half_width() const;

    double evaluate(double x) const;
    double derivative(double x) const;
    cplx evaluate_complex(cplx z) const;
    cplx derivative_complex(cplx z) const;

private:
    AffineMap map_;
    std::vector<double> samples_;
    std::vector<double> log_binom_;  // ln C(m,k)

    void check_strip(cplx z) const;
};

/// Bernstein degree m = floor(n^(13/40)) tied to the matrix dimension, with
/// companion strip half-width 1/sqrt(m) = n^(-13/80).
int default_degree(long long n);

/// Default bracketing of the MP support [a,b] inside the approximation
/// interval: a_l = max(a/2, a - 0.05(b-a)) and b_r = b + 0.05(b-a).
std::pair<double, double> default_bracket(double a, double b);

inline constexpr double kDefaultBernsteinEps = 0.25;

}  // namespace mpclt
