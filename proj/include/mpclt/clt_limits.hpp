#pragma once

#include "mpclt/bernstein.hpp"
#include "mpclt/common.hpp"
#include "mpclt/mp_model.hpp"
#include "mpclt/quadrature.hpp"
#include "mpclt/test_functions.hpp"

namespace mpclt {

/// Fourth-moment parameters of the entry law: kappa1 = |E x^2|^2 (1 for real
/// entries, 0 for complex entries with E x^2 = 0) and
/// kappa2 = E|x|^4 - kappa1 - 2.
struct MomentParams {
    double kappa1;
    double kappa2;
    MomentParams(double k1, double k2);
};

/// Rectangular integration contour with vertices (a_l +- i v), (b_r +- i v),
/// traversed counterclockwise, discretized by composite 16-point
/// Gauss-Legendre panels per side (points_per_side nodes per side).
struct Contour {
    double a_l;
    double b_r;
    double half_height;
    int points_per_side = 256;
};

struct ContourValue {
    double value;          // real part of the contour integral
    double imag_residual;  // |imaginary part|, reported as a diagnostic
};

/// Limiting mean E G(f) of Theorem-type CLT:
///   (kappa1/2pi) Int f'(x) arg(1 - y k^2(x)) dx
///   + (kappa2/pi) Int f(x) Im(y k^3(x) / (1 - y k^2(x))) dx over [a,b].
/// Both integrals are computed in the variable theta with
/// x = 1 + y + 2 sqrt(y) cos(theta), which removes the square-root edge
/// behavior. The principal branch of arg is used, with a grid monitor that
/// throws BranchTrackingError if adjacent nodes ever jump by more than pi.
double limiting_mean(const TestFunction& f, const MPModel& model, const MomentParams& mom,
                     const QuadConfig& quad = {});

/// Limiting covariance c(f, g):
///   ((kappa1+1)/2pi^2) DInt f'(x1) g'(x2) ln|(conj(su(x1))-su(x2)) / (su(x1)-su(x2))|
///   - (kappa2 y/2pi^2) DInt f'(x1) g'(x2) Re[k(x1)k(x2) - conj(k(x1))k(x2)].
/// The logarithmic diagonal singularity is handled by anchoring the inner
/// adaptive subdivision at x1 = x2 with the diagonal_exclusion floor.
/// Symmetric in (f, g) by canonicalizing the argument order.
double limiting_cov(const TestFunction& f, const TestFunction& g, const MPModel& model,
                    const MomentParams& mom, const QuadConfig& quad = {});

/// Centering integral Int f dF_{y_n} at the finite-n ratio y_n = p/n,
/// including the atom f(0) (1 - 1/y_n) when y_n > 1.
double centering_integral(const TestFunction& f, double y_n, const QuadConfig& quad = {});

/// Mean via the contour representation: -(1/2pi i) Oint f_m(z) M(z) dz with
///   M(z) = kappa1 y k^3/(1-y k^2)^2 + kappa2 y k^3/(1-y k^2)
/// over the closed rectangle. The contour must stay inside the polynomial's
/// strip of guaranteed boundedness.
ContourValue mean_contour(const BernsteinApprox& f_m, const MPModel& model,
                          const MomentParams& mom, const Contour& contour);

/// Covariance via the double contour representation:
///   -(1/4pi^2) Oint Oint f_m'(z1) g_m'(z2) Gamma(z1,z2) dz1 dz2,
///   Gamma = kappa2 y k(z1)k(z2)
///           - (kappa1+1) ln( su(z1) su(z2) (z1-z2) / (su(z1)-su(z2)) ).
/// The inner contour must be strictly enclosed by the outer one. The log is
/// tracked continuously along the inner contour from a reference node whose
/// argument lies near the positive real axis; discontinuities raise
/// BranchTrackingError.
ContourValue cov_contour(const BernsteinApprox& f_m, const BernsteinApprox& g_m,
                         const MPModel& model, const MomentParams& mom, const Contour& outer,
                         const Contour& inner);

/// Contour hugging the strip of f_m: horizontal extent equal to the
/// approximation interval shrunk by `inset` of the margin on each side,
/// half-height `height_fraction` * 1/sqrt(m).
Contour default_contour(const MPModel& model, const BernsteinApprox& f_m, double inset,
                        double height_fraction, int points_per_side = 256);

}  // namespace mpclt
