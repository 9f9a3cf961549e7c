#pragma once

#include <utility>

#include "mpclt/common.hpp"

namespace mpclt {

/// Support edges a = (1-sqrt(y))^2, b = (1+sqrt(y))^2 of the Marchenko-Pastur
/// law with aspect ratio y > 0.
std::pair<double, double> support_edges(double y);

/// Marchenko-Pastur law with aspect ratio y = lim p/n and all the transform
/// machinery attached to it: Stieltjes transform s(z), companion transform
/// s_under(z) of (1-y)*1_(0,inf) + y*F_y, and the kernel
/// k(z) = s_under(z) / (s_under(z) + 1).
///
/// Complex square roots are always taken on the branch with positive
/// imaginary part; on the real axis outside the support the branch is the
/// continuous limit from the upper half plane. Values for Im z < 0 follow
/// from conjugate symmetry. All members are pure and reentrant.
class MPModel {
public:
    explicit MPModel(double y);

    double y() const { return y_; }
    double edge_low() const { return a_; }
    double edge_high() const { return b_; }
    /// Mass of the atom at the origin: 1 - 1/y for y > 1, else 0.
    double point_mass() const;
    /// True when y == 1; constructible, but the CLT operations reject it.
    bool is_critical() const { return y_ == 1.0; }

    /// Density of the absolutely continuous part, sqrt((x-a)(b-x))/(2 pi x y)
    /// on (a,b), zero outside. The y > 1 atom at 0 is not included here.
    double density(double x) const;

    /// Distribution function including the atom at 0 when y > 1.
    double cdf(double x) const;

    /// Stieltjes transform s(z) of F_y. Requires Im z != 0, or z real outside
    /// [a,b]; use boundary_s() on the support interior. Pole at z = 0 when
    /// y >= 1.
    cplx stieltjes_s(cplx z) const;

    /// Boundary value lim_{v->0+} s(x+iv) for x in (a,b). The discriminant is
    /// negative there, so the root is +i sqrt|.| and Im s(x) = pi * density(x).
    cplx boundary_s(double x) const;

    /// Companion transform s_under(z) = -(1-y)/z + y*s(z). Pole at z = 0.
    cplx stieltjes_underline(cplx z) const;
    cplx boundary_underline(double x) const;

    /// Kernel k(z) = s_under(z)/(s_under(z)+1). Throws SingularityError when
    /// s_under(z) = -1.
    cplx k_function(cplx z) const;
    cplx boundary_k(double x) const;

private:
    double y_;
    double a_;
    double b_;

    cplx edge_root(cplx z) const;
};

}  // namespace mpclt
