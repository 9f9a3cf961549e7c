#include "mpclt/mp_model.hpp"

#include <cmath>

namespace mpclt {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::pair<double, double> support_edges(double y) {
    if (!(y > 0.0) || !std::isfinite(y))
        throw DomainError("support_edges: aspect ratio must be positive");
    const double r = std::sqrt(y);
    return {(1.0 - r) * (1.0 - r), (1.0 + r) * (1.0 + r)};
}

MPModel::MPModel(double y) : y_(y) {
    auto [a, b] = support_edges(y);
    a_ = a;
    b_ = b;
}

double MPModel::point_mass() const { return y_ > 1.0 ? 1.0 - 1.0 / y_ : 0.0; }

double MPModel::density(double x) const {
    if (!std::isfinite(x)) throw DomainError("density: x must be finite");
    if (x <= a_ || x >= b_) return 0.0;
    return std::sqrt((x - a_) * (b_ - x)) / (2.0 * kPi * x * y_);
}

double MPModel::cdf(double x) const {
    if (std::isnan(x)) throw DomainError("cdf: x must not be NaN");
    const double atom = point_mass();
    if (x < 0.0) return 0.0;
    if (x < a_) return atom;
    if (x >= b_) return 1.0;
    // Antiderivative of the density under x = 1 + y + 2 sqrt(y) cos(theta):
    // the integral from theta to pi of 2 sin^2 t / (pi x(t)) dt has the closed
    // form below (arctan term from the Weierstrass substitution).
    const double sy = std::sqrt(y_);
    double c = (x - 1.0 - y_) / (2.0 * sy);
    c = std::fmin(1.0, std::fmax(-1.0, c));
    const double theta = std::acos(c);
    const double B2 = 4.0 * y_;
    const double ratio = std::fabs(1.0 - sy) / (1.0 + sy);
    double I = -std::sin(theta) / (2.0 * sy) + (1.0 + y_) * theta / B2;
    if (y_ != 1.0)  // arctan term carries a factor (1-y)^2 / |1-y|
        I -= (std::fabs(1.0 - y_) / B2) * 2.0 * std::atan(ratio * std::tan(0.5 * theta));
    const double I_pi = kPi * ((1.0 + y_) - std::fabs(1.0 - y_)) / B2;
    return std::fmin(1.0, std::fmax(0.0, atom + (2.0 / kPi) * (I_pi - I)));
}

// sqrt((z-a)(z-b)) on the branch with positive imaginary part; ties on the
// positive real axis resolved by continuity from the upper half plane.
cplx MPModel::edge_root(cplx z) const {
    const cplx disc = (z - a_) * (z - b_);
    if (disc.imag() > 0.0) return std::sqrt(disc);
    if (disc.imag() < 0.0) return -std::sqrt(disc);
    if (disc.real() <= 0.0) return cplx(0.0, std::sqrt(-disc.real()));
    const double sign = 2.0 * z.real() >= a_ + b_ ? 1.0 : -1.0;
    return cplx(sign * std::sqrt(disc.real()), 0.0);
}

cplx MPModel::stieltjes_s(cplx z) const {
    if (z.imag() < 0.0) return std::conj(stieltjes_s(std::conj(z)));
    if (z.imag() == 0.0) {
        const double x = z.real();
        if (x == 0.0) {
            if (y_ >= 1.0) throw SingularityError("stieltjes_s: pole at z = 0 for y >= 1");
            return cplx(1.0 / (1.0 - y_), 0.0);  // removable 0/0 of the closed form
        }
        if (x > a_ && x < b_)
            throw DomainError("stieltjes_s: z on the support interior; use boundary_s");
    }
    return (-z + (1.0 - y_) + edge_root(z)) / (2.0 * y_ * z);
}

cplx MPModel::boundary_s(double x) const {
    if (!(x > a_ && x < b_))
        throw DomainError("boundary_s: x must lie strictly inside (a,b)");
    const double root = std::sqrt((x - a_) * (b_ - x));
    return cplx(-x + (1.0 - y_), root) / (2.0 * y_ * x);
}

cplx MPModel::stieltjes_underline(cplx z) const {
    if (z == cplx(0.0, 0.0))
        throw SingularityError("stieltjes_underline: pole at z = 0");
    return -(1.0 - y_) / z + y_ * stieltjes_s(z);
}

cplx MPModel::boundary_underline(double x) const {
    return -(1.0 - y_) / x + y_ * boundary_s(x);
}

namespace {
cplx k_of(cplx s_under) {
    const cplx den = s_under + 1.0;
    if (den == cplx(0.0, 0.0))
        throw SingularityError("k_function: s_under(z) = -1");
    return s_under / den;
}
}  // namespace

cplx MPModel::k_function(cplx z) const { return k_of(stieltjes_underline(z)); }

cplx MPModel::boundary_k(double x) const { return k_of(boundary_underline(x)); }

}  // namespace mpclt
