#include "mpclt/bernstein.hpp"

#include <cmath>

namespace mpclt {

AffineMap AffineMap::create(double a_l, double b_r, double eps) {
    if (!(a_l < b_r)) throw DomainError("AffineMap: requires a_l < b_r");
    if (!(eps > 0.0 && eps < 0.5)) throw DomainError("AffineMap: requires 0 < eps < 1/2");
    AffineMap m;
    m.a_l = a_l;
    m.b_r = b_r;
    m.eps = eps;
    m.L = (1.0 - 2.0 * eps) / (b_r - a_l);
    m.c = ((a_l + b_r) * eps - a_l) / (b_r - a_l);
    return m;
}

BernsteinApprox::BernsteinApprox(AffineMap map, std::vector<double> samples)
    : map_(map), samples_(std::move(samples)) {
    if (samples_.size() < 2) throw DomainError("BernsteinApprox: degree must be >= 1");
    const int m = degree();
    log_binom_.resize(m + 1);
    for (int k = 0; k <= m; ++k)
        log_binom_[k] = std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0);
}

namespace {

// The sampling lattice k/m covers all of [0,1], whose preimage under
// u = Lx + c is wider than [a_l, b_r]. Outside that interval the rescaled
// function is continued by its fourth-order Taylor polynomial at the nearer
// endpoint: a C^4 extension to the full unit interval, which is what the
// construction assumes. Exact for polynomials of degree <= 4.
double taylor4(const TestFunction& f, double x0, double x) {
    const double d = x - x0;
    return f(x0) +
           d * (f.d(1, x0) +
                d * (f.d(2, x0) / 2.0 + d * (f.d(3, x0) / 6.0 + d * f.d(4, x0) / 24.0)));
}

double extended_value(const TestFunction& f, double a_l, double b_r, double x) {
    if (x < a_l) return taylor4(f, a_l, x);
    if (x > b_r) return taylor4(f, b_r, x);
    return f(x);
}

double extended_d2(const TestFunction& f, double a_l, double b_r, double x) {
    const double x0 = x < a_l ? a_l : b_r;
    if (x >= a_l && x <= b_r) return f.d(2, x);
    const double d = x - x0;
    return f.d(2, x0) + d * (f.d(3, x0) + d * f.d(4, x0) / 2.0);
}

}  // namespace

BernsteinApprox BernsteinApprox::build(const TestFunction& f, double a_l, double b_r, double eps,
                                       int m) {
    if (m < 1) throw DomainError("BernsteinApprox::build: degree must be >= 1");
    f.require_interval(a_l, b_r, "BernsteinApprox::build");
    const AffineMap map = AffineMap::create(a_l, b_r, eps);
    std::vector<double> samples(m + 1);
    for (int k = 0; k <= m; ++k)
        samples[k] = extended_value(f, a_l, b_r, map.from_unit(static_cast<double>(k) / m));
    return BernsteinApprox(map, std::move(samples));
}

BernsteinApprox BernsteinApprox::correction(const TestFunction& f, double a_l, double b_r,
                                            double eps, int m) {
    if (m < 1) throw DomainError("BernsteinApprox::correction: degree must be >= 1");
    f.require_interval(a_l, b_r, "BernsteinApprox::correction");
    const AffineMap map = AffineMap::create(a_l, b_r, eps);
    std::vector<double> samples(m + 1);
    for (int k = 0; k <= m; ++k) {
        const double u = static_cast<double>(k) / m;
        const double x = map.from_unit(u);
        samples[k] = u * (1.0 - u) * extended_d2(f, a_l, b_r, x) / (map.L * map.L);
    }
    return BernsteinApprox(map, std::move(samples));
}

BernsteinApprox BernsteinApprox::corrected_by(const BernsteinApprox& h) const {
    if (h.degree() != degree() || h.map_.a_l != map_.a_l || h.map_.b_r != map_.b_r ||
        h.map_.eps != map_.eps)
        throw DomainError("corrected_by: correction must share degree and map");
    const int m = degree();
    std::vector<double> combined(samples_);
    for (int k = 0; k <= m; ++k) combined[k] -= h.samples_[k] / (2.0 * m);
    return BernsteinApprox(map_, std::move(combined));
}

double BernsteinApprox::strip_half_width() const { return 1.0 / std::sqrt(degree()); }

double BernsteinApprox::evaluate(double x) const {
    if (!(x >= map_.a_l && x <= map_.b_r))
        throw DomainError("BernsteinApprox::evaluate: x outside [a_l, b_r]");
    const double u = map_.to_unit(x);
    std::vector<double> scratch(samples_);
    const int m = degree();
    for (int level = m; level >= 1; --level)
        for (int k = 0; k < level; ++k) scratch[k] += u * (scratch[k + 1] - scratch[k]);
    return scratch[0];
}

double BernsteinApprox::derivative(double x) const {
    if (!(x >= map_.a_l && x <= map_.b_r))
        throw DomainError("BernsteinApprox::derivative: x outside [a_l, b_r]");
    const double u = map_.to_unit(x);
    const int m = degree();
    std::vector<double> scratch(m);
    for (int k = 0; k < m; ++k) scratch[k] = samples_[k + 1] - samples_[k];
    for (int level = m - 1; level >= 1; --level)
        for (int k = 0; k < level; ++k) scratch[k] += u * (scratch[k + 1] - scratch[k]);
    return scratch[0] * m * map_.L;
}

void BernsteinApprox::check_strip(cplx z) const {
    const double v = strip_half_width() * (1.0 + 1e-12);
    if (!(z.real() >= map_.a_l && z.real() <= map_.b_r))
        throw DomainError("BernsteinApprox: Re z outside [a_l, b_r]");
    if (!(std::fabs(z.imag()) <= v))
        throw DomainError("BernsteinApprox: |Im z| exceeds the strip half-width 1/sqrt(m)");
}

cplx BernsteinApprox::evaluate_complex(cplx z) const {
    check_strip(z);
    const cplx u = map_.to_unit(z);
    const cplx w = 1.0 - u;
    const int m = degree();
    // powers accumulated iteratively; coefficients via exp(ln C(m,k))
    std::vector<cplx> pu(m + 1), pw(m + 1);
    pu[0] = pw[0] = 1.0;
    for (int k = 1; k <= m; ++k) {
        pu[k] = pu[k - 1] * u;
        pw[k] = pw[k - 1] * w;
    }
    cplx acc = 0.0;
    for (int k = 0; k <= m; ++k) acc += samples_[k] * std::exp(log_binom_[k]) * pu[k] * pw[m - k];
    return acc;
}

cplx BernsteinApprox::derivative_complex(cplx z) const {
    check_strip(z);
    const cplx u = map_.to_unit(z);
    const cplx w = 1.0 - u;
    const int m = degree();
    std::vector<cplx> pu(m), pw(m);
    pu[0] = pw[0] = 1.0;
    for (int k = 1; k < m; ++k) {
        pu[k] = pu[k - 1] * u;
        pw[k] = pw[k - 1] * w;
    }
    cplx acc = 0.0;
    for (int k = 0; k < m; ++k) {
        const double lb = std::lgamma(m + 0.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 0.0);
        acc += (samples_[k + 1] - samples_[k]) * std::exp(lb) * pu[k] * pw[m - 1 - k];
    }
    return acc * static_cast<double>(m) * map_.L;
}

int default_degree(long long n) {
    if (n < 2) throw DomainError("default_degree: n must be >= 2");
    return static_cast<int>(std::floor(std::pow(static_cast<double>(n), 13.0 / 40.0)));
}

std::pair<double, double> default_bracket(double a, double b) {
    const double pad = 0.05 * (b - a);
    return {std::max(0.5 * a, a - pad), b + pad};
}

}  // namespace mpclt
