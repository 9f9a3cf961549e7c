#include "mpclt/clt_limits.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <vector>

#ifdef MPCLT_HAVE_OPENMP
#include <omp.h>
#endif

namespace mpclt {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 16-point Gauss-Legendre rule on [-1,1] (positive half; symmetric).
constexpr double kGlX[8] = {0.0950125098376374401853193, 0.2816035507792589132304605,
                            0.4580167776572273863424194, 0.6178762444026437484466718,
                            0.7554044083550030338951012, 0.8656312023878317438804679,
                            0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr double kGlW[8] = {0.1894506104550684962853967, 0.1826034150449235888667637,
                            0.1691565193950025381893121, 0.1495959888165767320815017,
                            0.1246289712555338720524763, 0.0951585116824927848099251,
                            0.0622535239386478928628438, 0.0271524594117540948517806};

struct ThetaGrid {
    const MPModel& model;
    double sqrt_y;
    double x(double theta) const { return 1.0 + model.y() + 2.0 * sqrt_y * std::cos(theta); }
    double jacobian(double theta) const { return 2.0 * sqrt_y * std::sin(theta); }
};

void require_clt_model(const MPModel& model, const char* who) {
    if (model.is_critical())
        throw DomainError(std::string(who) + ": y = 1 is excluded by the CLT");
}

void require_covers_support(const TestFunction& f, const MPModel& model, const char* who) {
    f.require_interval(model.edge_low(), model.edge_high(), who);
}

// Principal-branch continuity monitor for arg(1 - y k^2(x)) on an interior
// grid; a jump above pi between adjacent nodes would mean the principal
// branch is unusable, so we refuse rather than unwrap.
void monitor_arg_branch(const MPModel& model) {
    const int n = 512;
    const ThetaGrid grid{model, std::sqrt(model.y())};
    double prev = 0.0;
    for (int i = 0; i < n; ++i) {
        const double theta = (i + 0.5) * kPi / n;
        const cplx k = model.boundary_k(grid.x(theta));
        const double arg = std::arg(1.0 - model.y() * k * k);
        if (i > 0 && std::fabs(arg - prev) > kPi)
            throw BranchTrackingError("limiting_mean: arg(1 - y k^2) jumped across the branch cut");
        prev = arg;
    }
}

}  // namespace

MomentParams::MomentParams(double k1, double k2) : kappa1(k1), kappa2(k2) {
    if (k1 != 0.0 && k1 != 1.0)
        throw DomainError("MomentParams: kappa1 must be 0 (complex) or 1 (real)");
    if (!(k2 >= -2.0))
        throw DomainError("MomentParams: kappa2 must be >= -2");
}

double limiting_mean(const TestFunction& f, const MPModel& model, const MomentParams& mom,
                     const QuadConfig& quad) {
    require_clt_model(model, "limiting_mean");
    require_covers_support(f, model, "limiting_mean");
    const double y = model.y();
    const ThetaGrid grid{model, std::sqrt(y)};

    double term1 = 0.0;
    if (mom.kappa1 != 0.0) {
        monitor_arg_branch(model);
        const auto r = integrate(
            [&](double theta) {
                const double x = grid.x(theta);
                const cplx k = model.boundary_k(x);
                return f.d(1, x) * std::arg(1.0 - y * k * k) * grid.jacobian(theta);
            },
            0.0, kPi, quad.rel_tol, quad.abs_tol, quad.max_subdivisions);
        term1 = mom.kappa1 / (2.0 * kPi) * r.value;
    }

    double term2 = 0.0;
    if (mom.kappa2 != 0.0) {
        const auto r = integrate(
            [&](double theta) {
                const double x = grid.x(theta);
                const cplx k = model.boundary_k(x);
                const cplx ratio = y * k * k * k / (1.0 - y * k * k);
                return f(x) * ratio.imag() * grid.jacobian(theta);
            },
            0.0, kPi, quad.rel_tol, quad.abs_tol, quad.max_subdivisions);
        term2 = mom.kappa2 / kPi * r.value;
    }
    return term1 + term2;
}

double limiting_cov(const TestFunction& f, const TestFunction& g, const MPModel& model,
                    const MomentParams& mom, const QuadConfig& quad) {
    require_clt_model(model, "limiting_cov");
    require_covers_support(f, model, "limiting_cov");
    require_covers_support(g, model, "limiting_cov");
    // canonical argument order makes c(f,g) and c(g,f) bit-identical
    const TestFunction* fi = &f;
    const TestFunction* go = &g;
    if (go->name < fi->name) std::swap(fi, go);

    const double y = model.y();
    const ThetaGrid grid{model, std::sqrt(y)};
    const double c_log = (mom.kappa1 + 1.0) / (2.0 * kPi * kPi);
    const double c_k = -mom.kappa2 * y / (2.0 * kPi * kPi);
    const double abs_floor = 1e-13;

    const auto outer = integrate(
        [&](double theta2) {
            const double x2 = grid.x(theta2);
            const cplx su2 = model.boundary_underline(x2);
            const cplx k2 = su2 / (su2 + 1.0);
            const auto inner = integrate_anchored(
                [&](double theta1) {
                    const double x1 = grid.x(theta1);
                    const cplx su1 = model.boundary_underline(x1);
                    const cplx k1 = su1 / (su1 + 1.0);
                    double kernel = 0.0;
                    if (c_log != 0.0)
                        kernel += c_log * std::log(std::abs((std::conj(su1) - su2) / (su1 - su2)));
                    if (c_k != 0.0) kernel += c_k * (k1 * k2 - std::conj(k1) * k2).real();
                    return fi->d(1, x1) * kernel * grid.jacobian(theta1);
                },
                0.0, kPi, theta2, quad.diagonal_exclusion, quad.rel_tol_double, abs_floor,
                quad.max_subdivisions);
            return go->d(1, x2) * inner.value * grid.jacobian(theta2);
        },
        0.0, kPi, quad.rel_tol_double, abs_floor, quad.max_subdivisions);
    return outer.value;
}

double centering_integral(const TestFunction& f, double y_n, const QuadConfig& quad) {
    if (!(y_n > 0.0)) throw DomainError("centering_integral: y_n must be positive");
    const MPModel model(y_n);
    require_covers_support(f, model, "centering_integral");
    double atom = 0.0;
    if (y_n > 1.0) {
        if (!f.contains(0.0))
            throw DomainError("centering_integral: f undefined at the y_n > 1 atom x = 0");
        atom = f(0.0) * model.point_mass();
    }
    const ThetaGrid grid{model, std::sqrt(y_n)};
    // dF = 2 sin^2(theta) / (pi x(theta)) dtheta under the edge substitution
    const auto r = integrate(
        [&](double theta) {
            const double s = std::sin(theta);
            return f(grid.x(theta)) * 2.0 * s * s / (kPi * grid.x(theta));
        },
        0.0, kPi, quad.rel_tol, quad.abs_tol, quad.max_subdivisions);
    return atom + r.value;
}

namespace {

struct ContourNodes {
    std::vector<cplx> z;
    std::vector<cplx> w;  // GL weight times the complex side direction
};

// Counterclockwise rectangle: bottom (left to right), right, top, left.
ContourNodes discretize(const Contour& c) {
    if (!(c.a_l < c.b_r) || !(c.half_height > 0.0) || c.points_per_side < 16)
        throw DomainError("Contour: invalid geometry or fewer than 16 points per side");
    const cplx corners[5] = {cplx(c.a_l, -c.half_height), cplx(c.b_r, -c.half_height),
                             cplx(c.b_r, c.half_height), cplx(c.a_l, c.half_height),
                             cplx(c.a_l, -c.half_height)};
    const int panels = std::max(1, c.points_per_side / 16);
    ContourNodes nodes;
    nodes.z.reserve(4 * panels * 16);
    nodes.w.reserve(4 * panels * 16);
    for (int side = 0; side < 4; ++side) {
        const cplx z0 = corners[side], z1 = corners[side + 1];
        for (int p = 0; p < panels; ++p) {
            const cplx pa = z0 + (z1 - z0) * (static_cast<double>(p) / panels);
            const cplx pb = z0 + (z1 - z0) * (static_cast<double>(p + 1) / panels);
            const cplx mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
            for (int j = 7; j >= 0; --j) {
                nodes.z.push_back(mid - half * kGlX[j]);
                nodes.w.push_back(kGlW[j] * half);
            }
            for (int j = 0; j < 8; ++j) {
                nodes.z.push_back(mid + half * kGlX[j]);
                nodes.w.push_back(kGlW[j] * half);
            }
        }
    }
    return nodes;
}

void require_inside_strip(const Contour& c, const BernsteinApprox& fm, const char* who) {
    if (!(c.half_height <= fm.strip_half_width() * (1.0 + 1e-12)))
        throw DomainError(std::string(who) + ": contour exits the strip |Im z| <= 1/sqrt(m)");
    if (!(c.a_l >= fm.map().a_l && c.b_r <= fm.map().b_r))
        throw DomainError(std::string(who) + ": contour exits the approximation interval");
}

void require_brackets_support(const Contour& c, const MPModel& model, const char* who) {
    if (!(0.0 < c.a_l && c.a_l < model.edge_low() && model.edge_high() < c.b_r))
        throw DomainError(std::string(who) + ": contour must satisfy 0 < a_l < a < b < b_r");
}

}  // namespace

Contour default_contour(const MPModel& model, const BernsteinApprox& f_m, double inset,
                        double height_fraction, int points_per_side) {
    const AffineMap& map = f_m.map();
    const double a = model.edge_low(), b = model.edge_high();
    Contour c;
    c.a_l = map.a_l + inset * (a - map.a_l);
    c.b_r = map.b_r - inset * (map.b_r - b);
    c.half_height = height_fraction * f_m.strip_half_width();
    c.points_per_side = points_per_side;
    return c;
}

ContourValue mean_contour(const BernsteinApprox& f_m, const MPModel& model,
                          const MomentParams& mom, const Contour& contour) {
    require_clt_model(model, "mean_contour");
    require_inside_strip(contour, f_m, "mean_contour");
    require_brackets_support(contour, model, "mean_contour");
    const double y = model.y();
    const ContourNodes nodes = discretize(contour);
    cplx acc = 0.0;
    for (size_t i = 0; i < nodes.z.size(); ++i) {
        const cplx z = nodes.z[i];
        const cplx k = model.k_function(z);
        const cplx k3 = k * k * k;
        const cplx denom = 1.0 - y * k * k;
        const cplx mean_kernel =
            mom.kappa1 * y * k3 / (denom * denom) + mom.kappa2 * y * k3 / denom;
        acc += nodes.w[i] * f_m.evaluate_complex(z) * mean_kernel;
    }
    const cplx value = -acc / (cplx(0.0, 2.0 * kPi));
    return {value.real(), std::fabs(value.imag())};
}

ContourValue cov_contour(const BernsteinApprox& f_m, const BernsteinApprox& g_m,
                         const MPModel& model, const MomentParams& mom, const Contour& outer,
                         const Contour& inner) {
    require_clt_model(model, "cov_contour");
    require_inside_strip(outer, f_m, "cov_contour");
    require_inside_strip(inner, g_m, "cov_contour");
    require_brackets_support(outer, model, "cov_contour");
    require_brackets_support(inner, model, "cov_contour");
    if (!(inner.a_l > outer.a_l && inner.b_r < outer.b_r &&
          inner.half_height < outer.half_height))
        throw DomainError("cov_contour: inner contour must be strictly enclosed by the outer");

    const double y = model.y();
    const ContourNodes no = discretize(outer);
    const ContourNodes ni = discretize(inner);
    const size_t n1 = no.z.size(), n2 = ni.z.size();

    std::vector<cplx> su1(n1), fp1(n1), su2(n2), k2v(n2), gp2(n2);
    for (size_t i = 0; i < n1; ++i) {
        su1[i] = model.stieltjes_underline(no.z[i]);
        fp1[i] = f_m.derivative_complex(no.z[i]);
    }
    for (size_t j = 0; j < n2; ++j) {
        su2[j] = model.stieltjes_underline(ni.z[j]);
        k2v[j] = su2[j] / (su2[j] + 1.0);
        gp2[j] = g_m.derivative_complex(ni.z[j]);
    }

    std::vector<cplx> row(n1);
    std::atomic<bool> branch_fault{false};
#ifdef MPCLT_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long ii = 0; ii < static_cast<long long>(n1); ++ii) {
        if (branch_fault.load(std::memory_order_relaxed)) continue;
        const size_t i = static_cast<size_t>(ii);
        const cplx z1 = no.z[i];
        const cplx k1 = su1[i] / (su1[i] + 1.0);

        // log ratio along the inner contour, tracked continuously from a
        // reference node whose argument sits near the positive real axis
        std::vector<cplx> lw(n2);
        std::vector<double> args(n2);
        size_t ref = 0;
        double best = 4.0;
        for (size_t j = 0; j < n2; ++j) {
            const cplx w = su1[i] * su2[j] * (z1 - ni.z[j]) / (su1[i] - su2[j]);
            lw[j] = w;
            args[j] = std::arg(w);
            const double a = std::fabs(args[j]);
            if (a < best) {
                best = a;
                ref = j;
            }
        }
        if (best > 0.5 * kPi) {
            branch_fault.store(true, std::memory_order_relaxed);
            continue;
        }
        std::vector<double> tracked(n2);
        tracked[ref] = args[ref];
        bool jump = false;
        for (size_t step = 1; step <= n2; ++step) {
            const size_t j = (ref + step) % n2;
            const size_t jp = (ref + step - 1) % n2;
            const double d = std::remainder(args[j] - tracked[jp], 2.0 * kPi);
            if (std::fabs(d) > 0.5 * kPi) jump = true;
            if (step < n2) tracked[j] = tracked[jp] + d;
            else if (std::fabs(tracked[jp] + d - tracked[ref]) > 1e-9) jump = true;  // winding
        }
        if (jump) {
            branch_fault.store(true, std::memory_order_relaxed);
            continue;
        }

        cplx acc = 0.0;
        for (size_t j = 0; j < n2; ++j) {
            const cplx log_w = cplx(std::log(std::abs(lw[j])), tracked[j]);
            const cplx gamma = mom.kappa2 * y * k1 * k2v[j] - (mom.kappa1 + 1.0) * log_w;
            acc += ni.w[j] * gp2[j] * gamma;
        }
        row[i] = no.w[i] * fp1[i] * acc;
    }
    if (branch_fault.load())
        throw BranchTrackingError("cov_contour: log branch discontinuity along the inner contour");

    cplx total = 0.0;
    for (size_t i = 0; i < n1; ++i) total += row[i];
    const cplx value = -total / (4.0 * kPi * kPi);
    return {value.real(), std::fabs(value.imag())};
}

}  // namespace mpclt
