#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "mpclt/clt_limits.hpp"

using namespace mpclt;

namespace {

constexpr double kPi = 3.14159265358979323846;

TestFunction linear_combo(double alpha, const TestFunction& f, double beta,
                          const TestFunction& g) {
    TestFunction t;
    t.name = "combo";
    t.domain_low = std::max(f.domain_low, g.domain_low);
    t.f = [=](double x) { return alpha * f(x) + beta * g(x); };
    for (int k = 1; k <= 4; ++k)
        t.deriv[k - 1] = [=](double x) { return alpha * f.d(k, x) + beta * g.d(k, x); };
    return t;
}

TestFunction constant(double c) {
    TestFunction t;
    t.name = "const";
    t.domain_low = -1e300;
    t.f = [c](double) { return c; };
    t.deriv = {[](double) { return 0.0; }, [](double) { return 0.0; },
               [](double) { return 0.0; }, [](double) { return 0.0; }};
    return t;
}

// closed-form targets from the exact finite-n trace moments (see tests notes):
//   mean(x) = 0, mean(x^2) = (k1 + k2) y, mean(ln) = k1 ln(1-y)/2 - k2 y/2
//   c(x,x) = (k1+1+k2) y
//   c(x,x^2) = (k1+1+k2) 2y(1+y)
//   c(x^2,x^2) = (k1+1)(4y(1+y)^2 + 2y^2) + k2 4y(1+y)^2
//   c(ln,ln) = -(k1+1) ln(1-y) + k2 y
double cov_x2x2(double k1, double k2, double y) {
    return (k1 + 1) * (4 * y * (1 + y) * (1 + y) + 2 * y * y) + k2 * 4 * y * (1 + y) * (1 + y);
}

}  // namespace

TEST_CASE("centering integral") {
    const QuadConfig quad;
    CHECK(centering_integral(builtin("poly1"), 0.37, quad) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(centering_integral(builtin("poly2"), 0.5, quad) == doctest::Approx(1.5).epsilon(1e-8));
    // higher MP moments against the combinatorial formula
    for (double y : {0.25, 0.5}) {
        CHECK(centering_integral(builtin("poly3"), y, quad) ==
              doctest::Approx(1 + 3 * y + y * y).epsilon(1e-8));
        CHECK(centering_integral(builtin("power(4)"), y, quad) ==
              doctest::Approx(1 + 6 * y + 6 * y * y + y * y * y).epsilon(1e-8));
    }
    CHECK(centering_integral(constant(1.0), 0.5, quad) == doctest::Approx(1.0).epsilon(1e-12));
    SUBCASE("atom for y_n > 1") {
        CHECK(centering_integral(builtin("poly2"), 4.0, quad) == doctest::Approx(5.0).epsilon(1e-8));
        CHECK(centering_integral(constant(2.0), 4.0, quad) == doctest::Approx(2.0).epsilon(1e-10));
        CHECK_THROWS_AS(centering_integral(builtin("log"), 4.0, quad), DomainError);
    }
}

TEST_CASE("limiting mean oracles") {
    const MPModel m05(0.5);
    CHECK(std::fabs(limiting_mean(builtin("poly1"), m05, {1.0, 0.0}, {})) < 1e-6);
    CHECK(std::fabs(limiting_mean(builtin("poly1"), m05, {1.0, -2.0}, {})) < 1e-6);
    CHECK(limiting_mean(builtin("poly2"), m05, {1.0, 0.0}, {}) ==
          doctest::Approx(0.5).epsilon(2e-4));
    CHECK(limiting_mean(builtin("poly2"), m05, {1.0, -2.0}, {}) ==
          doctest::Approx(-0.5).epsilon(2e-4));
    CHECK(limiting_mean(builtin("poly2"), m05, {0.0, 0.0}, {}) == 0.0);
    for (double y : {0.25, 0.5}) {
        const MPModel m(y);
        CHECK(limiting_mean(builtin("log"), m, {1.0, 0.0}, {}) ==
              doctest::Approx(0.5 * std::log(1 - y)).epsilon(1e-6));
    }
    CHECK(limiting_mean(builtin("log"), m05, {1.0, -2.0}, {}) ==
          doctest::Approx(0.5 * std::log(0.5) + 0.5).epsilon(1e-6));
    SUBCASE("linearity") {
        const TestFunction combo = linear_combo(0.5, builtin("poly2"), -0.25, builtin("poly1"));
        const double lhs = limiting_mean(combo, m05, {1.0, -2.0}, {});
        const double rhs = 0.5 * limiting_mean(builtin("poly2"), m05, {1.0, -2.0}, {}) -
                           0.25 * limiting_mean(builtin("poly1"), m05, {1.0, -2.0}, {});
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }
    SUBCASE("model restrictions") {
        CHECK_THROWS_AS(limiting_mean(builtin("poly1"), MPModel(1.0), {1.0, 0.0}, {}), DomainError);
        CHECK_THROWS_AS(limiting_mean(builtin("log"), MPModel(1.0 - 1e-12), {1.0, 0.0}, {}),
                        DomainError);  // support touches log's domain edge
        CHECK(std::isfinite(limiting_mean(builtin("poly2"), MPModel(4.0), {1.0, 0.0}, {})));
    }
}

TEST_CASE("limiting covariance oracles") {
    for (double y : {0.25, 0.5}) {
        const MPModel m(y);
        const TestFunction x = builtin("poly1");
        CHECK(limiting_cov(x, x, m, {1.0, 0.0}, {}) == doctest::Approx(2 * y).epsilon(1e-4));
        CHECK(limiting_cov(x, x, m, {0.0, 0.0}, {}) == doctest::Approx(y).epsilon(1e-4));
        CHECK(std::fabs(limiting_cov(x, x, m, {1.0, -2.0}, {})) < 1e-5);  // tr B is a.s. constant
    }
    const MPModel m05(0.5);
    const TestFunction x = builtin("poly1"), x2 = builtin("poly2"), ln = builtin("log");
    CHECK(limiting_cov(x, x2, m05, {1.0, 0.0}, {}) == doctest::Approx(3.0).epsilon(1e-5));
    CHECK(std::fabs(limiting_cov(x, x2, m05, {1.0, -2.0}, {})) < 1e-5);
    CHECK(limiting_cov(x2, x2, m05, {1.0, 0.0}, {}) ==
          doctest::Approx(cov_x2x2(1, 0, 0.5)).epsilon(1e-5));
    CHECK(limiting_cov(x2, x2, m05, {1.0, -2.0}, {}) ==
          doctest::Approx(cov_x2x2(1, -2, 0.5)).epsilon(1e-4));
    CHECK(limiting_cov(x2, x2, m05, {0.0, 0.0}, {}) ==
          doctest::Approx(cov_x2x2(0, 0, 0.5)).epsilon(1e-5));
    CHECK(limiting_cov(ln, ln, m05, {1.0, 0.0}, {}) ==
          doctest::Approx(-2.0 * std::log(0.5)).epsilon(1e-5));
    CHECK(limiting_cov(ln, ln, m05, {1.0, -2.0}, {}) ==
          doctest::Approx(-2.0 * std::log(0.5) - 1.0).epsilon(1e-4));

    SUBCASE("swap symmetry is exact") {
        CHECK(limiting_cov(x, x2, m05, {1.0, -2.0}, {}) ==
              limiting_cov(x2, x, m05, {1.0, -2.0}, {}));
        CHECK(limiting_cov(ln, x2, m05, {1.0, 0.0}, {}) ==
              limiting_cov(x2, ln, m05, {1.0, 0.0}, {}));
    }
    SUBCASE("bilinearity") {
        QuadConfig tight;
        tight.rel_tol_double = 1e-10;
        const TestFunction combo = linear_combo(0.5, x2, -0.25, x);
        const double lhs = limiting_cov(combo, x, m05, {1.0, 0.0}, tight);
        const double rhs = 0.5 * limiting_cov(x2, x, m05, {1.0, 0.0}, tight) -
                           0.25 * limiting_cov(x, x, m05, {1.0, 0.0}, tight);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }
    SUBCASE("positive semidefinite 3x3 covariance") {
        const std::vector<TestFunction> fs = {x, x2, ln};
        Eigen::Matrix3d cov;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                cov(i, j) = limiting_cov(fs[i], fs[j], m05, {1.0, 0.0}, {});
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
        CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    }
}

TEST_CASE("spectral-series dual route for the covariance") {
    // ln|sin((t1+t2)/2)/sin((t1-t2)/2)| = sum_j (2/j) sin(j t1) sin(j t2), so
    // the log part must equal ((k1+1)/2pi^2) sum_j (2/j) Phi_j(f) Phi_j(g)
    // with Phi_j(f) = Int f'(x(t)) sin(j t) J(t) dt. Independent of the
    // anchored 2-D quadrature route.
    const double y = 0.5;
    const MPModel model(y);
    const double sy = std::sqrt(y);
    auto phi = [&](const TestFunction& f, int j) {
        return integrate(
                   [&](double t) {
                       const double xx = 1 + y + 2 * sy * std::cos(t);
                       return f.d(1, xx) * std::sin(j * t) * 2 * sy * std::sin(t);
                   },
                   0.0, kPi, 1e-11, 1e-13, 4000)
            .value;
    };
    auto series_cov = [&](const TestFunction& f, const TestFunction& g, double k1, double k2) {
        double acc = 0.0;
        for (int j = 1; j <= 60; ++j) acc += (2.0 / j) * phi(f, j) * phi(g, j);
        const double log_part = (k1 + 1) / (2 * kPi * kPi) * acc;
        // the kappa2 kernel factorizes: Re[k1 k2 - conj(k1) k2] = -2 Im k(x1) Im k(x2),
        // giving (4 k2 y / pi^2) S(f) S(g) with S(f) = Int f' sin^2 = Phi_1 / (2 sqrt(y))
        const double sf = phi(f, 1) / (2 * sy), sg = phi(g, 1) / (2 * sy);
        return log_part + 4.0 * k2 * y / (kPi * kPi) * sf * sg;
    };
    const TestFunction x2 = builtin("poly2"), ln = builtin("log");
    CHECK(limiting_cov(x2, ln, model, {1.0, 0.0}, {}) ==
          doctest::Approx(series_cov(x2, ln, 1, 0)).epsilon(1e-6));
    CHECK(limiting_cov(x2, ln, model, {1.0, -2.0}, {}) ==
          doctest::Approx(series_cov(x2, ln, 1, -2)).epsilon(1e-6));
}

TEST_CASE("edge substitution reproduces raw x-space quadrature") {
    const double y = 0.25;
    const MPModel model(y);
    const TestFunction f = builtin("poly2");
    const double a = model.edge_low(), b = model.edge_high();
    // term 1: bounded integrand, raw quadrature converges to full accuracy.
    // Refinement can bisect a panel endpoint onto the exact edge; the arg
    // limit there is -+ pi/2.
    const double raw_term1 =
        1.0 / (2 * kPi) *
        integrate(
            [&](double x) {
                if (x <= a) return f.d(1, x) * (-0.5 * kPi);
                if (x >= b) return f.d(1, x) * (0.5 * kPi);
                const cplx k = model.boundary_k(x);
                return f.d(1, x) * std::arg(1.0 - y * k * k);
            },
            a, b, 1e-10, 1e-12, 20000)
            .value;
    const double term1 = limiting_mean(f, model, {1.0, 0.0}, {});
    CHECK(term1 == doctest::Approx(raw_term1).epsilon(1e-8));
    // term 2 diverges like 1/sqrt at the edges; raw adaptive quadrature only
    // converges to a few digits before the panels hit the rounding floor, so
    // the cross-check tolerance is looser here.
    const double raw_term2 =
        -2.0 / kPi *
        integrate(
            [&](double x) {
                if (x <= a || x >= b) return 0.0;
                const cplx k = model.boundary_k(x);
                return f(x) * (y * k * k * k / (1.0 - y * k * k)).imag();
            },
            a, b, 1e-6, 1e-8, 20000)
            .value;
    const double term2 = limiting_mean(f, model, {0.0, -2.0}, {});
    CHECK(term2 == doctest::Approx(raw_term2).epsilon(1e-4));
}

TEST_CASE("mean via contour") {
    const MPModel model(0.5);
    const int m = 64;
    const auto [al, br] = default_bracket(model.edge_low(), model.edge_high());
    const TestFunction f = builtin("poly2");
    const auto fm = BernsteinApprox::build(f, al, br, kDefaultBernsteinEps, m)
                        .corrected_by(BernsteinApprox::correction(f, al, br, kDefaultBernsteinEps, m));
    const Contour c = default_contour(model, fm, 0.25, 0.8, 256);
    SUBCASE("agrees with the real-line formula") {
        const ContourValue v = mean_contour(fm, model, {1.0, 0.0}, c);
        CHECK(v.value == doctest::Approx(limiting_mean(f, model, {1.0, 0.0}, {})).epsilon(5e-3));
        CHECK(v.imag_residual < 1e-8);
    }
    SUBCASE("zero moments give exactly zero") {
        CHECK(mean_contour(fm, model, {0.0, 0.0}, c).value == 0.0);
    }
    SUBCASE("discretization is converged") {
        Contour c2 = c;
        c2.points_per_side = 512;
        CHECK(std::fabs(mean_contour(fm, model, {1.0, -2.0}, c).value -
                        mean_contour(fm, model, {1.0, -2.0}, c2).value) < 1e-8);
    }
    SUBCASE("contour validation") {
        Contour bad = c;
        bad.half_height = 2.0 * fm.strip_half_width();
        CHECK_THROWS_AS(mean_contour(fm, model, {1.0, 0.0}, bad), DomainError);
        Contour off = c;
        off.a_l = model.edge_low() + 1e-3;  // does not bracket the support
        CHECK_THROWS_AS(mean_contour(fm, model, {1.0, 0.0}, off), DomainError);
    }
}

TEST_CASE("covariance via double contour") {
    const MPModel model(0.5);
    const int m = 64;
    const auto [al, br] = default_bracket(model.edge_low(), model.edge_high());
    auto corrected = [&](const TestFunction& f) {
        return BernsteinApprox::build(f, al, br, kDefaultBernsteinEps, m)
            .corrected_by(BernsteinApprox::correction(f, al, br, kDefaultBernsteinEps, m));
    };
    const auto fx = corrected(builtin("poly1"));
    const auto fx2 = corrected(builtin("poly2"));
    const Contour outer = default_contour(model, fx, 0.2, 0.8, 192);
    const Contour inner = default_contour(model, fx, 0.5, 0.4, 192);
    SUBCASE("matches the exact trace-variance value") {
        const ContourValue v = cov_contour(fx, fx, model, {1.0, 0.0}, outer, inner);
        CHECK(v.value == doctest::Approx(1.0).epsilon(5e-3));  // 2y at y = 0.5
        CHECK(v.imag_residual < 1e-6);
    }
    SUBCASE("swap within discretization error") {
        const double ab = cov_contour(fx, fx2, model, {1.0, -2.0}, outer, inner).value;
        const double ba = cov_contour(fx2, fx, model, {1.0, -2.0}, outer, inner).value;
        CHECK(std::fabs(ab - ba) < 1e-6);
    }
    SUBCASE("constant polynomial drops out") {
        const auto c1 = BernsteinApprox::build(constant(4.0), al, br, kDefaultBernsteinEps, m);
        CHECK(std::fabs(cov_contour(c1, fx, model, {1.0, 0.0}, outer, inner).value) < 1e-10);
    }
    SUBCASE("contours must nest") {
        CHECK_THROWS_AS(cov_contour(fx, fx, model, {1.0, 0.0}, inner, outer), DomainError);
        CHECK_THROWS_AS(cov_contour(fx, fx, model, {1.0, 0.0}, outer, outer), DomainError);
    }
}
