#include <cmath>
#include <random>

#include "doctest.h"
#include "mpclt/bernstein.hpp"
#include "mpclt/mp_model.hpp"

using namespace mpclt;

namespace {

TestFunction constant(double c) {
    TestFunction t;
    t.name = "const";
    t.domain_low = -1e300;
    t.f = [c](double) { return c; };
    t.deriv = {[](double) { return 0.0; }, [](double) { return 0.0; },
               [](double) { return 0.0; }, [](double) { return 0.0; }};
    return t;
}

// independent oracle: direct binomial summation with exact Pascal coefficients
double direct_sum(const BernsteinApprox& ap, double x) {
    const int m = ap.degree();
    const double u = ap.map().to_unit(x);
    std::vector<double> binom(m + 1);
    binom[0] = 1.0;
    for (int k = 1; k <= m; ++k) binom[k] = binom[k - 1] * (m - k + 1) / k;
    double acc = 0.0;
    for (int k = 0; k <= m; ++k)
        acc += ap.samples()[k] * binom[k] * std::pow(u, k) * std::pow(1.0 - u, m - k);
    return acc;
}

}  // namespace

TEST_CASE("constants and affine functions are reproduced exactly") {
    for (int m : {1, 2, 7, 64}) {
        const auto c3 = BernsteinApprox::build(constant(3.0), 0.5, 2.0, 0.25, m);
        const auto id = BernsteinApprox::build(builtin("poly1"), 0.5, 2.0, 0.25, m);
        for (double x : {0.5, 0.9, 1.3, 2.0}) {
            CHECK(c3.evaluate(x) == doctest::Approx(3.0).epsilon(1e-14));
            CHECK(id.evaluate(x) == doctest::Approx(x).epsilon(1e-13));
        }
    }
}

TEST_CASE("quadratic has the u(1-u)/m defect on the unit map") {
    // a_l = 0.25, b_r = 0.75 with eps = 0.25 makes u = x (identity map)
    const int m = 20;
    const auto ap = BernsteinApprox::build(builtin("poly2"), 0.25, 0.75, 0.25, m);
    CHECK(ap.map().L == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ap.map().c == doctest::Approx(0.0).epsilon(1e-15));
    for (int i = 0; i <= 100; ++i) {
        const double u = 0.25 + 0.5 * i / 100.0;
        CHECK(ap.evaluate(u) == doctest::Approx(u * u + u * (1 - u) / m).epsilon(1e-13));
    }
}

TEST_CASE("de Casteljau agrees with direct summation") {
    const auto ap = BernsteinApprox::build(builtin("log"), 0.2, 2.5, 0.25, 33);
    for (int i = 0; i <= 1000; ++i) {
        const double x = 0.2 + 2.3 * i / 1000.0;
        CHECK(std::fabs(ap.evaluate(x) - direct_sum(ap, x)) < 1e-12);
    }
}

TEST_CASE("convex combination bound") {
    const auto ap = BernsteinApprox::build(builtin("exp"), 0.1, 2.0, 0.3, 16);
    double lo = 1e300, hi = -1e300;
    for (double s : ap.samples()) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> dist(0.1, 2.0);
    for (int i = 0; i < 1000000; ++i) {
        const double v = ap.evaluate(dist(gen));
        CHECK(v >= lo - 1e-12);
        CHECK(v <= hi + 1e-12);
    }
}

TEST_CASE("uniform error halves when the degree doubles") {
    const TestFunction f = builtin("poly3");
    auto sup_err = [&](int m) {
        const auto ap = BernsteinApprox::build(f, 0.3, 2.2, 0.25, m);
        double sup = 0.0;
        for (int i = 0; i <= 1000; ++i) {
            const double x = 0.3 + 1.9 * i / 1000.0;
            sup = std::max(sup, std::fabs(ap.evaluate(x) - f(x)));
        }
        return sup;
    };
    const double ratio = sup_err(64) / sup_err(128);
    CHECK(ratio > 1.7);
    CHECK(ratio < 2.3);
    SUBCASE("uniform convergence through m = 16..128") {
        double prev = 1e300;
        for (int m : {16, 32, 64, 128}) {
            const double e = sup_err(m);
            CHECK(e < prev * 1.10);
            prev = e;
        }
    }
}

TEST_CASE("complex evaluation") {
    const auto ap = BernsteinApprox::build(builtin("poly2"), 0.3, 2.2, 0.25, 36);
    SUBCASE("restriction to the real axis") {
        for (double x : {0.3, 0.8, 1.9}) {
            CHECK(ap.evaluate_complex(cplx(x, 0.0)).real() ==
                  doctest::Approx(ap.evaluate(x)).epsilon(1e-12));
            CHECK(std::fabs(ap.evaluate_complex(cplx(x, 0.0)).imag()) < 1e-12);
        }
    }
    SUBCASE("conjugate symmetry (real coefficients)") {
        const cplx z(1.1, 0.08);
        CHECK(std::abs(ap.evaluate_complex(std::conj(z)) - std::conj(ap.evaluate_complex(z))) <
              1e-12);
    }
    SUBCASE("degree-2 exactness up to the u(1-u)/m defect") {
        // B_m[q](z) = q(z) + z(1-z) q''/(2m) holds for quadratics at complex z
        const cplx z(1.4, 0.05);
        const cplx u = ap.map().to_unit(z);
        const double L = ap.map().L;
        auto ftilde = [&](cplx w) { return ((w - ap.map().c) / L) * ((w - ap.map().c) / L); };
        const cplx expect = ftilde(u) + u * (1.0 - u) * (2.0 / (L * L)) / (2.0 * 36);
        CHECK(std::abs(ap.evaluate_complex(z) - expect) < 1e-11);
    }
    SUBCASE("strip bound") {
        // |f_m| <= M exp(L^2/eps) (1 + margin) on the strip, M = max |sample|
        for (const std::string name : {"log", "exp", "poly3"}) {
            const auto bp = BernsteinApprox::build(builtin(name), 0.3, 2.2, 0.25, 16);
            double big = 0.0;
            for (double s : bp.samples()) big = std::max(big, std::fabs(s));
            const double bound =
                big * std::exp(bp.map().L * bp.map().L / bp.map().eps) * 1.05;
            const double v = bp.strip_half_width();
            for (int i = 0; i < 50; ++i)
                for (int j = 0; j < 10; ++j) {
                    const cplx z(0.3 + 1.9 * i / 49.0, -v + 2.0 * v * j / 9.0);
                    CHECK(std::abs(bp.evaluate_complex(z)) <= bound);
                }
        }
    }
    SUBCASE("outside the strip") {
        CHECK_THROWS_AS(ap.evaluate_complex(cplx(1.0, 1.0)), DomainError);
        CHECK_THROWS_AS(ap.evaluate_complex(cplx(5.0, 0.0)), DomainError);
    }
}

TEST_CASE("derivative evaluation") {
    const auto ap = BernsteinApprox::build(builtin("poly2"), 0.25, 0.75, 0.25, 24);
    // d/dx [x^2 + x(1-x)/m] on the identity map
    for (double x : {0.3, 0.5, 0.7}) {
        const double expect = 2 * x + (1 - 2 * x) / 24.0;
        CHECK(ap.derivative(x) == doctest::Approx(expect).epsilon(1e-12));
        CHECK(std::abs(ap.derivative_complex(cplx(x, 0.0)) - cplx(expect, 0.0)) < 1e-11);
    }
}

TEST_CASE("correction polynomial") {
    SUBCASE("affine functions have zero correction") {
        const auto h = BernsteinApprox::correction(builtin("poly1"), 0.4, 2.0, 0.25, 12);
        for (double x : {0.4, 1.0, 2.0}) CHECK(std::fabs(h.evaluate(x)) < 1e-14);
    }
    SUBCASE("quadratic: correction equals the Bernstein lift of 2u(1-u)/L^2") {
        const int m = 16;
        const auto h = BernsteinApprox::correction(builtin("poly2"), 0.4, 2.0, 0.25, m);
        const double L = h.map().L;
        for (double x : {0.5, 1.0, 1.7}) {
            const double u = h.map().to_unit(x);
            // B_m[q] = q + u(1-u) q''/(2m) exactly for quadratic q
            const double expect = (2.0 / (L * L)) * u * (1 - u) * (1.0 - 1.0 / m);
            CHECK(h.evaluate(x) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
    SUBCASE("corrected x^4 error drops fourfold when m doubles") {
        const TestFunction f = builtin("power(4)");
        auto corrected_sup = [&](int m) {
            const auto fm = BernsteinApprox::build(f, 0.3, 2.2, 0.25, m);
            const auto hm = BernsteinApprox::correction(f, 0.3, 2.2, 0.25, m);
            const auto c = fm.corrected_by(hm);
            double sup = 0.0;
            for (int i = 0; i <= 1000; ++i) {
                const double x = 0.3 + 1.9 * i / 1000.0;
                sup = std::max(sup, std::fabs(c.evaluate(x) - f(x)));
            }
            return sup;
        };
        const double ratio = corrected_sup(32) / corrected_sup(64);
        CHECK(ratio > 3.4);
        CHECK(ratio < 4.6);
    }
}

TEST_CASE("default degree growth") {
    CHECK(default_degree(1000) == 9);
    CHECK(default_degree(2) == 1);
    CHECK(default_degree(400) == 7);  // 400^0.325 = 7.00... > 7
    int prev = 0;
    for (long long n = 2; n < 4000; n += 37) {
        const int m = default_degree(n);
        CHECK(m >= prev);
        prev = m;
    }
    CHECK_THROWS_AS(default_degree(1), DomainError);
}

TEST_CASE("construction errors") {
    CHECK_THROWS_AS(BernsteinApprox::build(builtin("poly1"), 1.0, 0.5, 0.25, 8), DomainError);
    CHECK_THROWS_AS(BernsteinApprox::build(builtin("poly1"), 0.5, 2.0, 0.6, 8), DomainError);
    CHECK_THROWS_AS(BernsteinApprox::build(builtin("poly1"), 0.5, 2.0, 0.25, 0), DomainError);
    CHECK_THROWS_AS(BernsteinApprox::build(builtin("log"), -0.5, 2.0, 0.25, 8), DomainError);
    const auto ap = BernsteinApprox::build(builtin("poly1"), 0.5, 2.0, 0.25, 8);
    CHECK_THROWS_AS(ap.evaluate(0.4), DomainError);
    const auto other = BernsteinApprox::correction(builtin("poly2"), 0.5, 2.0, 0.25, 9);
    CHECK_THROWS_AS(ap.corrected_by(other), DomainError);
}
