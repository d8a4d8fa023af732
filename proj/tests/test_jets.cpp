#include <doctest.h>

#include "jets.hpp"

using namespace aztec;
using cplx = std::complex<double>;

namespace {

double fact(int n) {
    double f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

}  // namespace

TEST_CASE("elementary functions match Taylor coefficients") {
    const Jet1 x = Jet1::variable({8}, 0, 0.0);
    const Jet1 e = x.exp();
    for (int n = 0; n <= 8; ++n) CHECK(std::abs(e.coef({n}) - 1.0 / fact(n)) < 1e-15);

    const Jet1 l = (x + 1.0).log();
    for (int n = 1; n <= 8; ++n) CHECK(std::abs(l.coef({n}) - ((n % 2) ? 1.0 : -1.0) / n) < 1e-15);

    const Jet1 inv = (1.0 - x).inverse();
    for (int n = 0; n <= 8; ++n) CHECK(std::abs(inv.coef({n}) - 1.0) < 1e-15);

    // (1+x)^(1/2): 1, 1/2, -1/8, 1/16, -5/128
    const Jet1 s = (x + 1.0).pow(0.5);
    CHECK(std::abs(s.coef({2}) + 1.0 / 8) < 1e-15);
    CHECK(std::abs(s.coef({3}) - 1.0 / 16) < 1e-15);
    CHECK(std::abs(s.coef({4}) + 5.0 / 128) < 1e-15);
}

TEST_CASE("expansion away from zero and derivatives") {
    // f = x^3 at x = 2: f' = 12, f'' = 12, f''' = 6
    const Jet1 x = Jet1::variable({4}, 0, 2.0);
    const Jet1 f = x.pow_int(3);
    CHECK(std::abs(f.value() - 8.0) < 1e-14);
    CHECK(std::abs(derivative(f, 1) - 12.0) < 1e-13);
    CHECK(std::abs(derivative(f, 2) - 12.0) < 1e-13);
    CHECK(std::abs(derivative(f, 3) - 6.0) < 1e-13);
    CHECK(std::abs(derivative(f, 4)) < 1e-13);
    CHECK(std::abs(derivative(x.pow_int(-1), 2) - 2.0 / 8.0) < 1e-14);
    CHECK_THROWS_AS(f.derivative({5}), std::out_of_range);
}

TEST_CASE("two-variable jets: mixed partials") {
    const Jet2 x = Jet2::variable({3, 3}, 0, 0.5), y = Jet2::variable({3, 3}, 1, -0.25);
    const Jet2 f = (x * y).exp();
    // ∂x∂y e^{xy} = (1 + xy) e^{xy}
    const double xy = -0.125;
    CHECK(std::abs(mixed_derivative(f, 1, 1) - (1 + xy) * std::exp(xy)) < 1e-14);
    // ∂x^2 ∂y e^{xy} = (2y + x y^2) e^{xy}
    CHECK(std::abs(mixed_derivative(f, 2, 1) - (2 * -0.25 + 0.5 * 0.0625) * std::exp(xy)) < 1e-14);
    const Jet2 g = (x + y) / (x - y);
    // (x+y)/(x-y): ∂x = -2y/(x-y)^2
    CHECK(std::abs(mixed_derivative(g, 1, 0) - (-2 * -0.25) / (0.75 * 0.75)) < 1e-13);
}

TEST_CASE("truncation orders do not change shared coefficients") {
    const Jet2 a = Jet2::variable({2, 4}, 0, 0.3), b = Jet2::variable({2, 4}, 1, 0.1);
    const Jet2 c = Jet2::variable({4, 4}, 0, 0.3), d = Jet2::variable({4, 4}, 1, 0.1);
    const Jet2 f = ((a + 1.0) * (b + 2.0)).log() * a.pow_int(2);
    const Jet2 g = ((c + 1.0) * (d + 2.0)).log() * c.pow_int(2);
    for (int i = 0; i <= 2; ++i)
        for (int j = 0; j <= 4; ++j) CHECK(std::abs(f.coef({i, j}) - g.coef({i, j})) < 1e-15);
}

TEST_CASE("domain errors") {
    const Jet1 x = Jet1::variable({3}, 0, 0.0);
    CHECK_THROWS_AS(x.inverse(), std::domain_error);
    CHECK_THROWS_AS((x - 1.0).log(), std::domain_error);
    CHECK_THROWS_AS((x - 2.0).pow(0.5), std::domain_error);
    CHECK_NOTHROW((x - 2.0).pow_int(3));
    const Jet1 y = Jet1::variable({2}, 0, 1.0);
    CHECK_THROWS_AS(x + y, std::invalid_argument);
}

TEST_CASE("complex expansion points") {
    const cplx z0(0.2, 0.7);
    const Jet1 z = Jet1::variable({3}, 0, z0);
    const Jet1 f = z.exp() / (z + 1.0);
    // derivative of e^z/(z+1) is e^z z/(z+1)^2
    CHECK(std::abs(derivative(f, 1) - std::exp(z0) * z0 / ((z0 + 1.0) * (z0 + 1.0))) < 1e-14);
}
