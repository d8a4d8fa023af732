#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace aztec {

// Truncated multivariate Taylor series in D variables. Variable d is kept to
// order orders[d]; coefficients are stored row-major (last variable fastest).
// Products sum over j <= i in lexicographic order, so a coefficient's value
// does not depend on the truncation orders.
template <int D>
class Jet {
public:
    using cplx = std::complex<double>;
    using Index = std::array<int, D>;

    Jet() : Jet(Index{}) {}
    explicit Jet(const Index& orders, cplx c0 = 0.0) : orders_(orders) {
        std::size_t n = 1;
        for (int d = 0; d < D; ++d) {
            if (orders_[d] < 0) throw std::invalid_argument("jet: negative order");
            n *= static_cast<std::size_t>(orders_[d] + 1);
        }
        c_.assign(n, 0.0);
        c_[0] = c0;
    }

    static Jet constant(const Index& orders, cplx c) { return Jet(orders, c); }
    // value + x_dim
    static Jet variable(const Index& orders, int dim, cplx value = 0.0) {
        Jet j(orders, value);
        if (orders[dim] >= 1) {
            Index e{};
            e[dim] = 1;
            j.coef(e) = 1.0;
        }
        return j;
    }

    const Index& orders() const { return orders_; }
    std::size_t size() const { return c_.size(); }
    cplx value() const { return c_[0]; }
    const std::vector<cplx>& data() const { return c_; }

    bool in_range(const Index& i) const {
        for (int d = 0; d < D; ++d)
            if (i[d] < 0 || i[d] > orders_[d]) return false;
        return true;
    }

    cplx& coef(const Index& i) { return c_[flat(i)]; }
    cplx coef(const Index& i) const { return c_[flat(i)]; }

    // ∂^i f at the expansion point, i.e. coef(i) * prod_d i_d!
    cplx derivative(const Index& i) const {
        if (!in_range(i)) throw std::out_of_range("jet: derivative order exceeds truncation order");
        double fact = 1.0;
        for (int d = 0; d < D; ++d)
            for (int k = 2; k <= i[d]; ++k) fact *= k;
        return coef(i) * fact;
    }

    Jet& operator+=(const Jet& o) {
        check_same(o);
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        check_same(o);
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    Jet& operator+=(cplx s) {
        c_[0] += s;
        return *this;
    }
    Jet& operator-=(cplx s) {
        c_[0] -= s;
        return *this;
    }
    Jet& operator*=(cplx s) {
        for (auto& x : c_) x *= s;
        return *this;
    }
    Jet& operator/=(cplx s) {
        for (auto& x : c_) x /= s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator+(Jet a, cplx s) { return a += s; }
    friend Jet operator+(cplx s, Jet a) { return a += s; }
    friend Jet operator-(Jet a, cplx s) { return a -= s; }
    friend Jet operator-(cplx s, const Jet& a) { return -a + s; }
    friend Jet operator*(Jet a, cplx s) { return a *= s; }
    friend Jet operator*(cplx s, Jet a) { return a *= s; }
    friend Jet operator/(Jet a, cplx s) { return a /= s; }
    Jet operator-() const {
        Jet r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }

    friend Jet operator*(const Jet& a, const Jet& b) {
        a.check_same(b);
        Jet r(a.orders_);
        const std::size_t n = a.c_.size();
        std::vector<Index> idx(n);
        for (std::size_t k = 0; k < n; ++k) idx[k] = a.unflat(k);
        for (std::size_t i = 0; i < n; ++i) {
            cplx s = 0.0;
            for (std::size_t j = 0; j <= i; ++j) {
                bool below = true;
                Index rest;
                for (int d = 0; d < D; ++d) {
                    rest[d] = idx[i][d] - idx[j][d];
                    if (rest[d] < 0) {
                        below = false;
                        break;
                    }
                }
                if (below) s += a.c_[j] * b.c_[a.flat(rest)];
            }
            r.c_[i] = s;
        }
        return r;
    }
    Jet& operator*=(const Jet& o) { return *this = *this * o; }

    friend Jet operator/(const Jet& a, const Jet& b) { return a * b.inverse(); }
    friend Jet operator/(cplx s, const Jet& b) { return b.inverse() * s; }

    int total_order() const { return std::accumulate(orders_.begin(), orders_.end(), 0); }

    Jet inverse() const {
        const cplx f0 = nonzero_constant("inverse");
        // 1/(f0 + g) = (1/f0) sum_m (-g/f0)^m
        Jet g = *this;
        g.c_[0] = 0.0;
        g *= -1.0 / f0;
        return nilpotent_sum_c(g, std::vector<cplx>(total_order() + 1, 1.0)) / f0;
    }

    Jet exp() const {
        Jet g = *this;
        g.c_[0] = 0.0;
        // e^{f0} sum_m g^m / m!
        Jet r = nilpotent_sum(g, [](int m) {
            double f = 1.0;
            for (int k = 2; k <= m; ++k) f *= k;
            return 1.0 / f;
        });
        return r * std::exp(c_[0]);
    }

    Jet log() const {
        const cplx f0 = principal_constant("log");
        Jet g = *this / f0;
        g.c_[0] = 0.0;
        Jet r = nilpotent_sum(g, [](int m) { return m == 0 ? 0.0 : ((m % 2) ? 1.0 : -1.0) / m; });
        r.c_[0] += std::log(f0);
        return r;
    }

    // principal branch of f^alpha
    Jet pow(cplx alpha) const {
        const cplx f0 = principal_constant("pow");
        Jet g = *this / f0;
        g.c_[0] = 0.0;
        // generalized binomial coefficients C(alpha, m)
        std::vector<cplx> binom(total_order() + 1);
        binom[0] = 1.0;
        for (std::size_t m = 1; m < binom.size(); ++m)
            binom[m] = binom[m - 1] * (alpha - static_cast<double>(m - 1)) / static_cast<double>(m);
        Jet r = nilpotent_sum_c(g, binom);
        return r * std::pow(f0, alpha);
    }

    // integer power by repeated squaring; no branch restriction
    Jet pow_int(int k) const {
        if (k < 0) return inverse().pow_int(-k);
        Jet result(orders_, 1.0), base = *this;
        while (k) {
            if (k & 1) result *= base;
            k >>= 1;
            if (k) base *= base;
        }
        return result;
    }

private:
    Index orders_;
    std::vector<cplx> c_;

    std::size_t flat(const Index& i) const {
        std::size_t k = 0;
        for (int d = 0; d < D; ++d) k = k * static_cast<std::size_t>(orders_[d] + 1) + static_cast<std::size_t>(i[d]);
        return k;
    }
    Index unflat(std::size_t k) const {
        Index i{};
        for (int d = D - 1; d >= 0; --d) {
            i[d] = static_cast<int>(k % static_cast<std::size_t>(orders_[d] + 1));
            k /= static_cast<std::size_t>(orders_[d] + 1);
        }
        return i;
    }
    void check_same(const Jet& o) const {
        if (orders_ != o.orders_) throw std::invalid_argument("jet: mismatched truncation orders");
    }
    cplx nonzero_constant(const char* what) const {
        if (std::abs(c_[0]) <= 1e-300) throw std::domain_error(std::string("jet ") + what + ": zero constant term");
        return c_[0];
    }
    cplx principal_constant(const char* what) const {
        const cplx f0 = nonzero_constant(what);
        if (f0.real() < 0.0 && std::abs(f0.imag()) <= 1e-14 * std::abs(f0))
            throw std::domain_error(std::string("jet ") + what + ": constant term on the branch cut");
        return f0;
    }

    template <class Coef>
    static Jet nilpotent_sum(const Jet& g, Coef coef) {
        std::vector<cplx> cs(g.total_order() + 1);
        for (std::size_t m = 0; m < cs.size(); ++m) cs[m] = coef(static_cast<int>(m));
        return nilpotent_sum_c(g, cs);
    }
    // sum_m cs[m] g^m, g with zero constant term (so g^m = 0 past the total order)
    static Jet nilpotent_sum_c(const Jet& g, const std::vector<cplx>& cs) {
        Jet r(g.orders_, cs[0]);
        Jet p(g.orders_, 1.0);
        for (std::size_t m = 1; m < cs.size(); ++m) {
            p = p * g;
            r += p * cs[m];
        }
        return r;
    }
};

using Jet1 = Jet<1>;
using Jet2 = Jet<2>;

// l! [u^l] f
inline std::complex<double> derivative(const Jet1& f, int l) { return f.derivative({l}); }
// q! r! [x1^q x2^r] f
inline std::complex<double> mixed_derivative(const Jet2& f, int q, int r) { return f.derivative({q, r}); }

}  // namespace aztec
