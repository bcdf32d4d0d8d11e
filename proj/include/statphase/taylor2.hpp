#pragma once

/**
 * Truncated bivariate Taylor polynomials (jets) with complex coefficients.
 *
 * A jet of order N at (a, b) stores c(i, j) for i + j <= N, representing
 * sum c(i, j) dx^i dy^j with dx = x - a, dy = y - b.
 */

#include <complex>
#include <functional>
#include <vector>

#include "statphase/error.hpp"

namespace statphase {

class Taylor2
{
  public:
    using value_type = std::complex<double>;

    explicit Taylor2(int order = 0) : order_(order), c_(static_cast<size_t>((order + 1) * (order + 1)))
    {
        require(order >= 0, ErrorCode::InvalidArgument, "jet order must be >= 0");
    }

    static Taylor2 constant(value_type v, int order)
    {
        Taylor2 t(order);
        t(0, 0) = v;
        return t;
    }

    /// The coordinate function x (var = 0) or y (var = 1) expanded at `at`.
    static Taylor2 variable(int var, double at, int order)
    {
        Taylor2 t = constant(at, order);
        if (order >= 1) {
            (var == 0 ? t(1, 0) : t(0, 1)) = 1.0;
        }
        return t;
    }

    int order() const noexcept { return order_; }
    value_type value() const noexcept { return c_[0]; }

    value_type& operator()(int i, int j) { return c_[static_cast<size_t>(i * (order_ + 1) + j)]; }
    value_type operator()(int i, int j) const
    {
        return c_[static_cast<size_t>(i * (order_ + 1) + j)];
    }

    Taylor2 truncated(int order) const
    {
        require(order <= order_, ErrorCode::InvalidArgument, "cannot raise jet order");
        Taylor2 t(order);
        for (int i = 0; i <= order; ++i) {
            for (int j = 0; i + j <= order; ++j) {
                t(i, j) = (*this)(i, j);
            }
        }
        return t;
    }

    /// Partial derivative; the result has order one less.
    Taylor2 derivative(int var) const
    {
        require(order_ >= 1, ErrorCode::InvalidArgument, "derivative of an order-0 jet");
        Taylor2 t(order_ - 1);
        for (int i = 0; i <= order_ - 1; ++i) {
            for (int j = 0; i + j <= order_ - 1; ++j) {
                t(i, j) = var == 0 ? double(i + 1) * (*this)(i + 1, j) : double(j + 1) * (*this)(i, j + 1);
            }
        }
        return t;
    }

    Taylor2& operator+=(const Taylor2& o)
    {
        match(o);
        for (size_t k = 0; k < c_.size(); ++k) {
            c_[k] += o.c_[k];
        }
        return *this;
    }
    Taylor2& operator-=(const Taylor2& o)
    {
        match(o);
        for (size_t k = 0; k < c_.size(); ++k) {
            c_[k] -= o.c_[k];
        }
        return *this;
    }
    Taylor2& operator*=(value_type s)
    {
        for (auto& v : c_) {
            v *= s;
        }
        return *this;
    }

    friend Taylor2 operator+(Taylor2 a, const Taylor2& b) { return a += b; }
    friend Taylor2 operator-(Taylor2 a, const Taylor2& b) { return a -= b; }
    friend Taylor2 operator-(Taylor2 a) { return a *= -1.0; }
    friend Taylor2 operator*(Taylor2 a, value_type s) { return a *= s; }
    friend Taylor2 operator*(value_type s, Taylor2 a) { return a *= s; }
    friend Taylor2 operator+(Taylor2 a, value_type s)
    {
        a(0, 0) += s;
        return a;
    }

    friend Taylor2 operator*(const Taylor2& a, const Taylor2& b)
    {
        a.match(b);
        const int n = a.order_;
        Taylor2 t(n);
        for (int i = 0; i <= n; ++i) {
            for (int j = 0; i + j <= n; ++j) {
                const value_type ai = a(i, j);
                if (ai == 0.0) {
                    continue;
                }
                for (int k = 0; i + k <= n; ++k) {
                    for (int l = 0; i + j + k + l <= n; ++l) {
                        t(i + k, j + l) += ai * b(k, l);
                    }
                }
            }
        }
        return t;
    }

    friend Taylor2 operator/(const Taylor2& a, const Taylor2& b)
    {
        a.match(b);
        require(b(0, 0) != 0.0, ErrorCode::InvalidArgument, "jet division by zero");
        const int n = a.order_;
        Taylor2 q(n);
        for (int i = 0; i <= n; ++i) {
            for (int j = 0; i + j <= n; ++j) {
                value_type s = a(i, j);
                for (int k = 0; k <= i; ++k) {
                    for (int l = 0; l <= j; ++l) {
                        if (k != 0 || l != 0) {
                            s -= b(k, l) * q(i - k, j - l);
                        }
                    }
                }
                q(i, j) = s / b(0, 0);
            }
        }
        return q;
    }

    friend Taylor2 exp(const Taylor2& a)
    {
        Taylor2 rest = a;
        rest(0, 0) = 0.0;
        Taylor2 sum = constant(1.0, a.order_);
        Taylor2 term = sum;
        for (int k = 1; k <= a.order_; ++k) {
            term = term * rest * (1.0 / k);
            sum += term;
        }
        return sum * std::exp(a(0, 0));
    }

  private:
    void match(const Taylor2& o) const
    {
        require(order_ == o.order_, ErrorCode::InvalidArgument, "jet orders differ");
    }

    int order_;
    std::vector<value_type> c_;
};

/// Jet of a function of two variables at (x, y) to the requested order.
using JetFn = std::function<Taylor2(double x, double y, int order)>;

} // namespace statphase
