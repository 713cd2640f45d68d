#ifndef NVSIGMA_SERIES_HPP
#define NVSIGMA_SERIES_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "nvsigma/torus.hpp"

namespace nvsigma {

/// Truncated Laurent series sum_p c_p k^p in the spectral parameter k, with
/// p running from top down to bottom. Coefficients below bottom are unknown
/// (not zero); arithmetic tracks the range that stays exact.
template <class T>
class Laurent {
public:
    Laurent() = default;
    Laurent(int top, int bottom, T zero) : top_(top), bottom_(bottom), zero_(std::move(zero)) {
        if (bottom > top) bottom_ = top_ = bottom; // empty range collapses to a single zero term
        c_.assign(top_ - bottom_ + 1, zero_);
    }

    int top() const { return top_; }
    int bottom() const { return bottom_; }
    const T& zero() const { return zero_; }

    T& operator[](int p) { return c_.at(top_ - p); }
    const T& operator[](int p) const { return c_.at(top_ - p); }

    /// Coefficient at p; zero above top. Asking below bottom is a logic error.
    T get(int p) const {
        if (p > top_) return zero_;
        if (p < bottom_)
            throw Error("series coefficient k^" + std::to_string(p) + " is beyond truncation");
        return (*this)[p];
    }

    Laurent truncated(int bottom) const {
        Laurent out(top_, std::max(bottom, bottom_), zero_);
        for (int p = top_; p >= out.bottom_; --p) out[p] = (*this)[p];
        return out;
    }

    /// k -> -k.
    Laurent reflected() const {
        Laurent out = *this;
        for (int p = top_; p >= bottom_; --p)
            if (p % 2) out[p] = zero_ - out[p];
        return out;
    }

    Laurent& operator*=(const Complex& c) {
        for (auto& x : c_) x = x * c;
        return *this;
    }

    friend Laurent operator+(const Laurent& a, const Laurent& b) { return combine(a, b, 1.0); }
    friend Laurent operator-(const Laurent& a, const Laurent& b) { return combine(a, b, -1.0); }
    friend Laurent operator*(Laurent a, const Complex& c) { return a *= c; }
    friend Laurent operator*(const Complex& c, Laurent a) { return a *= c; }

    friend Laurent operator*(const Laurent& a, const Laurent& b) {
        const int top = a.top_ + b.top_;
        const int bottom = std::max(a.bottom_ + b.top_, b.bottom_ + a.top_);
        Laurent out(top, bottom, a.zero_);
        for (int p = a.top_; p >= a.bottom_; --p)
            for (int q = b.top_; q >= b.bottom_ && p + q >= bottom; --q)
                out[p + q] = out[p + q] + a[p] * b[q];
        return out;
    }

    /// Multiplies every coefficient by a field/scalar on the left.
    template <class U>
    Laurent scaled(const U& f) const {
        Laurent out = *this;
        for (auto& x : out.c_) x = f * x;
        return out;
    }

    template <class Fn>
    Laurent map(Fn&& fn) const {
        Laurent out = *this;
        for (auto& x : out.c_) x = fn(x);
        return out;
    }

private:
    static Laurent combine(const Laurent& a, const Laurent& b, double sign) {
        Laurent out(std::max(a.top_, b.top_), std::max(a.bottom_, b.bottom_), a.zero_);
        for (int p = out.top_; p >= out.bottom_; --p) {
            T x = out.zero_;
            if (p <= a.top_) x = x + a[p];
            if (p <= b.top_) x = x + b[p] * Complex(sign);
            out[p] = x;
        }
        return out;
    }

    int top_ = 0;
    int bottom_ = 0;
    T zero_{};
    std::vector<T> c_;
};

/// sum_s c_s k^{-s} with complex coefficients (optionally with positive powers).
using FormalSeries = Laurent<Complex>;
/// Same with coefficients depending on (z, zbar).
using FieldSeries = Laurent<GridFunction>;

/// a / b for series whose leading coefficient b[b.top()] is invertible
/// (pointwise for fields). Result carries the exact range of the quotient.
template <class T>
Laurent<T> divide(const Laurent<T>& a, const Laurent<T>& b) {
    const int top = a.top() - b.top();
    const int bottom = std::max(a.bottom() - b.top(), b.bottom() - 2 * b.top() + a.top());
    Laurent<T> q(top, bottom, a.zero());
    const T lead = b[b.top()];
    for (int p = top; p >= bottom; --p) {
        // a_{p + tb} = sum_{r} q_{p + tb - r} b_r
        T acc = a.get(p + b.top());
        for (int r = b.top() - 1; r >= b.bottom() && p + b.top() - r <= top; --r)
            acc = acc - q[p + b.top() - r] * b[r];
        q[p] = acc / lead;
    }
    return q;
}

/// Largest |coefficient| over powers in [lowest, top].
inline double max_abs(const FormalSeries& s, int lowest) {
    double m = 0.0;
    for (int p = s.top(); p >= std::max(lowest, s.bottom()); --p) m = std::max(m, std::abs(s[p]));
    return m;
}
inline double max_abs(const FieldSeries& s, int lowest) {
    double m = 0.0;
    for (int p = s.top(); p >= std::max(lowest, s.bottom()); --p) m = std::max(m, s[p].max_abs());
    return m;
}

/// d_z applied coefficientwise.
FieldSeries dz(const FieldSeries& s);
FieldSeries dzbar(const FieldSeries& s);

/// (k + d_z)^i acting on a field series, i any integer. For negative i the
/// binomial expansion sum_j C(i,j) k^{i-j} d^j is cut where it leaves the
/// exact range of s.
FieldSeries shifted_power(const FieldSeries& s, int i);

/// Constant series lifted to a field series on the given torus.
FieldSeries lift(const FormalSeries& s, const TorusShape& shape);

} // namespace nvsigma

#endif // NVSIGMA_SERIES_HPP
