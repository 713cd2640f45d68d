#ifndef NVSIGMA_TESTS_SUPPORT_HPP
#define NVSIGMA_TESTS_SUPPORT_HPP

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "nvsigma/elliptic.hpp"
#include "nvsigma/pdo.hpp"
#include "nvsigma/torus.hpp"

namespace testing {

using nvsigma::Complex;
using nvsigma::GridFunction;
using nvsigma::TorusShape;

constexpr double pi = std::numbers::pi;

struct Mode {
    int m, n;
    Complex c;
};

/// Trigonometric polynomial with known coefficients, |m|,|n| <= kmax,
/// amplitudes decaying like exp(-(|m|+|n|)/2).
inline std::vector<Mode> random_modes(std::mt19937& rng, int kmax) {
    std::normal_distribution<double> g;
    std::vector<Mode> out;
    for (int m = -kmax; m <= kmax; ++m)
        for (int n = -kmax; n <= kmax; ++n) {
            const double a = std::exp(-0.5 * (std::abs(m) + std::abs(n)));
            out.push_back({m, n, a * Complex(g(rng), g(rng))});
        }
    return out;
}

inline GridFunction from_modes(const TorusShape& s, const std::vector<Mode>& modes) {
    return GridFunction::sample(s, [&](double x, double y) {
        Complex v = 0.0;
        for (const auto& md : modes)
            v += md.c * std::exp(Complex(0.0, 2.0 * pi * (md.m * x + md.n * y)));
        return v;
    });
}

inline GridFunction random_field(const TorusShape& s, std::mt19937& rng, int kmax = 3) {
    return from_modes(s, random_modes(rng, kmax));
}

/// Random operator with smooth coefficients on orders max_order .. -depth.
inline nvsigma::PseudoDiffOp random_op(const TorusShape& s, int depth, int max_order,
                                       std::mt19937& rng) {
    nvsigma::PseudoDiffOp a(s, depth, max_order);
    for (int i = max_order; i >= -depth; --i) a.set(i, random_field(s, rng, 2));
    return a;
}

/// l = 2 instanton with a symmetric zero/pole pattern; smooth enough for the
/// Bloch series through k^{-6} on a 128^2 grid.
inline nvsigma::InstantonData symmetric_l2() {
    const Complex t{0.0013, 0.0021};
    nvsigma::InstantonData d;
    d.A = 1.0;
    d.a = {Complex(0.25, 0.25) + t, Complex(-0.25, -0.25) + t};
    d.b = {Complex(0.25, -0.25) + t, Complex(-0.25, 0.25) + t};
    return d;
}

inline nvsigma::InstantonData skewed_l2() {
    nvsigma::InstantonData d;
    d.A = 1.0;
    d.a = {Complex(0.25, 0.1), Complex(-0.25, -0.1)};
    d.b = {Complex(0.4, 0.0), Complex(-0.4, 0.0)};
    return d;
}

inline nvsigma::InstantonData skewed_l3() {
    nvsigma::InstantonData d;
    d.A = 0.8;
    d.a = {Complex(0.1, 0.1), Complex(0.4, 0.6), Complex(0.7, 0.3)};
    d.b = {Complex(0.6, 0.1), Complex(0.2, 0.5), Complex(0.4, 0.4)};
    return d;
}

} // namespace testing

#endif
