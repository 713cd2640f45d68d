#ifndef NVSIGMA_TORUS_HPP
#define NVSIGMA_TORUS_HPP

#include <Eigen/Dense>

#include <complex>
#include <iosfwd>
#include <vector>

#include "nvsigma/error.hpp"

namespace nvsigma {

using Complex = std::complex<double>;
using Field = Eigen::ArrayXXcd;

/// Conformal class and sampling of the torus R^2/Z^2 with periods 1 and tau.
///
/// Points are sampled at x = j/nx, y = k/ny; the complex coordinate is
/// z = x + tau*y. Grid sizes must be even (the Nyquist mode is dropped from
/// every derivative) and at least 8.
struct TorusShape {
    Complex tau{0.0, 1.0};
    int nx = 0;
    int ny = 0;

    TorusShape() = default;
    TorusShape(Complex tau_, int nx_, int ny_);

    double tau1() const { return tau.real(); }
    double tau2() const { return tau.imag(); }
    Eigen::Index size() const { return Eigen::Index(nx) * ny; }

    /// z coordinate of grid node (j, k).
    Complex node(int j, int k) const { return double(j) / nx + tau * (double(k) / ny); }

    friend bool operator==(const TorusShape& a, const TorusShape& b) {
        return a.tau == b.tau && a.nx == b.nx && a.ny == b.ny;
    }
    friend bool operator!=(const TorusShape& a, const TorusShape& b) { return !(a == b); }
};

/// Complex doubly periodic field sampled on a TorusShape grid.
///
/// Values are stored as an nx-by-ny Eigen array indexed (j, k). Arithmetic is
/// pointwise; mixing shapes throws ShapeMismatch.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(const TorusShape& shape);
    GridFunction(const TorusShape& shape, Field values);

    static GridFunction constant(const TorusShape& shape, Complex c);

    /// Samples f(x, y) at the grid nodes.
    template <class F>
    static GridFunction sample(const TorusShape& shape, F&& f) {
        GridFunction g(shape);
        for (int k = 0; k < shape.ny; ++k)
            for (int j = 0; j < shape.nx; ++j)
                g.values_(j, k) = f(double(j) / shape.nx, double(k) / shape.ny);
        return g;
    }

    /// Samples f(z) with z = x + tau*y.
    template <class F>
    static GridFunction sample_z(const TorusShape& shape, F&& f) {
        GridFunction g(shape);
        for (int k = 0; k < shape.ny; ++k)
            for (int j = 0; j < shape.nx; ++j) g.values_(j, k) = f(shape.node(j, k));
        return g;
    }

    const TorusShape& shape() const { return shape_; }
    const Field& values() const { return values_; }
    Field& values() { return values_; }

    Complex operator()(int j, int k) const { return values_(j, k); }
    Complex& operator()(int j, int k) { return values_(j, k); }

    double max_abs() const { return values_.size() ? values_.abs().maxCoeff() : 0.0; }
    bool all_finite() const { return values_.allFinite(); }
    GridFunction conj() const { return {shape_, values_.conjugate()}; }

    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator-=(const GridFunction& o);
    GridFunction& operator*=(const GridFunction& o);
    GridFunction& operator/=(const GridFunction& o);
    GridFunction& operator+=(Complex c) { values_ += c; return *this; }
    GridFunction& operator-=(Complex c) { values_ -= c; return *this; }
    GridFunction& operator*=(Complex c) { values_ *= c; return *this; }

    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(GridFunction a, const GridFunction& b) { return a *= b; }
    friend GridFunction operator/(GridFunction a, const GridFunction& b) { return a /= b; }
    friend GridFunction operator+(GridFunction a, Complex c) { return a += c; }
    friend GridFunction operator-(GridFunction a, Complex c) { return a -= c; }
    friend GridFunction operator*(GridFunction a, Complex c) { return a *= c; }
    friend GridFunction operator*(Complex c, GridFunction a) { return a *= c; }
    friend GridFunction operator-(GridFunction a) { a.values_ = -a.values_; return a; }

private:
    void check_same(const GridFunction& o) const;

    TorusShape shape_;
    Field values_;
};

namespace torus {

enum class Dir { z, zbar };

/// Fourier modes below this fraction of the largest mode are treated as
/// roundoff by every spectral derivative and by solve_dzbar.
inline constexpr double spectral_floor = 1e-15;

/// Normalized Fourier coefficients c(p, q) with f = sum c exp(2 pi i (m x + n y)).
Field spectrum(const GridFunction& f);
GridFunction from_spectrum(const TorusShape& shape, const Field& coeffs);

/// Signed wavenumber of FFT index p on an axis of length n.
inline int wavenumber(int p, int n) { return p <= n / 2 ? p : p - n; }

/// Fourier symbols of d/dz and d/dzbar; zero on the Nyquist lines.
Complex symbol(const TorusShape& shape, Dir dir, int m, int n);

GridFunction complex_derivative(const GridFunction& f, Dir dir);
GridFunction derivative(const GridFunction& f, int z_order, int zbar_order);
GridFunction dx(const GridFunction& f);
GridFunction dy(const GridFunction& f);

/// [f, d_z f, ..., d_z^max_order f] from a single forward transform.
std::vector<GridFunction> z_derivatives(const GridFunction& f, int max_order);

/// Mean over the torus, i.e. the exact integral of the trigonometric interpolant.
Complex torus_mean(const GridFunction& f);

/// Zero-mean solution of d_zbar zeta = g. Throws NonZeroMean when
/// |mean(g)| > rel_tol * max(1, max|g|).
GridFunction solve_dzbar(const GridFunction& g, double rel_tol = 1e-10);

/// Drops Fourier modes below rel_tol * (largest mode) and the Nyquist lines.
GridFunction chop(const GridFunction& f, double rel_tol);

/// Keeps only the modes with max(|m|, |n|) <= max_wavenumber.
GridFunction band_limit(const GridFunction& f, int max_wavenumber);

/// Largest |c| among modes with max(|m|, |n|) >= min_wavenumber, relative to
/// the largest mode overall. A cheap resolution diagnostic.
double spectral_tail(const GridFunction& f, int min_wavenumber);

void write_csv(std::ostream& os, const GridFunction& f);
GridFunction read_csv(std::istream& is);

} // namespace torus
} // namespace nvsigma

#endif // NVSIGMA_TORUS_HPP
