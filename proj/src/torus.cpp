#include "nvsigma/torus.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

namespace nvsigma {

TorusShape::TorusShape(Complex tau_, int nx_, int ny_) : tau(tau_), nx(nx_), ny(ny_) {
    if (!(tau.imag() > 0.0) || !std::isfinite(tau.real()) || !std::isfinite(tau.imag()))
        throw InvalidShape("Im(tau) must be positive");
    if (nx < 8 || ny < 8 || nx % 2 || ny % 2)
        throw InvalidShape("grid sizes must be even and >= 8, got " + std::to_string(nx) + "x" +
                           std::to_string(ny));
}

GridFunction::GridFunction(const TorusShape& shape)
    : shape_(shape), values_(Field::Zero(shape.nx, shape.ny)) {}

GridFunction::GridFunction(const TorusShape& shape, Field values)
    : shape_(shape), values_(std::move(values)) {
    if (values_.rows() != shape_.nx || values_.cols() != shape_.ny)
        throw ShapeMismatch("value array does not match the torus grid");
}

GridFunction GridFunction::constant(const TorusShape& shape, Complex c) {
    return {shape, Field::Constant(shape.nx, shape.ny, c)};
}

void GridFunction::check_same(const GridFunction& o) const {
    if (shape_ != o.shape_) throw ShapeMismatch("grid functions live on different tori");
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
    check_same(o);
    values_ += o.values_;
    return *this;
}
GridFunction& GridFunction::operator-=(const GridFunction& o) {
    check_same(o);
    values_ -= o.values_;
    return *this;
}
GridFunction& GridFunction::operator*=(const GridFunction& o) {
    check_same(o);
    values_ *= o.values_;
    return *this;
}
GridFunction& GridFunction::operator/=(const GridFunction& o) {
    check_same(o);
    values_ /= o.values_;
    return *this;
}

namespace torus {
namespace {

Eigen::FFT<double>& engine() {
    thread_local Eigen::FFT<double> fft = [] {
        Eigen::FFT<double> f;
        f.SetFlag(Eigen::FFT<double>::Unscaled);
        return f;
    }();
    return fft;
}

// In-place 2D transform over a column-major nx-by-ny array.
void transform(Field& a, bool forward) {
    auto& fft = engine();
    const Eigen::Index nx = a.rows(), ny = a.cols();
    std::vector<Complex> in(std::max(nx, ny)), out(std::max(nx, ny));
    for (Eigen::Index k = 0; k < ny; ++k) {
        Complex* col = a.data() + k * nx;
        std::copy(col, col + nx, in.begin());
        if (forward)
            fft.fwd(out.data(), in.data(), nx);
        else
            fft.inv(out.data(), in.data(), nx);
        std::copy(out.begin(), out.begin() + nx, col);
    }
    for (Eigen::Index j = 0; j < nx; ++j) {
        for (Eigen::Index k = 0; k < ny; ++k) in[k] = a(j, k);
        if (forward)
            fft.fwd(out.data(), in.data(), ny);
        else
            fft.inv(out.data(), in.data(), ny);
        for (Eigen::Index k = 0; k < ny; ++k) a(j, k) = out[k];
    }
}

bool nyquist(const TorusShape& s, int p, int q) { return p == s.nx / 2 || q == s.ny / 2; }

// Multiplies the spectrum by sym(m, n) and returns to grid space. Modes at
// the roundoff floor are dropped so repeated differentiation does not
// amplify FFT noise.
template <class Sym>
GridFunction apply_symbol(const TorusShape& s, const Field& coeffs, Sym&& sym) {
    Field c(s.nx, s.ny);
    const double cut = spectral_floor * coeffs.abs().maxCoeff();
    for (int q = 0; q < s.ny; ++q)
        for (int p = 0; p < s.nx; ++p)
            c(p, q) = nyquist(s, p, q) || std::abs(coeffs(p, q)) <= cut ? Complex{} : coeffs(p, q) * sym(wavenumber(p, s.nx),
                                                                          wavenumber(q, s.ny));
    return from_spectrum(s, c);
}

} // namespace

Field spectrum(const GridFunction& f) {
    Field a = f.values();
    transform(a, true);
    a /= double(f.shape().size());
    return a;
}

GridFunction from_spectrum(const TorusShape& shape, const Field& coeffs) {
    Field a = coeffs;
    transform(a, false);
    return {shape, std::move(a)};
}

Complex symbol(const TorusShape& s, Dir dir, int m, int n) {
    if (std::abs(m) == s.nx / 2 && s.nx % 2 == 0) return {};
    if (std::abs(n) == s.ny / 2 && s.ny % 2 == 0) return {};
    const double pi = std::numbers::pi;
    if (dir == Dir::z) return pi * (double(n) - std::conj(s.tau) * double(m)) / s.tau2();
    return -pi * (double(n) - s.tau * double(m)) / s.tau2();
}

GridFunction complex_derivative(const GridFunction& f, Dir dir) {
    return derivative(f, dir == Dir::z ? 1 : 0, dir == Dir::zbar ? 1 : 0);
}

GridFunction derivative(const GridFunction& f, int z_order, int zbar_order) {
    const auto& s = f.shape();
    if (z_order == 0 && zbar_order == 0) return f;
    const Field c = spectrum(f);
    return apply_symbol(s, c, [&](int m, int n) {
        Complex r = std::pow(symbol(s, Dir::z, m, n), z_order);
        if (zbar_order) r *= std::pow(symbol(s, Dir::zbar, m, n), zbar_order);
        return r;
    });
}

GridFunction dx(const GridFunction& f) {
    const Field c = spectrum(f);
    return apply_symbol(f.shape(), c,
                        [](int m, int) { return Complex(0.0, 2.0 * std::numbers::pi * m); });
}

GridFunction dy(const GridFunction& f) {
    const Field c = spectrum(f);
    return apply_symbol(f.shape(), c,
                        [](int, int n) { return Complex(0.0, 2.0 * std::numbers::pi * n); });
}

std::vector<GridFunction> z_derivatives(const GridFunction& f, int max_order) {
    std::vector<GridFunction> out;
    out.reserve(max_order + 1);
    out.push_back(f);
    if (max_order <= 0) return out;
    const auto& s = f.shape();
    const Field c = spectrum(f);
    for (int order = 1; order <= max_order; ++order)
        out.push_back(apply_symbol(
            s, c, [&](int m, int n) { return std::pow(symbol(s, Dir::z, m, n), order); }));
    return out;
}

Complex torus_mean(const GridFunction& f) { return f.values().mean(); }

GridFunction solve_dzbar(const GridFunction& g, double rel_tol) {
    const auto& s = g.shape();
    const Complex mean = torus_mean(g);
    const double scale = std::max(1.0, g.max_abs());
    if (std::abs(mean) > rel_tol * scale) {
        std::ostringstream msg;
        msg << "d_zbar zeta = g needs zero-mean g, mean = " << mean;
        throw NonZeroMean(msg.str());
    }
    const Field c = spectrum(g);
    return apply_symbol(s, c, [&](int m, int n) {
        if (m == 0 && n == 0) return Complex{};
        return 1.0 / symbol(s, Dir::zbar, m, n);
    });
}

GridFunction chop(const GridFunction& f, double rel_tol) {
    const auto& s = f.shape();
    Field c = spectrum(f);
    const double cutoff = rel_tol * c.abs().maxCoeff();
    for (int q = 0; q < s.ny; ++q)
        for (int p = 0; p < s.nx; ++p)
            if (nyquist(s, p, q) || std::abs(c(p, q)) <= cutoff) c(p, q) = 0.0;
    return from_spectrum(s, c);
}

GridFunction band_limit(const GridFunction& f, int max_wavenumber) {
    const auto& s = f.shape();
    Field c = spectrum(f);
    for (int q = 0; q < s.ny; ++q)
        for (int p = 0; p < s.nx; ++p)
            if (nyquist(s, p, q) || std::abs(wavenumber(p, s.nx)) > max_wavenumber ||
                std::abs(wavenumber(q, s.ny)) > max_wavenumber)
                c(p, q) = 0.0;
    return from_spectrum(s, c);
}

double spectral_tail(const GridFunction& f, int min_wavenumber) {
    const auto& s = f.shape();
    const Field c = spectrum(f);
    const double top = c.abs().maxCoeff();
    if (top == 0.0) return 0.0;
    double tail = 0.0;
    for (int q = 0; q < s.ny; ++q)
        for (int p = 0; p < s.nx; ++p) {
            const int m = std::abs(wavenumber(p, s.nx)), n = std::abs(wavenumber(q, s.ny));
            if (std::max(m, n) >= min_wavenumber) tail = std::max(tail, std::abs(c(p, q)));
        }
    return tail / top;
}

void write_csv(std::ostream& os, const GridFunction& f) {
    const auto& s = f.shape();
    os << std::setprecision(17);
    os << "# torus tau_re=" << s.tau.real() << " tau_im=" << s.tau.imag() << " nx=" << s.nx
       << " ny=" << s.ny << "\n";
    for (int j = 0; j < s.nx; ++j)
        for (int k = 0; k < s.ny; ++k)
            os << f(j, k).real() << "," << f(j, k).imag() << "\n";
}

GridFunction read_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header) || header.rfind("# torus", 0) != 0)
        throw ParseError("missing '# torus' header");
    double tau_re = 0, tau_im = 0;
    int nx = 0, ny = 0;
    {
        std::istringstream hs(header.substr(7));
        std::string tok;
        int seen = 0;
        while (hs >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) throw ParseError("bad header token '" + tok + "'");
            const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
            try {
                if (key == "tau_re") tau_re = std::stod(val);
                else if (key == "tau_im") tau_im = std::stod(val);
                else if (key == "nx") nx = std::stoi(val);
                else if (key == "ny") ny = std::stoi(val);
                else throw ParseError("unknown header key '" + key + "'");
            } catch (const std::logic_error&) {
                throw ParseError("bad header value '" + tok + "'");
            }
            ++seen;
        }
        if (seen != 4) throw ParseError("header needs tau_re, tau_im, nx, ny");
    }
    GridFunction f(TorusShape({tau_re, tau_im}, nx, ny));
    std::string line;
    for (int j = 0; j < nx; ++j)
        for (int k = 0; k < ny; ++k) {
            if (!std::getline(is, line)) throw ParseError("truncated grid data");
            const auto comma = line.find(',');
            if (comma == std::string::npos) throw ParseError("cell without 're,im': " + line);
            try {
                f(j, k) = {std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))};
            } catch (const std::logic_error&) {
                throw ParseError("non-numeric cell: " + line);
            }
        }
    return f;
}

} // namespace torus
} // namespace nvsigma
