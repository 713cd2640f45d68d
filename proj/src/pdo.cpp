#include "nvsigma/pdo.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace nvsigma {

std::int64_t binomial(int i, int j) {
    if (j < 0) return 0;
    __int128 c = 1;
    for (int r = 1; r <= j; ++r) {
        c = c * (i - r + 1);
        c /= r; // exact: c is C(i, r) after this line
        if (c > std::numeric_limits<std::int64_t>::max() ||
            c < std::numeric_limits<std::int64_t>::min())
            throw Error("binomial(" + std::to_string(i) + ", " + std::to_string(j) +
                        ") overflows int64");
    }
    return static_cast<std::int64_t>(c);
}

PseudoDiffOp::PseudoDiffOp(const TorusShape& shape, int depth, int max_order)
    : shape_(shape), depth_(depth), max_order_(std::max(max_order, -depth)) {
    if (depth < 0) throw InvalidShape("operator depth must be non-negative");
    coeffs_.assign(max_order_ + depth_ + 1, GridFunction(shape_));
}

PseudoDiffOp PseudoDiffOp::identity(const TorusShape& shape, int depth) {
    return d(shape, depth, 0);
}

PseudoDiffOp PseudoDiffOp::d(const TorusShape& shape, int depth, int power) {
    if (power < -depth) throw InvalidShape("power below the truncation depth");
    PseudoDiffOp op(shape, depth, std::max(power, 0));
    op.at(power) = GridFunction::constant(shape, 1.0);
    return op;
}

PseudoDiffOp PseudoDiffOp::multiplication(const GridFunction& f, int depth) {
    PseudoDiffOp op(f.shape(), depth, 0);
    op.at(0) = f;
    return op;
}

GridFunction PseudoDiffOp::coeff(int i) const {
    if (i > max_order_ || i < -depth_) return GridFunction(shape_);
    return coeffs_[max_order_ - i];
}

GridFunction& PseudoDiffOp::at(int i) {
    if (i > max_order_) grow(i);
    if (i < -depth_) throw InvalidShape("order " + std::to_string(i) + " below truncation");
    return coeffs_[max_order_ - i];
}

const GridFunction& PseudoDiffOp::at(int i) const {
    if (i > max_order_ || i < -depth_)
        throw InvalidShape("order " + std::to_string(i) + " outside retained range");
    return coeffs_[max_order_ - i];
}

bool PseudoDiffOp::is_zero(int i) const {
    if (i > max_order_ || i < -depth_) return true;
    return coeffs_[max_order_ - i].max_abs() == 0.0;
}

void PseudoDiffOp::grow(int max_order) {
    if (max_order <= max_order_) return;
    coeffs_.insert(coeffs_.begin(), max_order - max_order_, GridFunction(shape_));
    max_order_ = max_order;
}

PseudoDiffOp PseudoDiffOp::truncated(int depth) const {
    PseudoDiffOp out(shape_, depth, max_order_);
    for (int i = out.max_order(); i >= -std::min(depth, depth_); --i) out.at(i) = at(i);
    return out;
}

double PseudoDiffOp::norm(int lowest) const {
    double n = 0.0;
    for (int i = max_order_; i >= std::max(lowest, -depth_); --i)
        n = std::max(n, coeffs_[max_order_ - i].max_abs());
    return n;
}

void PseudoDiffOp::check_compatible(const PseudoDiffOp& o) const {
    if (shape_ != o.shape_) throw ShapeMismatch("operators live on different tori");
    if (depth_ != o.depth_)
        throw ShapeMismatch("operator depths differ (" + std::to_string(depth_) + " vs " +
                            std::to_string(o.depth_) + ")");
}

PseudoDiffOp& PseudoDiffOp::operator+=(const PseudoDiffOp& o) {
    check_compatible(o);
    grow(o.max_order_);
    for (int i = o.max_order_; i >= -depth_; --i) at(i) += o.at(i);
    return *this;
}

PseudoDiffOp& PseudoDiffOp::operator-=(const PseudoDiffOp& o) {
    check_compatible(o);
    grow(o.max_order_);
    for (int i = o.max_order_; i >= -depth_; --i) at(i) -= o.at(i);
    return *this;
}

PseudoDiffOp& PseudoDiffOp::operator*=(Complex c) {
    for (auto& f : coeffs_) f *= c;
    return *this;
}

// (a d^i) o (b d^j) = a sum_l C(i,l) (d^l b) d^{i+j-l}
PseudoDiffOp compose(const PseudoDiffOp& a, const PseudoDiffOp& b) {
    if (a.shape() != b.shape()) throw ShapeMismatch("operators live on different tori");
    if (a.depth() != b.depth()) throw ShapeMismatch("operator depths differ");
    const int D = a.depth();
    PseudoDiffOp out(a.shape(), D, a.max_order() + b.max_order());
    for (int j = b.max_order(); j >= -D; --j) {
        if (b.is_zero(j)) continue;
        int need = -1;
        for (int i = a.max_order(); i >= -D; --i) {
            if (a.is_zero(i)) continue;
            const int top = i + j + D;
            need = std::max(need, i >= 0 ? std::min(i, top) : top);
        }
        if (need < 0) continue;
        const auto db = torus::z_derivatives(b.at(j), need);
        for (int i = a.max_order(); i >= -D; --i) {
            if (a.is_zero(i)) continue;
            const int top = i + j + D;
            const int lmax = i >= 0 ? std::min(i, top) : top;
            for (int l = 0; l <= lmax; ++l)
                out.at(i + j - l) += a.at(i) * (double(binomial(i, l)) * db[l]);
        }
    }
    return out;
}

// (w d^i)^* = (-d)^i o w = (-1)^i sum_l C(i,l) (d^l w) d^{i-l}
PseudoDiffOp adjoint(const PseudoDiffOp& a) {
    const int D = a.depth();
    PseudoDiffOp out(a.shape(), D, a.max_order());
    for (int i = a.max_order(); i >= -D; --i) {
        if (a.is_zero(i)) continue;
        const int lmax = i >= 0 ? i : i + D;
        const auto dw = torus::z_derivatives(a.at(i), lmax);
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        for (int l = 0; l <= lmax; ++l)
            out.at(i - l) += (sign * double(binomial(i, l))) * dw[l];
    }
    return out;
}

PseudoDiffOp plus_part(const PseudoDiffOp& a) {
    PseudoDiffOp out(a.shape(), a.depth(), a.max_order());
    for (int i = a.max_order(); i >= 1; --i) out.at(i) = a.at(i);
    return out;
}

GridFunction res_partial(const PseudoDiffOp& a) { return a.coeff(-1); }

PseudoDiffOp invert_monic(const PseudoDiffOp& phi, double tol) {
    for (int i = phi.max_order(); i >= 1; --i)
        if (phi.at(i).max_abs() > tol)
            throw NotMonic("positive order " + std::to_string(i) + " present");
    if ((phi.coeff(0).values() - 1.0).abs().maxCoeff() > tol)
        throw NotMonic("order-0 coefficient is not 1");
    const int D = phi.depth();
    PseudoDiffOp x(phi.shape(), D, -1);
    for (int i = -1; i >= -D; --i) x.at(i) = -phi.at(i);
    // 1 - X + X^2 - ... ; X^k has order <= -k so D terms suffice.
    PseudoDiffOp out = PseudoDiffOp::identity(phi.shape(), D);
    PseudoDiffOp term = out;
    for (int k = 1; k <= D; ++k) {
        term = compose(term, x);
        out += term;
    }
    return out;
}

PseudoDiffOp power(const PseudoDiffOp& a, int n) {
    if (n < 1) throw Error("power needs n >= 1");
    PseudoDiffOp out = a;
    for (int k = 1; k < n; ++k) out = compose(out, a);
    return out;
}

GridFunction apply(const PseudoDiffOp& a, const GridFunction& f) {
    for (int i = -1; i >= a.min_order(); --i)
        if (!a.is_zero(i)) throw Error("apply needs a differential operator");
    GridFunction out(f.shape());
    const int top = std::max(a.max_order(), 0);
    const auto df = torus::z_derivatives(f, top);
    for (int i = 0; i <= top; ++i)
        if (!a.is_zero(i)) out += a.at(i) * df[i];
    return out;
}

nlohmann::json to_json(const PseudoDiffOp& a) {
    nlohmann::json j = nlohmann::json::object();
    for (int i = a.max_order(); i >= a.min_order(); --i) {
        const auto& f = a.at(i);
        nlohmann::json arr = nlohmann::json::array();
        for (int r = 0; r < f.shape().nx; ++r)
            for (int c = 0; c < f.shape().ny; ++c) arr.push_back({f(r, c).real(), f(r, c).imag()});
        j[std::to_string(i)] = std::move(arr);
    }
    return j;
}

} // namespace nvsigma
