#ifndef NVSIGMA_PDO_HPP
#define NVSIGMA_PDO_HPP

#include "json.hpp"

#include <cstdint>
#include <vector>

#include "nvsigma/torus.hpp"

namespace nvsigma {

NVSIGMA_DEFINE_ERROR(NotMonic);

/// Generalized binomial coefficient C(i, j) for integer i and j >= 0,
/// i.e. i(i-1)...(i-j+1)/j!, computed exactly in integers.
std::int64_t binomial(int i, int j);

/// Truncated pseudo-differential operator sum_i a_i d_z^i, with orders
/// running from max_order down to -depth. Terms of lower order are dropped.
class PseudoDiffOp {
public:
    PseudoDiffOp() = default;
    PseudoDiffOp(const TorusShape& shape, int depth, int max_order);

    static PseudoDiffOp identity(const TorusShape& shape, int depth);
    /// d_z^power (power may be negative, as long as power >= -depth).
    static PseudoDiffOp d(const TorusShape& shape, int depth, int power = 1);
    static PseudoDiffOp multiplication(const GridFunction& f, int depth);

    const TorusShape& shape() const { return shape_; }
    int depth() const { return depth_; }
    int max_order() const { return max_order_; }
    int min_order() const { return -depth_; }

    /// Coefficient of d^i; zero outside [min_order, max_order].
    GridFunction coeff(int i) const;
    /// Mutable coefficient; i must lie in the retained range.
    GridFunction& at(int i);
    const GridFunction& at(int i) const;
    void set(int i, const GridFunction& f) { at(i) = f; }

    bool is_zero(int i) const;

    /// Same operator re-expressed with another depth (dropping or zero-padding).
    PseudoDiffOp truncated(int depth) const;

    /// max over orders >= lowest of the sup norm of the coefficients.
    double norm(int lowest) const;
    double norm() const { return norm(min_order()); }

    PseudoDiffOp& operator+=(const PseudoDiffOp& o);
    PseudoDiffOp& operator-=(const PseudoDiffOp& o);
    PseudoDiffOp& operator*=(Complex c);
    friend PseudoDiffOp operator+(PseudoDiffOp a, const PseudoDiffOp& b) { return a += b; }
    friend PseudoDiffOp operator-(PseudoDiffOp a, const PseudoDiffOp& b) { return a -= b; }
    friend PseudoDiffOp operator*(Complex c, PseudoDiffOp a) { return a *= c; }

private:
    void check_compatible(const PseudoDiffOp& o) const;
    void grow(int max_order);

    TorusShape shape_;
    int depth_ = 0;
    int max_order_ = 0;
    std::vector<GridFunction> coeffs_; // coeffs_[max_order_ - i]
};

PseudoDiffOp compose(const PseudoDiffOp& a, const PseudoDiffOp& b);
PseudoDiffOp adjoint(const PseudoDiffOp& a);
/// Orders >= 1 only; the order-0 term is dropped.
PseudoDiffOp plus_part(const PseudoDiffOp& a);
/// Coefficient of d^{-1}.
GridFunction res_partial(const PseudoDiffOp& a);
/// Inverse of 1 + X with X of strictly negative order. Throws NotMonic.
PseudoDiffOp invert_monic(const PseudoDiffOp& phi, double tol = 1e-12);
PseudoDiffOp power(const PseudoDiffOp& a, int n);

/// Applies a differential operator (orders >= 0 only) to a field.
GridFunction apply(const PseudoDiffOp& a, const GridFunction& f);

/// Debug dump {"<order>": [[re, im], ...]} in torus CSV ordering. Not a stable format.
nlohmann::json to_json(const PseudoDiffOp& a);

} // namespace nvsigma

#endif // NVSIGMA_PDO_HPP
