#include "nvsigma/series.hpp"

#include "nvsigma/pdo.hpp"

namespace nvsigma {

FieldSeries dz(const FieldSeries& s) {
    return s.map([](const GridFunction& f) { return torus::complex_derivative(f, torus::Dir::z); });
}

FieldSeries dzbar(const FieldSeries& s) {
    return s.map(
        [](const GridFunction& f) { return torus::complex_derivative(f, torus::Dir::zbar); });
}

FieldSeries shifted_power(const FieldSeries& s, int i) {
    const int span = s.top() - s.bottom();
    const int jmax = i >= 0 ? std::min(i, span) : span;
    FieldSeries out(s.top() + i, s.bottom() + i, s.zero());
    for (int p = s.top(); p >= s.bottom(); --p) {
        // only derivatives that land inside the exact range are needed
        const int need = std::min(jmax, p - s.bottom());
        const auto d = torus::z_derivatives(s[p], need);
        for (int j = 0; j <= need; ++j) {
            const double c = double(binomial(i, j));
            if (c != 0.0) out[p + i - j] += c * d[j];
        }
    }
    return out;
}

FieldSeries lift(const FormalSeries& s, const TorusShape& shape) {
    FieldSeries out(s.top(), s.bottom(), GridFunction(shape));
    for (int p = s.top(); p >= s.bottom(); --p) out[p] = GridFunction::constant(shape, s[p]);
    return out;
}

} // namespace nvsigma
