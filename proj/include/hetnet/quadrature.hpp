#ifndef HETNET_QUADRATURE_HPP
#define HETNET_QUADRATURE_HPP

#include "hetnet/common.hpp"

#include <functional>
#include <span>
#include <vector>

namespace hetnet {

/// Fixed 64-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre64 {
    static constexpr int kOrder = 64;
    std::span<const double> nodes() const;
    std::span<const double> weights() const;
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// `panels` equal panels on [a, b], each carrying the 64-point rule.
QuadratureRule composite_gauss_legendre(double a, double b, int panels);

/// Composite Gauss-Legendre integral of a complex integrand over [a, b].
/// Starts from `panels` panels and doubles until two successive estimates
/// agree to `abs_tol`; throws QuadratureError past `max_panels`.
cplx integrate_composite(const std::function<cplx(double)>& f, double a, double b, int panels,
                         double abs_tol = 1e-12, int max_panels = 1 << 14);

} // namespace hetnet

#endif // HETNET_QUADRATURE_HPP
