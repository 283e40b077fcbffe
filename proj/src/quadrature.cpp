#include "hetnet/quadrature.hpp"

#include <array>

namespace hetnet {

namespace {

struct Rule {
    std::array<double, GaussLegendre64::kOrder> x{};
    std::array<double, GaussLegendre64::kOrder> w{};
};

// Newton iteration on P_n using the three-term recurrence.
Rule build_rule()
{
    constexpr int n = GaussLegendre64::kOrder;
    Rule rule;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double step = p1 / dp;
            z -= step;
            if (std::abs(step) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.x[i] = -z;
        rule.x[n - 1 - i] = z;
        rule.w[i] = w;
        rule.w[n - 1 - i] = w;
    }
    return rule;
}

const Rule& rule()
{
    static const Rule r = build_rule();
    return r;
}

cplx composite(const std::function<cplx(double)>& f, double a, double b, int panels)
{
    const auto rule = composite_gauss_legendre(a, b, panels);
    cplx total = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) total += rule.weights[i] * f(rule.nodes[i]);
    return total;
}

} // namespace

QuadratureRule composite_gauss_legendre(double a, double b, int panels)
{
    panels = std::max(panels, 1);
    const auto& r = rule();
    const double h = (b - a) / panels;
    QuadratureRule out;
    out.nodes.reserve(static_cast<std::size_t>(panels) * GaussLegendre64::kOrder);
    out.weights.reserve(out.nodes.capacity());
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (int i = 0; i < GaussLegendre64::kOrder; ++i) {
            out.nodes.push_back(mid + 0.5 * h * r.x[i]);
            out.weights.push_back(0.5 * h * r.w[i]);
        }
    }
    return out;
}

std::span<const double> GaussLegendre64::nodes() const { return rule().x; }
std::span<const double> GaussLegendre64::weights() const { return rule().w; }

cplx integrate_composite(const std::function<cplx(double)>& f, double a, double b, int panels, double abs_tol,
                         int max_panels)
{
    panels = std::max(panels, 1);
    cplx coarse = composite(f, a, b, panels);
    while (panels <= max_panels) {
        panels *= 2;
        const cplx fine = composite(f, a, b, panels);
        if (std::abs(fine - coarse) <= abs_tol) return fine;
        coarse = fine;
    }
    throw QuadratureError("composite Gauss-Legendre did not converge");
}

} // namespace hetnet
