#include "chanest/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chanest {

namespace {

// One pass of the orthonormal Hermite recurrence at t. The sequence
// p_0..p_n is a Sturm sequence: its sign changes count the roots of p_n
// greater than t, which gives bracket-safe bisection for every root.
struct SturmEval {
    double pn;
    int roots_above;
    double christoffel;  // sum_{j < n} p_j(t)^2
};

SturmEval eval_orthonormal(std::size_t n, double t) {
    const double pi_quarter = std::pow(std::numbers::pi, -0.25);
    double pm1 = 0.0;
    double p0 = pi_quarter;
    double christoffel = 0.0;
    int changes = 0;
    int prev_sign = 1;
    for (std::size_t j = 0; j < n; ++j) {
        christoffel += p0 * p0;
        const double jd = static_cast<double>(j);
        const double next =
            t * std::sqrt(2.0 / (jd + 1.0)) * p0 - std::sqrt(jd / (jd + 1.0)) * pm1;
        const int sign = next > 0.0 ? 1 : (next < 0.0 ? -1 : -prev_sign);
        if (sign != prev_sign) ++changes;
        prev_sign = sign;
        pm1 = p0;
        p0 = next;
    }
    return {p0, changes, christoffel};
}

}  // namespace

QuadratureRule gauss_hermite(std::size_t order) {
    if (order < 2 || order > 512)
        throw std::invalid_argument("gauss_hermite: order must be in [2, 512]");

    const std::size_t n = order;
    const std::size_t half = (n + 1) / 2;
    const std::size_t positive = n / 2;  // roots strictly above zero

    QuadratureRule rule;
    rule.order = n;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    // All roots lie inside (-R, R) with R = sqrt(2n + 1) + 2.
    const double upper = std::sqrt(2.0 * static_cast<double>(n) + 1.0) + 2.0;
    for (std::size_t k = 1; k <= positive; ++k) {
        double lo = 0.0, hi = upper;  // count(lo) >= k > count(hi)
        for (int iter = 0; iter < 200; ++iter) {
            const double mid = 0.5 * (lo + hi);
            if (eval_orthonormal(n, mid).roots_above >= static_cast<int>(k)) lo = mid;
            else hi = mid;
            if (hi - lo <= 1e-16 * std::max(1.0, hi)) break;
        }
        const double t = 0.5 * (lo + hi);  // k-th largest root
        const double w = 1.0 / eval_orthonormal(n, t).christoffel;
        rule.nodes[n - k] = t;
        rule.weights[n - k] = w;
        rule.nodes[k - 1] = -t;
        rule.weights[k - 1] = w;
    }
    if (n % 2 == 1) {
        rule.nodes[half - 1] = 0.0;
        rule.weights[half - 1] = 1.0 / eval_orthonormal(n, 0.0).christoffel;
    }
    return rule;
}

}  // namespace chanest
