#pragma once

// Real scalar Gaussian channel with blockage: Y = H X + Z with
// H ~ (1-alpha) delta_0 + alpha N(0, sigma_h2), Z ~ N(0, sigma_s2) and a
// known pilot X (deterministic or finite discrete). Closed-form mixture
// densities, information density and its gradient, posterior mean, LMMSE,
// the high-SNR asymptote slope, and Monte-Carlo estimators for the MMSE
// (gradient form) and the Poincare lower bound.

#include <cstdint>

#include "chanest/expfam.hpp"
#include "chanest/linalg.hpp"
#include "chanest/mc.hpp"

namespace chanest {

struct PilotAtom {
    double value = 0.0;
    double prob = 1.0;
};

struct ScalarChannelSpec {
    double alpha = 1.0;    // activity probability, blockage prob is 1 - alpha
    double sigma_h2 = 1.0; // channel-gain variance of the active component
    double sigma_s2 = 1.0; // noise variance
    std::vector<PilotAtom> pilot{{1.0, 1.0}};

    static ScalarChannelSpec deterministic(double alpha, double sigma_h2, double sigma_s2,
                                           double pilot_value);

    ScalarChannelSpec with_sigma_s2(double value) const;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
    // Additionally rejects pilot mass at 0 (required by the bound/MMSE
    // estimators and the asymptote).
    void validate_nonzero_pilot() const;

    double mean_inv_x2() const;  // E[1 / X^2]
    double draw_pilot(RngEngine& rng) const;
    double draw_gain(RngEngine& rng) const;  // 0 w.p. 1-alpha, else N(0, sigma_h2)
};

// log f_{Y|X}(y|x): two-term log-sum-exp of the mixture of N(0, sigma_s2)
// and N(0, x^2 sigma_h2 + sigma_s2).
double log_marginal_scalar(const ScalarChannelSpec& spec, double y, double x);

// Information density i(h; y, x) = log f_{Y|H,X} - log f_{Y|X}, closed form
// with log-domain mixture weights.
double info_density_scalar(const ScalarChannelSpec& spec, double h, double y, double x);

// d/dy of the information density.
double grad_info_density_scalar(const ScalarChannelSpec& spec, double h, double y, double x);

// E[H | Y = y, X = x]: active-component posterior weight times the Wiener
// gain, weight computed in log domain.
double posterior_mean_scalar(const ScalarChannelSpec& spec, double y, double x);

// Exact LMMSE E[alpha sigma_h2 sigma_s2 / (alpha X^2 sigma_h2 + sigma_s2)]
// over the finite pilot support.
double lmmse_scalar(const ScalarChannelSpec& spec);

// High-SNR slope of the lower bound: (alpha / 2) E[1 / X^2]. The reference
// line in a sweep is slope * sigma_s2.
double asymptote_scalar(const ScalarChannelSpec& spec);

enum class InnerMethod { kQuadrature, kNestedMc };

// Conditional variance of the information density given (h, x), taken over
// Y = h x + sigma_s * Z. Quadrature uses the supplied Gauss-Hermite nodes
// (weights pre-divided by sqrt(pi)); nodes/weights are read-only shared.
double scalar_inner_variance_nodes(const ScalarChannelSpec& spec, double h, double x,
                                   const RealVector& nodes, const RealVector& weights);

// Outer Monte Carlo over (H, X) of rho^2 kappa Var[i | H, X] with
// rho^2 kappa = sigma_s2 / x^2; inner variance by 200-node Gauss-Hermite
// quadrature (default) or nested Monte Carlo.
EstimateCI poincare_lb_scalar(const ScalarChannelSpec& spec, std::uint64_t trials,
                              std::uint64_t seed,
                              InnerMethod inner = InnerMethod::kQuadrature,
                              std::uint64_t inner_trials = 1000);

// Monte Carlo over (H, X, Z) of (sigma_s2 / x)^2 (d i / dy)^2, the
// gradient-form MMSE.
EstimateCI mmse_scalar_theorem1(const ScalarChannelSpec& spec, std::uint64_t trials,
                                std::uint64_t seed);

// The channel as a non-canonical exponential family with the pilot fixed:
// base N(0, sigma_s2), eta(h) = h, T(y) = y x / sigma_s2.
ExpFamilyModel make_scalar_expfam(const ScalarChannelSpec& spec, double x);

}  // namespace chanest
