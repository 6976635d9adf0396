#pragma once

// Independent ground-truth computations used by tests and the acceptance
// suite. The Monte-Carlo MMSE oracles deliberately avoid the estimators'
// code paths: the scalar oracle squares the posterior-mean error instead of
// the density gradient, and the vector oracle assembles the mixture-ratio
// error term with its own SVD-based covariance machinery instead of the
// channel's Cholesky cache.

#include <cstdint>

#include "chanest/mc.hpp"
#include "chanest/quadrature.hpp"
#include "chanest/scalar_channel.hpp"
#include "chanest/vector_channel.hpp"

namespace chanest {

// Var[i | H = h, X = x] by Gauss-Hermite quadrature (rule as returned by
// gauss_hermite; the sqrt(pi) normalization is applied here).
double scalar_inner_variance(const ScalarChannelSpec& spec, double h, double x,
                             const QuadratureRule& rule);

// Deterministic lower bound: pilot sum times quadrature over the gain prior
// (point mass at 0 plus Gauss-Hermite over the active component) of
// (sigma_s2 / x^2) Var[i | h, x]. Accurate when sigma_s is comparable to
// the prior scale; at small sigma_s the Hermite nodes step over the
// O(sigma_s)-wide variance spike near the detection threshold.
double scalar_lb_quadrature(const ScalarChannelSpec& spec, const QuadratureRule& inner,
                            const QuadratureRule& outer);

// Deterministic lower bound with a composite outer integration whose
// segments refine geometrically around h = 0, resolving the detection-
// threshold band at any sigma_s. Reference for high-SNR evaluations.
double scalar_lb_reference(const ScalarChannelSpec& spec, const QuadratureRule& inner);

// Monte Carlo over (H, X, Z) of (H - E[H | Y, X])^2.
EstimateCI scalar_mmse_oracle(const ScalarChannelSpec& spec, std::uint64_t trials,
                              std::uint64_t seed);

// Mixture-ratio error machinery for one pilot of a vector channel, built on
// pinv/eigenvalue routines rather than the channel cache.
class VectorRatioOracle {
public:
    VectorRatioOracle(const VectorChannelSpec& spec, const ComplexMatrix& pilot);

    // ||((1-alpha) f0(y) h + alpha f1(y) (h - g(y))) / mixture(y)||^2 with
    // g(y) = (sigma_h2/2) C_X^T Sigma^{-1} y, weights in log domain with
    // dominant-term factoring.
    double error_term(const RealVector& h, const RealVector& y) const;

private:
    RealMatrix c_x_;
    RealMatrix sigma_inv_;
    RealMatrix gain_;  // (sigma_h2/2) C_X^T Sigma^{-1}
    double log_det_sigma_ = 0.0;
    double alpha_ = 1.0;
    double sigma_s2_ = 1.0;
    std::size_t obs_dim_ = 0;
};

// Monte Carlo of the ratio-form error over (H, X, Z).
EstimateCI vector_mmse_oracle(const VectorChannelSpec& spec, std::uint64_t trials,
                              std::uint64_t seed);

}  // namespace chanest
