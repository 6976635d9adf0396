#pragma once

// Realified MIMO blockage channel Y = C_X H + Z with
// H ~ (1-alpha) delta_0 + alpha N(0, (sigma_h2/2) I_{2NM}) and
// Z ~ N(0, (sigma_s2/2) I_{2NT}), C_X = I_N (x) realify(X^T) for a known
// M x T complex pilot X. Mixture densities and posterior mean in log
// domain, kappa/rho of the Poincare bound, exact LMMSE and asymptote
// slope, and the Monte-Carlo MMSE/bound estimators.

#include <cstdint>
#include <memory>
#include <optional>

#include "chanest/expfam.hpp"
#include "chanest/linalg.hpp"
#include "chanest/mc.hpp"

namespace chanest {

struct VectorPilotAtom {
    ComplexMatrix value;  // M x T
    double prob = 1.0;
};

struct VectorChannelSpec {
    double alpha = 1.0;
    double sigma_h2 = 1.0;
    double sigma_s2 = 1.0;
    std::size_t m = 1;  // transmit antennas
    std::size_t n = 1;  // receive antennas
    std::size_t t = 1;  // channel uses
    std::vector<VectorPilotAtom> pilot;
    std::optional<double> power_budget;  // per-antenna cap: tr(R_X) <= M * P_T

    static VectorChannelSpec identity_pilot(double alpha, double sigma_h2, double sigma_s2,
                                            std::size_t m, std::size_t n, std::size_t t);

    VectorChannelSpec with_sigma_s2(double value) const;

    // Shape, rank, and power checks; throws std::invalid_argument naming
    // the offending field (full column rank of every C_X is required).
    void validate() const;

    std::size_t draw_pilot_index(RngEngine& rng) const;
    // 0 with probability 1 - alpha, else N(0, (sigma_h2/2) I_{2NM}).
    RealVector draw_gain(RngEngine& rng) const;
    RealVector draw_noise(RngEngine& rng) const;  // N(0, (sigma_s2/2) I_{2NT})
};

// Per-(pilot, sigma_s2) cache: sensing matrix, the active-component
// covariance Sigma = (sigma_h2/2) C_X C_X^T + (sigma_s2/2) I with its
// inverse and log-determinants, the pseudoinverse of C_X, and the
// singular-value floor rho. Immutable after construction; freely shared.
class VectorDensityCache {
public:
    VectorDensityCache(const VectorChannelSpec& spec, const ComplexMatrix& pilot);

    const RealMatrix& c_x() const { return c_x_; }
    const RealMatrix& sigma_yx() const { return sigma_yx_; }
    const RealMatrix& sigma_yx_inv() const { return sigma_yx_inv_; }
    const RealMatrix& c_x_pinv() const { return c_x_pinv_; }
    const RealMatrix& posterior_gain() const { return posterior_gain_; }
    double log_det_sigma_yx() const { return log_det_sigma_yx_; }
    double rho() const { return rho_; }
    double alpha() const { return alpha_; }
    double sigma_h2() const { return sigma_h2_; }
    double sigma_s2() const { return sigma_s2_; }
    std::size_t obs_dim() const { return obs_dim_; }      // 2NT
    std::size_t param_dim() const { return param_dim_; }  // 2NM

private:
    RealMatrix c_x_;
    RealMatrix sigma_yx_;
    RealMatrix sigma_yx_inv_;
    RealMatrix c_x_pinv_;
    RealMatrix posterior_gain_;  // (sigma_h2/2) C_X^T Sigma^{-1}
    double log_det_sigma_yx_ = 0.0;
    double rho_ = 0.0;
    double alpha_ = 1.0;
    double sigma_h2_ = 1.0;
    double sigma_s2_ = 1.0;
    std::size_t obs_dim_ = 0;
    std::size_t param_dim_ = 0;
};

// Two-component zero-mean Gaussian mixture, log-sum-exp of the blocked and
// active terms.
double log_marginal_vector(const VectorDensityCache& cache, const RealVector& y);

// i(h; y) = log N(y; C_X h, (sigma_s2/2) I) - log_marginal_vector(y).
double info_density_vector(const VectorDensityCache& cache, const RealVector& h,
                           const RealVector& y);

// grad_y of the information density.
RealVector grad_info_density_vector(const VectorDensityCache& cache, const RealVector& h,
                                    const RealVector& y);

// E[H | Y = y]: active posterior weight times (sigma_h2/2) C_X^T Sigma^{-1} y.
RealVector posterior_mean_vector(const VectorDensityCache& cache, const RealVector& y);

// kappa = 2 / sigma_s2, rho = (sigma_s2/2) sigma_min(C_X^+).
std::pair<double, double> kappa_rho_vector(const VectorDensityCache& cache);

// Sample variance (unbiased) of the information density over inner_trials
// draws of Y | H = h.
double inner_variance_vector(const VectorDensityCache& cache, const RealVector& h,
                             std::uint64_t inner_trials, RngEngine& rng);

// Outer Monte Carlo over (H, X) of rho^2 kappa Var[i | H, X], the inner
// variance by Monte Carlo (quadrature is infeasible in 2NT dimensions).
EstimateCI poincare_lb_vector(const VectorChannelSpec& spec, std::uint64_t trials,
                              std::uint64_t inner_trials, std::uint64_t seed);

// Monte Carlo over (H, X, Z) of ||H - E[H | Y]||^2, pointwise equal to the
// gradient form ||(sigma_s2/2) C_X^+ grad i||^2.
EstimateCI mmse_vector_theorem1(const VectorChannelSpec& spec, std::uint64_t trials,
                                std::uint64_t seed);

// Exact (N sigma_s2 / 4T) E[tr((R_{realified} + sigma_s2/(2 alpha T sigma_h2) I)^{-1})]
// over the finite pilot support.
double lmmse_vector(const VectorChannelSpec& spec);

// High-SNR floor slope of the bound: (alpha / 4) / tr(E[R_{realified}]).
double asymptote_vector(const VectorChannelSpec& spec);

// The channel as a non-canonical exponential family: base N(0, (sigma_s2/2) I),
// eta(h) = h, T(y) = (2/sigma_s2) C_X^T y. The cache must outlive the model.
ExpFamilyModel make_vector_expfam(std::shared_ptr<const VectorDensityCache> cache);

}  // namespace chanest
