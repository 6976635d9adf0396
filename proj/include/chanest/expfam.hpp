#pragma once

// Generic machinery for non-canonical exponential families
// f(y|x) = h(y) exp(<eta(x), T(y)> - phi(x)): information density, its
// gradient through the statistic Jacobian, the Tweedie-Robbins-Esposito
// residual, a probe-based Bakry-Emery constant, and the per-sample terms of
// the gradient-based MMSE identity and the Poincare lower bound.

#include <functional>

#include "chanest/linalg.hpp"

namespace chanest {

struct ExpFamilyModel {
    // log h(y)
    std::function<double(const RealVector&)> base_measure_log;
    // eta(x), dimension d
    std::function<RealVector(const RealVector&)> natural_param;
    // T(y), dimension d
    std::function<RealVector(const RealVector&)> sufficient_stat;
    // Statistic Jacobian G(y), shape k x d with G(l, j) = dT_j / dy_l, so
    // grad_y <eta, T(y)> = G(y) * eta.
    std::function<RealMatrix(const RealVector&)> stat_jacobian;
    // phi(x); cancels in the information density, kept for completeness
    std::function<double(const RealVector&)> log_partition;
    // log f(y|x)
    std::function<double(const RealVector&, const RealVector&)> log_lik;
    // log f_Y(y), possibly conditioned on side information fixed at model
    // construction time
    std::function<double(const RealVector&)> log_marginal;
};

// log f(y|x) - log f_Y(y). Throws std::domain_error on a non-finite result
// (callers must supply log-domain densities).
double info_density(const ExpFamilyModel& model, const RealVector& x, const RealVector& y);

// grad_y i(x, y) = G(y) (eta(x) - E[eta(X) | Y = y]); the posterior mean of
// the natural parameter is supplied in closed form by the channel.
RealVector grad_info_density(const ExpFamilyModel& model, const RealVector& x,
                             const RealVector& y, const RealVector& posterior_mean_eta);

// Max-abs residual of grad_y log(f_Y(y)/h(y)) = G(y) E[eta(X) | Y = y],
// left side by central finite differences.
double tre_residual(const ExpFamilyModel& model, const RealVector& y,
                    const RealVector& posterior_mean_eta);

// max(0, min over probes of lambda_min(H_y log(1/h) - H_y <eta(x), T(y)>)),
// Hessians by central finite differences. Cross-check utility; the channels
// use their closed-form constants in production.
double bakry_emery_constant(const ExpFamilyModel& model, const RealVector& x,
                            const std::vector<RealVector>& probe_set);

// One Monte-Carlo sample of the gradient-form MMSE: ||G(y)^+ grad||^2.
double theorem1_mmse_term(const RealMatrix& jac_pinv, const RealVector& grad);

// One outer-expectation sample of the Poincare lower bound:
// rho^2 * kappa * Var[i | X = x].
double theorem2_lb_term(double kappa, double rho, double cond_var);

// Central finite differences with step max(1e-6, 1e-6 |y_i|).
RealVector fd_gradient(const std::function<double(const RealVector&)>& f, const RealVector& y);
RealMatrix fd_hessian(const std::function<double(const RealVector&)>& f, const RealVector& y);

}  // namespace chanest
