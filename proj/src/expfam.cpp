#include "chanest/expfam.hpp"

#include <cmath>
#include <stdexcept>

namespace chanest {

namespace {

double fd_step(double yi) { return std::max(1e-6, 1e-6 * std::abs(yi)); }

}  // namespace

double info_density(const ExpFamilyModel& model, const RealVector& x, const RealVector& y) {
    const double value = model.log_lik(y, x) - model.log_marginal(y);
    if (!std::isfinite(value))
        throw std::domain_error("info_density: non-finite value (density underflow?)");
    return value;
}

RealVector grad_info_density(const ExpFamilyModel& model, const RealVector& x,
                             const RealVector& y, const RealVector& posterior_mean_eta) {
    RealVector diff = model.natural_param(x);
    if (diff.size() != posterior_mean_eta.size())
        throw std::invalid_argument("grad_info_density: posterior mean dimension mismatch");
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= posterior_mean_eta[i];
    return matvec(model.stat_jacobian(y), diff);
}

double tre_residual(const ExpFamilyModel& model, const RealVector& y,
                    const RealVector& posterior_mean_eta) {
    const auto log_ratio = [&](const RealVector& yy) {
        return model.log_marginal(yy) - model.base_measure_log(yy);
    };
    const RealVector lhs = fd_gradient(log_ratio, y);
    const RealVector rhs = matvec(model.stat_jacobian(y), posterior_mean_eta);
    double worst = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
    return worst;
}

double bakry_emery_constant(const ExpFamilyModel& model, const RealVector& x,
                            const std::vector<RealVector>& probe_set) {
    if (probe_set.empty()) throw std::invalid_argument("bakry_emery_constant: empty probe set");
    const RealVector eta = model.natural_param(x);
    const auto neg_log_base = [&](const RealVector& y) { return -model.base_measure_log(y); };
    const auto stat_term = [&](const RealVector& y) { return dot(eta, model.sufficient_stat(y)); };

    double worst = std::numeric_limits<double>::infinity();
    for (const RealVector& y : probe_set) {
        const RealMatrix hb = fd_hessian(neg_log_base, y);
        const RealMatrix hs = fd_hessian(stat_term, y);
        RealMatrix diff(hb.rows(), hb.cols());
        for (std::size_t i = 0; i < hb.rows(); ++i)
            for (std::size_t j = 0; j < hb.cols(); ++j) diff(i, j) = hb(i, j) - hs(i, j);
        const RealVector eig = symmetric_eigenvalues(diff);
        worst = std::min(worst, eig.back());
    }
    return std::max(0.0, worst);
}

double theorem1_mmse_term(const RealMatrix& jac_pinv, const RealVector& grad) {
    return norm2_sq(matvec(jac_pinv, grad));
}

double theorem2_lb_term(double kappa, double rho, double cond_var) {
    if (cond_var < 0.0) throw std::invalid_argument("theorem2_lb_term: negative variance");
    return rho * rho * kappa * cond_var;
}

RealVector fd_gradient(const std::function<double(const RealVector&)>& f, const RealVector& y) {
    RealVector grad(y.size());
    RealVector probe = y;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double h = fd_step(y[i]);
        probe[i] = y[i] + h;
        const double fp = f(probe);
        probe[i] = y[i] - h;
        const double fm = f(probe);
        probe[i] = y[i];
        grad[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

RealMatrix fd_hessian(const std::function<double(const RealVector&)>& f, const RealVector& y) {
    const std::size_t k = y.size();
    RealMatrix hess(k, k);
    const double f0 = f(y);
    RealVector probe = y;
    for (std::size_t i = 0; i < k; ++i) {
        const double hi = fd_step(y[i]);
        probe[i] = y[i] + hi;
        const double fp = f(probe);
        probe[i] = y[i] - hi;
        const double fm = f(probe);
        probe[i] = y[i];
        hess(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
        for (std::size_t j = i + 1; j < k; ++j) {
            const double hj = fd_step(y[j]);
            probe[i] = y[i] + hi;
            probe[j] = y[j] + hj;
            const double fpp = f(probe);
            probe[j] = y[j] - hj;
            const double fpm = f(probe);
            probe[i] = y[i] - hi;
            const double fmm = f(probe);
            probe[j] = y[j] + hj;
            const double fmp = f(probe);
            probe[i] = y[i];
            probe[j] = y[j];
            const double v = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
            hess(i, j) = v;
            hess(j, i) = v;
        }
    }
    return hess;
}

}  // namespace chanest
