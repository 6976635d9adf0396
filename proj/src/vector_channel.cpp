#include "chanest/vector_channel.hpp"

#include <cmath>

namespace chanest {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double lse2(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(std::exp(b - a));
}

double logistic_weight(double l1, double l0) {
    if (l1 >= l0) return 1.0 / (1.0 + std::exp(l0 - l1));
    const double e = std::exp(l1 - l0);
    return e / (1.0 + e);
}

double log_w0(double alpha) {
    return alpha < 1.0 ? std::log1p(-alpha) : -std::numeric_limits<double>::infinity();
}

// log N(y; 0, c I_k) given ||y||^2.
double log_isotropic(double norm_sq, double c, std::size_t k) {
    return -0.5 * (norm_sq / c + static_cast<double>(k) * (std::log(c) + kLog2Pi));
}

// Log densities of the two mixture components at y.
struct ComponentLogs {
    double blocked;  // log N(y; 0, (sigma_s2/2) I)
    double active;   // log N(y; 0, Sigma)
};

ComponentLogs component_logs(const VectorDensityCache& cache, const RealVector& y) {
    ComponentLogs out;
    out.blocked = log_isotropic(norm2_sq(y), 0.5 * cache.sigma_s2(), cache.obs_dim());
    const double quad = dot(y, matvec(cache.sigma_yx_inv(), y));
    out.active = -0.5 * (quad + cache.log_det_sigma_yx() +
                         static_cast<double>(cache.obs_dim()) * kLog2Pi);
    return out;
}

}  // namespace

VectorChannelSpec VectorChannelSpec::identity_pilot(double alpha, double sigma_h2,
                                                    double sigma_s2, std::size_t m,
                                                    std::size_t n, std::size_t t) {
    if (t != m)
        throw std::invalid_argument("VectorChannelSpec: identity pilot requires T == M");
    VectorChannelSpec spec;
    spec.alpha = alpha;
    spec.sigma_h2 = sigma_h2;
    spec.sigma_s2 = sigma_s2;
    spec.m = m;
    spec.n = n;
    spec.t = t;
    spec.pilot = {{ComplexMatrix::identity(m), 1.0}};
    spec.validate();
    return spec;
}

VectorChannelSpec VectorChannelSpec::with_sigma_s2(double value) const {
    VectorChannelSpec out = *this;
    out.sigma_s2 = value;
    out.validate();
    return out;
}

void VectorChannelSpec::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("VectorChannelSpec: alpha must be in (0, 1]");
    if (!(sigma_h2 > 0.0)) throw std::invalid_argument("VectorChannelSpec: sigma_h2 must be positive");
    if (!(sigma_s2 > 0.0)) throw std::invalid_argument("VectorChannelSpec: sigma_s2 must be positive");
    if (m == 0 || n == 0 || t == 0)
        throw std::invalid_argument("VectorChannelSpec: M, N, T must be positive");
    if (t < m)
        throw std::invalid_argument(
            "VectorChannelSpec: pilot requires T >= M for a full-column-rank sensing matrix");
    if (pilot.empty()) throw std::invalid_argument("VectorChannelSpec: pilot support is empty");
    double total = 0.0;
    for (const VectorPilotAtom& atom : pilot) {
        if (atom.value.rows() != m || atom.value.cols() != t)
            throw std::invalid_argument("VectorChannelSpec: pilot matrix must be M x T");
        if (!(atom.prob > 0.0))
            throw std::invalid_argument("VectorChannelSpec: pilot prob must be positive");
        total += atom.prob;
        const RealVector sv = singular_values(build_sensing_matrix(atom.value, n));
        if (sv.back() <= 1e-12 * sv.front() * static_cast<double>(2 * n * t))
            throw std::invalid_argument("VectorChannelSpec: pilot sensing matrix is rank deficient");
        if (power_budget) {
            double tr = 0.0;
            const ComplexMatrix r = sample_covariance(atom.value);
            for (std::size_t i = 0; i < r.rows(); ++i) tr += r(i, i).real();
            if (tr > static_cast<double>(m) * *power_budget + 1e-12)
                throw std::invalid_argument("VectorChannelSpec: pilot exceeds power_budget");
        }
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("VectorChannelSpec: pilot probs must sum to 1");
}

std::size_t VectorChannelSpec::draw_pilot_index(RngEngine& rng) const {
    if (pilot.size() == 1) return 0;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng);
    for (std::size_t i = 0; i < pilot.size(); ++i) {
        u -= pilot[i].prob;
        if (u <= 0.0) return i;
    }
    return pilot.size() - 1;
}

RealVector VectorChannelSpec::draw_gain(RngEngine& rng) const {
    const std::size_t dim = 2 * n * m;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (unif(rng) >= alpha) return RealVector(dim, 0.0);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * sigma_h2));
    RealVector h(dim);
    for (double& v : h) v = normal(rng);
    return h;
}

RealVector VectorChannelSpec::draw_noise(RngEngine& rng) const {
    const std::size_t dim = 2 * n * t;
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * sigma_s2));
    RealVector z(dim);
    for (double& v : z) v = normal(rng);
    return z;
}

VectorDensityCache::VectorDensityCache(const VectorChannelSpec& spec,
                                       const ComplexMatrix& pilot) {
    alpha_ = spec.alpha;
    sigma_h2_ = spec.sigma_h2;
    sigma_s2_ = spec.sigma_s2;
    obs_dim_ = 2 * spec.n * spec.t;
    param_dim_ = 2 * spec.n * spec.m;

    c_x_ = build_sensing_matrix(pilot, spec.n);
    c_x_pinv_ = pinv(c_x_);  // throws RankError on rank deficiency

    sigma_yx_ = matmul(c_x_, transpose(c_x_));
    for (double& v : sigma_yx_.data()) v *= 0.5 * sigma_h2_;
    for (std::size_t i = 0; i < obs_dim_; ++i) sigma_yx_(i, i) += 0.5 * sigma_s2_;

    const Cholesky f = cholesky(sigma_yx_);
    log_det_sigma_yx_ = f.log_det;
    sigma_yx_inv_ = cholesky_inverse(f);

    // Cached-inverse residual check: || Sigma Sigma^{-1} - I ||_max.
    const RealMatrix probe = matmul(sigma_yx_, sigma_yx_inv_);
    double worst = 0.0;
    for (std::size_t i = 0; i < obs_dim_; ++i)
        for (std::size_t j = 0; j < obs_dim_; ++j)
            worst = std::max(worst, std::abs(probe(i, j) - (i == j ? 1.0 : 0.0)));
    if (worst >= 1e-8)
        throw std::runtime_error("VectorDensityCache: Sigma inverse residual too large");

    const RealVector sv = singular_values(c_x_);
    rho_ = 0.5 * sigma_s2_ / sv.front();

    posterior_gain_ = matmul(transpose(c_x_), sigma_yx_inv_);
    for (double& v : posterior_gain_.data()) v *= 0.5 * sigma_h2_;
}

double log_marginal_vector(const VectorDensityCache& cache, const RealVector& y) {
    const ComponentLogs logs = component_logs(cache, y);
    return lse2(log_w0(cache.alpha()) + logs.blocked, std::log(cache.alpha()) + logs.active);
}

double info_density_vector(const VectorDensityCache& cache, const RealVector& h,
                           const RealVector& y) {
    RealVector resid = matvec(cache.c_x(), h);
    for (std::size_t i = 0; i < resid.size(); ++i) resid[i] = y[i] - resid[i];
    const double cond =
        log_isotropic(norm2_sq(resid), 0.5 * cache.sigma_s2(), cache.obs_dim());
    return cond - log_marginal_vector(cache, y);
}

RealVector grad_info_density_vector(const VectorDensityCache& cache, const RealVector& h,
                                    const RealVector& y) {
    const ComponentLogs logs = component_logs(cache, y);
    const double w1 = logistic_weight(std::log(cache.alpha()) + logs.active,
                                      log_w0(cache.alpha()) + logs.blocked);
    const double w0 = 1.0 - w1;
    const double inv_noise = 2.0 / cache.sigma_s2();

    const RealVector mean_y = matvec(cache.c_x(), h);
    const RealVector sig_inv_y = matvec(cache.sigma_yx_inv(), y);
    RealVector grad(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        grad[i] = -inv_noise * (y[i] - mean_y[i]) + w0 * inv_noise * y[i] + w1 * sig_inv_y[i];
    return grad;
}

RealVector posterior_mean_vector(const VectorDensityCache& cache, const RealVector& y) {
    const ComponentLogs logs = component_logs(cache, y);
    const double w1 = logistic_weight(std::log(cache.alpha()) + logs.active,
                                      log_w0(cache.alpha()) + logs.blocked);
    RealVector mean = matvec(cache.posterior_gain(), y);
    for (double& v : mean) v *= w1;
    return mean;
}

std::pair<double, double> kappa_rho_vector(const VectorDensityCache& cache) {
    return {2.0 / cache.sigma_s2(), cache.rho()};
}

double inner_variance_vector(const VectorDensityCache& cache, const RealVector& h,
                             std::uint64_t inner_trials, RngEngine& rng) {
    if (inner_trials < 2)
        throw std::invalid_argument("inner_variance_vector: need at least 2 inner draws");
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * cache.sigma_s2()));
    const RealVector mean_y = matvec(cache.c_x(), h);
    const std::size_t k = cache.obs_dim();
    const double lw0 = log_w0(cache.alpha());
    const double lw1 = std::log(cache.alpha());
    const double half_noise = 0.5 * cache.sigma_s2();

    RealVector y(k);
    EstimateCI stream;
    for (std::uint64_t j = 0; j < inner_trials; ++j) {
        double noise_sq = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double w = normal(rng);
            noise_sq += w * w;
            y[i] = mean_y[i] + w;
        }
        const double cond = log_isotropic(noise_sq, half_noise, k);
        const double blocked = log_isotropic(norm2_sq(y), half_noise, k);
        const double active = -0.5 * (dot(y, matvec(cache.sigma_yx_inv(), y)) +
                                      cache.log_det_sigma_yx() +
                                      static_cast<double>(k) * kLog2Pi);
        stream.update(cond - lse2(lw0 + blocked, lw1 + active));
    }
    return stream.variance();
}

namespace {

std::vector<std::shared_ptr<const VectorDensityCache>> build_caches(
    const VectorChannelSpec& spec) {
    std::vector<std::shared_ptr<const VectorDensityCache>> caches;
    caches.reserve(spec.pilot.size());
    for (const VectorPilotAtom& atom : spec.pilot)
        caches.push_back(std::make_shared<VectorDensityCache>(spec, atom.value));
    return caches;
}

}  // namespace

EstimateCI poincare_lb_vector(const VectorChannelSpec& spec, std::uint64_t trials,
                              std::uint64_t inner_trials, std::uint64_t seed) {
    spec.validate();
    if (trials == 0 || inner_trials < 2)
        throw std::invalid_argument("poincare_lb_vector: trials >= 1 and inner_trials >= 2");
    const auto caches = build_caches(spec);

    const auto body = [&](RngEngine& rng, std::uint64_t n, EstimateCI& acc) {
        for (std::uint64_t i = 0; i < n; ++i) {
            const auto& cache = *caches[spec.draw_pilot_index(rng)];
            const RealVector h = spec.draw_gain(rng);
            const double var = inner_variance_vector(cache, h, inner_trials, rng);
            const auto [kappa, rho] = kappa_rho_vector(cache);
            acc.update(rho * rho * kappa * var);
        }
    };
    return run_chunked(trials, 64, seed, body);
}

EstimateCI mmse_vector_theorem1(const VectorChannelSpec& spec, std::uint64_t trials,
                                std::uint64_t seed) {
    spec.validate();
    if (trials == 0) throw std::invalid_argument("mmse_vector_theorem1: trials must be >= 1");
    const auto caches = build_caches(spec);

    const auto body = [&](RngEngine& rng, std::uint64_t n, EstimateCI& acc) {
        for (std::uint64_t i = 0; i < n; ++i) {
            const auto& cache = *caches[spec.draw_pilot_index(rng)];
            const RealVector h = spec.draw_gain(rng);
            RealVector y = matvec(cache.c_x(), h);
            const RealVector z = spec.draw_noise(rng);
            for (std::size_t k = 0; k < y.size(); ++k) y[k] += z[k];
            const RealVector mean = posterior_mean_vector(cache, y);
            double err = 0.0;
            for (std::size_t k = 0; k < h.size(); ++k) {
                const double d = h[k] - mean[k];
                err += d * d;
            }
            acc.update(err);
        }
    };
    return run_chunked(trials, 1 << 12, seed, body);
}

double lmmse_vector(const VectorChannelSpec& spec) {
    spec.validate();
    double acc = 0.0;
    const double shift = spec.sigma_s2 / (2.0 * spec.alpha * static_cast<double>(spec.t) *
                                          spec.sigma_h2);
    for (const VectorPilotAtom& atom : spec.pilot) {
        RealMatrix a = sample_covariance_realified(atom.value);
        for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += shift;
        const RealMatrix inv = cholesky_inverse(cholesky(a));
        double tr = 0.0;
        for (std::size_t i = 0; i < inv.rows(); ++i) tr += inv(i, i);
        acc += atom.prob * tr;
    }
    return static_cast<double>(spec.n) * spec.sigma_s2 / (4.0 * static_cast<double>(spec.t)) *
           acc;
}

double asymptote_vector(const VectorChannelSpec& spec) {
    spec.validate();
    double tr_mean = 0.0;
    for (const VectorPilotAtom& atom : spec.pilot) {
        const RealMatrix r = sample_covariance_realified(atom.value);
        for (std::size_t i = 0; i < r.rows(); ++i) tr_mean += atom.prob * r(i, i);
    }
    return 0.25 * spec.alpha / tr_mean;
}

ExpFamilyModel make_vector_expfam(std::shared_ptr<const VectorDensityCache> cache) {
    ExpFamilyModel model;
    model.base_measure_log = [cache](const RealVector& y) {
        return log_isotropic(norm2_sq(y), 0.5 * cache->sigma_s2(), cache->obs_dim());
    };
    model.natural_param = [](const RealVector& h) { return h; };
    model.sufficient_stat = [cache](const RealVector& y) {
        RealVector stat = matvec(transpose(cache->c_x()), y);
        for (double& v : stat) v *= 2.0 / cache->sigma_s2();
        return stat;
    };
    model.stat_jacobian = [cache](const RealVector&) {
        RealMatrix j = cache->c_x();
        for (double& v : j.data()) v *= 2.0 / cache->sigma_s2();
        return j;
    };
    model.log_partition = [cache](const RealVector& h) {
        return norm2_sq(matvec(cache->c_x(), h)) / cache->sigma_s2();
    };
    model.log_lik = [cache](const RealVector& y, const RealVector& h) {
        RealVector resid = matvec(cache->c_x(), h);
        for (std::size_t i = 0; i < resid.size(); ++i) resid[i] = y[i] - resid[i];
        return log_isotropic(norm2_sq(resid), 0.5 * cache->sigma_s2(), cache->obs_dim());
    };
    model.log_marginal = [cache](const RealVector& y) {
        return log_marginal_vector(*cache, y);
    };
    return model;
}

}  // namespace chanest
