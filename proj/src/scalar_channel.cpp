#include "chanest/scalar_channel.hpp"

#include <cmath>
#include <numbers>

#include "chanest/quadrature.hpp"

namespace chanest {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2 pi)

double log_normal_pdf(double y, double mean, double var) {
    const double d = y - mean;
    return -0.5 * (d * d / var + std::log(var) + kLog2Pi);
}

// log(exp(a) + exp(b)) tolerating -inf arguments.
double lse2(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(std::exp(b - a));
}

// 1 / (1 + exp(l0 - l1)): posterior weight of the component with log score
// l1 against l0.
double logistic_weight(double l1, double l0) {
    if (l1 >= l0) return 1.0 / (1.0 + std::exp(l0 - l1));
    const double e = std::exp(l1 - l0);
    return e / (1.0 + e);
}

// Per-(x, sigma_s2) constants of the mixture density.
struct MixtureTerms {
    double var_active;  // x^2 sigma_h2 + sigma_s2
    double log_w0;      // log(1 - alpha)
    double log_w1;      // log(alpha)
};

MixtureTerms mixture_terms(const ScalarChannelSpec& spec, double x) {
    MixtureTerms t;
    t.var_active = x * x * spec.sigma_h2 + spec.sigma_s2;
    t.log_w0 = spec.alpha < 1.0 ? std::log1p(-spec.alpha) : -std::numeric_limits<double>::infinity();
    t.log_w1 = std::log(spec.alpha);
    return t;
}

}  // namespace

ScalarChannelSpec ScalarChannelSpec::deterministic(double alpha, double sigma_h2,
                                                   double sigma_s2, double pilot_value) {
    ScalarChannelSpec spec;
    spec.alpha = alpha;
    spec.sigma_h2 = sigma_h2;
    spec.sigma_s2 = sigma_s2;
    spec.pilot = {{pilot_value, 1.0}};
    spec.validate();
    return spec;
}

ScalarChannelSpec ScalarChannelSpec::with_sigma_s2(double value) const {
    ScalarChannelSpec out = *this;
    out.sigma_s2 = value;
    out.validate();
    return out;
}

void ScalarChannelSpec::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("ScalarChannelSpec: alpha must be in (0, 1]");
    if (!(sigma_h2 > 0.0) || !std::isfinite(sigma_h2))
        throw std::invalid_argument("ScalarChannelSpec: sigma_h2 must be positive");
    if (!(sigma_s2 > 0.0) || !std::isfinite(sigma_s2))
        throw std::invalid_argument("ScalarChannelSpec: sigma_s2 must be positive");
    if (pilot.empty()) throw std::invalid_argument("ScalarChannelSpec: pilot support is empty");
    double total = 0.0;
    for (const PilotAtom& atom : pilot) {
        if (!std::isfinite(atom.value))
            throw std::invalid_argument("ScalarChannelSpec: pilot value not finite");
        if (!(atom.prob > 0.0))
            throw std::invalid_argument("ScalarChannelSpec: pilot prob must be positive");
        total += atom.prob;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("ScalarChannelSpec: pilot probs must sum to 1");
}

void ScalarChannelSpec::validate_nonzero_pilot() const {
    validate();
    for (const PilotAtom& atom : pilot)
        if (atom.value == 0.0)
            throw std::invalid_argument("ScalarChannelSpec: pilot support must exclude 0");
}

double ScalarChannelSpec::mean_inv_x2() const {
    double acc = 0.0;
    for (const PilotAtom& atom : pilot) acc += atom.prob / (atom.value * atom.value);
    return acc;
}

double ScalarChannelSpec::draw_pilot(RngEngine& rng) const {
    if (pilot.size() == 1) return pilot.front().value;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng);
    for (const PilotAtom& atom : pilot) {
        u -= atom.prob;
        if (u <= 0.0) return atom.value;
    }
    return pilot.back().value;
}

double ScalarChannelSpec::draw_gain(RngEngine& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (unif(rng) >= alpha) return 0.0;
    std::normal_distribution<double> normal(0.0, std::sqrt(sigma_h2));
    return normal(rng);
}

double log_marginal_scalar(const ScalarChannelSpec& spec, double y, double x) {
    const MixtureTerms t = mixture_terms(spec, x);
    return lse2(t.log_w0 + log_normal_pdf(y, 0.0, spec.sigma_s2),
                t.log_w1 + log_normal_pdf(y, 0.0, t.var_active));
}

double info_density_scalar(const ScalarChannelSpec& spec, double h, double y, double x) {
    const MixtureTerms t = mixture_terms(spec, x);
    const double d = y - h * x;
    const double quad = (-d * d + y * y) / (2.0 * spec.sigma_s2);
    // log(1 - alpha + alpha sqrt(sigma_s2 / v) exp(y^2 x^2 sigma_h2 / (2 sigma_s2 v)))
    // as a log-sum-exp so the inner exp never overflows.
    const double active = t.log_w1 + 0.5 * std::log(spec.sigma_s2 / t.var_active) +
                          y * y * x * x * spec.sigma_h2 / (2.0 * spec.sigma_s2 * t.var_active);
    return quad - lse2(t.log_w0, active);
}

double grad_info_density_scalar(const ScalarChannelSpec& spec, double h, double y, double x) {
    const MixtureTerms t = mixture_terms(spec, x);
    const double l0 = t.log_w0 + log_normal_pdf(y, 0.0, spec.sigma_s2);
    const double l1 = t.log_w1 + log_normal_pdf(y, 0.0, t.var_active);
    const double w1 = logistic_weight(l1, l0);
    const double w0 = 1.0 - w1;
    // (hx - y)/sigma_s2 minus the marginal score -y (w0/sigma_s2 + w1/v).
    return (h * x - y) / spec.sigma_s2 + y * (w0 / spec.sigma_s2 + w1 / t.var_active);
}

double posterior_mean_scalar(const ScalarChannelSpec& spec, double y, double x) {
    const MixtureTerms t = mixture_terms(spec, x);
    const double l0 = t.log_w0 + log_normal_pdf(y, 0.0, spec.sigma_s2);
    const double l1 = t.log_w1 + log_normal_pdf(y, 0.0, t.var_active);
    const double w1 = logistic_weight(l1, l0);
    return w1 * (x * spec.sigma_h2 / t.var_active) * y;
}

double lmmse_scalar(const ScalarChannelSpec& spec) {
    spec.validate();
    double acc = 0.0;
    for (const PilotAtom& atom : spec.pilot) {
        const double x2 = atom.value * atom.value;
        acc += atom.prob * spec.alpha * spec.sigma_h2 * spec.sigma_s2 /
               (spec.alpha * x2 * spec.sigma_h2 + spec.sigma_s2);
    }
    return acc;
}

double asymptote_scalar(const ScalarChannelSpec& spec) {
    spec.validate_nonzero_pilot();
    return 0.5 * spec.alpha * spec.mean_inv_x2();
}

double scalar_inner_variance_nodes(const ScalarChannelSpec& spec, double h, double x,
                                   const RealVector& nodes, const RealVector& weights) {
    // Y = h x + sigma_s sqrt(2) t under the Hermite weight; two-pass
    // weighted variance keeps the result nonnegative.
    const double scale = std::sqrt(2.0 * spec.sigma_s2);
    const double center = h * x;
    const std::size_t n = nodes.size();
    RealVector values(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        values[i] = info_density_scalar(spec, h, center + scale * nodes[i], x);
        mean += weights[i] * values[i];
    }
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = values[i] - mean;
        var += weights[i] * d * d;
    }
    return var;
}

EstimateCI poincare_lb_scalar(const ScalarChannelSpec& spec, std::uint64_t trials,
                              std::uint64_t seed, InnerMethod inner,
                              std::uint64_t inner_trials) {
    spec.validate_nonzero_pilot();
    if (trials == 0) throw std::invalid_argument("poincare_lb_scalar: trials must be >= 1");
    if (inner == InnerMethod::kNestedMc && inner_trials < 2)
        throw std::invalid_argument("poincare_lb_scalar: inner_trials must be >= 2");

    // Normalized Gauss-Hermite rule shared read-only across chunks.
    QuadratureRule rule;
    if (inner == InnerMethod::kQuadrature) {
        rule = gauss_hermite(200);
        const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
        for (double& w : rule.weights) w *= inv_sqrt_pi;
    }
    const double sigma_s = std::sqrt(spec.sigma_s2);

    const auto body = [&](RngEngine& rng, std::uint64_t n, EstimateCI& acc) {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::uint64_t i = 0; i < n; ++i) {
            const double x = spec.draw_pilot(rng);
            const double h = spec.draw_gain(rng);
            double var;
            if (inner == InnerMethod::kQuadrature) {
                var = scalar_inner_variance_nodes(spec, h, x, rule.nodes, rule.weights);
            } else {
                EstimateCI stream;
                for (std::uint64_t j = 0; j < inner_trials; ++j) {
                    const double y = h * x + sigma_s * normal(rng);
                    stream.update(info_density_scalar(spec, h, y, x));
                }
                var = stream.variance();
            }
            acc.update(spec.sigma_s2 / (x * x) * var);
        }
    };
    return run_chunked(trials, 1 << 14, seed, body);
}

EstimateCI mmse_scalar_theorem1(const ScalarChannelSpec& spec, std::uint64_t trials,
                                std::uint64_t seed) {
    spec.validate_nonzero_pilot();
    if (trials == 0) throw std::invalid_argument("mmse_scalar_theorem1: trials must be >= 1");
    const double sigma_s = std::sqrt(spec.sigma_s2);
    const auto body = [&](RngEngine& rng, std::uint64_t n, EstimateCI& acc) {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::uint64_t i = 0; i < n; ++i) {
            const double x = spec.draw_pilot(rng);
            const double h = spec.draw_gain(rng);
            const double y = h * x + sigma_s * normal(rng);
            const double g = grad_info_density_scalar(spec, h, y, x);
            const double gain = spec.sigma_s2 / x;
            acc.update(gain * gain * g * g);
        }
    };
    return run_chunked(trials, 1 << 16, seed, body);
}

ExpFamilyModel make_scalar_expfam(const ScalarChannelSpec& spec, double x) {
    spec.validate();
    ExpFamilyModel model;
    const double sigma_s2 = spec.sigma_s2;
    model.base_measure_log = [sigma_s2](const RealVector& y) {
        return log_normal_pdf(y.at(0), 0.0, sigma_s2);
    };
    model.natural_param = [](const RealVector& h) { return RealVector{h.at(0)}; };
    model.sufficient_stat = [x, sigma_s2](const RealVector& y) {
        return RealVector{y.at(0) * x / sigma_s2};
    };
    model.stat_jacobian = [x, sigma_s2](const RealVector&) {
        RealMatrix j(1, 1);
        j(0, 0) = x / sigma_s2;
        return j;
    };
    model.log_partition = [x, sigma_s2](const RealVector& h) {
        return h.at(0) * h.at(0) * x * x / (2.0 * sigma_s2);
    };
    model.log_lik = [x, sigma_s2](const RealVector& y, const RealVector& h) {
        return log_normal_pdf(y.at(0), h.at(0) * x, sigma_s2);
    };
    model.log_marginal = [spec, x](const RealVector& y) {
        return log_marginal_scalar(spec, y.at(0), x);
    };
    return model;
}

}  // namespace chanest
