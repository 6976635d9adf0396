#include "chanest/oracle.hpp"

#include <cmath>
#include <numbers>

namespace chanest {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

}  // namespace

double scalar_inner_variance(const ScalarChannelSpec& spec, double h, double x,
                             const QuadratureRule& rule) {
    RealVector weights = rule.weights;
    const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
    for (double& w : weights) w *= inv_sqrt_pi;
    return scalar_inner_variance_nodes(spec, h, x, rule.nodes, weights);
}

double scalar_lb_quadrature(const ScalarChannelSpec& spec, const QuadratureRule& inner,
                            const QuadratureRule& outer) {
    spec.validate_nonzero_pilot();
    RealVector inner_w = inner.weights;
    const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
    for (double& w : inner_w) w *= inv_sqrt_pi;
    const double gain_scale = std::sqrt(2.0 * spec.sigma_h2);

    double lb = 0.0;
    for (const PilotAtom& atom : spec.pilot) {
        const double x = atom.value;
        double blocked = scalar_inner_variance_nodes(spec, 0.0, x, inner.nodes, inner_w);
        double active = 0.0;
        for (std::size_t k = 0; k < outer.nodes.size(); ++k) {
            const double h = gain_scale * outer.nodes[k];
            active += outer.weights[k] *
                      scalar_inner_variance_nodes(spec, h, x, inner.nodes, inner_w);
        }
        active *= inv_sqrt_pi;
        lb += atom.prob * spec.sigma_s2 / (x * x) *
              ((1.0 - spec.alpha) * blocked + spec.alpha * active);
    }
    return lb;
}

double scalar_lb_reference(const ScalarChannelSpec& spec, const QuadratureRule& inner) {
    spec.validate_nonzero_pilot();
    RealVector inner_w = inner.weights;
    const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
    for (double& w : inner_w) w *= inv_sqrt_pi;
    const double sigma_h = std::sqrt(spec.sigma_h2);
    const double sigma_s = std::sqrt(spec.sigma_s2);

    double lb = 0.0;
    for (const PilotAtom& atom : spec.pilot) {
        const double x = atom.value;
        const auto integrand = [&](double h) {
            const double pdf = std::exp(-0.5 * h * h / spec.sigma_h2) /
                               (sigma_h * std::sqrt(2.0 * std::numbers::pi));
            return pdf * scalar_inner_variance_nodes(spec, h, x, inner.nodes, inner_w);
        };
        // Var[i | h] is even in h: integrate 2 * [0, 10 sigma_h] over segments
        // that refine down to sigma_s / |x| around the origin.
        std::vector<double> edges{0.0};
        double edge = 0.25 * sigma_s / std::abs(x);
        const double top = 10.0 * sigma_h;
        while (edge < top) {
            edges.push_back(edge);
            edge *= 2.0;
        }
        edges.push_back(top);

        double active = 0.0;
        for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
            const double a = edges[s], b = edges[s + 1];
            const int panels = 64;  // composite Simpson per segment
            const double step = (b - a) / panels;
            double acc = integrand(a) + integrand(b);
            for (int k = 1; k < panels; ++k)
                acc += integrand(a + k * step) * (k % 2 ? 4.0 : 2.0);
            active += acc * step / 3.0;
        }
        const double blocked = scalar_inner_variance_nodes(spec, 0.0, x, inner.nodes, inner_w);
        lb += atom.prob * spec.sigma_s2 / (x * x) *
              ((1.0 - spec.alpha) * blocked + spec.alpha * 2.0 * active);
    }
    return lb;
}

EstimateCI scalar_mmse_oracle(const ScalarChannelSpec& spec, std::uint64_t trials,
                              std::uint64_t seed) {
    spec.validate();
    if (trials == 0) throw std::invalid_argument("scalar_mmse_oracle: trials must be >= 1");
    const double sigma_s = std::sqrt(spec.sigma_s2);
    const auto body = [&](RngEngine& rng, std::uint64_t n, EstimateCI& acc) {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::uint64_t i = 0; i < n; ++i) {
            const double x = spec.draw_pilot(rng);
            const double h = spec.draw_gain(rng);
            const double y = h * x + sigma_s * normal(rng);
            const double err = h - posterior_mean_scalar(spec, y, x);
            acc.update(err * err);
        }
    };
    return run_chunked(trials, 1 << 16, seed, body);
}

VectorRatioOracle::VectorRatioOracle(const VectorChannelSpec& spec,
                                     const ComplexMatrix& pilot) {
    alpha_ = spec.alpha;
    sigma_s2_ = spec.sigma_s2;
    obs_dim_ = 2 * spec.n * spec.t;
    c_x_ = build_sensing_matrix(pilot, spec.n);

    RealMatrix sigma = matmul(c_x_, transpose(c_x_));
    for (double& v : sigma.data()) v *= 0.5 * spec.sigma_h2;
    for (std::size_t i = 0; i < obs_dim_; ++i) sigma(i, i) += 0.5 * spec.sigma_s2;

    sigma_inv_ = pinv(sigma);
    log_det_sigma_ = 0.0;
    for (double ev : symmetric_eigenvalues(sigma)) log_det_sigma_ += std::log(ev);

    gain_ = matmul(transpose(c_x_), sigma_inv_);
    for (double& v : gain_.data()) v *= 0.5 * spec.sigma_h2;
}

double VectorRatioOracle::error_term(const RealVector& h, const RealVector& y) const {
    const double kd = static_cast<double>(obs_dim_);
    const double l0 = -0.5 * (norm2_sq(y) / (0.5 * sigma_s2_) +
                              kd * (std::log(0.5 * sigma_s2_) + kLog2Pi));
    const double l1 =
        -0.5 * (dot(y, matvec(sigma_inv_, y)) + log_det_sigma_ + kd * kLog2Pi);
    const double a0 = (alpha_ < 1.0 ? std::log1p(-alpha_)
                                    : -std::numeric_limits<double>::infinity()) +
                      l0;
    const double a1 = std::log(alpha_) + l1;
    const double top = std::max(a0, a1);
    const double c0 = std::isfinite(a0) ? std::exp(a0 - top) : 0.0;
    const double c1 = std::exp(a1 - top);

    const RealVector g = matvec(gain_, y);
    double err = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double num = c0 * h[i] + c1 * (h[i] - g[i]);
        const double v = num / (c0 + c1);
        err += v * v;
    }
    return err;
}

EstimateCI vector_mmse_oracle(const VectorChannelSpec& spec, std::uint64_t trials,
                              std::uint64_t seed) {
    spec.validate();
    if (trials == 0) throw std::invalid_argument("vector_mmse_oracle: trials must be >= 1");
    std::vector<VectorRatioOracle> oracles;
    oracles.reserve(spec.pilot.size());
    std::vector<RealMatrix> sensing;
    for (const VectorPilotAtom& atom : spec.pilot) {
        oracles.emplace_back(spec, atom.value);
        sensing.push_back(build_sensing_matrix(atom.value, spec.n));
    }

    const auto body = [&](RngEngine& rng, std::uint64_t n, EstimateCI& acc) {
        for (std::uint64_t i = 0; i < n; ++i) {
            const std::size_t idx = spec.draw_pilot_index(rng);
            const RealVector h = spec.draw_gain(rng);
            RealVector y = matvec(sensing[idx], h);
            const RealVector z = spec.draw_noise(rng);
            for (std::size_t k = 0; k < y.size(); ++k) y[k] += z[k];
            acc.update(oracles[idx].error_term(h, y));
        }
    };
    return run_chunked(trials, 1 << 12, seed, body);
}

}  // namespace chanest
