#include "chanest/runner.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "chanest/oracle.hpp"
#include "chanest/sweep_io.hpp"

namespace chanest {

namespace {

// Distinct sub-seed tags so the per-row quantities use independent streams.
enum : std::uint64_t { kTagLb = 1, kTagMmse = 2, kTagOracle = 3 };

}  // namespace

SweepRow compute_row(const ExperimentConfig& cfg, double sigma_s2, std::uint64_t point_seed) {
    SweepRow row;
    row.sigma_s2 = sigma_s2;
    if (cfg.model == "scalar") {
        const ScalarChannelSpec spec = cfg.scalar_spec(sigma_s2);
        const InnerMethod inner = cfg.inner_method == "quadrature" ? InnerMethod::kQuadrature
                                                                   : InnerMethod::kNestedMc;
        if (cfg.wants("lb"))
            row.lb = poincare_lb_scalar(spec, cfg.effective_lb_trials(),
                                        mix_seed(point_seed, kTagLb), inner, cfg.inner_trials);
        if (cfg.wants("mmse_t1"))
            row.mmse_t1 = mmse_scalar_theorem1(spec, cfg.trials, mix_seed(point_seed, kTagMmse));
        if (cfg.wants("mmse_oracle"))
            row.mmse_oracle = scalar_mmse_oracle(spec, cfg.trials, mix_seed(point_seed, kTagOracle));
        if (cfg.wants("lmmse")) row.lmmse = lmmse_scalar(spec);
        if (cfg.wants("asymptote")) row.asymptote_line = asymptote_scalar(spec) * sigma_s2;
    } else {
        const VectorChannelSpec spec = cfg.vector_spec(sigma_s2);
        if (cfg.wants("lb"))
            row.lb = poincare_lb_vector(spec, cfg.effective_lb_trials(), cfg.inner_trials,
                                        mix_seed(point_seed, kTagLb));
        if (cfg.wants("mmse_t1"))
            row.mmse_t1 = mmse_vector_theorem1(spec, cfg.trials, mix_seed(point_seed, kTagMmse));
        if (cfg.wants("mmse_oracle"))
            row.mmse_oracle = vector_mmse_oracle(spec, cfg.trials, mix_seed(point_seed, kTagOracle));
        if (cfg.wants("lmmse")) row.lmmse = lmmse_vector(spec);
        if (cfg.wants("asymptote")) row.asymptote_line = asymptote_vector(spec) * sigma_s2;
    }
    return row;
}

RunResult run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
    cfg.validate();
    RunResult result;
    result.rows = run_sweep(cfg.grid, cfg.seed, [&](double sigma_s2, std::uint64_t point_seed) {
        log << "  sigma_s2 = " << sigma_s2 << "\n" << std::flush;
        return compute_row(cfg, sigma_s2, point_seed);
    });
    if (!cfg.csv_path.empty()) {
        write_file(cfg.csv_path, sweep_csv(cfg, result.rows));
        result.csv_path = cfg.csv_path;
    }
    if (!cfg.svg_path.empty()) {
        write_file(cfg.svg_path, sweep_svg(result.rows, cfg.quantities));
        result.svg_path = cfg.svg_path;
    }
    return result;
}

namespace {

struct CheckReporter {
    std::ostream& out;
    int failures = 0;

    void expect(const std::string& name, bool ok, double value, double limit) {
        out << (ok ? "[ok]   " : "[FAIL] ") << name << " (value " << value << ", limit "
            << limit << ")\n";
        if (!ok) ++failures;
    }
    void expect_below(const std::string& name, double value, double limit) {
        expect(name, std::isfinite(value) && value < limit, value, limit);
    }
};

}  // namespace

int run_check(std::ostream& out) {
    CheckReporter rep{out};
    RngEngine rng = derive_stream(20240901, 0);
    std::normal_distribution<double> normal(0.0, 1.0);

    // Scalar channel: gradient vs finite differences, identity residuals.
    {
        const ScalarChannelSpec spec = ScalarChannelSpec::deterministic(0.4, 1.0, 1.0, 1.0);
        const double x = 1.0;
        double worst_fd = 0.0, worst_gen = 0.0, worst_id = 0.0, worst_tre = 0.0;
        const ExpFamilyModel model = make_scalar_expfam(spec, x);
        for (int i = 0; i < 50; ++i) {
            const double h = spec.draw_gain(rng);
            const double y = h * x + normal(rng);
            const double grad = grad_info_density_scalar(spec, h, y, x);
            const auto idens = [&](const RealVector& yy) {
                return info_density_scalar(spec, h, yy[0], x);
            };
            const double fd = fd_gradient(idens, {y})[0];
            worst_fd = std::max(worst_fd,
                                std::abs(grad - fd) / std::max(1.0, std::abs(fd)));
            worst_gen = std::max(worst_gen, std::abs(info_density_scalar(spec, h, y, x) -
                                                     info_density(model, {h}, {y})));
            const double pm = posterior_mean_scalar(spec, y, x);
            worst_id = std::max(worst_id, std::abs((h - pm) - spec.sigma_s2 / x * grad));
            worst_tre = std::max(worst_tre, tre_residual(model, {y}, {pm}));
        }
        rep.expect_below("scalar gradient vs finite differences (rel)", worst_fd, 1e-6);
        rep.expect_below("scalar closed form vs generic info density", worst_gen, 1e-12);
        rep.expect_below("scalar posterior-mean/gradient identity", worst_id, 1e-10);
        rep.expect_below("scalar TRE residual", worst_tre, 1e-5);
    }

    // Vector channel at M = N = T = 2.
    {
        const VectorChannelSpec spec = VectorChannelSpec::identity_pilot(0.4, 1.0, 1.0, 2, 2, 2);
        const VectorDensityCache cache(spec, spec.pilot.front().value);
        const RealMatrix lift = cache.c_x_pinv();
        double worst_id = 0.0;
        for (int i = 0; i < 30; ++i) {
            const RealVector h = spec.draw_gain(rng);
            RealVector y = matvec(cache.c_x(), h);
            const RealVector z = spec.draw_noise(rng);
            for (std::size_t k = 0; k < y.size(); ++k) y[k] += z[k];
            const RealVector grad = grad_info_density_vector(cache, h, y);
            RealVector lifted = matvec(lift, grad);
            const RealVector mean = posterior_mean_vector(cache, y);
            for (std::size_t k = 0; k < h.size(); ++k) {
                const double residual = (h[k] - mean[k]) - 0.5 * spec.sigma_s2 * lifted[k];
                worst_id = std::max(worst_id, std::abs(residual));
            }
        }
        rep.expect_below("vector posterior-mean/gradient identity", worst_id, 1e-8);

        const auto [kappa, rho] = kappa_rho_vector(cache);
        rep.expect_below("vector kappa deviation", std::abs(kappa - 2.0 / spec.sigma_s2), 1e-12);
        rep.expect_below("vector rho deviation",
                         std::abs(rho - 0.5 * spec.sigma_s2 /
                                            singular_values(cache.c_x()).front()),
                         1e-12);
    }

    // Density normalization by quadrature at the scalar reference point.
    {
        const ScalarChannelSpec spec = ScalarChannelSpec::deterministic(0.4, 1.0, 1.0, 1.0);
        const QuadratureRule rule = gauss_hermite(200);
        const double v = spec.sigma_h2 + spec.sigma_s2;
        double mass = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double y = std::sqrt(2.0 * v) * rule.nodes[k];
            mass += rule.weights[k] * std::exp(log_marginal_scalar(spec, y, 1.0) +
                                               rule.nodes[k] * rule.nodes[k]) *
                    std::sqrt(2.0 * v);
        }
        rep.expect_below("scalar marginal normalization error", std::abs(mass - 1.0), 1e-8);

        double sum_w = 0.0;
        for (double w : rule.weights) sum_w += w;
        rep.expect_below("Gauss-Hermite weight sum error",
                         std::abs(sum_w - std::sqrt(std::numbers::pi)), 1e-12);
    }

    // Streaming-moment merge and stream determinism.
    {
        EstimateCI a, b, c;
        RngEngine r2 = derive_stream(7, 1);
        for (int i = 0; i < 1000; ++i) {
            const double s = normal(r2);
            if (i % 3 == 0) a.update(s);
            else if (i % 3 == 1) b.update(s);
            else c.update(s);
        }
        const EstimateCI left = merge(merge(a, b), c);
        const EstimateCI right = merge(a, merge(b, c));
        rep.expect_below("merge associativity (mean)", std::abs(left.mean - right.mean), 1e-12);
        rep.expect_below("merge associativity (variance)",
                         std::abs(left.variance() - right.variance()), 1e-12);

        RngEngine s1 = derive_stream(99, 7), s2 = derive_stream(99, 7);
        bool same = true;
        for (int i = 0; i < 100; ++i) same = same && (s1() == s2());
        rep.expect("stream determinism", same, same ? 0.0 : 1.0, 0.5);
    }

    out << (rep.failures == 0 ? "all checks passed\n" : "checks FAILED\n");
    return rep.failures;
}

}  // namespace chanest
