#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chanest/oracle.hpp"
#include "chanest/scalar_channel.hpp"
#include "chanest/vector_channel.hpp"

using namespace chanest;

namespace {

VectorChannelSpec small_spec(double sigma_s2 = 1.0, double alpha = 0.4) {
    return VectorChannelSpec::identity_pilot(alpha, 1.0, sigma_s2, 2, 2, 2);
}

ComplexMatrix cmatmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            std::complex<double> acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
            out(i, j) = acc;
        }
    return out;
}

ComplexMatrix random_complex(std::size_t r, std::size_t c, RngEngine& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = {normal(rng), normal(rng)};
    return m;
}

}  // namespace

TEST_CASE("spec validation: shapes, rank, power") {
    CHECK_THROWS_WITH_AS(VectorChannelSpec::identity_pilot(0.4, 1.0, 1.0, 3, 2, 2),
                         doctest::Contains("T == M"), std::invalid_argument);

    VectorChannelSpec spec = small_spec();
    spec.t = 1;  // T < M
    spec.pilot = {{ComplexMatrix(2, 1), 1.0}};
    CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("T >= M"), std::invalid_argument);

    // Repeated columns give a rank-deficient sensing matrix.
    spec = small_spec();
    ComplexMatrix bad(2, 2);
    bad(0, 0) = bad(0, 1) = 1.0;
    bad(1, 0) = bad(1, 1) = {0.0, 2.0};
    spec.pilot = {{bad, 1.0}};
    CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("rank"), std::invalid_argument);

    spec = small_spec();
    spec.power_budget = 0.5;  // identity pilot has tr(R_X) = M / T = 1 > M * 0.5
    CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("power_budget"),
                         std::invalid_argument);
    spec.power_budget = 1.0;
    CHECK_NOTHROW(spec.validate());

    spec = small_spec();
    spec.alpha = 1.5;
    CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("alpha"), std::invalid_argument);
}

TEST_CASE("density cache invariants") {
    const VectorChannelSpec spec = small_spec();
    const VectorDensityCache cache(spec, spec.pilot.front().value);
    CHECK(cache.obs_dim() == 8);
    CHECK(cache.param_dim() == 8);
    // Sigma = (sigma_h2/2 + sigma_s2/2) I for the identity pilot.
    for (std::size_t i = 0; i < 8; ++i) CHECK(cache.sigma_yx()(i, i) == doctest::Approx(1.0));
    CHECK(cache.log_det_sigma_yx() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cache.rho() == doctest::Approx(0.5 * spec.sigma_s2));
}

TEST_CASE("log marginal at the origin and against a scalar-built mixture") {
    const VectorChannelSpec spec = small_spec();
    const VectorDensityCache cache(spec, spec.pilot.front().value);
    const std::size_t k = cache.obs_dim();

    // y = 0: pure normalizer mixture.
    const RealVector zero(k, 0.0);
    const double l_blocked = -0.5 * static_cast<double>(k) *
                             std::log(2.0 * M_PI * 0.5 * spec.sigma_s2);
    const double l_active = -0.5 * (cache.log_det_sigma_yx() +
                                    static_cast<double>(k) * std::log(2.0 * M_PI));
    const double expected =
        std::log((1.0 - spec.alpha) * std::exp(l_blocked) + spec.alpha * std::exp(l_active));
    CHECK(log_marginal_vector(cache, zero) == doctest::Approx(expected).epsilon(1e-12));

    // Identity pilot: both mixture components factor across coordinates, so
    // the vector marginal is a log-sum-exp of per-coordinate Gaussian sums.
    RngEngine rng = derive_stream(71, 0);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        RealVector y(k);
        for (double& v : y) v = normal(rng);
        double blocked = 0.0, active = 0.0;
        for (double yi : y) {
            blocked += -0.5 * (yi * yi / (0.5 * spec.sigma_s2) +
                               std::log(2.0 * M_PI * 0.5 * spec.sigma_s2));
            const double var = 0.5 * spec.sigma_h2 + 0.5 * spec.sigma_s2;
            active += -0.5 * (yi * yi / var + std::log(2.0 * M_PI * var));
        }
        const double direct =
            std::log((1.0 - spec.alpha) * std::exp(blocked) + spec.alpha * std::exp(active));
        CHECK(log_marginal_vector(cache, y) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("info density: Gaussian case splits into independent scalar copies") {
    // alpha = 1, N = M = T = 1, real pilot: the realified model is two
    // independent scalar Gaussian channels with halved variances.
    VectorChannelSpec spec = VectorChannelSpec::identity_pilot(1.0, 1.0, 1.0, 1, 1, 1);
    const VectorDensityCache cache(spec, spec.pilot.front().value);
    const ScalarChannelSpec half = ScalarChannelSpec::deterministic(1.0, 0.5, 0.5, 1.0);
    RngEngine rng = derive_stream(72, 0);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int rep = 0; rep < 30; ++rep) {
        const RealVector h{normal(rng), normal(rng)};
        const RealVector y{normal(rng), normal(rng)};
        const double split = info_density_scalar(half, h[0], y[0], 1.0) +
                             info_density_scalar(half, h[1], y[1], 1.0);
        CHECK(info_density_vector(cache, h, y) == doctest::Approx(split).epsilon(1e-12));
    }
}

TEST_CASE("info density at h = 0, y = 0") {
    const VectorChannelSpec spec = small_spec();
    const VectorDensityCache cache(spec, spec.pilot.front().value);
    const std::size_t k = cache.obs_dim();
    const RealVector zero(k, 0.0);
    const double log_det_blocked = static_cast<double>(k) * std::log(0.5 * spec.sigma_s2);
    const double expected =
        -std::log((1.0 - spec.alpha) +
                  spec.alpha * std::exp(0.5 * log_det_blocked - 0.5 * cache.log_det_sigma_yx()));
    CHECK(info_density_vector(cache, zero, zero) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("normalization: E[exp(i) | X] = 1 and importance form, by MC") {
    const VectorChannelSpec spec = small_spec();
    const VectorDensityCache cache(spec, spec.pilot.front().value);
    RngEngine rng = derive_stream(73, 0);

    // Fixed h; Y drawn from the marginal (fresh gain + noise).
    const RealVector h_fixed = spec.draw_gain(rng);
    EstimateCI norm1;
    for (int i = 0; i < 100000; ++i) {
        const RealVector h = spec.draw_gain(rng);
        RealVector y = matvec(cache.c_x(), h);
        const RealVector z = spec.draw_noise(rng);
        for (std::size_t j = 0; j < y.size(); ++j) y[j] += z[j];
        norm1.update(std::exp(info_density_vector(cache, h_fixed, y)));
    }
    CHECK(std::abs(norm1.mean - 1.0) < 3.0 * norm1.std_error());

    // Importance-sampling normalization of the marginal against a wider
    // isotropic reference.
    const double ref_var = 1.5 * (0.5 * spec.sigma_h2 + 0.5 * spec.sigma_s2);
    std::normal_distribution<double> ref(0.0, std::sqrt(ref_var));
    EstimateCI norm2;
    const double k = static_cast<double>(cache.obs_dim());
    for (int i = 0; i < 100000; ++i) {
        RealVector y(cache.obs_dim());
        double quad = 0.0;
        for (double& v : y) {
            v = ref(rng);
            quad += v * v;
        }
        const double log_ref = -0.5 * (quad / ref_var + k * std::log(2.0 * M_PI * ref_var));
        norm2.update(std::exp(log_marginal_vector(cache, y) - log_ref));
    }
    CHECK(std::abs(norm2.mean - 1.0) < 3.0 * norm2.std_error());
}

TEST_CASE("kappa and rho") {
    const VectorChannelSpec spec = small_spec(0.8);
    const VectorDensityCache cache(spec, spec.pilot.front().value);
    const auto [kappa, rho] = kappa_rho_vector(cache);
    CHECK(kappa == doctest::Approx(2.0 / 0.8));
    CHECK(rho == doctest::Approx(0.8 / 2.0));
    CHECK(rho * rho * kappa == doctest::Approx(0.5 * 0.8));

    // Pilot 2I scales rho down by 2.
    VectorChannelSpec scaled = small_spec(0.8);
    ComplexMatrix two = ComplexMatrix::identity(2);
    two(0, 0) = two(1, 1) = 2.0;
    scaled.pilot = {{two, 1.0}};
    const VectorDensityCache cache2(scaled, two);
    CHECK(kappa_rho_vector(cache2).second == doctest::Approx(0.8 / 4.0));

    // Random full-rank pilot: rho * sigma_max(C_X) = sigma_s2 / 2.
    RngEngine rng = derive_stream(74, 0);
    VectorChannelSpec rnd = small_spec(0.8);
    rnd.pilot = {{random_complex(2, 2, rng), 1.0}};
    rnd.validate();
    const VectorDensityCache cache3(rnd, rnd.pilot.front().value);
    CHECK(cache3.rho() * singular_values(cache3.c_x()).front() ==
          doctest::Approx(0.8 / 2.0).epsilon(1e-10));
}

TEST_CASE("posterior mean: origin, Wiener filter, gradient identity") {
    const VectorChannelSpec spec = small_spec();
    const VectorDensityCache cache(spec, spec.pilot.front().value);
    const RealVector zero(cache.obs_dim(), 0.0);
    for (double v : posterior_mean_vector(cache, zero)) CHECK(v == 0.0);

    // alpha = 1: plain Wiener gain (sigma_h2/2) / (sigma_h2/2 + sigma_s2/2)
    // for the identity pilot.
    const VectorChannelSpec gauss = small_spec(1.0, 1.0);
    const VectorDensityCache gcache(gauss, gauss.pilot.front().value);
    RngEngine rng = derive_stream(75, 0);
    std::normal_distribution<double> normal(0.0, 1.0);
    RealVector y(gcache.obs_dim());
    for (double& v : y) v = normal(rng);
    const RealVector mean = posterior_mean_vector(gcache, y);
    for (std::size_t i = 0; i < y.size(); ++i)
        CHECK(mean[i] == doctest::Approx(0.5 * y[i]).epsilon(1e-12));

    // Identity: H - E[H|Y] = (sigma_s2/2) C_X^+ grad_y i.
    const RealMatrix lift = cache.c_x_pinv();
    for (int rep = 0; rep < 100; ++rep) {
        const RealVector h = spec.draw_gain(rng);
        RealVector yy = matvec(cache.c_x(), h);
        const RealVector z = spec.draw_noise(rng);
        for (std::size_t i = 0; i < yy.size(); ++i) yy[i] += z[i];
        const RealVector pm = posterior_mean_vector(cache, yy);
        const RealVector lifted = matvec(lift, grad_info_density_vector(cache, h, yy));
        for (std::size_t i = 0; i < h.size(); ++i)
            CHECK(std::abs((h[i] - pm[i]) - 0.5 * spec.sigma_s2 * lifted[i]) < 1e-8);
    }
}

TEST_CASE("complex simulation and realified simulation agree per sample") {
    RngEngine rng = derive_stream(76, 0);
    const std::size_t m = 2, n_rx = 2, t = 3;
    const ComplexMatrix x = random_complex(m, t, rng);
    const RealMatrix c_x = build_sensing_matrix(x, n_rx);
    for (int rep = 0; rep < 20; ++rep) {
        const ComplexMatrix h = random_complex(n_rx, m, rng);
        const ComplexMatrix z = random_complex(n_rx, t, rng);
        ComplexMatrix y = cmatmul(h, x);
        for (std::size_t i = 0; i < n_rx; ++i)
            for (std::size_t j = 0; j < t; ++j) y(i, j) += z(i, j);

        const RealVector lhs = realify_cols(transpose(y));
        RealVector rhs = matvec(c_x, realify_cols(transpose(h)));
        const RealVector zb = realify_cols(transpose(z));
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += zb[i];
        for (std::size_t i = 0; i < rhs.size(); ++i) CHECK(std::abs(lhs[i] - rhs[i]) < 1e-12);

        // Norm preservation: realified error norm equals Frobenius norm.
        double frob = 0.0;
        for (std::size_t i = 0; i < n_rx; ++i)
            for (std::size_t j = 0; j < m; ++j) frob += std::norm(h(i, j));
        CHECK(norm2_sq(realify_cols(transpose(h))) == doctest::Approx(frob).epsilon(1e-12));
    }
}

TEST_CASE("inner variance limits at high SNR") {
    RngEngine rng = derive_stream(77, 0);
    // h from the active component: Var -> NT.
    VectorChannelSpec spec = small_spec(1e-6, 1.0);
    const VectorDensityCache cache(spec, spec.pilot.front().value);
    const RealVector h = spec.draw_gain(rng);
    const double nt = static_cast<double>(spec.n * spec.t);
    const double var = inner_variance_vector(cache, h, 50000, rng);
    CHECK(var == doctest::Approx(nt).epsilon(0.02));

    // h = 0 with a nonzero pilot: Var -> 0.
    VectorChannelSpec blocked = small_spec(1e-6, 0.4);
    const VectorDensityCache bcache(blocked, blocked.pilot.front().value);
    const RealVector zero(bcache.param_dim(), 0.0);
    CHECK(inner_variance_vector(bcache, zero, 20000, rng) < 1e-3);
}

TEST_CASE("MMSE estimators: Gaussian closed form and the ratio form") {
    const VectorChannelSpec gauss = small_spec(1.0, 1.0);
    const EstimateCI mmse = mmse_vector_theorem1(gauss, 100000, 81);
    CHECK(std::abs(mmse.mean - 2.0) < 3.0 * mmse.std_error());  // NM/2
    CHECK(lmmse_vector(gauss) == doctest::Approx(2.0).epsilon(1e-12));

    // Ratio form (independent machinery) equals the posterior-mean error
    // pointwise.
    const VectorChannelSpec spec = small_spec();
    const VectorDensityCache cache(spec, spec.pilot.front().value);
    const VectorRatioOracle oracle(spec, spec.pilot.front().value);
    RngEngine rng = derive_stream(82, 0);
    for (int rep = 0; rep < 100; ++rep) {
        const RealVector h = spec.draw_gain(rng);
        RealVector y = matvec(cache.c_x(), h);
        const RealVector z = spec.draw_noise(rng);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += z[i];
        const RealVector pm = posterior_mean_vector(cache, y);
        double err = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) err += (h[i] - pm[i]) * (h[i] - pm[i]);
        CHECK(std::abs(oracle.error_term(h, y) - err) < 1e-8);
    }
}

TEST_CASE("lmmse: closed forms and saturation") {
    const VectorChannelSpec fig2 = VectorChannelSpec::identity_pilot(0.4, 1.0, 1.0, 4, 4, 4);
    CHECK(lmmse_vector(fig2) == doctest::Approx(16.0 / 3.5).epsilon(1e-12));

    // alpha = 1, huge noise: saturates at the prior energy NM sigma_h2.
    const VectorChannelSpec noisy = small_spec(1e6, 1.0);
    CHECK(lmmse_vector(noisy) == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("lmmse matches an empirical best linear estimator") {
    const VectorChannelSpec spec = small_spec();
    const VectorDensityCache cache(spec, spec.pilot.front().value);
    RngEngine rng = derive_stream(83, 0);
    const std::size_t dim = cache.param_dim(), obs = cache.obs_dim();
    const int n = 200000;
    RealMatrix syy(obs, obs), shy(dim, obs);
    std::vector<RealVector> hs(n), ys(n);
    for (int s = 0; s < n; ++s) {
        hs[s] = spec.draw_gain(rng);
        RealVector y = matvec(cache.c_x(), hs[s]);
        const RealVector z = spec.draw_noise(rng);
        for (std::size_t i = 0; i < obs; ++i) y[i] += z[i];
        ys[s] = y;
        for (std::size_t i = 0; i < obs; ++i)
            for (std::size_t j = 0; j < obs; ++j) syy(i, j) += y[i] * y[j];
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < obs; ++j) shy(i, j) += hs[s][i] * y[j];
    }
    // A = S_hy S_yy^{-1}; empirical MSE of h - A y.
    const RealMatrix syy_inv = cholesky_inverse(cholesky(syy));
    const RealMatrix a = matmul(shy, syy_inv);
    EstimateCI err;
    for (int s = 0; s < n; ++s) {
        const RealVector est = matvec(a, ys[s]);
        double e = 0.0;
        for (std::size_t i = 0; i < dim; ++i) e += (hs[s][i] - est[i]) * (hs[s][i] - est[i]);
        err.update(e);
    }
    CHECK(std::abs(err.mean - lmmse_vector(spec)) < 3.0 * err.std_error());
}

TEST_CASE("asymptote slope") {
    const VectorChannelSpec fig2 = VectorChannelSpec::identity_pilot(0.4, 1.0, 1.0, 4, 4, 4);
    CHECK(asymptote_vector(fig2) == doctest::Approx(0.1).epsilon(1e-12));

    // Scaling the pilot by c scales the slope by 1 / c^2.
    VectorChannelSpec scaled = small_spec();
    ComplexMatrix three = ComplexMatrix::identity(2);
    three(0, 0) = three(1, 1) = 3.0;
    scaled.pilot = {{three, 1.0}};
    CHECK(asymptote_vector(scaled) ==
          doctest::Approx(asymptote_vector(small_spec()) / 9.0).epsilon(1e-12));

    // alpha = 1 with tr E[R] = 2 gives 0.125.
    VectorChannelSpec two_tr = small_spec(1.0, 1.0);
    ComplexMatrix sqrt2 = ComplexMatrix::identity(2);
    sqrt2(0, 0) = sqrt2(1, 1) = std::sqrt(2.0);
    two_tr.pilot = {{sqrt2, 1.0}};
    CHECK(asymptote_vector(two_tr) == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("bound is below the MMSE within combined errors") {
    const VectorChannelSpec spec = small_spec();
    const EstimateCI lb = poincare_lb_vector(spec, 2000, 500, 84);
    const EstimateCI mmse = mmse_vector_theorem1(spec, 100000, 85);
    CHECK(lb.mean <= mmse.mean + 3.0 * (lb.std_error() + mmse.std_error()));
    CHECK(lb.mean > 0.0);
}

TEST_CASE("vector estimators are deterministic in the seed") {
    const VectorChannelSpec spec = small_spec();
    const EstimateCI a = poincare_lb_vector(spec, 500, 200, 86);
    const EstimateCI b = poincare_lb_vector(spec, 500, 200, 86);
    CHECK(a.mean == b.mean);
    CHECK(a.m2 == b.m2);
}
