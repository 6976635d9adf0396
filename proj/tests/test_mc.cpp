#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "chanest/mc.hpp"

using namespace chanest;

TEST_CASE("stream update on tiny sequences") {
    EstimateCI acc;
    for (double s : {1.0, 1.0, 1.0}) acc.update(s);
    CHECK(acc.mean == 1.0);
    CHECK(acc.m2 == 0.0);
    CHECK(acc.count == 3);

    EstimateCI two;
    two.update(0.0);
    two.update(2.0);
    CHECK(two.mean == 1.0);
    CHECK(two.m2 == 2.0);
    CHECK(two.variance() == 2.0);
}

TEST_CASE("stream update rejects non-finite samples") {
    EstimateCI acc;
    CHECK_THROWS_AS(acc.update(std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
    CHECK_THROWS_AS(acc.update(std::nan("")), std::invalid_argument);
}

TEST_CASE("uniform moments at 1e4 samples") {
    RngEngine rng = derive_stream(7, 0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    EstimateCI acc;
    for (int i = 0; i < 10000; ++i) acc.update(unif(rng));
    CHECK(std::abs(acc.mean - 0.5) < 0.01);
    CHECK(std::abs(acc.variance() - 1.0 / 12.0) < 0.1 / 12.0);
}

TEST_CASE("merge with a singleton equals a direct update") {
    EstimateCI acc;
    acc.update(2.0);
    acc.update(5.0);
    EstimateCI single;
    single.update(-1.0);
    EstimateCI merged = merge(acc, single);

    EstimateCI direct;
    for (double s : {2.0, 5.0, -1.0}) direct.update(s);
    CHECK(merged.count == direct.count);
    CHECK(merged.mean == doctest::Approx(direct.mean).epsilon(1e-15));
    CHECK(merged.m2 == doctest::Approx(direct.m2).epsilon(1e-15));
}

TEST_CASE("merge commutes and associates") {
    RngEngine rng = derive_stream(8, 0);
    std::normal_distribution<double> normal(0.0, 1.0);
    EstimateCI a, b, c;
    for (int i = 0; i < 300; ++i) a.update(normal(rng));
    for (int i = 0; i < 77; ++i) b.update(normal(rng) + 3.0);
    for (int i = 0; i < 1; ++i) c.update(normal(rng) - 2.0);

    const EstimateCI ab = merge(a, b), ba = merge(b, a);
    CHECK(std::abs(ab.mean - ba.mean) < 1e-15);
    CHECK(std::abs(ab.variance() - ba.variance()) < 1e-15 * ab.variance());

    const EstimateCI left = merge(merge(a, b), c), right = merge(a, merge(b, c));
    CHECK(std::abs(left.mean - right.mean) < 1e-12);
    CHECK(std::abs(left.variance() - right.variance()) < 1e-12);
}

TEST_CASE("chunked accumulation matches a sequential pass") {
    RngEngine rng = derive_stream(9, 0);
    std::normal_distribution<double> normal(1.0, 2.0);
    std::vector<double> samples(100000);
    for (double& s : samples) s = normal(rng);

    EstimateCI seq;
    for (double s : samples) seq.update(s);

    EstimateCI chunked;
    const std::size_t chunk = 1237;
    for (std::size_t begin = 0; begin < samples.size(); begin += chunk) {
        EstimateCI part;
        for (std::size_t i = begin; i < std::min(begin + chunk, samples.size()); ++i)
            part.update(samples[i]);
        chunked.merge(part);
    }
    CHECK(std::abs(chunked.mean - seq.mean) < 1e-10 * std::abs(seq.mean));
    CHECK(std::abs(chunked.variance() - seq.variance()) < 1e-10 * seq.variance());
}

TEST_CASE("derived streams are reproducible") {
    RngEngine a = derive_stream(123456, 42);
    RngEngine b = derive_stream(123456, 42);
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
}

TEST_CASE("sibling streams are decorrelated") {
    RngEngine a = derive_stream(5150, 0);
    RngEngine b = derive_stream(5150, 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int n = 10000;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double x = normal(a), y = normal(b);
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    const double corr = (sxy - sx * sy / n) /
                        std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
    CHECK(std::abs(corr) < 0.05);
}

TEST_CASE("standard-normal draws pass a chi-square goodness of fit") {
    // 20 equiprobable bins; critical value of chi2(19) at p = 0.001.
    const int bins = 20, n = 100000;
    std::vector<double> edges(bins - 1);
    for (int k = 1; k < bins; ++k) {
        const double target = static_cast<double>(k) / bins;
        double lo = -10, hi = 10;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (0.5 * (1.0 + std::erf(mid / std::sqrt(2.0))) < target ? lo : hi) = mid;
        }
        edges[k - 1] = 0.5 * (lo + hi);
    }
    RngEngine rng = derive_stream(31337, 3);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<int> counts(bins, 0);
    for (int i = 0; i < n; ++i) {
        const double z = normal(rng);
        const auto it = std::upper_bound(edges.begin(), edges.end(), z);
        ++counts[static_cast<int>(it - edges.begin())];
    }
    const double expected = static_cast<double>(n) / bins;
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 43.82);
}

TEST_CASE("run_chunked is deterministic and independent of worker count") {
    const auto body = [](RngEngine& rng, std::uint64_t n, EstimateCI& acc) {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::uint64_t i = 0; i < n; ++i) acc.update(normal(rng));
    };
    setenv("MMSE_POINCARE_WORKERS", "1", 1);
    const EstimateCI serial = run_chunked(50000, 4096, 99, body);
    setenv("MMSE_POINCARE_WORKERS", "4", 1);
    const EstimateCI parallel = run_chunked(50000, 4096, 99, body);
    unsetenv("MMSE_POINCARE_WORKERS");
    CHECK(serial.count == parallel.count);
    CHECK(serial.mean == parallel.mean);  // bitwise: ordered reduction
    CHECK(serial.m2 == parallel.m2);
    CHECK(serial.count == 50000);
}

TEST_CASE("run_sweep derives per-point seeds and reports failing points") {
    const auto row_fn = [](double sigma_s2, std::uint64_t point_seed) {
        SweepRow row;
        row.sigma_s2 = sigma_s2;
        RngEngine rng(point_seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int i = 0; i < 100; ++i) row.lb.update(normal(rng));
        return row;
    };
    const std::vector<double> grid{0.1, 1.0};
    const auto rows1 = run_sweep(grid, 5, row_fn);
    const auto rows2 = run_sweep(grid, 5, row_fn);
    REQUIRE(rows1.size() == 2);
    CHECK(rows1[0].lb.mean == rows2[0].lb.mean);
    CHECK(rows1[1].lb.mean == rows2[1].lb.mean);

    const auto failing = [](double sigma_s2, std::uint64_t) -> SweepRow {
        if (sigma_s2 > 0.5) throw std::runtime_error("boom");
        return {};
    };
    CHECK_THROWS_WITH_AS(run_sweep(grid, 5, failing),
                         doctest::Contains("sigma_s2=1"), std::runtime_error);

    CHECK_THROWS_AS(run_sweep({}, 5, row_fn), std::invalid_argument);
    CHECK_THROWS_AS(run_sweep({-1.0}, 5, row_fn), std::invalid_argument);
}

TEST_CASE("standard error and ci95") {
    EstimateCI acc;
    for (int i = 0; i < 100; ++i) acc.update(i % 2 ? 1.0 : -1.0);
    // sample variance of +-1 alternating = 100/99
    CHECK(acc.std_error() == doctest::Approx(std::sqrt((100.0 / 99.0) / 100.0)));
    CHECK(acc.ci95() == doctest::Approx(1.96 * acc.std_error()));
}
