#pragma once

// Monte-Carlo infrastructure: Welford streaming moments with an associative
// parallel merge, deterministic per-chunk random streams, and a chunked
// runner whose result depends only on (seed, chunk decomposition) -- never
// on scheduling order or worker count.

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace chanest {

struct EstimateCI {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;  // sum of squared deviations from the running mean

    void update(double sample);
    void merge(const EstimateCI& other);

    double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
    double std_error() const;
    double ci95() const { return 1.96 * std_error(); }
};

EstimateCI merge(const EstimateCI& a, const EstimateCI& b);

using RngEngine = std::mt19937_64;

// SplitMix64-style mixing; used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream_id);

// Reproducible sub-stream: same (seed, stream_id) yields the identical
// draw sequence regardless of thread schedule.
RngEngine derive_stream(std::uint64_t seed, std::uint64_t stream_id);

// Worker count: MMSE_POINCARE_WORKERS overrides hardware_concurrency().
std::size_t worker_count();

// Partition `trials` into fixed-size chunks, evaluate chunks on a small
// thread pool, and merge partial moments in chunk order. `body` must add
// exactly `n` samples to the accumulator from the provided stream.
EstimateCI run_chunked(std::uint64_t trials, std::uint64_t chunk_size, std::uint64_t seed,
                       const std::function<void(RngEngine&, std::uint64_t n, EstimateCI&)>& body);

struct SweepRow {
    double sigma_s2 = 0.0;
    EstimateCI lb;
    EstimateCI mmse_t1;
    EstimateCI mmse_oracle;
    double lmmse = 0.0;
    double asymptote_line = 0.0;  // slope * sigma_s2
};

// One row per grid point; each point gets a seed derived from its index so
// rows are independent of evaluation order. Errors are rethrown with the
// offending sigma_s2 identified.
std::vector<SweepRow> run_sweep(
    const std::vector<double>& grid, std::uint64_t seed,
    const std::function<SweepRow(double sigma_s2, std::uint64_t point_seed)>& row_fn);

}  // namespace chanest
