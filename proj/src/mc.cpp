#include "chanest/mc.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace chanest {

void EstimateCI::update(double sample) {
    if (!std::isfinite(sample)) throw std::invalid_argument("EstimateCI: non-finite sample");
    ++count;
    const double delta = sample - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (sample - mean);
}

void EstimateCI::merge(const EstimateCI& other) {
    if (other.count == 0) return;
    if (count == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(count), nb = static_cast<double>(other.count);
    const double delta = other.mean - mean;
    const double n = na + nb;
    mean += delta * nb / n;
    m2 += other.m2 + delta * delta * na * nb / n;
    count += other.count;
}

double EstimateCI::std_error() const {
    if (count < 2) return 0.0;
    const double n = static_cast<double>(count);
    return std::sqrt(m2 / ((n - 1.0) * n));
}

EstimateCI merge(const EstimateCI& a, const EstimateCI& b) {
    EstimateCI out = a;
    out.merge(b);
    return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream_id) {
    // SplitMix64 finalizer over the pair.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream_id + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

RngEngine derive_stream(std::uint64_t seed, std::uint64_t stream_id) {
    return RngEngine(mix_seed(seed, stream_id));
}

std::size_t worker_count() {
    if (const char* env = std::getenv("MMSE_POINCARE_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

EstimateCI run_chunked(std::uint64_t trials, std::uint64_t chunk_size, std::uint64_t seed,
                       const std::function<void(RngEngine&, std::uint64_t, EstimateCI&)>& body) {
    if (trials == 0) throw std::invalid_argument("run_chunked: trials must be >= 1");
    if (chunk_size == 0) throw std::invalid_argument("run_chunked: chunk_size must be >= 1");

    const std::uint64_t n_chunks = (trials + chunk_size - 1) / chunk_size;
    std::vector<EstimateCI> partial(n_chunks);

    auto run_chunk = [&](std::uint64_t idx) {
        RngEngine rng = derive_stream(seed, idx);
        const std::uint64_t begin = idx * chunk_size;
        const std::uint64_t n = std::min(chunk_size, trials - begin);
        body(rng, n, partial[idx]);
    };

    const std::size_t workers =
        std::min<std::size_t>(worker_count(), static_cast<std::size_t>(n_chunks));
    if (workers <= 1) {
        for (std::uint64_t i = 0; i < n_chunks; ++i) run_chunk(i);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::uint64_t i = next.fetch_add(1); i < n_chunks; i = next.fetch_add(1))
                    run_chunk(i);
            });
        }
        for (auto& t : pool) t.join();
    }

    // Ordered reduction keeps the result independent of worker count.
    EstimateCI total;
    for (const auto& p : partial) total.merge(p);
    return total;
}

std::vector<SweepRow> run_sweep(
    const std::vector<double>& grid, std::uint64_t seed,
    const std::function<SweepRow(double, std::uint64_t)>& row_fn) {
    if (grid.empty()) throw std::invalid_argument("run_sweep: empty grid");
    for (double g : grid)
        if (!(g > 0.0)) throw std::invalid_argument("run_sweep: grid values must be positive");

    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        try {
            rows.push_back(row_fn(grid[i], mix_seed(seed, 0xA11CE000ULL + i)));
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "sweep aborted at sigma_s2=" << grid[i] << ": " << e.what();
            throw std::runtime_error(msg.str());
        }
    }
    return rows;
}

}  // namespace chanest
