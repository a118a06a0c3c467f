#pragma once

// Monte-Carlo sweeps over generated instances, with CSV / JSON-lines output.

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "iqp/attacks.hpp"
#include "iqp/scheme.hpp"
#include "iqp/stats.hpp"

namespace iqp {

/// Worker count: IQP_THREADS if set and positive, else the hardware concurrency.
std::size_t worker_count();

/// Runs fn(i) for i in [0, count) on the worker pool; results keep index order.
template <typename T>
std::vector<T> parallel_map(std::size_t count, const std::function<T(std::size_t)>& fn) {
    std::vector<T> out(count);
    const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(count, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count && !failed;) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

struct ExperimentRecord {
    std::string family;
    std::string attack;
    std::size_t n = 0, m = 0, g = 0, q = 0;
    std::size_t m1 = 0, m2 = 0, d = 0;
    long w = 0;
    std::string config;
    bool success = false;  // recovered the planted secret
    bool found = false;    // reported some valid secret
    std::size_t iterations = 0;
    std::size_t candidates = 0;
    std::vector<std::size_t> kernel_dims;
    std::uint64_t master_seed = 0;
    std::uint64_t instance_seed = 0;
    double wall_seconds = 0.0;
};

/// Instances at (n, m, g) with sampled (m1, d), each attacked by the radical attack.
std::vector<ExperimentRecord> run_sigmoid_experiment(std::size_t n, std::size_t m, std::size_t g, std::size_t trials,
                                                     std::uint64_t seed,
                                                     RedundancyMode mode = RedundancyMode::Randomized);

/// Same, but with m1 forced so that each listed w gets per_w instances; d is
/// drawn from its binomial conditioned on d >= w.
std::vector<ExperimentRecord> run_stratified_sigmoid(std::size_t n, std::size_t m, std::size_t g,
                                                     const std::vector<long>& w_values, std::size_t per_w,
                                                     std::uint64_t seed);

struct WBin {
    long w = 0;
    std::size_t trials = 0;
    std::size_t successes = 0;
    double theory = 0.0;
    CountInterval region;
    bool consistent = false;
};

std::vector<WBin> summarize_by_w(const std::vector<ExperimentRecord>& records, std::size_t n, std::size_t m,
                                 std::size_t g, double alpha = 0.05);

/// Width where the empirical success rate first crosses one half, linearly
/// interpolated between bins; nullopt if it never does.
std::optional<double> empirical_half_width(const std::vector<WBin>& bins);

/// Attack names: radical, radical-de, lazy, double-meyer, razor.
AttackReport run_named_attack(const std::string& name, const BitMatrix& h, const AttackConfig& cfg);

std::vector<ExperimentRecord> run_qrc_sweep(std::size_t q, const std::vector<std::size_t>& n_grid,
                                            const std::vector<std::string>& attacks, std::size_t per_point,
                                            std::uint64_t seed, const AttackConfig& cfg);

struct SweepPoint {
    std::size_t n = 0;
    std::string attack;
    std::size_t trials = 0;
    std::size_t successes = 0;
    std::size_t union_successes = 0;  // instances solved by any attack at this n
};

std::vector<SweepPoint> summarize_sweep(const std::vector<ExperimentRecord>& records);

struct KernelRecord {
    std::size_t n = 0;
    std::size_t instance = 0;
    std::size_t probe = 0;
    std::size_t k = 1;
    std::size_t dim_ker_gram = 0;  // stacked over k probes
    std::size_t dim_ker_hd = 0;    // only for k = 1
};

std::vector<KernelRecord> run_kernel_stats(std::size_t q, const std::vector<std::size_t>& n_grid,
                                           const std::vector<std::size_t>& k_values, std::size_t instances,
                                           std::size_t probes, std::uint64_t seed);

struct KernelSummary {
    std::size_t n = 0;
    std::size_t k = 1;
    std::size_t samples = 0;
    double mean_ker_gram = 0.0;
    double mean_ker_hd = 0.0;
    double prediction = 0.0;  // 2^(1-k) (n - m/2)
};

std::vector<KernelSummary> summarize_kernel_stats(const std::vector<KernelRecord>& records, std::size_t q);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

std::string records_csv(const std::vector<ExperimentRecord>& records);
std::string records_jsonl(const std::vector<ExperimentRecord>& records);
std::string bins_csv(const std::vector<WBin>& bins);
std::string sweep_csv(const std::vector<SweepPoint>& points);
std::string kernel_records_csv(const std::vector<KernelRecord>& records);
std::string kernel_summary_csv(const std::vector<KernelSummary>& summary);

nlohmann::json to_json(const ExperimentRecord& r);

}  // namespace iqp
