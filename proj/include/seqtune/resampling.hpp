#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "seqtune/dataset.hpp"
#include "seqtune/learners.hpp"

namespace seqtune {

// One bootstrap draw: train is a multiset of n row indices drawn with
// replacement, test is every row never drawn (out-of-bag).
struct Partition {
    std::vector<int> train;
    std::vector<int> test;
};

enum class ResamplingMode { fixed, fresh };

// fixed: K partitions generated up front and shared by every configuration.
// fresh: partition k for config c is generated on demand from the seed and
// (c, k), so no two evaluations share a draw.
class ResamplingInstance {
public:
    static ResamplingInstance bootstrap(int n, int K, std::uint64_t seed);
    static ResamplingInstance fresh(int n, std::uint64_t seed);

    ResamplingMode mode() const { return mode_; }
    int K() const { return K_; }
    int n() const { return n_; }
    std::uint64_t seed() const { return seed_; }

    const Partition& partition(int k) const;
    Partition fresh_partition(int config_id, int k) const;

private:
    ResamplingMode mode_ = ResamplingMode::fixed;
    int n_ = 0;
    int K_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<Partition> partitions_;
};

enum class LossKind { mmce, mse };

LossKind default_loss(TaskKind task);

double loss(std::span<const double> y_true, std::span<const double> y_pred, LossKind kind);

// Write-once map from (config id, partition index) to loss. Concurrent
// readers are fine; writers take the mutex.
class EvalCache {
public:
    std::optional<double> lookup(int config_id, int k) const;
    void store(int config_id, int k, double value);
    std::size_t size() const {
        std::lock_guard<std::mutex> lock(mu_);
        return map_.size();
    }
    long fits_performed() const { return fits_.load(); }
    void count_fit() { ++fits_; }

    void export_csv(const std::string& path) const;
    void import_csv(const std::string& path);

private:
    static std::uint64_t key(int config_id, int k) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(config_id)) << 32) |
               static_cast<std::uint32_t>(k);
    }
    std::unordered_map<std::uint64_t, double> map_;
    mutable std::mutex mu_;
    std::atomic<long> fits_{0};
};

// Cache-aware loss of one configuration on one partition. A miss fits the
// learner on the partition's train rows, scores the test rows and stores the
// result; a hit never refits.
double evaluate(const Config& cfg, LearnerKind kind, const Dataset& ds,
                const ResamplingInstance& inst, int k, EvalCache& cache);

}  // namespace seqtune
