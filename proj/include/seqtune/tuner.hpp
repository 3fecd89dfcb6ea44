#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqtune/dataset.hpp"
#include "seqtune/learners.hpp"
#include "seqtune/param_space.hpp"
#include "seqtune/resampling.hpp"
#include "seqtune/seqtest.hpp"

namespace seqtune {

struct RsResult {
    std::vector<Config> configs;             // in sampling order, ids 0..n-1
    std::vector<std::vector<double>> table;  // n_configs x K raw losses
    int best_index = 0;
    double best_mean = 0.0;
    long fits = 0;  // always n_configs * K

    const Config& best() const { return configs[static_cast<std::size_t>(best_index)]; }
};

// Evaluates every (config, partition) pair through the cache and returns the
// argmin of the K-partition mean loss; ties go to the lower config id.
RsResult random_search(const ParamSpace& space, LearnerKind kind, const Dataset& ds,
                       const ResamplingInstance& inst, int n_configs, Rng& rng, EvalCache& cache,
                       int jobs = 1);

struct DuelRecord {
    int candidate_id = 0;
    DecisionKind outcome = DecisionKind::continue_test;
    Winner winner = Winner::incumbent;
    int steps = 0;
    int incumbent_after = 0;
};

struct SqrsResult {
    Config incumbent;
    std::vector<DuelRecord> duels;
    long fits = 0;           // distinct (config, partition) pairs touched
    double eval_ratio = 0.0; // fits / reference budget
};

struct SqrsOptions {
    SlrtConfig slrt;
    double shift = 0.0;         // additive constant c applied to every loss
    bool log_transform = true;  // duel on log(loss + c) instead of loss + c
    long reference_budget = 0;  // defaults to n_candidates * n_max
    double time_budget_sec = 0; // 0 = unlimited; checked between duels
};

// The first candidate seeds the incumbent; every later candidate duels it
// through the sequential test, one partition per step. Evaluations go through
// the cache, so losses known from an earlier run (or an earlier duel) are
// reused and counted once.
SqrsResult sqrs(std::span<const Config> candidates, LearnerKind kind, const Dataset& ds,
                const ResamplingInstance& inst, const SqrsOptions& opts, EvalCache& cache);

void write_duel_log_csv(const SqrsResult& res, const std::string& path);

// Test-parameter presets, from the liberal A to the conservative D.
struct SlrtSetting {
    const char* label;
    double gamma0, gamma1;
    double alpha_beta;
};

inline constexpr std::array<SlrtSetting, 4> kSettingPresets = {{
    {"A", -0.02, 0.02, 0.05},
    {"B", -0.02, 0.02, 0.01},
    {"C", -0.01, 0.01, 0.05},
    {"D", -0.01, 0.01, 0.01},
}};

const SlrtSetting& setting_by_label(const std::string& label);

// c = 0.5 for classification (errors can be 0), c = 0 for regression.
double default_shift(TaskKind task);

// Duel streams: shifted raw errors for classification (MMCE differences are
// already on the gammas' scale), log losses for regression (the gammas then
// read as relative differences, independent of the target's scale).
bool default_log_transform(TaskKind task);

struct PairedReport {
    std::string setting;
    TaskKind task = TaskKind::regression;
    int replication = 0;
    bool identical = false;
    double perf_ratio = 1.0;
    double eval_ratio = 1.0;
};

struct PairedAggregate {
    std::string setting;
    int replications = 0;
    double prop_identical = 0.0;
    double median_eval_ratio = 0.0;
    // distribution of performance ratios with the exact-1 mass removed
    int n_worse = 0;
    double median_perf_ratio_worse = 1.0;
};

struct PairedOptions {
    int K = 10;
    int n_configs = 50;
    std::vector<std::string> settings = {"A", "B", "C", "D"};
    std::optional<double> shift;         // default: by task kind
    std::optional<bool> log_transform;   // default: by task kind
    int replications = 100;
    std::uint64_t seed = 1;
    int jobs = 1;
};

// Per replication: one fixed instance, one batch of configs; random search
// fills the table, then each setting replays the shuffled batch through sqrs
// on the same cache. Reports come back grouped by setting, replications
// ascending.
std::vector<PairedReport> paired_compare(const ParamSpace& space, LearnerKind kind,
                                         const Dataset& ds, const PairedOptions& opts);

std::vector<PairedAggregate> aggregate_reports(std::span<const PairedReport> reports,
                                               std::span<const std::string> setting_order);

void write_reports_csv(std::span<const PairedReport> reports, const std::string& path);
void write_aggregate_csv(std::span<const PairedAggregate> agg, const std::string& path);

}  // namespace seqtune
