#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seqtune/dataset.hpp"
#include "seqtune/dist_fit.hpp"
#include "seqtune/learners.hpp"
#include "seqtune/param_space.hpp"
#include "seqtune/seqtest.hpp"
#include "seqtune/tuner.hpp"

namespace seqtune {

struct TaskSpec {
    // exactly one of csv_path / synthetic is set
    std::string csv_path;
    std::string target;
    std::optional<SyntheticKind> synthetic;
    std::size_t n = 0, p = 0;
    double noise = 0.0;
    TaskKind kind = TaskKind::regression;
};

struct TuningSpec {
    int K = 10;
    int n_configs = 50;
    std::vector<std::string> settings = {"A", "B", "C", "D"};
    std::optional<SlrtConfig> explicit_slrt;  // overrides settings for single runs
    std::optional<double> shift;              // default: 0.5 classification, 0 regression
    std::optional<bool> log_transform;        // default: raw classification, log regression
    int replications = 100;
};

struct DistStudySpec {
    int n_configs = 10;
    int n_boot = 200;
};

// Parsed and schema-checked before any computation; unknown keys are errors.
struct ExperimentConfig {
    TaskSpec task;
    LearnerKind learner = LearnerKind::elastic_net;
    ParamSpace space;
    TuningSpec tuning;
    DistStudySpec diststudy;
    std::uint64_t seed = 1;
    std::string out_dir = "results";
};

ExperimentConfig load_experiment_config(const std::string& path);

// Resolves the task spec to a concrete dataset (CSV paths are taken relative
// to the config file's directory).
Dataset load_task(const ExperimentConfig& cfg);

int cmd_diststudy(const ExperimentConfig& cfg, const std::string& out_dir, int jobs);
int cmd_tune(const ExperimentConfig& cfg, const std::string& algorithm, const std::string& out_dir,
             int jobs);
int cmd_compare(const ExperimentConfig& cfg, const std::string& out_dir, int jobs);

}  // namespace seqtune
