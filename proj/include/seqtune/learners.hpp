#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "seqtune/dataset.hpp"
#include "seqtune/param_space.hpp"

namespace seqtune {

enum class LearnerKind { elastic_net, cart_tree };

LearnerKind learner_from_string(const std::string& s);
std::string to_string(LearnerKind k);

// Search spaces matching the learners' tunable hyperparameters.
ParamSpace default_space(LearnerKind kind);

// Untuned constants (our own defaults, documented here):
inline constexpr double kEnetTol = 1e-7;        // relative objective tolerance
inline constexpr int kEnetMaxSweeps = 10000;    // coordinate-descent sweep cap
inline constexpr double kProbClamp = 1e-12;     // probability clamp for logistic fits
inline constexpr int kTreeMinSplit = 10;        // smallest node eligible for a split
inline constexpr int kTreeMinLeaf = 3;          // smallest child a split may create

struct ElasticNetModel {
    double intercept = 0.0;
    std::vector<double> coef;  // one entry per expanded (one-hot) column
};

struct TreeNode {
    bool leaf = true;
    int feature = -1;
    double threshold = 0.0;          // numeric splits: go left iff x < threshold
    std::uint64_t left_levels = 0;   // categorical splits: go left iff bit(level) set
    int left = -1, right = -1;
    double prediction = 0.0;
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct Model {
    LearnerKind kind = LearnerKind::elastic_net;
    TaskKind task = TaskKind::regression;
    std::size_t n_features = 0;  // raw dataset columns, for schema checks
    std::variant<ElasticNetModel, TreeModel> impl;
};

// Trains on the given rows (a bootstrap multiset: repeats count). Throws on
// zero rows or missing/invalid hyperparameters. Constant-target degenerate
// data yields an intercept-only / single-leaf model.
Model fit(LearnerKind kind, const Config& cfg, const Dataset& ds, std::span<const int> train_rows);

// Regression: reals. Classification: hard 0/1 labels (threshold 0.5).
std::vector<double> predict(const Model& m, const Dataset& ds, std::span<const int> rows);

}  // namespace seqtune
