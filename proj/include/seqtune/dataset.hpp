#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "seqtune/rng.hpp"

namespace seqtune {

enum class TaskKind { classification, regression };

struct Column {
    std::string name;
    bool numeric = true;
    std::vector<double> num;          // values when numeric
    std::vector<int> cat;             // level codes when categorical
    std::vector<std::string> levels;  // level labels, sorted; cat codes index into this
};

// Immutable after load. Classification targets are stored as 0/1 doubles with
// labels mapped by sorted label order, so error fixtures are stable.
struct Dataset {
    std::vector<Column> features;
    std::vector<double> target;
    std::vector<std::string> class_labels;  // exactly 2 entries for classification
    TaskKind task = TaskKind::regression;
    std::size_t n = 0;

    std::size_t p() const { return features.size(); }
};

struct CsvSchema {
    std::string target;
    TaskKind task = TaskKind::regression;
    // column name -> force numeric (true) or categorical (false); others inferred
    std::map<std::string, bool> type_overrides;
};

// Columns default to numeric when every entry parses as a number, else
// categorical. Throws std::runtime_error naming row/column on bad cells.
Dataset load_csv(const std::string& path, const CsvSchema& schema);

void write_csv(const Dataset& ds, const std::string& path);

enum class SyntheticKind { linear_regression, two_gaussians_classification };

// Deterministic given seed. linear: y = X beta + noise*eps with the fixed
// coefficient vector from synthetic_linear_beta. two-gaussians: class 0
// centered at 0, class 1 centered at 1 in every coordinate, spread = noise.
Dataset make_synthetic(SyntheticKind kind, std::size_t n, std::size_t p, double noise,
                       std::uint64_t seed);

// Generating coefficients used by the linear synthetic task (index 0 is the
// intercept, then one slope per feature).
std::vector<double> synthetic_linear_beta(std::size_t p);

}  // namespace seqtune
