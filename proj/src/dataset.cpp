#include "seqtune/dataset.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "seqtune/csv.hpp"

namespace seqtune {

namespace {

bool all_numeric(const std::vector<std::vector<std::string>>& rows, std::size_t col) {
    double tmp;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (!parse_double(rows[r][col], tmp)) return false;
    }
    return true;
}

Column make_categorical_column(const std::string& name,
                               const std::vector<std::vector<std::string>>& rows,
                               std::size_t col) {
    Column c;
    c.name = name;
    c.numeric = false;
    std::set<std::string> uniq;
    for (std::size_t r = 1; r < rows.size(); ++r) uniq.insert(rows[r][col]);
    c.levels.assign(uniq.begin(), uniq.end());
    c.cat.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto it = std::lower_bound(c.levels.begin(), c.levels.end(), rows[r][col]);
        c.cat.push_back(static_cast<int>(it - c.levels.begin()));
    }
    return c;
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
    const auto rows = read_csv_file(path);
    if (rows.size() < 2) throw std::runtime_error(path + ": CSV needs a header row and data");
    const auto& header = rows[0];
    const std::size_t ncols = header.size();
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != ncols)
            throw std::runtime_error(path + ": row " + std::to_string(r + 1) + " has " +
                                     std::to_string(rows[r].size()) + " fields, expected " +
                                     std::to_string(ncols));
    }

    std::size_t target_col = ncols;
    for (std::size_t c = 0; c < ncols; ++c)
        if (header[c] == schema.target) target_col = c;
    if (target_col == ncols)
        throw std::runtime_error(path + ": target column '" + schema.target + "' not found");

    Dataset ds;
    ds.task = schema.task;
    ds.n = rows.size() - 1;
    if (ds.n < 10) throw std::runtime_error(path + ": need at least 10 rows, got " + std::to_string(ds.n));

    for (std::size_t c = 0; c < ncols; ++c) {
        if (c == target_col) continue;
        bool numeric;
        const auto ov = schema.type_overrides.find(header[c]);
        if (ov != schema.type_overrides.end()) {
            numeric = ov->second;
        } else {
            numeric = all_numeric(rows, c);
        }
        if (numeric) {
            Column col;
            col.name = header[c];
            col.numeric = true;
            col.num.reserve(ds.n);
            for (std::size_t r = 1; r < rows.size(); ++r) {
                double v;
                if (!parse_double(rows[r][c], v))
                    throw std::runtime_error(path + ": cell at row " + std::to_string(r + 1) +
                                             ", column '" + header[c] + "' is not numeric: '" +
                                             rows[r][c] + "'");
                col.num.push_back(v);
            }
            ds.features.push_back(std::move(col));
        } else {
            ds.features.push_back(make_categorical_column(header[c], rows, c));
        }
    }

    if (schema.task == TaskKind::regression) {
        ds.target.reserve(ds.n);
        for (std::size_t r = 1; r < rows.size(); ++r) {
            double v;
            if (!parse_double(rows[r][target_col], v))
                throw std::runtime_error(path + ": target cell at row " + std::to_string(r + 1) +
                                         " is not numeric: '" + rows[r][target_col] + "'");
            ds.target.push_back(v);
        }
    } else {
        std::set<std::string> labels;
        for (std::size_t r = 1; r < rows.size(); ++r) labels.insert(rows[r][target_col]);
        if (labels.size() != 2)
            throw std::runtime_error(path + ": target not binary (found " +
                                     std::to_string(labels.size()) + " labels)");
        ds.class_labels.assign(labels.begin(), labels.end());
        ds.target.reserve(ds.n);
        for (std::size_t r = 1; r < rows.size(); ++r)
            ds.target.push_back(rows[r][target_col] == ds.class_labels[1] ? 1.0 : 0.0);
    }
    return ds;
}

void write_csv(const Dataset& ds, const std::string& path) {
    CsvWriter w(path);
    std::vector<std::string> fields;
    for (const auto& col : ds.features) fields.push_back(col.name);
    fields.push_back("target");
    w.row(fields);
    for (std::size_t r = 0; r < ds.n; ++r) {
        fields.clear();
        for (const auto& col : ds.features) {
            if (col.numeric)
                fields.push_back(format_double(col.num[r]));
            else
                fields.push_back(col.levels[static_cast<std::size_t>(col.cat[r])]);
        }
        if (ds.task == TaskKind::classification)
            fields.push_back(ds.class_labels[ds.target[r] > 0.5 ? 1 : 0]);
        else
            fields.push_back(format_double(ds.target[r]));
        w.row(fields);
    }
}

std::vector<double> synthetic_linear_beta(std::size_t p) {
    std::vector<double> beta(p + 1);
    beta[0] = 0.5;
    for (std::size_t j = 0; j < p; ++j) beta[j + 1] = 1.0 + 0.5 * static_cast<double>(j);
    return beta;
}

Dataset make_synthetic(SyntheticKind kind, std::size_t n, std::size_t p, double noise,
                       std::uint64_t seed) {
    if (n < 10 || p < 1 || noise < 0.0)
        throw std::invalid_argument("make_synthetic: need n >= 10, p >= 1, noise >= 0");

    Dataset ds;
    ds.n = n;
    Rng rng(seed);

    ds.features.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        ds.features[j].name = "x" + std::to_string(j + 1);
        ds.features[j].numeric = true;
        ds.features[j].num.resize(n);
    }
    ds.target.resize(n);

    if (kind == SyntheticKind::linear_regression) {
        ds.task = TaskKind::regression;
        const auto beta = synthetic_linear_beta(p);
        for (std::size_t i = 0; i < n; ++i) {
            double y = beta[0];
            for (std::size_t j = 0; j < p; ++j) {
                const double x = rng.uniform(-1.0, 1.0);
                ds.features[j].num[i] = x;
                y += beta[j + 1] * x;
            }
            ds.target[i] = y + noise * rng.normal();
        }
    } else {
        ds.task = TaskKind::classification;
        ds.class_labels = {"neg", "pos"};
        for (std::size_t i = 0; i < n; ++i) {
            const double cls = (i % 2 == 0) ? 0.0 : 1.0;
            for (std::size_t j = 0; j < p; ++j)
                ds.features[j].num[i] = cls + noise * rng.normal();
            ds.target[i] = cls;
        }
    }
    return ds;
}

}  // namespace seqtune
