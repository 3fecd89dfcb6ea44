#include "seqtune/resampling.hpp"

#include <algorithm>
#include <stdexcept>

#include "seqtune/csv.hpp"
#include "seqtune/rng.hpp"

namespace seqtune {

namespace {

Partition draw_partition(int n, Rng& rng) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        Partition p;
        p.train.reserve(static_cast<std::size_t>(n));
        std::vector<bool> drawn(static_cast<std::size_t>(n), false);
        for (int i = 0; i < n; ++i) {
            const int r = static_cast<int>(rng.uniform_int(0, n - 1));
            p.train.push_back(r);
            drawn[static_cast<std::size_t>(r)] = true;
        }
        for (int i = 0; i < n; ++i)
            if (!drawn[static_cast<std::size_t>(i)]) p.test.push_back(i);
        if (!p.test.empty()) return p;
    }
    throw std::runtime_error("bootstrap: empty test set after 100 redraws");
}

}  // namespace

ResamplingInstance ResamplingInstance::bootstrap(int n, int K, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("bootstrap: need n >= 2");
    if (K < 1) throw std::invalid_argument("bootstrap: need K >= 1");
    ResamplingInstance inst;
    inst.mode_ = ResamplingMode::fixed;
    inst.n_ = n;
    inst.K_ = K;
    inst.seed_ = seed;
    inst.partitions_.reserve(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        Rng rng(derive_seed(seed, "partition", static_cast<std::uint64_t>(k)));
        inst.partitions_.push_back(draw_partition(n, rng));
    }
    return inst;
}

ResamplingInstance ResamplingInstance::fresh(int n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("bootstrap: need n >= 2");
    ResamplingInstance inst;
    inst.mode_ = ResamplingMode::fresh;
    inst.n_ = n;
    inst.K_ = 0;
    inst.seed_ = seed;
    return inst;
}

const Partition& ResamplingInstance::partition(int k) const {
    if (mode_ != ResamplingMode::fixed) throw std::logic_error("partition(): instance is in fresh mode");
    if (k < 0 || k >= K_) throw std::out_of_range("partition index out of range");
    return partitions_[static_cast<std::size_t>(k)];
}

Partition ResamplingInstance::fresh_partition(int config_id, int k) const {
    const std::uint64_t s = derive_seed(
        seed_, "fresh", (static_cast<std::uint64_t>(static_cast<std::uint32_t>(config_id)) << 32) |
                            static_cast<std::uint32_t>(k));
    Rng rng(s);
    return draw_partition(n_, rng);
}

LossKind default_loss(TaskKind task) {
    return task == TaskKind::classification ? LossKind::mmce : LossKind::mse;
}

double loss(std::span<const double> y_true, std::span<const double> y_pred, LossKind kind) {
    if (y_true.size() != y_pred.size() || y_true.empty())
        throw std::invalid_argument("loss: length mismatch or empty input");
    double acc = 0.0;
    if (kind == LossKind::mmce) {
        for (std::size_t i = 0; i < y_true.size(); ++i)
            acc += (y_true[i] != y_pred[i]) ? 1.0 : 0.0;
    } else {
        for (std::size_t i = 0; i < y_true.size(); ++i) {
            const double d = y_true[i] - y_pred[i];
            acc += d * d;
        }
    }
    return acc / static_cast<double>(y_true.size());
}

std::optional<double> EvalCache::lookup(int config_id, int k) const {
    std::lock_guard<std::mutex> lock(mu_);
    const auto it = map_.find(key(config_id, k));
    if (it == map_.end()) return std::nullopt;
    return it->second;
}

void EvalCache::store(int config_id, int k, double value) {
    std::lock_guard<std::mutex> lock(mu_);
    const auto [it, inserted] = map_.emplace(key(config_id, k), value);
    if (!inserted && it->second != value)
        throw std::logic_error("EvalCache: conflicting rewrite of a stored loss");
}

void EvalCache::export_csv(const std::string& path) const {
    std::vector<std::pair<std::uint64_t, double>> entries;
    {
        std::lock_guard<std::mutex> lock(mu_);
        entries.assign(map_.begin(), map_.end());
    }
    std::sort(entries.begin(), entries.end());
    CsvWriter w(path);
    w.row({"config_id", "partition", "loss"});
    for (const auto& [k, v] : entries) {
        w.row({std::to_string(static_cast<int>(k >> 32)),
               std::to_string(static_cast<int>(k & 0xffffffffULL)), format_double(v)});
    }
}

void EvalCache::import_csv(const std::string& path) {
    const auto rows = read_csv_file(path);
    if (rows.empty() || rows[0] != std::vector<std::string>{"config_id", "partition", "loss"})
        throw std::runtime_error(path + ": bad cache CSV header");
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 3) throw std::runtime_error(path + ": bad cache CSV row");
        double v;
        if (!parse_double(rows[r][2], v)) throw std::runtime_error(path + ": bad loss value");
        store(std::stoi(rows[r][0]), std::stoi(rows[r][1]), v);
    }
}

double evaluate(const Config& cfg, LearnerKind kind, const Dataset& ds,
                const ResamplingInstance& inst, int k, EvalCache& cache) {
    if (inst.mode() == ResamplingMode::fixed && k >= inst.K())
        throw std::out_of_range("evaluate: partition index out of range");
    if (const auto hit = cache.lookup(cfg.id, k)) return *hit;

    double value;
    if (inst.mode() == ResamplingMode::fixed) {
        const Partition& p = inst.partition(k);
        const Model m = fit(kind, cfg, ds, p.train);
        const auto pred = predict(m, ds, p.test);
        std::vector<double> truth;
        truth.reserve(p.test.size());
        for (int r : p.test) truth.push_back(ds.target[static_cast<std::size_t>(r)]);
        value = loss(truth, pred, default_loss(ds.task));
    } else {
        const Partition p = inst.fresh_partition(cfg.id, k);
        const Model m = fit(kind, cfg, ds, p.train);
        const auto pred = predict(m, ds, p.test);
        std::vector<double> truth;
        truth.reserve(p.test.size());
        for (int r : p.test) truth.push_back(ds.target[static_cast<std::size_t>(r)]);
        value = loss(truth, pred, default_loss(ds.task));
    }
    cache.count_fit();
    cache.store(cfg.id, k, value);
    return value;
}

}  // namespace seqtune
