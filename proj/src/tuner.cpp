#include "seqtune/tuner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <stdexcept>

#include "seqtune/csv.hpp"

namespace seqtune {

RsResult random_search(const ParamSpace& space, LearnerKind kind, const Dataset& ds,
                       const ResamplingInstance& inst, int n_configs, Rng& rng, EvalCache& cache,
                       int jobs) {
    if (n_configs < 1) throw std::invalid_argument("random_search: need n_configs >= 1");
    if (inst.mode() != ResamplingMode::fixed)
        throw std::invalid_argument("random_search: needs a fixed resampling instance");

    RsResult res;
    res.configs.reserve(static_cast<std::size_t>(n_configs));
    for (int i = 0; i < n_configs; ++i) res.configs.push_back(sample_config(space, rng, i));

    const int K = inst.K();
    res.table.assign(static_cast<std::size_t>(n_configs),
                     std::vector<double>(static_cast<std::size_t>(K), 0.0));

#pragma omp parallel for schedule(dynamic) collapse(2) num_threads(jobs) if (jobs > 1)
    for (int i = 0; i < n_configs; ++i) {
        for (int k = 0; k < K; ++k) {
            res.table[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                evaluate(res.configs[static_cast<std::size_t>(i)], kind, ds, inst, k, cache);
        }
    }

    res.best_index = 0;
    res.best_mean = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_configs; ++i) {
        double mean = 0.0;
        for (int k = 0; k < K; ++k)
            mean += res.table[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        mean /= static_cast<double>(K);
        if (mean < res.best_mean) {  // strict: ties keep the lower id
            res.best_mean = mean;
            res.best_index = i;
        }
    }
    res.fits = static_cast<long>(n_configs) * K;
    return res;
}

namespace {

double duel_value(double raw_loss, const SqrsOptions& opts) {
    const double v = raw_loss + opts.shift;
    if (!opts.log_transform) return v;
    return std::log(std::max(v, 1e-12));
}

}  // namespace

SqrsResult sqrs(std::span<const Config> candidates, LearnerKind kind, const Dataset& ds,
                const ResamplingInstance& inst, const SqrsOptions& opts, EvalCache& cache) {
    if (candidates.empty()) throw std::invalid_argument("sqrs: need at least one candidate");
    SlrtConfig slrt = opts.slrt;
    slrt.validate();
    if (inst.mode() == ResamplingMode::fixed && slrt.n_max > inst.K())
        throw std::invalid_argument("sqrs: n_max exceeds the instance's partition count");

    const auto t0 = std::chrono::steady_clock::now();
    auto out_of_time = [&] {
        if (opts.time_budget_sec <= 0.0) return false;
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        return dt.count() >= opts.time_budget_sec;
    };

    SqrsResult res;
    std::set<std::pair<int, int>> touched;
    std::size_t incumbent = 0;

    for (std::size_t c = 1; c < candidates.size(); ++c) {
        if (out_of_time()) break;
        const Config& inc_cfg = candidates[incumbent];
        const Config& cand_cfg = candidates[c];

        SlrtState state;
        Decision dec;
        double raw_sum_u = 0.0, raw_sum_w = 0.0;
        while (true) {
            const int k = state.n;  // next partition index
            const double u_raw = evaluate(inc_cfg, kind, ds, inst, k, cache);
            const double w_raw = evaluate(cand_cfg, kind, ds, inst, k, cache);
            touched.insert({inc_cfg.id, k});
            touched.insert({cand_cfg.id, k});
            raw_sum_u += u_raw;
            raw_sum_w += w_raw;
            dec = slrt_step(state, duel_value(u_raw, opts), duel_value(w_raw, opts), slrt);
            if (dec.final()) break;
        }
        if (dec.kind == DecisionKind::forced) {
            // in case of doubt the lower estimated loss wins, on the raw
            // loss scale (the transform only serves the test statistic)
            dec.winner = raw_sum_w < raw_sum_u ? Winner::candidate : Winner::incumbent;
        }
        if (dec.winner == Winner::candidate) incumbent = c;
        res.duels.push_back({cand_cfg.id, dec.kind, dec.winner, state.n,
                             candidates[incumbent].id});
    }

    res.incumbent = candidates[incumbent];
    res.fits = static_cast<long>(touched.size());
    const long budget = opts.reference_budget > 0
                            ? opts.reference_budget
                            : static_cast<long>(candidates.size()) * slrt.n_max;
    res.eval_ratio = static_cast<double>(res.fits) / static_cast<double>(budget);
    return res;
}

void write_duel_log_csv(const SqrsResult& res, const std::string& path) {
    CsvWriter w(path);
    w.row({"duel", "candidate_id", "steps", "decision", "winner", "incumbent_after"});
    for (std::size_t i = 0; i < res.duels.size(); ++i) {
        const auto& d = res.duels[i];
        w.row({std::to_string(i + 1), std::to_string(d.candidate_id), std::to_string(d.steps),
               to_string(d.outcome), d.winner == Winner::candidate ? "candidate" : "incumbent",
               std::to_string(d.incumbent_after)});
    }
}

const SlrtSetting& setting_by_label(const std::string& label) {
    for (const auto& s : kSettingPresets)
        if (label == s.label) return s;
    throw std::invalid_argument("unknown setting '" + label + "' (expected A, B, C or D)");
}

double default_shift(TaskKind task) {
    return task == TaskKind::classification ? 0.5 : 0.0;
}

bool default_log_transform(TaskKind task) {
    return task == TaskKind::regression;
}

std::vector<PairedReport> paired_compare(const ParamSpace& space, LearnerKind kind,
                                         const Dataset& ds, const PairedOptions& opts) {
    if (opts.n_configs < 2) throw std::invalid_argument("paired_compare: need n_configs >= 2");
    if (opts.replications < 1) throw std::invalid_argument("paired_compare: need replications >= 1");
    const double shift = opts.shift.value_or(default_shift(ds.task));
    const bool log_transform = opts.log_transform.value_or(default_log_transform(ds.task));
    for (const auto& label : opts.settings) setting_by_label(label);  // validate early

    const std::size_t nset = opts.settings.size();
    std::vector<std::vector<PairedReport>> slots(
        static_cast<std::size_t>(opts.replications));

#pragma omp parallel for schedule(dynamic) num_threads(opts.jobs) if (opts.jobs > 1)
    for (int r = 0; r < opts.replications; ++r) {
        const std::uint64_t rep_seed = derive_seed(opts.seed, "replication", static_cast<std::uint64_t>(r));
        const auto inst = ResamplingInstance::bootstrap(static_cast<int>(ds.n), opts.K,
                                                        derive_seed(rep_seed, "instance"));
        EvalCache cache;
        Rng cfg_rng(derive_seed(rep_seed, "configs"));
        const RsResult rs =
            random_search(space, kind, ds, inst, opts.n_configs, cfg_rng, cache, 1);

        std::vector<Config> shuffled = rs.configs;
        Rng shuffle_rng(derive_seed(rep_seed, "shuffle"));
        shuffle_rng.shuffle(shuffled);

        auto& out = slots[static_cast<std::size_t>(r)];
        out.reserve(nset);
        for (const auto& label : opts.settings) {
            const SlrtSetting& st = setting_by_label(label);
            SqrsOptions sopts;
            sopts.slrt = SlrtConfig{st.gamma0, st.gamma1, st.alpha_beta, st.alpha_beta, 2, opts.K};
            sopts.shift = shift;
            sopts.log_transform = log_transform;
            sopts.reference_budget = static_cast<long>(opts.n_configs) * opts.K;
            const SqrsResult sq = sqrs(shuffled, kind, ds, inst, sopts, cache);

            double sq_mean = 0.0;
            for (int k = 0; k < opts.K; ++k)
                sq_mean += rs.table[static_cast<std::size_t>(sq.incumbent.id)]
                                   [static_cast<std::size_t>(k)];
            sq_mean /= static_cast<double>(opts.K);

            PairedReport rep;
            rep.setting = label;
            rep.task = ds.task;
            rep.replication = r;
            rep.identical = sq.incumbent.id == rs.best().id;
            rep.perf_ratio = sq_mean == rs.best_mean ? 1.0 : sq_mean / rs.best_mean;
            rep.eval_ratio = sq.eval_ratio;
            out.push_back(std::move(rep));
        }
    }

    // grouped by setting, replications ascending, independent of thread order
    std::vector<PairedReport> reports;
    reports.reserve(nset * static_cast<std::size_t>(opts.replications));
    for (std::size_t s = 0; s < nset; ++s)
        for (int r = 0; r < opts.replications; ++r)
            reports.push_back(slots[static_cast<std::size_t>(r)][s]);
    return reports;
}

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<PairedAggregate> aggregate_reports(std::span<const PairedReport> reports,
                                               std::span<const std::string> setting_order) {
    std::vector<PairedAggregate> out;
    for (const auto& label : setting_order) {
        PairedAggregate agg;
        agg.setting = label;
        std::vector<double> evals, worse;
        int identical = 0;
        for (const auto& r : reports) {
            if (r.setting != label) continue;
            ++agg.replications;
            identical += r.identical ? 1 : 0;
            evals.push_back(r.eval_ratio);
            if (r.perf_ratio != 1.0) worse.push_back(r.perf_ratio);
        }
        if (agg.replications == 0) continue;
        agg.prop_identical = static_cast<double>(identical) / agg.replications;
        agg.median_eval_ratio = median(evals);
        agg.n_worse = static_cast<int>(worse.size());
        agg.median_perf_ratio_worse = worse.empty() ? 1.0 : median(worse);
        out.push_back(std::move(agg));
    }
    return out;
}

void write_reports_csv(std::span<const PairedReport> reports, const std::string& path) {
    CsvWriter w(path);
    w.row({"setting", "task_kind", "replication", "identical", "perf_ratio", "eval_ratio"});
    for (const auto& r : reports) {
        w.row({r.setting, r.task == TaskKind::classification ? "classification" : "regression",
               std::to_string(r.replication), r.identical ? "1" : "0", format_double(r.perf_ratio),
               format_double(r.eval_ratio)});
    }
}

void write_aggregate_csv(std::span<const PairedAggregate> agg, const std::string& path) {
    CsvWriter w(path);
    w.row({"setting", "replications", "prop_identical", "median_eval_ratio", "n_worse",
           "median_perf_ratio_worse"});
    for (const auto& a : agg) {
        w.row({a.setting, std::to_string(a.replications), format_double(a.prop_identical),
               format_double(a.median_eval_ratio), std::to_string(a.n_worse),
               format_double(a.median_perf_ratio_worse)});
    }
}

}  // namespace seqtune
