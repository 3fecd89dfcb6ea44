// Acceptance suite: each criterion prints one PASS/FAIL line; the process
// exits nonzero if any requested criterion fails. Run with a list of
// criterion numbers (1..9) or no arguments for all of them.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "seqtune/dist_fit.hpp"
#include "seqtune/experiment.hpp"
#include "seqtune/rng.hpp"
#include "seqtune/seqtest.hpp"
#include "seqtune/tuner.hpp"

using namespace seqtune;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fixture(const std::string& name) {
    return std::string(SEQTUNE_FIXTURES_DIR) + "/" + name;
}

// ---------------------------------------------------------------------------
// 1. SLRT calibration: decision-level error rates within the Monte-Carlo band
//    for every test-parameter preset. The simulated streams are normal with
//    per-preset spread sigma and first testable step 20, chosen so decisions
//    fall well before n_max = 500 with forced decisions rare.
// ---------------------------------------------------------------------------
Outcome criterion_1() {
    const int duels = 2000, n_max = 500, n_min = 20;
    const std::map<std::string, double> sigma = {
        {"A", 0.10}, {"B", 0.10}, {"C", 0.07}, {"D", 0.04}};
    Rng rng(20250402);
    std::ostringstream detail;
    bool pass = true;
    for (const auto& st : kSettingPresets) {
        const SlrtConfig cfg{st.gamma0, st.gamma1, st.alpha_beta, st.alpha_beta, n_min, n_max};
        const double s = sigma.at(st.label);
        int type1 = 0, type2 = 0;
        for (int r = 0; r < duels; ++r) {
            // H0 true: mean difference gamma0 (incumbent better)
            SlrtState state;
            Decision d;
            do {
                d = slrt_step(state, rng.normal(st.gamma0, s), rng.normal(0.0, s), cfg);
            } while (!d.final());
            if (d.winner == Winner::candidate) ++type1;
        }
        for (int r = 0; r < duels; ++r) {
            // H1 true: mean difference gamma1 (candidate better)
            SlrtState state;
            Decision d;
            do {
                d = slrt_step(state, rng.normal(st.gamma1, s), rng.normal(0.0, s), cfg);
            } while (!d.final());
            if (d.winner == Winner::incumbent) ++type2;
        }
        const double ab = st.alpha_beta;
        const double bound = ab + 2.0 * std::sqrt(ab * (1.0 - ab) / duels);
        const double r1 = static_cast<double>(type1) / duels;
        const double r2 = static_cast<double>(type2) / duels;
        detail << st.label << ": typeI " << r1 << " typeII " << r2 << " bound " << bound << "; ";
        pass = pass && r1 <= bound && r2 <= bound;
    }
    return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// 2. CvM calibration bands for a normal fit to normal / uniform / exponential
//    draws (1000 each, 100 seeds).
// ---------------------------------------------------------------------------
Outcome criterion_2() {
    int normal_ok = 0;
    bool uniform_ok = true, expo_ok = true;
    double umin = 1e300, umax = 0.0, emin = 1e300;
    for (int seed = 0; seed < 100; ++seed) {
        Rng rng(derive_seed(777, "cvm", static_cast<std::uint64_t>(seed)));
        std::vector<double> nrm(1000), uni(1000), expo(1000);
        for (auto& x : nrm) x = rng.normal();
        for (auto& x : uni) x = rng.uniform();
        for (auto& x : expo) x = -std::log(1.0 - rng.uniform());

        auto score = [](const std::vector<double>& v) {
            const auto fit = fit_mle(v, DistFamily::normal, 0.0);
            return cvm_criterion(v, [&](double x) { return fit_cdf(fit, x); });
        };
        if (score(nrm) < 0.5) ++normal_ok;
        const double tu = score(uni);
        umin = std::min(umin, tu);
        umax = std::max(umax, tu);
        uniform_ok = uniform_ok && tu >= 0.5 && tu <= 3.0;
        const double te = score(expo);
        emin = std::min(emin, te);
        expo_ok = expo_ok && te > 4.0;
    }
    std::ostringstream detail;
    detail << "normal<0.5 in " << normal_ok << "/100; uniform T in [" << umin << ", " << umax
           << "]; exponential min T " << emin;
    return {normal_ok >= 95 && uniform_ok && expo_ok, detail.str()};
}

// ---------------------------------------------------------------------------
// 3. Distribution-study qualitative ranking on the regression fixture.
// ---------------------------------------------------------------------------
Outcome criterion_3() {
    const auto ds = load_csv(fixture("concrete_small.csv"),
                             {.target = "strength", .task = TaskKind::regression});
    const auto rows = dist_study(ds, LearnerKind::elastic_net,
                                 default_space(LearnerKind::elastic_net), 10, 200, 424242, 1);
    const auto summary = dist_study_summary(rows);
    std::map<DistFamily, double> med;
    for (const auto& [fam, m] : summary) med[fam] = m;

    std::ostringstream detail;
    for (const auto& [fam, m] : summary) detail << to_string(fam) << "=" << m << " ";
    bool pass = true;
    for (const auto good :
         {DistFamily::lognormal, DistFamily::gamma, DistFamily::invgamma, DistFamily::loggamma}) {
        pass = pass && med.at(DistFamily::weibull) > med.at(good);
        pass = pass && med.at(DistFamily::invweibull) > med.at(good);
    }
    pass = pass && med.at(DistFamily::normal) > med.at(DistFamily::lognormal);
    return {pass, detail.str()};
}

// shared paired-comparison run for criteria 4 and 5
struct CompareRun {
    std::vector<PairedReport> reports;
    std::vector<PairedAggregate> agg;
};

CompareRun run_compare(const std::string& csv, const std::string& target, TaskKind task,
                       LearnerKind learner, int replications, std::uint64_t seed) {
    const auto ds = load_csv(fixture(csv), {.target = target, .task = task});
    PairedOptions opts;
    opts.K = 10;
    opts.n_configs = 50;
    opts.replications = replications;
    opts.seed = seed;
    opts.jobs = 1;  // the stated runtime budget is single-threaded
    CompareRun run;
    run.reports = paired_compare(default_space(learner), learner, ds, opts);
    const std::vector<std::string> order = {"A", "B", "C", "D"};
    run.agg = aggregate_reports(run.reports, order);
    return run;
}

// ---------------------------------------------------------------------------
// 4. Structural invariants of the paired harness on every replication.
// ---------------------------------------------------------------------------
Outcome criterion_4() {
    const auto run = run_compare("pima_small.csv", "diabetes", TaskKind::classification,
                                 LearnerKind::cart_tree, 20, 555);
    bool pass = !run.reports.empty();
    for (const auto& r : run.reports) {
        pass = pass && r.perf_ratio >= 1.0;
        pass = pass && r.eval_ratio > 0.0 && r.eval_ratio <= 1.0;
        pass = pass && static_cast<long>(r.eval_ratio * 500 + 0.5) <= 500;
        if (r.identical) pass = pass && r.perf_ratio == 1.0;
    }
    std::ostringstream detail;
    detail << run.reports.size() << " reports checked (perf>=1, eval in (0,1], fits<=500)";
    return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// 5. Desk-scale quantitative reproduction: identical-solution proportion and
//    evaluation-ratio medians, pooled over two fixtures per task kind.
// ---------------------------------------------------------------------------
Outcome criterion_5() {
    struct Job {
        const char* csv;
        const char* target;
        TaskKind task;
        LearnerKind learner;
    };
    const Job jobs[] = {
        {"pima_small.csv", "diabetes", TaskKind::classification, LearnerKind::cart_tree},
        {"german_small.csv", "risk", TaskKind::classification, LearnerKind::elastic_net},
        {"concrete_small.csv", "strength", TaskKind::regression, LearnerKind::elastic_net},
        {"wage_small.csv", "wage", TaskKind::regression, LearnerKind::cart_tree},
    };
    const int reps = 60;  // 120 replications pooled per task kind

    std::map<TaskKind, std::vector<PairedReport>> pooled;
    for (const auto& j : jobs) {
        const auto run = run_compare(j.csv, j.target, j.task, j.learner, reps,
                                     derive_seed(2026, j.csv));
        auto& dst = pooled[j.task];
        dst.insert(dst.end(), run.reports.begin(), run.reports.end());
    }

    const std::vector<std::string> order = {"A", "B", "C", "D"};
    std::ostringstream detail;
    bool pass = true;
    for (const auto& [task, reports] : pooled) {
        const auto agg = aggregate_reports(reports, order);
        const char* label = task == TaskKind::classification ? "classif" : "regr";
        detail << label << ": identical";
        for (const auto& a : agg) detail << " " << a.setting << "=" << a.prop_identical;
        detail << ", median eval";
        for (const auto& a : agg) detail << " " << a.setting << "=" << a.median_eval_ratio;
        detail << "; ";
        pass = pass && agg.size() == 4;
        pass = pass && agg[3].prop_identical >= 0.70;
        for (std::size_t i = 1; i < agg.size(); ++i)
            pass = pass && agg[i].prop_identical >= agg[i - 1].prop_identical;
        pass = pass && agg[0].median_eval_ratio <= 0.65;
        pass = pass && agg[3].median_eval_ratio <= 0.85;
    }
    return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// 6. Random search equals a brute-force argmin over the exported table on 20
//    random small instances.
// ---------------------------------------------------------------------------
Outcome criterion_6() {
    Rng meta(909090);
    bool pass = true;
    for (int trial = 0; trial < 20; ++trial) {
        const bool classify = meta.uniform() < 0.5;
        const auto kind = meta.uniform() < 0.5 ? LearnerKind::cart_tree : LearnerKind::elastic_net;
        const auto ds = classify
                            ? make_synthetic(SyntheticKind::two_gaussians_classification,
                                             40 + 2 * trial, 2, 0.8, meta.next_u64())
                            : make_synthetic(SyntheticKind::linear_regression, 40 + 2 * trial, 2,
                                             1.0, meta.next_u64());
        if (classify != (ds.task == TaskKind::classification)) return {false, "task mixup"};
        const int K = 3 + trial % 3, n_configs = 4 + trial % 5;
        const auto inst =
            ResamplingInstance::bootstrap(static_cast<int>(ds.n), K, meta.next_u64());
        EvalCache cache;
        Rng rng(meta.next_u64());
        const auto rs = random_search(default_space(kind), kind, ds, inst, n_configs, rng, cache, 1);

        // independent pass over the cache export
        const std::string path = "/tmp/seqtune_acc6_cache.csv";
        cache.export_csv(path);
        EvalCache replay;
        replay.import_csv(path);
        std::remove(path.c_str());
        int best = -1;
        double best_mean = 1e300;
        for (int i = 0; i < n_configs; ++i) {
            double mean = 0.0;
            for (int k = 0; k < K; ++k) {
                const auto v = replay.lookup(i, k);
                if (!v) return {false, "cache export incomplete"};
                // recompute from scratch and compare
                EvalCache fresh;
                const double direct =
                    evaluate(rs.configs[static_cast<std::size_t>(i)], kind, ds, inst, k, fresh);
                if (direct != *v) return {false, "replayed loss differs from direct fit"};
                mean += *v;
            }
            mean /= K;
            if (mean < best_mean) {
                best_mean = mean;
                best = i;
            }
        }
        pass = pass && best == rs.best_index;
    }
    return {pass, "20 instances, argmin and losses agree"};
}

// ---------------------------------------------------------------------------
// 7. Closed-form MLE checks on fixed 5-point samples.
// ---------------------------------------------------------------------------
Outcome criterion_7() {
    const std::vector<double> s = {0.5, 1.25, 2.0, 4.5, 9.0};
    long double mean = 0.0L, logmean = 0.0L;
    for (double x : s) {
        mean += static_cast<long double>(x);
        logmean += std::log(static_cast<long double>(x));
    }
    mean /= 5.0L;
    logmean /= 5.0L;
    long double var = 0.0L, logvar = 0.0L;
    for (double x : s) {
        var += (x - mean) * (x - mean);
        const long double d = std::log(static_cast<long double>(x)) - logmean;
        logvar += d * d;
    }
    var /= 5.0L;
    logvar /= 5.0L;

    const auto nm = fit_mle(s, DistFamily::normal, 0.0);
    const auto ln = fit_mle(s, DistFamily::lognormal, 0.0);
    const bool pass = std::fabs(nm.params[0] - static_cast<double>(mean)) < 1e-12 &&
                      std::fabs(nm.params[1] * nm.params[1] - static_cast<double>(var)) < 1e-12 &&
                      std::fabs(ln.params[0] - static_cast<double>(logmean)) < 1e-12 &&
                      std::fabs(ln.params[1] * ln.params[1] - static_cast<double>(logvar)) < 1e-12;
    std::ostringstream detail;
    detail << "normal (" << nm.params[0] << ", " << nm.params[1] * nm.params[1] << ") lognormal ("
           << ln.params[0] << ", " << ln.params[1] * ln.params[1] << ")";
    return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// 8. Bootstrap out-of-bag test fraction over 1000 partitions of n = 300.
// ---------------------------------------------------------------------------
Outcome criterion_8() {
    const int n = 300, K = 1000;
    const auto inst = ResamplingInstance::bootstrap(n, K, 31415);
    double frac = 0.0;
    for (int k = 0; k < K; ++k)
        frac += static_cast<double>(inst.partition(k).test.size()) / n;
    frac /= K;
    const double expected = std::pow(1.0 - 1.0 / n, n);  // out-of-bag probability, ~0.3673
    std::ostringstream detail;
    detail << "mean test fraction " << frac << " vs " << expected;
    return {std::fabs(frac - expected) < 0.03, detail.str()};
}

// ---------------------------------------------------------------------------
// 9. Byte-identical compare runs through the CLI.
// ---------------------------------------------------------------------------
Outcome criterion_9() {
    const std::string dir = "/tmp/seqtune_acc9";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    {
        std::ofstream cfg(dir + "/cfg.json");
        cfg << R"({
  "seed": 99,
  "task": {"csv": ")" << fixture("pima_small.csv") << R"(", "target": "diabetes", "kind": "classification"},
  "learner": "cart_tree",
  "tuning": {"K": 6, "n_configs": 10, "replications": 4}
})";
    }
    const std::string bin = SEQTUNE_CLI_BIN;
    for (int run = 1; run <= 2; ++run) {
        const std::string cmd = bin + " compare --config " + dir + "/cfg.json --out " + dir +
                                "/out" + std::to_string(run) + " --jobs " + std::to_string(run) +
                                " > " + dir + "/log" + std::to_string(run) + ".txt 2>&1";
        if (std::system(cmd.c_str()) != 0) return {false, "CLI run " + std::to_string(run) + " failed"};
    }
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const bool reports_same =
        slurp(dir + "/out1/paired_reports.csv") == slurp(dir + "/out2/paired_reports.csv");
    const bool agg_same = slurp(dir + "/out1/aggregate.csv") == slurp(dir + "/out2/aggregate.csv");
    const bool nonempty = !slurp(dir + "/out1/paired_reports.csv").empty();
    std::filesystem::remove_all(dir);
    return {reports_same && agg_same && nonempty, "paired_reports.csv and aggregate.csv identical"};
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
    if (which.empty()) which = {1, 2, 3, 4, 5, 6, 7, 8, 9};

    Outcome (*criteria[])() = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                               criterion_6, criterion_7, criterion_8, criterion_9};
    const char* names[] = {
        "SLRT calibration within Monte-Carlo error bands",
        "CvM calibration bands (normal/uniform/exponential)",
        "distribution-study family ranking on the regression fixture",
        "paired-harness structural invariants",
        "paired-harness desk-scale reproduction",
        "random-search winner equals brute-force argmin",
        "closed-form MLE reproduces hand-computed moments",
        "bootstrap out-of-bag fraction",
        "byte-identical compare runs",
    };

    bool all_pass = true;
    for (int c : which) {
        if (c < 1 || c > 9) {
            std::cerr << "unknown criterion " << c << "\n";
            return 2;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[c - 1]();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << c << " (" << names[c - 1]
                  << ") [" << elapsed(t0) << " s] " << out.detail << "\n";
        all_pass = all_pass && out.pass;
    }
    return all_pass ? 0 : 1;
}
