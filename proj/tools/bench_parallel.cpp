// Compares the serial reference drivers (jobs = 1) against the OpenMP
// drivers on a reduced paired-comparison and distribution-study workload,
// and verifies the outputs match.

#include <chrono>
#include <cstdlib>
#include <iostream>

#include <omp.h>

#include "seqtune/dist_fit.hpp"
#include "seqtune/tuner.hpp"

using namespace seqtune;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same_reports(const std::vector<PairedReport>& a, const std::vector<PairedReport>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].setting != b[i].setting || a[i].replication != b[i].replication ||
            a[i].identical != b[i].identical || a[i].perf_ratio != b[i].perf_ratio ||
            a[i].eval_ratio != b[i].eval_ratio)
            return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    int jobs = omp_get_max_threads();
    if (argc > 1) jobs = std::atoi(argv[1]);
    if (jobs < 2) jobs = 2;

    const Dataset ds = make_synthetic(SyntheticKind::two_gaussians_classification, 120, 4, 0.9, 99);
    const ParamSpace space = default_space(LearnerKind::cart_tree);

    PairedOptions opts;
    opts.K = 10;
    opts.n_configs = 20;
    opts.replications = 24;
    opts.seed = 7;

    std::cout << "paired comparison, " << opts.replications << " replications x "
              << opts.n_configs << " configs x K=" << opts.K << "\n";

    opts.jobs = 1;
    auto t0 = std::chrono::steady_clock::now();
    const auto serial = paired_compare(space, LearnerKind::cart_tree, ds, opts);
    const double t_serial = seconds_since(t0);

    opts.jobs = jobs;
    t0 = std::chrono::steady_clock::now();
    const auto parallel = paired_compare(space, LearnerKind::cart_tree, ds, opts);
    const double t_parallel = seconds_since(t0);

    std::cout << "  serial   " << t_serial << " s\n";
    std::cout << "  omp(" << jobs << ")   " << t_parallel << " s  (speedup "
              << t_serial / t_parallel << "x)\n";
    if (!same_reports(serial, parallel)) {
        std::cerr << "MISMATCH: parallel reports differ from serial reference\n";
        return 1;
    }

    const Dataset regr = make_synthetic(SyntheticKind::linear_regression, 120, 4, 0.5, 3);
    std::cout << "distribution study, 6 configs x 120 bootstrap losses\n";
    t0 = std::chrono::steady_clock::now();
    const auto rows_serial =
        dist_study(regr, LearnerKind::elastic_net, default_space(LearnerKind::elastic_net), 6, 120, 11, 1);
    const double d_serial = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    const auto rows_parallel =
        dist_study(regr, LearnerKind::elastic_net, default_space(LearnerKind::elastic_net), 6, 120, 11, jobs);
    const double d_parallel = seconds_since(t0);
    std::cout << "  serial   " << d_serial << " s\n";
    std::cout << "  omp(" << jobs << ")   " << d_parallel << " s  (speedup "
              << d_serial / d_parallel << "x)\n";

    if (rows_serial.size() != rows_parallel.size()) {
        std::cerr << "MISMATCH: study row counts differ\n";
        return 1;
    }
    for (std::size_t i = 0; i < rows_serial.size(); ++i) {
        if (rows_serial[i].cvm != rows_parallel[i].cvm ||
            rows_serial[i].config_id != rows_parallel[i].config_id) {
            std::cerr << "MISMATCH: study row " << i << " differs\n";
            return 1;
        }
    }
    std::cout << "parallel outputs match the serial reference\n";
    return 0;
}
