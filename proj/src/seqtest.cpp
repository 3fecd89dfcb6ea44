#include "seqtune/seqtest.hpp"

#include <cmath>
#include <stdexcept>

#include "seqtune/csv.hpp"

namespace seqtune {

void SlrtConfig::validate() const {
    if (!(gamma0 < gamma1)) throw std::invalid_argument("SlrtConfig: gamma0 must be < gamma1");
    if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("SlrtConfig: alpha in (0, 0.5)");
    if (!(beta > 0.0 && beta < 0.5)) throw std::invalid_argument("SlrtConfig: beta in (0, 0.5)");
    if (n_min < 2 || n_min > n_max) throw std::invalid_argument("SlrtConfig: need 2 <= n_min <= n_max");
}

double slrt_bound(const SlrtState& state, const SlrtConfig& cfg) {
    if (state.n < 2) throw std::logic_error("slrt_bound: variances need n >= 2");
    return (state.var_u() + state.var_w()) / (cfg.gamma1 - cfg.gamma0) *
           std::log((1.0 - cfg.alpha) / cfg.beta);
}

double slrt_statistic(const SlrtState& state, const SlrtConfig& cfg) {
    return state.n * (state.mean_u() - state.mean_w() - 0.5 * (cfg.gamma0 + cfg.gamma1));
}

Decision slrt_step(SlrtState& state, double u_n, double w_n, const SlrtConfig& cfg) {
    if (!std::isfinite(u_n) || !std::isfinite(w_n))
        throw std::invalid_argument("slrt_step: non-finite observation");
    if (state.n >= cfg.n_max) throw std::logic_error("slrt_step: past n_max");

    state.n += 1;
    state.sum_u += u_n;
    state.sumsq_u += u_n * u_n;
    state.sum_w += w_n;
    state.sumsq_w += w_n * w_n;

    if (state.n >= cfg.n_min) {
        const double a = slrt_bound(state, cfg);
        const double z = slrt_statistic(state, cfg);
        if (a == 0.0) {
            // both streams constant so far; any nonzero statistic decides
            if (z > 0.0) return {DecisionKind::accept_h1, Winner::candidate};
            if (z < 0.0) return {DecisionKind::accept_h0, Winner::incumbent};
        } else {
            if (z >= a) return {DecisionKind::accept_h1, Winner::candidate};
            if (z <= -a) return {DecisionKind::accept_h0, Winner::incumbent};
        }
    }
    if (state.n == cfg.n_max) {
        const Winner w =
            state.mean_w() < state.mean_u() ? Winner::candidate : Winner::incumbent;
        return {DecisionKind::forced, w};
    }
    return {DecisionKind::continue_test, Winner::incumbent};
}

std::string to_string(DecisionKind k) {
    switch (k) {
        case DecisionKind::continue_test: return "continue";
        case DecisionKind::accept_h0: return "accept_h0";
        case DecisionKind::accept_h1: return "accept_h1";
        case DecisionKind::forced: return "forced";
    }
    return "?";
}

void write_trace_csv(std::span<const SlrtTraceRow> trace, const std::string& path) {
    CsvWriter w(path);
    w.row({"n", "z", "a", "decision"});
    for (const auto& row : trace)
        w.row({std::to_string(row.n), format_double(row.z), format_double(row.a),
               to_string(row.decision)});
}

SprtResult wald_sprt(std::span<const double> observations,
                     const std::function<double(double)>& logpdf0,
                     const std::function<double(double)>& logpdf1, double alpha, double beta,
                     int n_max) {
    if (!(alpha > 0.0 && alpha < 0.5) || !(beta > 0.0 && beta < 0.5))
        throw std::invalid_argument("wald_sprt: alpha, beta in (0, 0.5)");
    const double upper = std::log((1.0 - beta) / alpha);
    const double lower = std::log(beta / (1.0 - alpha));

    SprtResult res;
    double z = 0.0;
    int n = 0;
    for (double x : observations) {
        if (n >= n_max) break;
        const double ratio = logpdf1(x) - logpdf0(x);
        if (!std::isfinite(ratio)) throw std::domain_error("wald_sprt: non-finite log-ratio");
        z += ratio;
        ++n;
        if (z >= upper) return {DecisionKind::accept_h1, true, n, z};
        if (z <= lower) return {DecisionKind::accept_h0, false, n, z};
    }
    if (n >= n_max) return {DecisionKind::forced, z > 0.0, n, z};
    return {DecisionKind::continue_test, false, n, z};  // stream exhausted before n_max
}

}  // namespace seqtune
