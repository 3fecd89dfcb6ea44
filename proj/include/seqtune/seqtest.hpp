#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace seqtune {

// Parameters of the sequential likelihood-ratio test for the two-sample
// Behrens-Fisher problem: H0: mu_u - mu_w = gamma0 vs H1: mu_u - mu_w = gamma1.
// Stream u carries the incumbent's shifted losses, stream w the candidate's,
// so accepting H1 means the candidate's mean loss is lower by at least gamma1.
struct SlrtConfig {
    double gamma0 = -0.02;
    double gamma1 = 0.02;
    double alpha = 0.05;
    double beta = 0.05;
    int n_min = 2;   // first testable step (variances need two observations)
    int n_max = 10;  // forced decision here

    void validate() const;
};

struct SlrtState {
    int n = 0;
    double sum_u = 0.0, sumsq_u = 0.0;
    double sum_w = 0.0, sumsq_w = 0.0;

    double mean_u() const { return sum_u / n; }
    double mean_w() const { return sum_w / n; }
    // 1/(n-1) empirical variance, defined from n = 2
    double var_u() const { return (sumsq_u - sum_u * sum_u / n) / (n - 1); }
    double var_w() const { return (sumsq_w - sum_w * sum_w / n) / (n - 1); }
};

enum class DecisionKind { continue_test, accept_h0, accept_h1, forced };
enum class Winner { incumbent, candidate };

struct Decision {
    DecisionKind kind = DecisionKind::continue_test;
    Winner winner = Winner::incumbent;  // meaningful unless continuing

    bool final() const { return kind != DecisionKind::continue_test; }
};

// Half-width of the continuity region (-A, A):
// A = (s2_u + s2_w) / (gamma1 - gamma0) * ln((1 - alpha) / beta).
double slrt_bound(const SlrtState& state, const SlrtConfig& cfg);

// Test statistic Z = n * (mean_u - mean_w - (gamma0 + gamma1) / 2).
double slrt_statistic(const SlrtState& state, const SlrtConfig& cfg);

// Appends one observation to each stream and decides: Z >= A accepts H1,
// Z <= -A accepts H0, otherwise continue; at n_max the smaller running mean
// wins (incumbent on an exact tie). Zero combined variance decides by the
// sign of Z alone.
Decision slrt_step(SlrtState& state, double u_n, double w_n, const SlrtConfig& cfg);

struct SlrtTraceRow {
    int n = 0;
    double z = 0.0;
    double a = 0.0;
    DecisionKind decision = DecisionKind::continue_test;
};

std::string to_string(DecisionKind k);
void write_trace_csv(std::span<const SlrtTraceRow> trace, const std::string& path);

// Classic Wald SPRT for simple H0 vs H1 on an i.i.d. stream, with thresholds
// a = ln((1-beta)/alpha) and b = ln(beta/(1-alpha)). Forced by the sign of
// Z at n_max (ties go to H0).
struct SprtResult {
    DecisionKind decision = DecisionKind::continue_test;
    bool h1 = false;  // final call after a forced decision
    int stopping_time = 0;
    double z = 0.0;
};

SprtResult wald_sprt(std::span<const double> observations,
                     const std::function<double(double)>& logpdf0,
                     const std::function<double(double)>& logpdf1, double alpha, double beta,
                     int n_max);

}  // namespace seqtune
