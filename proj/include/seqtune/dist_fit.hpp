#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqtune/dataset.hpp"
#include "seqtune/learners.hpp"
#include "seqtune/param_space.hpp"

namespace seqtune {

enum class DistFamily { normal, lognormal, gamma, loggamma, invgamma, weibull, invweibull, beta };

DistFamily family_from_string(const std::string& s);
std::string to_string(DistFamily f);

// beta is admissible for classification losses only
std::vector<DistFamily> candidate_families(TaskKind task);

struct SupportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameter vector orders (fixed so CSV schemas stay stable):
//   normal     (mu, sigma)          of the shifted data
//   lognormal  (mu, sigma)          of log shifted data
//   gamma      (shape, rate)
//   loggamma   (shape, rate)        gamma fitted to log shifted data; support x > 1
//   invgamma   (shape, scale)       gamma fitted to reciprocals
//   weibull    (shape, scale)
//   invweibull (shape, scale)       Frechet; weibull fitted to reciprocals
//   beta       (alpha, beta)        shifted data must lie in (0, 1)
struct FitResult {
    DistFamily family = DistFamily::normal;
    std::vector<double> params;
    double shift = 0.0;  // additive constant c applied to the samples
    double loglik = 0.0;
    double cvm = 0.0;
};

// true iff every sample + c lies strictly inside the family's support and the
// shifted sample is non-degenerate.
bool shift_admissible(std::span<const double> samples, DistFamily family, double c);

// Maximum-likelihood fit of family to samples + c. normal/lognormal use the
// closed form (variance with 1/n); the rest run Nelder-Mead on the negative
// log-likelihood from moment-based starting values. Throws SupportError /
// FitError. The returned cvm is filled in by the caller-facing overloads.
FitResult fit_mle(std::span<const double> samples, DistFamily family, double c);

// Log-likelihood of samples + c at the given natural parameters, with change
// of variables included for the log / inverse families.
double family_loglik(std::span<const double> samples, DistFamily family, double c,
                     const std::vector<double>& params);

// Moment-based starting values used to seed the optimizer.
std::vector<double> moment_start(std::span<const double> samples, DistFamily family, double c);

// CDF of the fitted (shifted-scale) distribution, evaluated at x + c.
double fit_cdf(const FitResult& fit, double x);

// T = 1/(12n) + sum_i ((2i-1)/(2n) - F(x_i))^2 over ascending-sorted samples.
double cvm_criterion(std::span<const double> samples, const std::function<double(double)>& cdf);

// Shifts searched: c = 0 plus the fixed ladder up to 1.5. Inadmissible or
// non-converging shifts are skipped; throws SupportError if none works.
const std::vector<double>& shift_candidates();
FitResult shift_search(std::span<const double> samples, DistFamily family);

struct DistStudyRow {
    int config_id = 0;
    DistFamily family = DistFamily::normal;
    double c = 0.0;
    double loglik = 0.0;
    double cvm = 0.0;
    std::vector<double> params;
};

// For each sampled config, computes n_boot bootstrap losses on partitions
// shared across configs, then runs the per-family shift search.
std::vector<DistStudyRow> dist_study(const Dataset& ds, LearnerKind kind, const ParamSpace& space,
                                     int n_configs, int n_boot, std::uint64_t seed, int jobs = 1);

void write_dist_study_csv(const std::vector<DistStudyRow>& rows, const std::string& path);

// family -> median cvm over configs, ranked ascending
std::vector<std::pair<DistFamily, double>> dist_study_summary(const std::vector<DistStudyRow>& rows);

}  // namespace seqtune
