#include "seqtune/dist_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "seqtune/csv.hpp"
#include "seqtune/nelder_mead.hpp"
#include "seqtune/resampling.hpp"
#include "seqtune/rng.hpp"
#include "seqtune/special_functions.hpp"

namespace seqtune {

DistFamily family_from_string(const std::string& s) {
    if (s == "normal") return DistFamily::normal;
    if (s == "lognormal") return DistFamily::lognormal;
    if (s == "gamma") return DistFamily::gamma;
    if (s == "loggamma") return DistFamily::loggamma;
    if (s == "invgamma") return DistFamily::invgamma;
    if (s == "weibull") return DistFamily::weibull;
    if (s == "invweibull") return DistFamily::invweibull;
    if (s == "beta") return DistFamily::beta;
    throw std::invalid_argument("unknown distribution family '" + s + "'");
}

std::string to_string(DistFamily f) {
    switch (f) {
        case DistFamily::normal: return "normal";
        case DistFamily::lognormal: return "lognormal";
        case DistFamily::gamma: return "gamma";
        case DistFamily::loggamma: return "loggamma";
        case DistFamily::invgamma: return "invgamma";
        case DistFamily::weibull: return "weibull";
        case DistFamily::invweibull: return "invweibull";
        case DistFamily::beta: return "beta";
    }
    return "?";
}

std::vector<DistFamily> candidate_families(TaskKind task) {
    std::vector<DistFamily> fams = {DistFamily::normal,   DistFamily::lognormal,
                                    DistFamily::gamma,    DistFamily::loggamma,
                                    DistFamily::invgamma, DistFamily::weibull,
                                    DistFamily::invweibull};
    if (task == TaskKind::classification) fams.push_back(DistFamily::beta);
    return fams;
}

namespace {

bool degenerate(std::span<const double> v) {
    for (double x : v)
        if (x != v[0]) return false;
    return true;
}

struct Moments {
    double mean = 0.0;
    double var = 0.0;  // 1/n variance
};

Moments moments(std::span<const double> v) {
    Moments m;
    for (double x : v) m.mean += x;
    m.mean /= static_cast<double>(v.size());
    for (double x : v) m.var += (x - m.mean) * (x - m.mean);
    m.var /= static_cast<double>(v.size());
    return m;
}

// --- log-densities -----------------------------------------------------

double normal_logpdf(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return -0.5 * z * z - std::log(sigma) - 0.91893853320467274178032973640562;  // log sqrt(2 pi)
}

double gamma_logpdf(double x, double shape, double rate) {
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double weibull_logpdf(double x, double shape, double scale) {
    const double z = x / scale;
    return std::log(shape / scale) + (shape - 1.0) * std::log(z) - std::pow(z, shape);
}

double beta_logpdf(double x, double a, double b) {
    return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) -
           (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

// --- Nelder-Mead MLE in log-parameter space (keeps parameters positive) --

std::vector<double> mle_2param(const std::vector<double>& data, double p1_start, double p2_start,
                               double (*logpdf)(double, double, double), const char* what) {
    auto nll = [&](const std::vector<double>& logp) {
        const double p1 = std::exp(logp[0]), p2 = std::exp(logp[1]);
        if (!std::isfinite(p1) || !std::isfinite(p2)) return std::numeric_limits<double>::max();
        double s = 0.0;
        for (double x : data) s -= logpdf(x, p1, p2);
        return std::isfinite(s) ? s : std::numeric_limits<double>::max();
    };
    const auto res = nelder_mead(nll, {std::log(p1_start), std::log(p2_start)}, 1e-8, 2000);
    if (!res.converged)
        throw FitError(std::string(what) + ": optimizer did not converge within 2000 iterations");
    return {std::exp(res.x[0]), std::exp(res.x[1])};
}

std::vector<double> gamma_start(const std::vector<double>& data) {
    const auto m = moments(data);
    if (m.var <= 0.0) throw SupportError("gamma: degenerate sample");
    return {std::max(1e-3, m.mean * m.mean / m.var), std::max(1e-12, m.mean / m.var)};
}

std::vector<double> weibull_start(const std::vector<double>& data) {
    const auto m = moments(data);
    if (m.var <= 0.0) throw SupportError("weibull: degenerate sample");
    const double cv = std::sqrt(m.var) / m.mean;
    const double shape0 = std::min(50.0, std::max(0.1, std::pow(cv, -1.086)));
    return {shape0, std::max(1e-12, m.mean / std::tgamma(1.0 + 1.0 / shape0))};
}

std::vector<double> beta_start(const std::vector<double>& data) {
    const auto m = moments(data);
    if (m.var <= 0.0) throw SupportError("beta: degenerate sample");
    const double common = m.mean * (1.0 - m.mean) / m.var - 1.0;
    if (common <= 0.0) return {1.0, 1.0};
    return {std::max(1e-3, m.mean * common), std::max(1e-3, (1.0 - m.mean) * common)};
}

std::vector<double> fit_gamma_nm(const std::vector<double>& data) {
    const auto s = gamma_start(data);
    return mle_2param(data, s[0], s[1], gamma_logpdf, "gamma");
}

std::vector<double> fit_weibull_nm(const std::vector<double>& data) {
    const auto s = weibull_start(data);
    return mle_2param(data, s[0], s[1], weibull_logpdf, "weibull");
}

std::vector<double> fit_beta_nm(const std::vector<double>& data) {
    const auto s = beta_start(data);
    return mle_2param(data, s[0], s[1], beta_logpdf, "beta");
}

std::vector<double> shifted(std::span<const double> samples, double c) {
    std::vector<double> out(samples.begin(), samples.end());
    for (auto& x : out) x += c;
    return out;
}

}  // namespace

bool shift_admissible(std::span<const double> samples, DistFamily family, double c) {
    if (samples.size() < 3) return false;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : samples) {
        lo = std::min(lo, x + c);
        hi = std::max(hi, x + c);
    }
    if (lo == hi) return false;  // degenerate for every family
    switch (family) {
        case DistFamily::normal:
        case DistFamily::lognormal:
        case DistFamily::gamma:
        case DistFamily::invgamma:
        case DistFamily::weibull:
        case DistFamily::invweibull:
            return family == DistFamily::normal || lo > 0.0;
        case DistFamily::loggamma:
            return lo > 1.0;  // log of the shifted value must be positive
        case DistFamily::beta:
            return lo > 0.0 && hi < 1.0;
    }
    return false;
}

namespace {

std::vector<double> transform_logs(const std::vector<double>& s) {
    std::vector<double> out(s.size());
    std::transform(s.begin(), s.end(), out.begin(), [](double x) { return std::log(x); });
    return out;
}

std::vector<double> transform_recip(const std::vector<double>& s) {
    std::vector<double> out(s.size());
    std::transform(s.begin(), s.end(), out.begin(), [](double x) { return 1.0 / x; });
    return out;
}

std::vector<double> closed_form_normal(const std::vector<double>& v) {
    const auto m = moments(v);
    if (m.var <= 0.0) throw SupportError("normal: degenerate sample (sigma = 0)");
    return {m.mean, std::sqrt(m.var)};
}

}  // namespace

double family_loglik(std::span<const double> samples, DistFamily family, double c,
                     const std::vector<double>& params) {
    const std::vector<double> s = shifted(samples, c);
    double ll = 0.0;
    switch (family) {
        case DistFamily::normal:
            for (double x : s) ll += normal_logpdf(x, params[0], params[1]);
            break;
        case DistFamily::lognormal:
            for (double x : s) ll += normal_logpdf(std::log(x), params[0], params[1]) - std::log(x);
            break;
        case DistFamily::gamma:
            for (double x : s) ll += gamma_logpdf(x, params[0], params[1]);
            break;
        case DistFamily::loggamma:
            for (double x : s) ll += gamma_logpdf(std::log(x), params[0], params[1]) - std::log(x);
            break;
        case DistFamily::invgamma:
            for (double x : s) ll += gamma_logpdf(1.0 / x, params[0], params[1]) - 2.0 * std::log(x);
            break;
        case DistFamily::weibull:
            for (double x : s) ll += weibull_logpdf(x, params[0], params[1]);
            break;
        case DistFamily::invweibull:
            // params are Frechet (shape, scale); the reciprocal is weibull
            // with scale 1/params[1]
            for (double x : s)
                ll += weibull_logpdf(1.0 / x, params[0], 1.0 / params[1]) - 2.0 * std::log(x);
            break;
        case DistFamily::beta:
            for (double x : s) ll += beta_logpdf(x, params[0], params[1]);
            break;
    }
    return ll;
}

std::vector<double> moment_start(std::span<const double> samples, DistFamily family, double c) {
    if (!shift_admissible(samples, family, c))
        throw SupportError("moment_start: samples + c violate the support of " + to_string(family));
    const std::vector<double> s = shifted(samples, c);
    switch (family) {
        case DistFamily::normal: return closed_form_normal(s);
        case DistFamily::lognormal: return closed_form_normal(transform_logs(s));
        case DistFamily::gamma: return gamma_start(s);
        case DistFamily::loggamma: return gamma_start(transform_logs(s));
        case DistFamily::invgamma: return gamma_start(transform_recip(s));
        case DistFamily::weibull: return weibull_start(s);
        case DistFamily::invweibull: {
            const auto w = weibull_start(transform_recip(s));
            return {w[0], 1.0 / w[1]};
        }
        case DistFamily::beta: return beta_start(s);
    }
    throw std::logic_error("moment_start: unreachable");
}

FitResult fit_mle(std::span<const double> samples, DistFamily family, double c) {
    if (samples.size() < 3) throw SupportError("fit_mle: need at least 3 samples");
    if (!shift_admissible(samples, family, c))
        throw SupportError("fit_mle: samples + c violate the support of " + to_string(family));

    const std::vector<double> s = shifted(samples, c);
    FitResult fit;
    fit.family = family;
    fit.shift = c;

    switch (family) {
        case DistFamily::normal:
            fit.params = closed_form_normal(s);
            break;
        case DistFamily::lognormal:
            fit.params = closed_form_normal(transform_logs(s));
            break;
        case DistFamily::gamma:
            fit.params = fit_gamma_nm(s);
            break;
        case DistFamily::loggamma:
            fit.params = fit_gamma_nm(transform_logs(s));
            break;
        case DistFamily::invgamma:
            fit.params = fit_gamma_nm(transform_recip(s));  // (shape, scale) in inverse terms
            break;
        case DistFamily::weibull:
            fit.params = fit_weibull_nm(s);
            break;
        case DistFamily::invweibull: {
            const auto w = fit_weibull_nm(transform_recip(s));
            fit.params = {w[0], 1.0 / w[1]};  // Frechet (shape, scale)
            break;
        }
        case DistFamily::beta:
            fit.params = fit_beta_nm(s);
            break;
    }
    fit.loglik = family_loglik(samples, family, c, fit.params);
    return fit;
}

double fit_cdf(const FitResult& fit, double x) {
    const double s = x + fit.shift;
    switch (fit.family) {
        case DistFamily::normal:
            return normal_cdf((s - fit.params[0]) / fit.params[1]);
        case DistFamily::lognormal:
            if (s <= 0.0) return 0.0;
            return normal_cdf((std::log(s) - fit.params[0]) / fit.params[1]);
        case DistFamily::gamma:
            if (s <= 0.0) return 0.0;
            return reg_gamma_lower(fit.params[0], fit.params[1] * s);
        case DistFamily::loggamma:
            if (s <= 1.0) return 0.0;
            return reg_gamma_lower(fit.params[0], fit.params[1] * std::log(s));
        case DistFamily::invgamma:
            if (s <= 0.0) return 0.0;
            return 1.0 - reg_gamma_lower(fit.params[0], fit.params[1] / s);
        case DistFamily::weibull:
            if (s <= 0.0) return 0.0;
            return 1.0 - std::exp(-std::pow(s / fit.params[1], fit.params[0]));
        case DistFamily::invweibull:
            if (s <= 0.0) return 0.0;
            return std::exp(-std::pow(fit.params[1] / s, fit.params[0]));
        case DistFamily::beta:
            if (s <= 0.0) return 0.0;
            if (s >= 1.0) return 1.0;
            return reg_beta(fit.params[0], fit.params[1], s);
    }
    return 0.0;
}

double cvm_criterion(std::span<const double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("cvm_criterion: empty sample");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double t = 1.0 / (12.0 * n);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double expected = (2.0 * static_cast<double>(i + 1) - 1.0) / (2.0 * n);
        const double d = expected - cdf(sorted[i]);
        t += d * d;
    }
    return t;
}

const std::vector<double>& shift_candidates() {
    static const std::vector<double> cs = {0.0, 0.001, 0.01, 0.1, 0.15, 0.25, 0.5, 1.0, 1.5};
    return cs;
}

FitResult shift_search(std::span<const double> samples, DistFamily family) {
    FitResult best;
    bool found = false;
    for (double c : shift_candidates()) {
        if (!shift_admissible(samples, family, c)) continue;
        FitResult fit;
        try {
            fit = fit_mle(samples, family, c);
        } catch (const FitError&) {
            continue;
        } catch (const SupportError&) {
            continue;
        }
        fit.cvm = cvm_criterion(samples, [&](double x) { return fit_cdf(fit, x); });
        if (!found || fit.cvm < best.cvm) {
            best = fit;
            found = true;
        }
    }
    if (!found)
        throw SupportError("shift_search: no admissible shift for family " + to_string(family));
    return best;
}

std::vector<DistStudyRow> dist_study(const Dataset& ds, LearnerKind kind, const ParamSpace& space,
                                     int n_configs, int n_boot, std::uint64_t seed, int jobs) {
    if (n_boot < 30) throw std::invalid_argument("dist_study: need n_boot >= 30");
    if (n_configs < 1) throw std::invalid_argument("dist_study: need n_configs >= 1");

    Rng cfg_rng(derive_seed(seed, "diststudy-configs"));
    std::vector<Config> configs;
    configs.reserve(static_cast<std::size_t>(n_configs));
    for (int i = 0; i < n_configs; ++i) configs.push_back(sample_config(space, cfg_rng, i));

    // partitions shared across configs, as in the original study design
    const auto inst = ResamplingInstance::bootstrap(static_cast<int>(ds.n), n_boot,
                                                    derive_seed(seed, "diststudy-instance"));

    std::vector<std::vector<double>> losses(static_cast<std::size_t>(n_configs),
                                            std::vector<double>(static_cast<std::size_t>(n_boot)));
    EvalCache cache;
#pragma omp parallel for schedule(dynamic) collapse(2) num_threads(jobs) if (jobs > 1)
    for (int i = 0; i < n_configs; ++i) {
        for (int k = 0; k < n_boot; ++k) {
            losses[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                evaluate(configs[static_cast<std::size_t>(i)], kind, ds, inst, k, cache);
        }
    }

    const auto families = candidate_families(ds.task);
    struct Cell {
        int config = 0;
        DistFamily family = DistFamily::normal;
    };
    std::vector<Cell> cells;
    for (int i = 0; i < n_configs; ++i)
        for (const auto f : families) cells.push_back({i, f});

    std::vector<DistStudyRow> rows(cells.size());
    std::vector<char> ok(cells.size(), 0);
#pragma omp parallel for schedule(dynamic) num_threads(jobs) if (jobs > 1)
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto& cell = cells[c];
        try {
            const FitResult fit =
                shift_search(losses[static_cast<std::size_t>(cell.config)], cell.family);
            rows[c] = DistStudyRow{cell.config, cell.family, fit.shift,
                                   fit.loglik,  fit.cvm,     fit.params};
            ok[c] = 1;
        } catch (const SupportError&) {
            ok[c] = 0;
        }
    }

    std::vector<DistStudyRow> out;
    out.reserve(rows.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
        if (ok[c]) out.push_back(std::move(rows[c]));
    return out;
}

void write_dist_study_csv(const std::vector<DistStudyRow>& rows, const std::string& path) {
    CsvWriter w(path);
    w.row({"config_id", "family", "c", "loglik", "cvm", "param1", "param2"});
    for (const auto& r : rows) {
        w.row({std::to_string(r.config_id), to_string(r.family), format_double(r.c),
               format_double(r.loglik), format_double(r.cvm), format_double(r.params[0]),
               format_double(r.params[1])});
    }
}

std::vector<std::pair<DistFamily, double>> dist_study_summary(
    const std::vector<DistStudyRow>& rows) {
    std::vector<std::pair<DistFamily, double>> out;
    std::vector<DistFamily> fams;
    for (const auto& r : rows)
        if (std::find(fams.begin(), fams.end(), r.family) == fams.end()) fams.push_back(r.family);
    for (const auto f : fams) {
        std::vector<double> vals;
        for (const auto& r : rows)
            if (r.family == f) vals.push_back(r.cvm);
        std::sort(vals.begin(), vals.end());
        const std::size_t n = vals.size();
        const double med = (n % 2 == 1) ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
        out.emplace_back(f, med);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
    return out;
}

}  // namespace seqtune
