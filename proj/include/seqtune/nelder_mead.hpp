#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace seqtune {

struct NelderMeadResult {
    std::vector<double> x;
    double fmin = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Downhill simplex with standard coefficients; stops when the simplex
// diameter falls below tol or after max_iter iterations.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> start, double tol = 1e-8,
                                    int max_iter = 2000) {
    const std::size_t d = start.size();
    std::vector<std::vector<double>> simplex(d + 1, start);
    for (std::size_t j = 0; j < d; ++j)
        simplex[j + 1][j] += (start[j] != 0.0) ? 0.05 * std::fabs(start[j]) : 0.00025;

    std::vector<double> fv(d + 1);
    for (std::size_t i = 0; i <= d; ++i) fv[i] = f(simplex[i]);

    NelderMeadResult res;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        std::vector<std::size_t> order(d + 1);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });

        double diameter = 0.0;
        for (std::size_t i = 1; i <= d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                diameter = std::max(diameter, std::fabs(simplex[order[i]][j] - simplex[order[0]][j]));
        if (diameter < tol) {
            res.converged = true;
            break;
        }

        const std::size_t best = order[0], worst = order[d], second = order[d - 1];
        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i <= d; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < d; ++j) centroid[j] += simplex[i][j];
        }
        for (auto& c : centroid) c /= static_cast<double>(d);

        auto blend = [&](double t) {
            std::vector<double> x(d);
            for (std::size_t j = 0; j < d; ++j) x[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
            return x;
        };

        const auto xr = blend(-1.0);
        const double fr = f(xr);
        if (fr < fv[best]) {
            const auto xe = blend(-2.0);
            const double fe = f(xe);
            if (fe < fr) {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            simplex[worst] = xr;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            const auto xc = blend(outside ? -0.5 : 0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, fv[worst])) {
                simplex[worst] = xc;
                fv[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= d; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < d; ++j)
                        simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
                    fv[i] = f(simplex[i]);
                }
            }
        }
    }

    const auto it = std::min_element(fv.begin(), fv.end());
    res.x = simplex[static_cast<std::size_t>(it - fv.begin())];
    res.fmin = *it;
    res.iterations = iter;
    return res;
}

}  // namespace seqtune
