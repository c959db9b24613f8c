#pragma once
// Derivative-free simplex minimiser used to cross-check gradient-based fits.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

struct SimplexResult {
    std::vector<double> x;
    double f = 0.0;
    int iterations = 0;
};

inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                                 double step = 0.2, int max_iter = 20000, double tol = 1e-13) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> s(n + 1, x0);
    for (std::size_t k = 0; k < n; ++k) s[k + 1][k] += step;
    std::vector<double> fv(n + 1);
    for (std::size_t k = 0; k <= n; ++k) fv[k] = f(s[k]);
    auto eval = [&](const std::vector<double>& x) {
        const double v = f(x);
        return std::isfinite(v) ? v : HUGE_VAL;
    };

    SimplexResult r;
    for (r.iterations = 0; r.iterations < max_iter; ++r.iterations) {
        std::vector<std::size_t> idx(n + 1);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> s2;
        std::vector<double> f2;
        for (std::size_t k : idx) {
            s2.push_back(s[k]);
            f2.push_back(fv[k]);
        }
        s.swap(s2);
        fv.swap(f2);
        if (std::fabs(fv[n] - fv[0]) <= tol * (1.0 + std::fabs(fv[0]))) {
            double size = 0.0;
            for (std::size_t k = 1; k <= n; ++k)
                for (std::size_t d = 0; d < n; ++d) size = std::max(size, std::fabs(s[k][d] - s[0][d]));
            if (size < 1e-9) break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t d = 0; d < n; ++d) centroid[d] += s[k][d] / static_cast<double>(n);
        auto along = [&](double t) {
            std::vector<double> x(n);
            for (std::size_t d = 0; d < n; ++d) x[d] = centroid[d] + t * (s[n][d] - centroid[d]);
            return x;
        };
        const auto xr = along(-1.0);
        const double fr = eval(xr);
        if (fr < fv[0]) {
            const auto xe = along(-2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                s[n] = xe;
                fv[n] = fe;
            } else {
                s[n] = xr;
                fv[n] = fr;
            }
            continue;
        }
        if (fr < fv[n - 1]) {
            s[n] = xr;
            fv[n] = fr;
            continue;
        }
        const bool outside = fr < fv[n];
        const auto xc = along(outside ? -0.5 : 0.5);
        const double fc = eval(xc);
        if (fc < (outside ? fr : fv[n])) {
            s[n] = xc;
            fv[n] = fc;
            continue;
        }
        for (std::size_t k = 1; k <= n; ++k) {
            for (std::size_t d = 0; d < n; ++d) s[k][d] = s[0][d] + 0.5 * (s[k][d] - s[0][d]);
            fv[k] = eval(s[k]);
        }
    }
    const auto best = std::min_element(fv.begin(), fv.end()) - fv.begin();
    r.x = s[best];
    r.f = fv[best];
    return r;
}

}  // namespace oracle
