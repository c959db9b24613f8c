#include "rlhmmddm/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rlhmmddm::opt {

namespace {

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void set_identity(std::vector<double>& h, std::size_t n, double scale = 1.0) {
    h.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) h[i * n + i] = scale;
}

}  // namespace

BfgsResult bfgs(const Objective& f, std::vector<double> x0, const BfgsOptions& opts, std::span<const double> h0) {
    const std::size_t n = x0.size();
    BfgsResult res;
    res.x = std::move(x0);
    std::vector<double> g(n), g_new(n), x_new(n), d(n), s(n), y(n), hy(n);

    auto eval = [&](std::span<const double> x, std::span<double> grad) {
        ++res.evaluations;
        const double v = f(x, grad);
        if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
        for (double gi : grad)
            if (!std::isfinite(gi)) return std::numeric_limits<double>::infinity();
        return v;
    };

    res.f = eval(res.x, g);
    res.f_initial = res.f;
    if (!std::isfinite(res.f)) {
        res.message = "objective not finite at the starting point";
        return res;
    }
    if (n == 0) {
        res.converged = true;
        return res;
    }

    bool warm = h0.size() == n * n;
    if (warm)
        res.inv_hessian.assign(h0.begin(), h0.end());
    else
        set_identity(res.inv_hessian, n);
    bool scaled = warm;
    std::vector<double>& H = res.inv_hessian;

    for (res.iterations = 0; res.iterations < opts.max_iter;) {
        if (inf_norm(g) <= opts.grad_tol * (1.0 + std::fabs(res.f))) {
            res.converged = true;
            res.message = "gradient tolerance reached";
            return res;
        }
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc -= H[i * n + k] * g[k];
            d[i] = acc;
        }
        double slope = dot(g, d);
        if (!(slope < 0.0)) {
            set_identity(H, n);
            scaled = false;
            for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
            slope = dot(g, d);
        }
        const double dmax = inf_norm(d);
        if (dmax > opts.max_step) {
            const double r = opts.max_step / dmax;
            for (double& di : d) di *= r;
            slope *= r;
        }

        double step = 1.0, f_new = 0.0;
        bool accepted = false;
        for (int bt = 0; bt < opts.max_backtracks; ++bt) {
            for (std::size_t i = 0; i < n; ++i) x_new[i] = res.x[i] + step * d[i];
            f_new = eval(x_new, g_new);
            if (f_new <= res.f + opts.armijo * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (scaled || warm) {
                // Stale curvature; retry once from steepest descent.
                set_identity(H, n);
                scaled = warm = false;
                continue;
            }
            res.message = "line search failed";
            res.converged = std::fabs(slope) <= 1e3 * opts.grad_tol * (1.0 + std::fabs(res.f));
            return res;
        }

        const double gain = res.f - f_new;
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_new[i] - res.x[i];
            y[i] = g_new[i] - g[i];
        }
        res.x.swap(x_new);
        g.swap(g_new);
        res.f = f_new;
        ++res.iterations;
        if (opts.record_trace) res.trace.push_back(res.f);

        const double sy = dot(s, y);
        if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
            if (!scaled) {
                set_identity(H, n, sy / dot(y, y));
                scaled = true;
            }
            // H <- (I - r s y') H (I - r y s') + r s s'
            const double r = 1.0 / sy;
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t k = 0; k < n; ++k) acc += H[i * n + k] * y[k];
                hy[i] = acc;
            }
            const double yhy = dot(y, hy);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = 0; k < n; ++k)
                    H[i * n + k] += -r * (hy[i] * s[k] + s[i] * hy[k]) + (r * r * yhy + r) * s[i] * s[k];
        }

        if (gain <= opts.f_tol * (1.0 + std::fabs(res.f))) {
            res.converged = true;
            res.message = "function change below tolerance";
            return res;
        }
    }
    res.converged = inf_norm(g) <= opts.grad_tol * (1.0 + std::fabs(res.f));
    res.message = res.converged ? "gradient tolerance reached" : "iteration limit reached";
    return res;
}

Objective with_central_differences(std::function<double(std::span<const double>)> f, double step) {
    return [f = std::move(f), step](std::span<const double> x, std::span<double> grad) {
        const double v = f(x);
        if (grad.empty()) return v;
        std::vector<double> xp(x.begin(), x.end());
        for (std::size_t i = 0; i < xp.size(); ++i) {
            const double orig = xp[i];
            xp[i] = orig + step;
            const double up = f(xp);
            xp[i] = orig - step;
            const double down = f(xp);
            xp[i] = orig;
            grad[i] = (up - down) / (2.0 * step);
        }
        return v;
    };
}

}  // namespace rlhmmddm::opt
