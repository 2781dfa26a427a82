#include "fpcredit/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

namespace fpcredit {

RootResult find_root(const std::function<double(double)>& f, double lo, double hi, double f_tol,
                     int max_iterations) {
    RootResult r;
    double a = lo;
    double b = hi;
    double fa = f(a);
    double fb = f(b);
    r.bracket_lo = a;
    r.bracket_hi = b;

    if (std::abs(fa) <= f_tol) {
        r = {a, fa, 0, lo, hi, true, true};
        return r;
    }
    if (std::abs(fb) <= f_tol) {
        r = {b, fb, 0, lo, hi, true, true};
        return r;
    }
    if ((fa > 0.0) == (fb > 0.0)) {
        r.x = std::abs(fa) < std::abs(fb) ? a : b;
        r.fx = std::abs(fa) < std::abs(fb) ? fa : fb;
        return r;
    }
    r.bracketed = true;

    double c = a;
    double fc = fa;
    double d = b - a;
    double e = d;
    constexpr double eps = std::numeric_limits<double>::epsilon();

    for (int it = 1; it <= max_iterations; ++it) {
        r.iterations = it;
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol = 2.0 * eps * std::abs(b) + 1e-300;
        const double m = 0.5 * (c - b);
        if (std::abs(fb) <= f_tol || std::abs(m) <= tol) {
            r.converged = true;
            break;
        }
        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            double p;
            double q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double rr = fb / fc;
                p = s * (2.0 * m * qq * (qq - rr) - (b - a) * (rr - 1.0));
                q = (qq - 1.0) * (rr - 1.0) * (s - 1.0);
            }
            if (p > 0.0)
                q = -q;
            else
                p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
    }
    r.x = b;
    r.fx = fb;
    r.bracket_lo = std::min(b, c);
    r.bracket_hi = std::max(b, c);
    return r;
}

MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                           std::vector<double> start, double initial_step, double f_tol,
                           int max_evaluations, double x_tol) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> simplex(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += initial_step;

    MinimizeResult res;
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = f(simplex[i]);
    res.evaluations = static_cast<int>(n + 1);

    std::vector<std::size_t> order(n + 1);
    auto point = [n](const std::vector<double>& from, const std::vector<double>& to, double t) {
        std::vector<double> p(n);
        for (std::size_t k = 0; k < n; ++k) p[k] = from[k] + t * (to[k] - from[k]);
        return p;
    };

    while (res.evaluations < max_evaluations) {
        std::iota(order.begin(), order.end(), 0);
        // stable sort keeps the result deterministic when values tie
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];
        if (values[worst] - values[best] < f_tol) {
            res.converged = true;
            break;
        }
        double size = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t k = 0; k < n; ++k) size = std::max(size, std::abs(simplex[i][k] - simplex[best][k]));
        if (size < x_tol) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
        }

        const auto reflected = point(centroid, simplex[worst], -1.0);
        const double fr = f(reflected);
        ++res.evaluations;
        if (fr < values[best]) {
            const auto expanded = point(centroid, simplex[worst], -2.0);
            const double fe = f(expanded);
            ++res.evaluations;
            if (fe < fr) {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if (fr < values[second]) {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            const bool outside = fr < values[worst];
            const auto contracted =
                outside ? point(centroid, reflected, 0.5) : point(centroid, simplex[worst], 0.5);
            const double fc = f(contracted);
            ++res.evaluations;
            if (fc < std::min(fr, values[worst])) {
                simplex[worst] = contracted;
                values[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    simplex[i] = point(simplex[best], simplex[i], 0.5);
                    values[i] = f(simplex[i]);
                    ++res.evaluations;
                }
            }
        }
    }

    const auto best = static_cast<std::size_t>(
        std::min_element(values.begin(), values.end()) - values.begin());
    res.x = simplex[best];
    res.fx = values[best];
    return res;
}

}  // namespace fpcredit
