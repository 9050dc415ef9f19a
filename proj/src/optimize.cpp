#include "rqkd/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rqkd::opt {

namespace {

using Point = std::vector<double>;

Point affine(const Point& a, const Point& b, double t)
{
    // a + t (b - a)
    Point out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] + t * (b[i] - a[i]);
    return out;
}

}  // namespace

MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                           std::vector<double> start, const NelderMeadOptions& opts)
{
    const std::size_t n = start.size();
    if (n == 0)
        throw std::invalid_argument("nelder_mead: empty start point");

    std::vector<Point> simplex(n + 1, start);
    for (std::size_t i = 0; i < n; ++i)
        simplex[i + 1][i] += opts.initial_step;
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        values[i] = f(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        std::iota(order.begin(), order.end(), 0);
        // Stable sort keeps ties in index order so runs are reproducible.
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];

        double spread = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                spread = std::max(spread, std::abs(simplex[i][k] - simplex[best][k]));
        const double fspread = values[worst] - values[best];
        if (spread < opts.x_tol && (fspread < opts.f_tol || !std::isfinite(fspread)))
            break;
        if (spread < opts.x_tol * 1e-3)
            break;

        Point centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst)
                continue;
            for (std::size_t k = 0; k < n; ++k)
                centroid[k] += simplex[i][k] / static_cast<double>(n);
        }

        const Point reflected = affine(centroid, simplex[worst], -1.0);
        const double fr = f(reflected);
        if (fr < values[best]) {
            const Point expanded = affine(centroid, simplex[worst], -2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
            continue;
        }
        if (fr < values[second]) {
            simplex[worst] = reflected;
            values[worst] = fr;
            continue;
        }
        const bool outside = fr < values[worst];
        const Point contracted = affine(centroid, outside ? reflected : simplex[worst], 0.5);
        const double fc = f(contracted);
        if (fc < std::min(fr, values[worst])) {
            simplex[worst] = contracted;
            values[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best)
                continue;
            simplex[i] = affine(simplex[best], simplex[i], 0.5);
            values[i] = f(simplex[i]);
        }
    }

    const auto best = static_cast<std::size_t>(
        std::min_element(values.begin(), values.end()) - values.begin());
    return {simplex[best], values[best], it};
}

ScalarResult golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                                double tol)
{
    if (!(hi > lo))
        throw std::invalid_argument("golden_section_max: empty interval");
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    const double fx = f(x);
    if (fx >= fc && fx >= fd)
        return {x, fx};
    return fc >= fd ? ScalarResult{c, fc} : ScalarResult{d, fd};
}

}  // namespace rqkd::opt
