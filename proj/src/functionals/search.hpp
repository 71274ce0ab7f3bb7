#pragma once

// Small derivative-free maximizers shared by the sup searches.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace mcflab::detail {

struct SearchResult {
    Eigen::VectorXd x;
    double value = 0.0;
    long evaluations = 0;
    /// Spread of objective values over the final simplex / bracket.
    double spread = 0.0;
};

/// Nelder-Mead ascent. Stops when the simplex value spread drops below
/// `value_tol` and its diameter below `step_tol`, or after `max_evals`.
inline SearchResult nelder_mead_max(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& start, double initial_step,
                                    long max_evals, double value_tol, double step_tol)
{
    const Eigen::Index n = start.size();
    std::vector<Eigen::VectorXd> pts;
    std::vector<double> vals;
    long evals = 0;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++evals;
        return f(x);
    };
    pts.push_back(start);
    vals.push_back(eval(start));
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd p = start;
        p[i] += initial_step;
        pts.push_back(p);
        vals.push_back(eval(p));
    }
    std::vector<std::size_t> order(pts.size());
    auto sort_desc = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
        std::vector<Eigen::VectorXd> p2;
        std::vector<double> v2;
        for (std::size_t i : order) {
            p2.push_back(pts[i]);
            v2.push_back(vals[i]);
        }
        pts = std::move(p2);
        vals = std::move(v2);
    };
    while (true) {
        sort_desc();
        double diam = 0.0;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            diam = std::max(diam, (pts[i] - pts[0]).norm());
        }
        const double spread = vals.front() - vals.back();
        if ((spread <= value_tol && diam <= step_tol) || evals >= max_evals) {
            return {pts.front(), vals.front(), evals, std::isfinite(spread) ? spread : diam};
        }
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            centroid += pts[static_cast<std::size_t>(i)];
        }
        centroid /= static_cast<double>(n);
        const Eigen::VectorXd& worst = pts.back();
        const Eigen::VectorXd xr = centroid + (centroid - worst);
        const double fr = eval(xr);
        if (fr > vals.front()) {
            const Eigen::VectorXd xe = centroid + 2.0 * (centroid - worst);
            const double fe = eval(xe);
            if (fe > fr) {
                pts.back() = xe;
                vals.back() = fe;
            } else {
                pts.back() = xr;
                vals.back() = fr;
            }
            continue;
        }
        if (fr > vals[vals.size() - 2]) {
            pts.back() = xr;
            vals.back() = fr;
            continue;
        }
        const bool outside = fr > vals.back();
        const Eigen::VectorXd xc =
            outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                    : Eigen::VectorXd(centroid + 0.5 * (worst - centroid));
        const double fc = eval(xc);
        if (fc > (outside ? fr : vals.back())) {
            pts.back() = xc;
            vals.back() = fc;
            continue;
        }
        for (std::size_t i = 1; i < pts.size(); ++i) {
            pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
            vals[i] = eval(pts[i]);
        }
    }
}

/// Golden-section maximization of a unimodal function on [lo, hi].
inline SearchResult golden_section_max(const std::function<double(double)>& f, double lo,
                                       double hi, double tol, long max_evals)
{
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = f(c);
    double fd = f(d);
    long evals = 2;
    while (b - a > tol && evals < max_evals) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        ++evals;
    }
    SearchResult r;
    r.x = Eigen::VectorXd::Constant(1, fc > fd ? c : d);
    r.value = std::max(fc, fd);
    r.evaluations = evals;
    r.spread = std::abs(fc - fd);
    return r;
}

} // namespace mcflab::detail
