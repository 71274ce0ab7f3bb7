#include "mcflab/errors.hpp"
#include "mcflab/functionals.hpp"

#include "../common/parallel.hpp"
#include "search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

namespace mcflab {

namespace {

double point_segment_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& a,
                              const Eigen::VectorXd& b)
{
    const Eigen::VectorXd ab = b - a;
    const double len2 = ab.squaredNorm();
    const double u = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (a + u * ab - p).norm();
}

double angle_between(const Eigen::VectorXd& p, const Eigen::VectorXd& q)
{
    const Eigen::VectorXd up = p.normalized();
    const Eigen::VectorXd uq = q.normalized();
    return 2.0 * std::atan2((up - uq).norm(), (up + uq).norm());
}

} // namespace

double cone_density(const DiscreteCurve& curve, const Eigen::VectorXd& v, double rel_tol)
{
    if (v.size() != curve.dimension()) {
        throw PreconditionError("cone_density: vertex dimension does not match the curve");
    }
    if (!v.allFinite()) {
        throw PreconditionError("cone_density: non-finite vertex");
    }
    const double tol = rel_tol * curve.bbox_diagonal();
    const Eigen::Index n = curve.size();
    std::vector<char> through_vertex(static_cast<std::size_t>(n), 0);
    double nearest = std::numeric_limits<double>::infinity();
    bool on_curve = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = point_segment_distance(v, curve.vertex(i), curve.vertex(i + 1));
        nearest = std::min(nearest, d);
        if (d <= tol) {
            through_vertex[static_cast<std::size_t>(i)] = 1;
            on_curve = true;
        }
    }
    if (!on_curve && nearest <= 2.0 * tol) {
        throw AmbiguityError("cone_density: vertex lies " + std::to_string(nearest) +
                             " from the curve, inside the ambiguity band of tolerance " +
                             std::to_string(tol) + "; adjust the on-curve tolerance");
    }
    double swept = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        // An edge through v projects to a point (or two antipodal points).
        if (through_vertex[static_cast<std::size_t>(i)]) {
            continue;
        }
        swept += angle_between(curve.vertex(i) - v, curve.vertex(i + 1) - v);
    }
    return swept / (2.0 * std::numbers::pi) + (on_curve ? 0.5 : 0.0);
}

FunctionalReport vision_number(const DiscreteCurve& curve, const VisionOptions& options)
{
    const Eigen::Index n = curve.size();
    const Eigen::Index dim = curve.dimension();
    const double diam = curve.bbox_diagonal();
    long evaluations = 0;

    auto density = [&curve](const Eigen::VectorXd& v) {
        try {
            return cone_density(curve, v);
        } catch (const AmbiguityError&) {
            return -std::numeric_limits<double>::infinity();
        }
    };

    // Candidate pool: the vertices themselves, the centroid, and random
    // points of the convex hull.
    std::vector<Eigen::VectorXd> pool;
    for (Eigen::Index i = 0; i < n; ++i) {
        pool.emplace_back(curve.vertex(i));
    }
    pool.push_back(curve.centroid());
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    std::exponential_distribution<double> expo(1.0);
    for (int k = 0; k < options.random_candidates; ++k) {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(dim);
        double total = 0.0;
        for (Eigen::Index j = 0; j <= dim; ++j) {
            const double w = expo(rng);
            p += w * curve.vertex(pick(rng));
            total += w;
        }
        pool.push_back(p / total);
    }
    std::vector<double> pool_values(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        pool_values[i] = density(pool[i]);
    }
    evaluations += static_cast<long>(pool.size());

    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pool_values[a] > pool_values[b]; });
    std::vector<std::size_t> starts;
    for (std::size_t idx : order) {
        if (static_cast<int>(starts.size()) >= options.starts) {
            break;
        }
        const bool distinct = std::all_of(starts.begin(), starts.end(), [&](std::size_t s) {
            return (pool[s] - pool[idx]).norm() > 1e-3 * diam;
        });
        if (distinct && std::isfinite(pool_values[idx])) {
            starts.push_back(idx);
        }
    }

    const long remaining = std::max<long>(0, options.budget - evaluations);
    const long per_start = starts.empty() ? 0 : remaining / static_cast<long>(starts.size());
    std::vector<detail::SearchResult> runs(starts.size());
    detail::parallel_for(starts.size(), options.threads, [&](std::size_t s) {
        runs[s] = detail::nelder_mead_max(density, pool[starts[s]], 0.05 * diam, per_start, 1e-10,
                                          1e-7 * diam);
    });

    FunctionalReport report;
    report.name = "vision";
    report.value = pool_values[order.front()];
    report.argmax_point = pool[order.front()];
    report.error_estimate = 0.0;
    for (const detail::SearchResult& r : runs) {
        evaluations += r.evaluations;
        if (r.value > report.value) {
            report.value = r.value;
            report.argmax_point = r.x;
            report.error_estimate = std::max(0.0, r.spread);
        }
    }
    report.evaluations = evaluations;
    return report;
}

} // namespace mcflab
