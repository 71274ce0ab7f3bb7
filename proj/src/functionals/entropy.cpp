#include "mcflab/errors.hpp"
#include "mcflab/functionals.hpp"

#include "../common/parallel.hpp"
#include "search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace mcflab {

double entropy_integrand(const TriangleMesh& mesh, const std::optional<DiscreteCurve>& boundary,
                         const GaussianKernel& kernel)
{
    double value = gaussian_area(mesh, kernel);
    if (boundary) {
        value += exterior_cone_gaussian(*boundary, kernel.center, kernel);
    }
    return value;
}

namespace {

struct SearchSpace {
    Vec3 lo;
    Vec3 hi;
    double log_lambda_lo = 0.0;
    double log_lambda_hi = 0.0;
    double diameter = 0.0;

    Vec3 clamp(const Vec3& v) const { return v.cwiseMax(lo).cwiseMin(hi); }
    double clamp_log_lambda(double mu) const { return std::clamp(mu, log_lambda_lo, log_lambda_hi); }
};

struct Candidate {
    Vec3 v;
    double mu = 0.0;
    double value = -std::numeric_limits<double>::infinity();
};

struct LocalResult {
    Candidate best;
    long evaluations = 0;
    double last_improvement = 0.0;
};

} // namespace

FunctionalReport entropy(const TriangleMesh& mesh, const std::optional<DiscreteCurve>& boundary,
                         const EntropyOptions& options)
{
    if (boundary && boundary->dimension() != 3) {
        throw PreconditionError("entropy: boundary curve must lie in R^3");
    }
    FunctionalReport report;
    report.name = "entropy";
    if (mesh.empty() && !boundary) {
        return report;
    }

    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (const Vec3& p : mesh.vertices()) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    if (boundary) {
        for (Eigen::Index i = 0; i < boundary->size(); ++i) {
            lo = lo.cwiseMin(Vec3(boundary->vertex(i)));
            hi = hi.cwiseMax(Vec3(boundary->vertex(i)));
        }
    }
    SearchSpace space;
    space.diameter = (hi - lo).norm();
    const Vec3 mid = 0.5 * (lo + hi);
    const Vec3 half = 0.5 * options.box_scale * (hi - lo);
    space.lo = mid - half;
    space.hi = mid + half;
    const double d2 = space.diameter * space.diameter;
    space.log_lambda_lo = std::log(options.lambda_low * d2);
    space.log_lambda_hi = std::log(options.lambda_high * d2);

    auto objective = [&](const Vec3& v, double mu) {
        const Vec3 c = space.clamp(v);
        return entropy_integrand(mesh, boundary, GaussianKernel(c, std::exp(space.clamp_log_lambda(mu))));
    };

    // Coarse pool over centers and a log-spaced lambda grid.
    std::vector<Vec3> centers{mid};
    const std::size_t nv = mesh.num_vertices();
    const std::size_t stride = std::max<std::size_t>(1, nv / 16);
    for (std::size_t i = 0; i < nv; i += stride) {
        centers.push_back(mesh.vertices()[i]);
    }
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 16; ++k) {
        Vec3 p;
        for (int j = 0; j < 3; ++j) {
            p[j] = space.lo[j] + unit(rng) * (space.hi[j] - space.lo[j]);
        }
        centers.push_back(p);
    }
    constexpr int kLambdaGrid = 9;
    std::vector<Candidate> pool;
    for (const Vec3& c : centers) {
        for (int j = 0; j < kLambdaGrid; ++j) {
            const double mu = space.log_lambda_lo +
                              (space.log_lambda_hi - space.log_lambda_lo) * j / (kLambdaGrid - 1);
            pool.push_back({c, mu, 0.0});
        }
    }
    detail::parallel_for(pool.size(), options.threads,
                         [&](std::size_t i) { pool[i].value = objective(pool[i].v, pool[i].mu); });
    long evaluations = static_cast<long>(pool.size());

    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pool[a].value > pool[b].value; });
    std::vector<Candidate> starts;
    const double mu_span = space.log_lambda_hi - space.log_lambda_lo;
    for (std::size_t idx : order) {
        if (static_cast<int>(starts.size()) >= options.starts) {
            break;
        }
        const Candidate& c = pool[idx];
        const bool distinct = std::all_of(starts.begin(), starts.end(), [&](const Candidate& s) {
            return (s.v - c.v).norm() > 0.05 * space.diameter ||
                   std::abs(s.mu - c.mu) > 0.05 * mu_span;
        });
        if (distinct) {
            starts.push_back(c);
        }
    }

    const long per_start =
        std::max<long>(0, options.budget - evaluations) / static_cast<long>(std::max<std::size_t>(1, starts.size()));

    // Alternate golden-section refinement in log lambda with a simplex
    // ascent in v at fixed lambda.
    auto local_ascent = [&](Candidate cur) {
        LocalResult out;
        out.best = cur;
        long used = 0;
        for (int round = 0; round < 8 && used < per_start; ++round) {
            const double before = cur.value;
            const double mu_lo = space.clamp_log_lambda(cur.mu - 1.5);
            const double mu_hi = space.clamp_log_lambda(cur.mu + 1.5);
            const detail::SearchResult g = detail::golden_section_max(
                [&](double mu) { return objective(cur.v, mu); }, mu_lo, mu_hi, 1e-4,
                std::min<long>(40, per_start - used));
            used += g.evaluations;
            if (g.value > cur.value) {
                cur.mu = g.x[0];
                cur.value = g.value;
            }
            if (used >= per_start) {
                break;
            }
            const double step = 0.1 * space.diameter * std::pow(0.5, round);
            const detail::SearchResult nm = detail::nelder_mead_max(
                [&](const Eigen::VectorXd& v) { return objective(Vec3(v), cur.mu); }, cur.v, step,
                std::min<long>(150, per_start - used), 1e-10, 1e-6 * space.diameter);
            used += nm.evaluations;
            if (nm.value > cur.value) {
                cur.v = space.clamp(Vec3(nm.x));
                cur.value = nm.value;
            }
            out.last_improvement = cur.value - before;
            if (out.last_improvement < 1e-9) {
                break;
            }
        }
        out.best = cur;
        out.evaluations = used;
        return out;
    };

    std::vector<LocalResult> runs(starts.size());
    detail::parallel_for(starts.size(), options.threads,
                         [&](std::size_t s) { runs[s] = local_ascent(starts[s]); });

    Candidate best = pool[order.front()];
    double improvement = 0.0;
    for (const LocalResult& r : runs) {
        evaluations += r.evaluations;
        if (r.best.value > best.value) {
            best = r.best;
            improvement = r.last_improvement;
        }
    }
    const GaussianKernel kernel(space.clamp(best.v), std::exp(space.clamp_log_lambda(best.mu)));
    double quad_error = gaussian_area_estimate(mesh, kernel).error;
    if (boundary) {
        quad_error += exterior_cone_gaussian_estimate(*boundary, kernel.center, kernel).error;
    }
    report.value = best.value;
    report.argmax_point = Eigen::VectorXd(kernel.center);
    report.argmax_scale = kernel.lambda;
    report.error_estimate = quad_error + std::max(0.0, improvement);
    report.evaluations = evaluations;
    report.scale_at_search_bound = std::abs(best.mu - space.log_lambda_lo) < 1e-3 ||
                                   std::abs(best.mu - space.log_lambda_hi) < 1e-3;
    return report;
}

} // namespace mcflab
