#include "mcflab/errors.hpp"
#include "mcflab/flows.hpp"
#include "mcflab/version.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

namespace mcflab {

std::string to_string(Termination reason)
{
    switch (reason) {
    case Termination::TimeBudget:
        return "time budget";
    case Termination::Extinction:
        return "extinction";
    case Termination::Singularity:
        return "singularity";
    case Termination::NumericalFailure:
        return "numerical failure";
    case Termination::Stationary:
        return "stationary";
    }
    return "unknown";
}

void FlowTrace::write_diagnostics_csv(const std::filesystem::path& path) const
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out.precision(12);
    out << "# mcflab " << kVersion << " termination: " << to_string(termination) << '\n';
    out << "t,area,tc,entropy,maxH,minEdge\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        out << times[i] << ',' << measure[i] << ',' << total_curvature[i] << ',' << entropy[i] << ','
            << max_curvature[i] << ',' << min_edge[i] << '\n';
    }
}

Eigen::MatrixXd curve_curvature_vectors(const DiscreteCurve& curve)
{
    const Eigen::Index n = curve.size();
    Eigen::MatrixXd k(curve.dimension(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd back = curve.vertex(i) - curve.vertex(i - 1);
        const Eigen::VectorXd fwd = curve.vertex(i + 1) - curve.vertex(i);
        const double lb = back.norm();
        const double lf = fwd.norm();
        k.col(i) = (2.0 / (lb + lf)) * (fwd / lf - back / lb);
    }
    return k;
}

FlowTrace csf_run(const DiscreteCurve& curve, double t_end, const CurveFlowOptions& options)
{
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
        throw PreconditionError("csf: end time must be finite and nonnegative");
    }
    if (!(options.dt_safety > 0.0) || options.dt_safety > 0.5) {
        throw PreconditionError("csf: dt safety factor must lie in (0, 0.5]");
    }
    require_simple(curve);

    const double length0 = curve.length();
    const double scale0 = length0 * length0;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const Eigen::Index count = curve.size();

    FlowTrace trace;
    DiscreteCurve cur = curve;
    double t = 0.0;
    std::size_t step = 0;
    auto finish = [&](Termination reason, std::string message) {
        trace.termination = reason;
        trace.message = std::move(message);
        if (trace.curves.empty() || trace.curves.back().step != step) {
            trace.curves.push_back({t, step, cur});
        }
    };
    trace.curves.push_back({t, step, cur});

    while (true) {
        const Eigen::MatrixXd kappa = curve_curvature_vectors(cur);
        const double len = cur.length();
        const double hmin = cur.min_edge_length();
        trace.times.push_back(t);
        trace.measure.push_back(len);
        trace.total_curvature.push_back(exterior_angle_sum(cur));
        trace.entropy.push_back(nan);
        trace.max_curvature.push_back(kappa.colwise().norm().maxCoeff());
        trace.min_edge.push_back(hmin);

        if (len < options.extinction_fraction * length0) {
            finish(Termination::Extinction, "length below extinction tolerance");
            break;
        }
        if (t >= t_end) {
            finish(Termination::TimeBudget, "reached end time");
            break;
        }
        if (step >= options.max_steps) {
            finish(Termination::TimeBudget, "step budget exhausted");
            break;
        }
        double dt = options.dt_safety * hmin * hmin;
        if (dt < 1e-12 * scale0) {
            finish(Termination::Singularity, "time step underflow");
            break;
        }
        dt = std::min(dt, t_end - t);

        std::optional<DiscreteCurve> moved;
        try {
            moved.emplace(Eigen::MatrixXd(cur.vertices() + dt * kappa));
        } catch (const DegeneracyError&) {
            finish(Termination::Singularity, "edge collapsed");
            break;
        }
        if (moved->max_edge_length() > options.resample_ratio * moved->min_edge_length()) {
            moved = resample_uniform(*moved, count);
        }
        if (options.check_simplicity && !is_simple(*moved)) {
            finish(Termination::Singularity, "curve lost simplicity");
            break;
        }
        cur = std::move(*moved);
        t += dt;
        ++step;
        if (options.snapshot_every > 0 && step % options.snapshot_every == 0) {
            trace.curves.push_back({t, step, cur});
        }
    }
    return trace;
}

} // namespace mcflab
