#include "mcflab/errors.hpp"
#include "mcflab/flows.hpp"

#include <cmath>
#include <numbers>

namespace mcflab {

MonotonicityReport monotonicity_audit(const FlowTrace& trace, const std::optional<DiscreteCurve>& boundary,
                                      double slack)
{
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < trace.entropy.size(); ++i) {
        if (!std::isnan(trace.entropy[i])) {
            idx.push_back(i);
        }
    }
    if (idx.size() < 3) {
        throw PreconditionError("monotonicity audit: need at least 3 entropy samples, trace has " +
                                std::to_string(idx.size()));
    }
    MonotonicityReport rep;
    rep.samples = idx.size();
    rep.slack = slack;
    rep.vision = boundary ? vision_number(*boundary).value : 0.0;

    for (std::size_t k = 1; k < idx.size(); ++k) {
        const double prev = trace.entropy[idx[k - 1]];
        const double now = trace.entropy[idx[k]];
        rep.worst_increase = std::max(rep.worst_increase, (now - prev) / prev);
    }
    rep.monotone = rep.worst_increase <= slack;

    const double t0 = trace.times.front();
    const double area0 = trace.measure.front();
    for (std::size_t i : idx) {
        const double dt = trace.times[i] - t0;
        if (!(dt > 0.0)) {
            continue;
        }
        const double bound = area0 / (4.0 * std::numbers::pi * dt) + rep.vision;
        rep.worst_bound_excess = std::max(rep.worst_bound_excess, (trace.entropy[i] - bound) / bound);
    }
    rep.bound_holds = rep.worst_bound_excess <= slack;
    return rep;
}

} // namespace mcflab
