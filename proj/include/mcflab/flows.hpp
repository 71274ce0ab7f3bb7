#pragma once

#include "mcflab/curve.hpp"
#include "mcflab/functionals.hpp"
#include "mcflab/mesh.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mcflab {

enum class Termination { TimeBudget, Extinction, Singularity, NumericalFailure, Stationary };

std::string to_string(Termination reason);

struct CurveSnapshot {
    double t = 0.0;
    std::size_t step = 0;
    DiscreteCurve curve;
};

struct MeshSnapshot {
    double t = 0.0;
    std::size_t step = 0;
    TriangleMesh mesh;
};

/// Per-step diagnostics plus sparse snapshots. The last snapshot is always
/// the final (last good) state.
struct FlowTrace {
    std::vector<double> times;
    /// Length for curves, area for meshes.
    std::vector<double> measure;
    /// Curves only; NaN for meshes.
    std::vector<double> total_curvature;
    /// NaN where not sampled.
    std::vector<double> entropy;
    std::vector<double> max_curvature;
    std::vector<double> min_edge;

    std::vector<CurveSnapshot> curves;
    std::vector<MeshSnapshot> meshes;

    Termination termination = Termination::TimeBudget;
    std::string message;

    bool is_curve() const { return !curves.empty(); }
    std::size_t steps() const { return times.size(); }

    /// Columns t,area,tc,entropy,maxH,minEdge after a version comment line.
    void write_diagnostics_csv(const std::filesystem::path& path) const;
};

struct CurveFlowOptions {
    double dt_safety = 0.4;
    /// Resample by arclength when max/min edge length exceeds this.
    double resample_ratio = 3.0;
    /// Extinction when length drops below this fraction of the initial length.
    double extinction_fraction = 1e-3;
    /// Keep a snapshot every this many steps; 0 keeps only the first and last.
    std::size_t snapshot_every = 0;
    bool check_simplicity = true;
    std::size_t max_steps = 10'000'000;
};

/// Explicit curve-shortening flow in R^n. Velocity is the second difference
/// of position with respect to arclength.
FlowTrace csf_run(const DiscreteCurve& curve, double t_end, const CurveFlowOptions& options = {});

/// Discrete curvature vector of a closed polygon at every vertex.
Eigen::MatrixXd curve_curvature_vectors(const DiscreteCurve& curve);

struct MeshFlowOptions {
    double dt_safety = 0.25;
    /// Implicit Laplacian with explicit vertex areas, dt scaled by implicit_dt_factor.
    bool semi_implicit = false;
    double implicit_dt_factor = 10.0;
    /// Move vertices along the normal part of H only, suppressing the
    /// tangential drift of the cotangent discretization.
    bool normal_velocity = false;
    /// Entropy sample cadence in steps: 0 picks max(1, N/50) for the
    /// expected step count N, negative disables sampling.
    int entropy_every = 0;
    EntropyOptions entropy;
    std::size_t snapshot_every = 0;
    /// Stop once max|H| times the initial diameter falls below this; 0 disables.
    double stationary_tolerance = 0.0;
    /// Singularity once max|H| exceeds blowup_factor / diameter ...
    double blowup_factor = 1e3;
    /// ... or the shortest edge falls below min_edge_factor * diameter.
    double min_edge_factor = 1e-4;
    bool remesh = true;
    /// Remesh whenever min/max edge length drops below this.
    double remesh_ratio = 0.2;
    std::size_t max_steps = 1'000'000;
};

/// Mean curvature flow, explicit steps by Heun's predictor-corrector.
/// Vertices in the mesh's fixed mask never move.
FlowTrace mcf_run(const TriangleMesh& mesh, double t_end, const MeshFlowOptions& options = {});

/// Flow with velocity H + x^perp / 2, whose fixed points are shrinkers.
FlowTrace renormalized_mcf_run(const TriangleMesh& mesh, double t_end,
                               const MeshFlowOptions& options = {});

struct ShrinkerCandidate {
    /// (M(t*) - p) / sqrt(T - t*).
    TriangleMesh mesh;
    Vec3 center = Vec3::Zero();
    double singular_time = 0.0;
    double snapshot_time = 0.0;
    double rescale_factor = 1.0;
    /// Sup of |H + x^perp/2| within rescaled radius 3; infinity when no
    /// singular time could be estimated.
    double residual_sup = 0.0;
    bool boundary_flag = false;
    bool orientable = true;
};

/// Blow-up of a trace that ended with a singularity flag. Throws
/// PreconditionError for other traces.
ShrinkerCandidate detect_and_rescale(const FlowTrace& trace);

struct MonotonicityReport {
    std::size_t samples = 0;
    /// Largest relative increase between consecutive entropy samples.
    double worst_increase = 0.0;
    bool monotone = true;
    /// Largest relative excess of entropy over area/(4 pi (t - t0)) + vis.
    double worst_bound_excess = 0.0;
    bool bound_holds = true;
    double vision = 0.0;
    double slack = 0.02;
};

/// Audits the sampled entropies of a mesh trace. `boundary` is the fixed
/// boundary curve (vision number 0 when absent).
MonotonicityReport monotonicity_audit(const FlowTrace& trace,
                                      const std::optional<DiscreteCurve>& boundary,
                                      double slack = 0.02);

namespace detail {

/// Local remeshing: collapse of isolated short edges, splitting of edges much
/// longer than their neighbours that also under-resolve the curvature
/// (|H| per vertex), then angle-improving flips. Boundary edges and fixed
/// vertices are never touched; area never increases.
TriangleMesh remesh(const TriangleMesh& mesh, const std::vector<double>& curvature,
                    std::size_t max_vertices);

} // namespace detail

} // namespace mcflab
