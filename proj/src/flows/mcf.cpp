#include "mcflab/errors.hpp"
#include "mcflab/flows.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <limits>
#include <sstream>

namespace mcflab {

namespace {

std::optional<DiscreteCurve> entropy_boundary(const TriangleMesh& mesh)
{
    if (mesh.boundary_loops().size() == 1) {
        return DiscreteCurve(mesh.loop_points(0));
    }
    return std::nullopt;
}

// Cotangent Laplacian: (L x)_i = sum_j w_ij (x_j - x_i), w_ij = (cot a + cot b) / 2.
Eigen::SparseMatrix<double> cotan_laplacian(const std::vector<Vec3>& x, const std::vector<Face>& faces)
{
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(faces.size() * 12);
    for (const Face& f : faces) {
        for (int k = 0; k < 3; ++k) {
            const int i = f[k];
            const int j = f[(k + 1) % 3];
            const int o = f[(k + 2) % 3];
            const Vec3 u = x[i] - x[o];
            const Vec3 v = x[j] - x[o];
            const double w = 0.5 * u.dot(v) / u.cross(v).norm();
            trip.emplace_back(i, j, w);
            trip.emplace_back(j, i, w);
            trip.emplace_back(i, i, -w);
            trip.emplace_back(j, j, -w);
        }
    }
    Eigen::SparseMatrix<double> L(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(x.size()));
    L.setFromTriplets(trip.begin(), trip.end());
    return L;
}

// (A - dt L) x_new = A x_old + dt A v_extra on the free vertices.
std::vector<Vec3> implicit_step(const std::vector<Vec3>& x, const std::vector<Face>& faces,
                                const std::vector<bool>& fixed, const std::vector<double>& area,
                                const std::vector<Vec3>& extra, double dt)
{
    const std::size_t n = x.size();
    std::vector<int> index(n, -1);
    int free_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!fixed[i]) {
            index[i] = free_count++;
        }
    }
    const Eigen::SparseMatrix<double> L = cotan_laplacian(x, faces);
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::MatrixXd rhs(free_count, 3);
    for (std::size_t i = 0; i < n; ++i) {
        if (index[i] >= 0) {
            rhs.row(index[i]) = area[i] * (x[i] + dt * extra[i]).transpose();
            trip.emplace_back(index[i], index[i], area[i]);
        }
    }
    for (int col = 0; col < L.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(L, col); it; ++it) {
            const int r = static_cast<int>(it.row());
            const int c = static_cast<int>(it.col());
            if (index[r] < 0) {
                continue;
            }
            if (index[c] >= 0) {
                trip.emplace_back(index[r], index[c], -dt * it.value());
            } else {
                rhs.row(index[r]) += dt * it.value() * x[c].transpose();
            }
        }
    }
    Eigen::SparseMatrix<double> A(free_count, free_count);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success) {
        throw DegeneracyError("semi-implicit step: factorization failed");
    }
    const Eigen::MatrixXd sol = solver.solve(rhs);
    std::vector<Vec3> out = x;
    for (std::size_t i = 0; i < n; ++i) {
        if (index[i] >= 0) {
            out[i] = sol.row(index[i]).transpose();
        }
    }
    return out;
}

struct Curvature {
    std::vector<Vec3> H;
    std::vector<double> area;
    double max_norm = 0.0;
};

Curvature curvature_of(const TriangleMesh& mesh)
{
    Curvature c;
    detail::mean_curvature_vectors(mesh.vertices(), mesh.faces(), mesh.fixed_mask(), c.H, c.area);
    for (std::size_t i = 0; i < c.H.size(); ++i) {
        if (!mesh.fixed_mask()[i]) {
            c.max_norm = std::max(c.max_norm, c.H[i].norm());
        }
    }
    return c;
}

std::vector<Vec3> face_normals(const TriangleMesh& mesh)
{
    std::vector<Vec3> n;
    n.reserve(mesh.num_faces());
    const auto& x = mesh.vertices();
    for (const Face& f : mesh.faces()) {
        n.push_back((x[f[1]] - x[f[0]]).cross(x[f[2]] - x[f[0]]).normalized());
    }
    return n;
}

double edge_ratio(const TriangleMesh& mesh) { return mesh.min_edge_length() / mesh.max_edge_length(); }

FlowTrace run_mesh_flow(const TriangleMesh& mesh, double t_end, const MeshFlowOptions& opt,
                        bool renormalized)
{
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
        throw PreconditionError("mesh flow: end time must be finite and nonnegative");
    }
    if (!(opt.dt_safety > 0.0) || opt.dt_safety > 0.5) {
        throw PreconditionError("mesh flow: dt safety factor must lie in (0, 0.5]");
    }
    if (mesh.empty()) {
        throw PreconditionError("mesh flow: empty mesh");
    }
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
        if (mesh.is_boundary_vertex(static_cast<int>(i)) && !mesh.fixed_mask()[i]) {
            throw PreconditionError("mesh flow: boundary vertices must be flagged fixed");
        }
    }

    const double diam = mesh.bbox_diagonal();
    const double blowup = opt.blowup_factor / diam;
    const double min_edge_limit = opt.min_edge_factor * diam;
    const std::size_t max_vertices = 8 * mesh.num_vertices() + 64;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const std::optional<DiscreteCurve> gamma = entropy_boundary(mesh);
    const bool entropy_possible = mesh.boundary_loops().size() <= 1;

    std::size_t entropy_every = 0;
    if (opt.entropy_every > 0) {
        entropy_every = static_cast<std::size_t>(opt.entropy_every);
    } else if (opt.entropy_every == 0) {
        const double h = mesh.min_edge_length();
        double dt0 = opt.dt_safety * h * h * (opt.semi_implicit ? opt.implicit_dt_factor : 1.0);
        const double expected = std::ceil(t_end / dt0);
        entropy_every = std::max<std::size_t>(1, static_cast<std::size_t>(expected / 50.0));
    }

    FlowTrace trace;
    TriangleMesh cur = mesh;
    Curvature curv = curvature_of(cur);
    double t = 0.0;
    std::size_t step = 0;
    double doubling_level = std::max(curv.max_norm, 1.0 / diam);
    auto finish = [&](Termination reason, std::string message) {
        trace.termination = reason;
        trace.message = std::move(message);
        if (trace.meshes.empty() || trace.meshes.back().step != step) {
            trace.meshes.push_back({t, step, cur});
        }
    };
    trace.meshes.push_back({t, step, cur});

    while (true) {
        const double hmin = cur.min_edge_length();
        trace.times.push_back(t);
        trace.measure.push_back(cur.area());
        trace.total_curvature.push_back(nan);
        double e = nan;
        if (entropy_every > 0 && entropy_possible && step % entropy_every == 0) {
            try {
                e = entropy(cur, gamma, opt.entropy).value;
            } catch (const Error&) {
                e = nan;
            }
        }
        trace.entropy.push_back(e);
        trace.max_curvature.push_back(curv.max_norm);
        trace.min_edge.push_back(hmin);

        if (curv.max_norm > blowup) {
            finish(Termination::Singularity, "curvature exceeds blow-up threshold");
            break;
        }
        if (hmin < min_edge_limit) {
            finish(Termination::Singularity, "edge length below collapse threshold");
            break;
        }
        if (opt.stationary_tolerance > 0.0 && curv.max_norm * diam < opt.stationary_tolerance) {
            finish(Termination::Stationary, "mean curvature below stationarity tolerance");
            break;
        }
        if (t >= t_end) {
            finish(Termination::TimeBudget, "reached end time");
            break;
        }
        if (step >= opt.max_steps) {
            finish(Termination::TimeBudget, "step budget exhausted");
            break;
        }
        double dt = opt.dt_safety * hmin * hmin;
        if (opt.semi_implicit) {
            dt *= opt.implicit_dt_factor;
        }
        if (dt < 1e-12 * diam * diam) {
            finish(Termination::Singularity, "time step underflow");
            break;
        }
        dt = std::min(dt, t_end - t);

        const auto& x = cur.vertices();
        const auto& fixed = cur.fixed_mask();
        // Velocity at positions y, given their mean curvature vectors.
        auto velocity = [&](const std::vector<Vec3>& y, const std::vector<Vec3>& H) {
            std::vector<Vec3> v(y.size(), Vec3::Zero());
            const std::vector<Vec3> n = detail::vertex_normals(y, cur.faces());
            for (std::size_t i = 0; i < y.size(); ++i) {
                if (fixed[i]) {
                    continue;
                }
                v[i] = opt.normal_velocity ? Vec3(H[i].dot(n[i]) * n[i]) : H[i];
                if (renormalized) {
                    v[i] += 0.5 * y[i].dot(n[i]) * n[i];
                }
            }
            return v;
        };
        std::vector<Vec3> next;
        try {
            if (opt.semi_implicit) {
                std::vector<Vec3> extra(x.size(), Vec3::Zero());
                if (renormalized) {
                    const std::vector<Vec3> n = detail::vertex_normals(x, cur.faces());
                    for (std::size_t i = 0; i < x.size(); ++i) {
                        extra[i] = 0.5 * x[i].dot(n[i]) * n[i];
                    }
                }
                next = implicit_step(x, cur.faces(), fixed, curv.area, extra, dt);
            } else {
                // Heun's predictor-corrector.
                const std::vector<Vec3> v0 = velocity(x, curv.H);
                std::vector<Vec3> pred = x;
                for (std::size_t i = 0; i < x.size(); ++i) {
                    pred[i] += dt * v0[i];
                }
                std::vector<Vec3> Hp;
                std::vector<double> area_p;
                detail::mean_curvature_vectors(pred, cur.faces(), fixed, Hp, area_p);
                const std::vector<Vec3> v1 = velocity(pred, Hp);
                next = x;
                for (std::size_t i = 0; i < x.size(); ++i) {
                    next[i] += 0.5 * dt * (v0[i] + v1[i]);
                }
            }
        } catch (const DegeneracyError& err) {
            finish(Termination::NumericalFailure, err.what());
            break;
        }

        std::optional<TriangleMesh> moved;
        try {
            moved.emplace(cur.with_positions(std::move(next)));
        } catch (const Error& err) {
            finish(Termination::NumericalFailure, std::string("step degenerated the mesh: ") + err.what());
            break;
        }
        const std::vector<Vec3> n_old = face_normals(cur);
        const std::vector<Vec3> n_new = face_normals(*moved);
        bool tangled = false;
        for (std::size_t f = 0; f < n_old.size(); ++f) {
            if (n_old[f].dot(n_new[f]) < 0.0) {
                tangled = true;
                break;
            }
        }
        if (tangled) {
            finish(Termination::NumericalFailure, "mesh tangled (face normal flipped)");
            break;
        }
        Curvature next_curv;
        try {
            next_curv = curvature_of(*moved);
            if (opt.remesh && edge_ratio(*moved) < opt.remesh_ratio) {
                std::vector<double> k(next_curv.H.size());
                for (std::size_t i = 0; i < k.size(); ++i) {
                    k[i] = next_curv.H[i].norm();
                }
                moved = detail::remesh(*moved, k, max_vertices);
                next_curv = curvature_of(*moved);
            }
        } catch (const Error& err) {
            finish(Termination::NumericalFailure, err.what());
            break;
        }
        cur = std::move(*moved);
        curv = std::move(next_curv);
        t += dt;
        ++step;
        // Extra snapshots whenever max|H| doubles, for blow-up analysis.
        const bool doubled = curv.max_norm > 2.0 * doubling_level;
        if (doubled) {
            doubling_level = curv.max_norm;
        }
        if (doubled || (opt.snapshot_every > 0 && step % opt.snapshot_every == 0)) {
            trace.meshes.push_back({t, step, cur});
        }
    }
    return trace;
}

} // namespace

FlowTrace mcf_run(const TriangleMesh& mesh, double t_end, const MeshFlowOptions& options)
{
    return run_mesh_flow(mesh, t_end, options, false);
}

FlowTrace renormalized_mcf_run(const TriangleMesh& mesh, double t_end, const MeshFlowOptions& options)
{
    return run_mesh_flow(mesh, t_end, options, true);
}

} // namespace mcflab
