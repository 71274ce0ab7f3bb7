#include "mcflab/curve.hpp"
#include "mcflab/deformation.hpp"
#include "mcflab/errors.hpp"
#include "mcflab/flows.hpp"
#include "mcflab/functionals.hpp"
#include "mcflab/linking.hpp"
#include "mcflab/mesh.hpp"
#include "mcflab/shapes.hpp"
#include "mcflab/version.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace mcflab;

namespace {

// Curves cross the boundary as (N, dim) arrays, meshes as (vertices (V, 3), faces (F, 3)).
using RowPoints = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowFaces = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;
using MeshArrays = std::pair<RowPoints, RowFaces>;

DiscreteCurve to_curve(const RowPoints& points)
{
    return DiscreteCurve(Eigen::MatrixXd(points.transpose()));
}

RowPoints from_curve(const DiscreteCurve& c)
{
    return c.vertices().transpose();
}

TriangleMesh to_mesh(const MeshArrays& m)
{
    if (m.first.cols() != 3) {
        throw PreconditionError("mesh vertices must have 3 columns");
    }
    std::vector<Vec3> v(static_cast<std::size_t>(m.first.rows()));
    for (Eigen::Index i = 0; i < m.first.rows(); ++i) {
        v[static_cast<std::size_t>(i)] = m.first.row(i).transpose();
    }
    std::vector<Face> f(static_cast<std::size_t>(m.second.rows()));
    for (Eigen::Index i = 0; i < m.second.rows(); ++i) {
        f[static_cast<std::size_t>(i)] = {m.second(i, 0), m.second(i, 1), m.second(i, 2)};
    }
    return TriangleMesh(std::move(v), std::move(f));
}

MeshArrays from_mesh(const TriangleMesh& m)
{
    RowPoints v(static_cast<Eigen::Index>(m.num_vertices()), 3);
    for (std::size_t i = 0; i < m.num_vertices(); ++i) {
        v.row(static_cast<Eigen::Index>(i)) = m.vertices()[i].transpose();
    }
    RowFaces f(static_cast<Eigen::Index>(m.num_faces()), 3);
    for (std::size_t i = 0; i < m.num_faces(); ++i) {
        for (int k = 0; k < 3; ++k) {
            f(static_cast<Eigen::Index>(i), k) = m.faces()[i][static_cast<std::size_t>(k)];
        }
    }
    return {v, f};
}

py::dict report_dict(const FunctionalReport& r)
{
    py::dict d;
    d["value"] = r.value;
    d["argmax_point"] = r.argmax_point ? py::cast(Eigen::VectorXd(*r.argmax_point)) : py::none();
    d["argmax_scale"] = r.argmax_scale ? py::cast(*r.argmax_scale) : py::none();
    d["error_estimate"] = r.error_estimate;
    d["evaluations"] = r.evaluations;
    return d;
}

py::dict trace_dict(const FlowTrace& tr)
{
    py::dict d;
    d["termination"] = to_string(tr.termination);
    d["message"] = tr.message;
    d["times"] = tr.times;
    d["measure"] = tr.measure;
    d["entropy"] = tr.entropy;
    d["max_curvature"] = tr.max_curvature;
    if (tr.is_curve()) {
        d["total_curvature"] = tr.total_curvature;
        d["final"] = from_curve(tr.curves.back().curve);
    } else {
        d["final"] = from_mesh(tr.meshes.back().mesh);
    }
    return d;
}

std::optional<DiscreteCurve> optional_curve(const std::optional<RowPoints>& p)
{
    if (!p) {
        return std::nullopt;
    }
    return to_curve(*p);
}

} // namespace

PYBIND11_MODULE(_mcflab, m)
{
    m.doc() = "mcflab core";
    m.attr("__version__") = kVersion;

    py::register_exception<Error>(m, "Error");

    m.def("circle", [](double r, int n) { return from_curve(shapes::circle(r, n)); }, py::arg("radius"), py::arg("n"));
    m.def("trefoil", [](int n) { return from_curve(shapes::trefoil(n)); }, py::arg("n"));
    m.def("twisted_quadrilateral",
          [](double h, int per_side) { return from_curve(shapes::twisted_quadrilateral(h, per_side)); },
          py::arg("height"), py::arg("points_per_side"));
    m.def("disk", [](double r, int n, int rings) { return from_mesh(shapes::disk(r, n, rings)); }, py::arg("radius"),
          py::arg("boundary_vertices"), py::arg("rings"));
    m.def("icosphere", [](double r, int sub) { return from_mesh(shapes::icosphere(r, sub)); }, py::arg("radius"),
          py::arg("subdivisions"));
    m.def("mobius_strip", [](int segments, int across) { return from_mesh(shapes::mobius_strip(segments, across)); },
          py::arg("segments") = 64, py::arg("across") = 5);
    m.def("load_mesh", [](const std::string& path) { return from_mesh(load_mesh(path)); }, py::arg("path"));

    m.def("total_curvature", [](const RowPoints& c) { return exterior_angle_sum(to_curve(c)); }, py::arg("curve"));
    m.def(
        "vision_number",
        [](const RowPoints& c, int starts, long budget, std::uint64_t seed) {
            VisionOptions o;
            o.starts = starts;
            o.budget = budget;
            o.seed = seed;
            return report_dict(vision_number(to_curve(c), o));
        },
        py::arg("curve"), py::arg("starts") = 5, py::arg("budget") = 10000, py::arg("seed") = 42);
    m.def(
        "entropy",
        [](const MeshArrays& mesh, const std::optional<RowPoints>& boundary, int starts, long budget,
           std::uint64_t seed) {
            EntropyOptions o;
            o.starts = starts;
            o.budget = budget;
            o.seed = seed;
            return report_dict(entropy(to_mesh(mesh), optional_curve(boundary), o));
        },
        py::arg("mesh"), py::arg("boundary") = py::none(), py::arg("starts") = 5, py::arg("budget") = 10000,
        py::arg("seed") = 42);
    m.def(
        "shrinker_residual", [](const MeshArrays& mesh) { return shrinker_residual(to_mesh(mesh)).sup; },
        py::arg("mesh"));

    m.def(
        "linking_number",
        [](const RowPoints& a, const RowPoints& b) {
            return linking_number(OrientedLoop(to_curve(a)), OrientedLoop(to_curve(b)));
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "lambda_invariant",
        [](const MeshArrays& mesh, std::optional<double> eps) { return lambda_invariant(to_mesh(mesh), eps); },
        py::arg("mesh"), py::arg("epsilon") = py::none());
    m.def(
        "is_generalized_mobius", [](const MeshArrays& mesh) { return is_generalized_mobius(to_mesh(mesh)); },
        py::arg("mesh"));

    m.def(
        "csf",
        [](const RowPoints& c, double t_end, double dt_safety) {
            CurveFlowOptions o;
            o.dt_safety = dt_safety;
            return trace_dict(csf_run(to_curve(c), t_end, o));
        },
        py::arg("curve"), py::arg("t_end"), py::arg("dt_safety") = 0.4);
    m.def(
        "mcf",
        [](const MeshArrays& mesh, double t_end, bool renormalized, int entropy_every, bool remesh) {
            MeshFlowOptions o;
            o.entropy_every = entropy_every;
            o.remesh = remesh;
            const TriangleMesh tm = to_mesh(mesh);
            return trace_dict(renormalized ? renormalized_mcf_run(tm, t_end, o) : mcf_run(tm, t_end, o));
        },
        py::arg("mesh"), py::arg("t_end"), py::arg("renormalized") = false, py::arg("entropy_every") = -1,
        py::arg("remesh") = true);

    m.def(
        "deform_to_convex",
        [](const RowPoints& c, std::optional<double> alpha, int samples) {
            const DiscreteCurve curve = to_curve(c);
            DeformOptions o;
            o.samples_per_stage = samples;
            const DeformationPath p = deform_to_convex(curve, alpha.value_or(exterior_angle_sum(curve) + 1e-9), o);
            py::dict d;
            d["s"] = p.s;
            d["tc"] = p.tc;
            d["simple"] = p.simple;
            d["smoothed_simple"] = p.smoothed_simple;
            d["worst_tc_increase"] = p.worst_tc_increase();
            d["final"] = from_curve(p.curves.back());
            return d;
        },
        py::arg("curve"), py::arg("alpha") = py::none(), py::arg("samples") = 50);
}
