#include "mcflab/cli.hpp"
#include "mcflab/curve.hpp"
#include "mcflab/deformation.hpp"
#include "mcflab/errors.hpp"
#include "mcflab/flows.hpp"
#include "mcflab/functionals.hpp"
#include "mcflab/linking.hpp"
#include "mcflab/mesh.hpp"
#include "mcflab/version.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

namespace mcflab::cli {

namespace {

struct Common {
    std::uint64_t seed = 42;
    int threads = 1;
};

struct FlowArgs {
    std::string input;
    double t_end = 0.0;
    double dt_safety = 0.0;
    bool semi_implicit = false;
    int entropy_every = 0;
    int snapshot_every = 0;
    bool no_remesh = false;
    std::string out_dir = ".";
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--seed", c.seed, "seed for randomized searches")->capture_default_str();
    app->add_option("--threads", c.threads, "worker threads")
        ->check(CLI::Range(1, 256))
        ->capture_default_str();
}

std::filesystem::path prepare_dir(const std::string& dir)
{
    std::filesystem::path p(dir);
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec) {
        throw Error("cannot create output directory " + dir + ": " + ec.message());
    }
    return p;
}

std::string numbered(const std::string& stem, std::size_t i, const std::string& ext)
{
    std::ostringstream s;
    s << stem << '_' << std::setw(5) << std::setfill('0') << i << ext;
    return s.str();
}

// The cone term needs a single closed curve; meshes with several loops (a
// truncated cylinder) are measured without it.
std::optional<DiscreteCurve> mesh_boundary_curve(const TriangleMesh& mesh, std::ostream& err)
{
    const std::size_t loops = mesh.boundary_loops().size();
    if (loops == 0) {
        return std::nullopt;
    }
    if (loops > 1) {
        err << "warning: mesh has " << loops << " boundary loops; no boundary cone is added\n";
        return std::nullopt;
    }
    return DiscreteCurve(Eigen::MatrixXd(mesh.loop_points(0)));
}

void report_flow(const FlowTrace& trace, std::ostream& out)
{
    out << "termination," << to_string(trace.termination) << '\n';
    out << "steps," << trace.steps() << '\n';
    out << "t_final," << std::setprecision(10) << (trace.times.empty() ? 0.0 : trace.times.back()) << '\n';
    if (!trace.message.empty()) {
        out << "message," << trace.message << '\n';
    }
}

} // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err)
{
    // Config tokens go right after the subcommand so that explicit flags,
    // which come later, take precedence.
    std::vector<std::string> args;
    std::vector<std::string> config_tokens;
    try {
        for (std::size_t i = 0; i < raw_args.size(); ++i) {
            const std::string& a = raw_args[i];
            if (a == "--config") {
                if (i + 1 >= raw_args.size()) {
                    err << "error: --config needs a file\n";
                    return kExitUsage;
                }
                config_tokens = read_config(raw_args[++i]);
            } else if (a.rfind("--config=", 0) == 0) {
                config_tokens = read_config(a.substr(9));
            } else {
                args.push_back(a);
            }
        }
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    if (!config_tokens.empty()) {
        if (args.empty()) {
            err << "error: a config file needs a subcommand\n";
            return kExitUsage;
        }
        args.insert(args.begin() + 1, config_tokens.begin(), config_tokens.end());
    }

    CLI::App app{"Discrete total curvature, entropy, linking and flow toolkit", "mcflab"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    Common common;

    // tc
    std::string tc_curve;
    auto* tc = app.add_subcommand("tc", "total curvature of a closed polygon");
    tc->add_option("--curve", tc_curve, "curve CSV")->required()->check(CLI::ExistingFile);
    add_common(tc, common);

    // vision
    std::string vis_curve;
    std::string vis_out;
    VisionOptions vis_opt;
    auto* vis = app.add_subcommand("vision", "vision number of a closed curve");
    vis->add_option("--curve", vis_curve, "curve CSV")->required()->check(CLI::ExistingFile);
    vis->add_option("--starts", vis_opt.starts, "local search starts")->check(CLI::Range(1, 1000))->capture_default_str();
    vis->add_option("--budget", vis_opt.budget, "evaluations per start")->check(CLI::Range(10L, 100000000L))->capture_default_str();
    vis->add_option("--candidates", vis_opt.random_candidates, "random candidate points")->check(CLI::Range(0, 1000000))->capture_default_str();
    vis->add_option("--out-dir", vis_out, "write vision.csv here");
    add_common(vis, common);

    // entropy
    std::string ent_mesh;
    std::string ent_boundary;
    bool ent_no_boundary = false;
    std::string ent_out;
    EntropyOptions ent_opt;
    auto* ent = app.add_subcommand("entropy", "entropy of a mesh with its boundary cone");
    ent->add_option("--mesh", ent_mesh, "OBJ mesh")->required()->check(CLI::ExistingFile);
    auto* bopt = ent->add_option("--boundary", ent_boundary, "boundary curve CSV (default: the mesh boundary)")
                     ->check(CLI::ExistingFile);
    ent->add_flag("--no-boundary", ent_no_boundary, "ignore the boundary cone")->excludes(bopt);
    ent->add_option("--starts", ent_opt.starts, "local search starts")->check(CLI::Range(1, 1000))->capture_default_str();
    ent->add_option("--budget", ent_opt.budget, "evaluations per start")->check(CLI::Range(10L, 100000000L))->capture_default_str();
    ent->add_option("--box-scale", ent_opt.box_scale, "search box scale")->check(CLI::Range(1.0, 100.0))->capture_default_str();
    ent->add_option("--lambda-low", ent_opt.lambda_low, "lowest scale / diameter^2")->check(CLI::Range(1e-12, 1.0))->capture_default_str();
    ent->add_option("--lambda-high", ent_opt.lambda_high, "highest scale / diameter^2")->check(CLI::Range(1.0, 1e12))->capture_default_str();
    ent->add_option("--out-dir", ent_out, "write entropy.csv here");
    add_common(ent, common);

    // link
    std::string link_mesh;
    std::string link_a;
    std::string link_b;
    double link_eps = 0.0;
    auto* lk = app.add_subcommand("link", "linking number of two loops, or the lambda invariant of a mesh");
    auto* lm = lk->add_option("--mesh", link_mesh, "OBJ mesh with one boundary loop")->check(CLI::ExistingFile);
    auto* la = lk->add_option("--curve-a", link_a, "first loop CSV")->check(CLI::ExistingFile);
    auto* lb = lk->add_option("--curve-b", link_b, "second loop CSV")->check(CLI::ExistingFile);
    lk->add_option("--epsilon", link_eps, "push-in distance (default: from the mesh)")->check(CLI::PositiveNumber);
    lm->excludes(la)->excludes(lb);
    la->needs(lb);
    lb->needs(la);
    add_common(lk, common);

    // flows
    FlowArgs fc;
    auto* flow_curve = app.add_subcommand("flow-curve", "curve shortening flow");
    flow_curve->add_option("--curve", fc.input, "curve CSV")->required()->check(CLI::ExistingFile);
    flow_curve->add_option("--t-end", fc.t_end, "time horizon")->required()->check(CLI::PositiveNumber);
    flow_curve->add_option("--dt-safety", fc.dt_safety, "step size factor (default 0.4)")->check(CLI::Range(1e-6, 1.0));
    flow_curve->add_option("--snapshot-every", fc.snapshot_every, "steps between snapshots, 0 = ends only")->check(CLI::NonNegativeNumber);
    flow_curve->add_option("--out-dir", fc.out_dir, "output directory")->capture_default_str();
    add_common(flow_curve, common);

    FlowArgs fm;
    auto add_mesh_flow = [&](CLI::App* sub, FlowArgs& f) {
        sub->add_option("--mesh", f.input, "OBJ mesh")->required()->check(CLI::ExistingFile);
        sub->add_option("--t-end", f.t_end, "time horizon")->required()->check(CLI::PositiveNumber);
        sub->add_option("--dt-safety", f.dt_safety, "step size factor (default 0.25)")->check(CLI::Range(1e-6, 1.0));
        sub->add_flag("--semi-implicit", f.semi_implicit, "backward Euler in the cotan Laplacian");
        sub->add_option("--entropy-every", f.entropy_every, "steps between entropy samples, 0 = auto, -1 = never")
            ->check(CLI::Range(-1, 1000000000));
        sub->add_option("--snapshot-every", f.snapshot_every, "steps between snapshots, 0 = ends only")->check(CLI::NonNegativeNumber);
        sub->add_flag("--no-remesh", f.no_remesh, "disable edge collapse, split and flip");
        sub->add_option("--out-dir", f.out_dir, "output directory")->capture_default_str();
        add_common(sub, common);
    };
    auto* flow_mesh = app.add_subcommand("flow-mesh", "mean curvature flow with fixed boundary");
    add_mesh_flow(flow_mesh, fm);
    FlowArgs fr;
    auto* renorm = app.add_subcommand("renorm-flow", "renormalized mean curvature flow");
    add_mesh_flow(renorm, fr);

    // deform
    std::string def_curve;
    std::optional<double> def_alpha;
    std::string def_out = ".";
    DeformOptions def_opt;
    auto* def = app.add_subcommand("deform", "total-curvature-nonincreasing deformation to a convex curve");
    def->add_option("--curve", def_curve, "curve CSV")->required()->check(CLI::ExistingFile);
    def->add_option("--alpha", def_alpha, "total curvature ceiling (default: that of the curve)")->check(CLI::Range(0.0, 4.0 * std::numbers::pi));
    def->add_option("--samples", def_opt.samples_per_stage, "samples per stage")->check(CLI::Range(2, 100000))->capture_default_str();
    def->add_option("--pieces", def_opt.pieces, "initial polygon vertex count")->check(CLI::Range(3, 4096))->capture_default_str();
    def->add_option("--smoothing-vertices", def_opt.smoothing_vertices, "vertices used when smoothing")->check(CLI::Range(16, 100000))->capture_default_str();
    def->add_option("--out-dir", def_out, "output directory")->capture_default_str();
    add_common(def, common);

    // verify
    std::string suite = "fast";
    auto* ver = app.add_subcommand("verify", "run the invariant suite");
    ver->add_option("--suite", suite, "fast or full")->check(CLI::IsMember({"fast", "full"}))->capture_default_str();
    add_common(ver, common);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*tc) {
            out << exterior_angle_sum(load_curve_csv(tc_curve)) << '\n';
        } else if (*vis) {
            vis_opt.seed = common.seed;
            vis_opt.threads = common.threads;
            const FunctionalReport r = vision_number(load_curve_csv(vis_curve), vis_opt);
            out << r.value << '\n';
            if (!vis_out.empty()) {
                std::ofstream f(prepare_dir(vis_out) / "vision.csv");
                f << "# mcflab " << kVersion << '\n' << kReportCsvHeader << '\n' << to_csv_row(r) << '\n';
            }
        } else if (*ent) {
            ent_opt.seed = common.seed;
            ent_opt.threads = common.threads;
            const TriangleMesh mesh = load_mesh(ent_mesh);
            std::optional<DiscreteCurve> boundary;
            if (!ent_boundary.empty()) {
                boundary = load_curve_csv(ent_boundary);
            } else if (!ent_no_boundary) {
                boundary = mesh_boundary_curve(mesh, err);
            }
            const FunctionalReport r = entropy(mesh, boundary, ent_opt);
            out << r.value << '\n';
            if (r.scale_at_search_bound) {
                err << "warning: maximizing scale sits on the search bound\n";
            }
            if (!ent_out.empty()) {
                std::ofstream f(prepare_dir(ent_out) / "entropy.csv");
                f << "# mcflab " << kVersion << '\n' << kReportCsvHeader << '\n' << to_csv_row(r) << '\n';
            }
        } else if (*lk) {
            if (!link_mesh.empty()) {
                const TriangleMesh mesh = load_mesh(link_mesh);
                const std::optional<double> eps = link_eps > 0.0 ? std::optional<double>(link_eps) : std::nullopt;
                const int lambda = lambda_invariant_detailed(mesh, eps).lambda;
                const bool odd = (std::abs(lambda / 2) % 2) == 1;
                out << "lambda,half_parity,generalized_mobius\n";
                out << lambda << ',' << (odd ? "odd" : "even") << ',' << (lambda != 0 ? "yes" : "no") << '\n';
            } else if (!link_a.empty()) {
                const OrientedLoop a(load_curve_csv(link_a));
                const OrientedLoop b(load_curve_csv(link_b));
                out << linking_number(a, b, common.seed) << '\n';
            } else {
                err << "error: link needs --mesh or both --curve-a and --curve-b\n";
                return kExitUsage;
            }
        } else if (*flow_curve) {
            CurveFlowOptions opt;
            if (fc.dt_safety > 0.0) {
                opt.dt_safety = fc.dt_safety;
            }
            opt.snapshot_every = fc.snapshot_every;
            const FlowTrace trace = csf_run(load_curve_csv(fc.input), fc.t_end, opt);
            const auto dir = prepare_dir(fc.out_dir);
            trace.write_diagnostics_csv(dir / "diagnostics.csv");
            for (std::size_t i = 0; i < trace.curves.size(); ++i) {
                save_curve_csv(trace.curves[i].curve, dir / numbered("curve", i, ".csv"));
            }
            report_flow(trace, out);
        } else if (*flow_mesh || *renorm) {
            const bool renormalized = static_cast<bool>(*renorm);
            const FlowArgs& f = renormalized ? fr : fm;
            MeshFlowOptions opt;
            if (f.dt_safety > 0.0) {
                opt.dt_safety = f.dt_safety;
            }
            opt.semi_implicit = f.semi_implicit;
            opt.entropy_every = f.entropy_every;
            opt.snapshot_every = f.snapshot_every;
            opt.remesh = !f.no_remesh;
            opt.entropy.seed = common.seed;
            opt.entropy.threads = common.threads;
            const TriangleMesh mesh = load_mesh(f.input);
            const FlowTrace trace = renormalized ? renormalized_mcf_run(mesh, f.t_end, opt) : mcf_run(mesh, f.t_end, opt);
            const auto dir = prepare_dir(f.out_dir);
            trace.write_diagnostics_csv(dir / "diagnostics.csv");
            for (std::size_t i = 0; i < trace.meshes.size(); ++i) {
                save_obj(trace.meshes[i].mesh, dir / numbered("mesh", i, ".obj"));
            }
            report_flow(trace, out);
            if (!renormalized && trace.termination == Termination::Singularity) {
                const ShrinkerCandidate c = detect_and_rescale(trace);
                save_obj(c.mesh, dir / "candidate.obj");
                out << "singular_time," << c.singular_time << '\n';
                out << "candidate_residual," << c.residual_sup << '\n';
                out << "boundary_flag," << (c.boundary_flag ? "yes" : "no") << '\n';
                out << "orientable," << (c.orientable ? "yes" : "no") << '\n';
            }
        } else if (*def) {
            def_opt.seed = common.seed;
            def_opt.threads = common.threads;
            const DiscreteCurve curve = load_curve_csv(def_curve);
            const double alpha = def_alpha.value_or(exterior_angle_sum(curve) + 1e-9);
            const auto dir = prepare_dir(def_out);
            auto write = [&](const DeformationPath& path) {
                path.write_audit_csv(dir / "path_audit.csv");
                for (std::size_t i = 0; i < path.size(); ++i) {
                    save_curve_csv(path.curves[i], dir / numbered("sample", i, ".csv"));
                }
            };
            try {
                const DeformationPath path = deform_to_convex(curve, alpha, def_opt);
                write(path);
                out << "samples," << path.size() << '\n';
                out << "final_tc," << std::setprecision(10) << path.tc.back() << '\n';
                out << "worst_tc_increase," << path.worst_tc_increase() << '\n';
            } catch (const DeformationError& e) {
                write(e.partial());
                throw;
            }
        } else if (*ver) {
            const std::vector<CheckResult> results = run_suite(suite, common.seed, common.threads, out);
            int failed = 0;
            for (const auto& r : results) {
                failed += r.passed ? 0 : 1;
            }
            out << (failed == 0 ? "all " : "") << results.size() - static_cast<std::size_t>(failed) << '/'
                << results.size() << " checks passed\n";
            return failed == 0 ? kExitOk : kExitDomain;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitDomain;
    }
    return kExitOk;
}

int run(int argc, const char* const* argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

} // namespace mcflab::cli
