#include "mcflab/cli.hpp"
#include "mcflab/curve.hpp"
#include "mcflab/deformation.hpp"
#include "mcflab/errors.hpp"
#include "mcflab/flows.hpp"
#include "mcflab/functionals.hpp"
#include "mcflab/linking.hpp"
#include "mcflab/shapes.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

namespace mcflab::cli {

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool ok;
    std::string detail;
};

template <typename... T>
std::string str(const T&... parts)
{
    std::ostringstream s;
    s.precision(8);
    (s << ... << parts);
    return s.str();
}

OrientedLoop hopf_loop(bool second)
{
    const int n = 96;
    Eigen::Matrix3Xd p(3, n);
    for (int i = 0; i < n; ++i) {
        const double s = 2.0 * kPi * i / n;
        p.col(i) = second ? Vec3(1.0 + std::cos(s), 0.0, std::sin(s)) : Vec3(std::cos(s), std::sin(s), 0.0);
    }
    return OrientedLoop(std::move(p));
}

Outcome fenchel()
{
    const double tc = exterior_angle_sum(shapes::circle(1.0, 100));
    if (std::abs(tc - 2.0 * kPi) > 1e-6) {
        return {false, str("100-gon tc ", tc)};
    }
    for (std::uint64_t s = 0; s < 20; ++s) {
        const double t = exterior_angle_sum(shapes::random_smooth(s, 200));
        if (t < 2.0 * kPi - 1e-6) {
            return {false, str("random curve ", s, " has tc ", t)};
        }
    }
    return {true, str("100-gon tc ", tc)};
}

Outcome cone_density_disk()
{
    const DiscreteCurve c = shapes::circle(1.0, 256);
    const double inside = cone_density(c, Eigen::Vector3d(0.2, -0.1, 0.0));
    const double on = cone_density(c, c.vertex(0));
    const double above = cone_density(c, Eigen::Vector3d(0.0, 0.0, 1.0));
    const bool ok = std::abs(inside - 1.0) < 1e-6 && std::abs(on - 1.0) < 1e-2 && above < 1.0;
    return {ok, str("inside ", inside, " on ", on, " above ", above)};
}

Outcome vision_bound(std::uint64_t seed, int threads)
{
    VisionOptions opt;
    opt.seed = seed;
    opt.threads = threads;
    opt.budget = 2000;
    const DiscreteCurve c = shapes::saddle(0.5, 2, 128);
    const double vis = vision_number(c, opt).value;
    const double bound = exterior_angle_sum(c) / (2.0 * kPi);
    return {vis <= bound + 1e-3, str("vision ", vis, " tc/2pi ", bound)};
}

Outcome hopf(std::uint64_t seed)
{
    const OrientedLoop a = hopf_loop(false);
    const OrientedLoop b = hopf_loop(true);
    const int ab = linking_number(a, b, seed);
    const int ba = linking_number(b, a, seed);
    const int rev = linking_number(a.reversed(), b, seed);
    return {std::abs(ab) == 1 && ab == ba && rev == -ab, str("lk ", ab, " swapped ", ba, " reversed ", rev)};
}

Outcome lambda_values()
{
    const int disk = lambda_invariant(shapes::disk(1.0, 24, 3));
    const int mob = lambda_invariant(shapes::mobius_strip());
    const bool ok = disk == 0 && std::abs(mob) == 2;
    return {ok, str("disk ", disk, " mobius ", mob)};
}

Outcome csf_circle()
{
    const FlowTrace tr = csf_run(shapes::circle(1.0, 100), 0.3);
    const double r = tr.measure.back() / tr.measure.front();
    const double expect = std::sqrt(1.0 - 2.0 * tr.times.back());
    return {std::abs(r / expect - 1.0) < 0.01, str("radius ", r, " expected ", expect)};
}

Outcome disk_stationary()
{
    const TriangleMesh disk = shapes::disk(1.0, 24, 4);
    MeshFlowOptions opt;
    opt.entropy_every = -1;
    const FlowTrace tr = mcf_run(disk, 0.01, opt);
    double worst = 0.0;
    const auto& end = tr.meshes.back().mesh.vertices();
    for (std::size_t i = 0; i < end.size() && i < disk.num_vertices(); ++i) {
        worst = std::max(worst, (end[i] - disk.vertices()[i]).norm());
    }
    return {worst < 1e-10 && end.size() == disk.num_vertices(), str("displacement ", worst)};
}

Outcome shrinkers()
{
    const double plane = shrinker_residual(shapes::square(4.0, 8)).sup;
    const double sphere = shrinker_residual(shapes::icosphere(2.0, 3)).sup;
    return {plane < 1e-6 && sphere < 0.02, str("plane ", plane, " sphere ", sphere)};
}

Outcome deform_quadrilateral(std::uint64_t seed, int threads)
{
    DeformOptions opt;
    opt.seed = seed;
    opt.threads = threads;
    opt.samples_per_stage = 10;
    const DiscreteCurve c = shapes::twisted_quadrilateral(1.0, 20);
    const DeformationPath p = deform_to_convex(c, exterior_angle_sum(c) + 1e-9, opt);
    return {is_planar_convex(p.curves.back()) && p.worst_tc_increase() <= 1e-6,
            str(p.size(), " samples, worst tc increase ", p.worst_tc_increase())};
}

Outcome cylinder_entropy(std::uint64_t seed, int threads)
{
    EntropyOptions opt;
    opt.seed = seed;
    opt.threads = threads;
    const TriangleMesh cyl = shapes::cylinder(std::sqrt(2.0), 4.0, 64, 48);
    const double e = entropy(cyl, std::nullopt, opt).value;
    const double sigma = std::sqrt(2.0 * kPi / std::exp(1.0));
    return {std::abs(e / sigma - 1.0) < 0.01, str("entropy ", e, " target ", sigma)};
}

Outcome disk_entropy(std::uint64_t seed, int threads)
{
    EntropyOptions opt;
    opt.seed = seed;
    opt.threads = threads;
    const TriangleMesh disk = shapes::disk(1.0, 48, 8);
    const DiscreteCurve boundary(Eigen::MatrixXd(disk.loop_points(0)));
    const double e = entropy(disk, boundary, opt).value;
    return {std::abs(e - 1.0) < 0.02, str("entropy ", e)};
}

Outcome sphere_flow()
{
    MeshFlowOptions opt;
    opt.entropy_every = -1;
    const FlowTrace tr = mcf_run(shapes::icosphere(1.0, 3), 0.2, opt);
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const double r = std::sqrt(tr.measure[i] / tr.measure.front());
        worst = std::max(worst, std::abs(r / std::sqrt(1.0 - 4.0 * tr.times[i]) - 1.0));
    }
    return {worst < 0.02, str("worst relative radius error ", worst)};
}

Outcome mobius_flow_lambda()
{
    MeshFlowOptions opt;
    opt.entropy_every = -1;
    opt.snapshot_every = 20;
    const FlowTrace tr = mcf_run(shapes::mobius_strip(), 0.02, opt);
    const int first = lambda_invariant(tr.meshes.front().mesh);
    for (const auto& snap : tr.meshes) {
        const int l = lambda_invariant(snap.mesh);
        if (l != first) {
            return {false, str("lambda changed from ", first, " to ", l, " at t=", snap.t)};
        }
    }
    return {first != 0, str("lambda ", first, " at ", tr.meshes.size(), " times")};
}

} // namespace

std::vector<CheckResult> run_suite(const std::string& suite, std::uint64_t seed, int threads,
                                   std::ostream& progress)
{
    if (suite != "fast" && suite != "full") {
        throw PreconditionError("verify: suite must be fast or full");
    }
    std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
        {"fenchel", fenchel},
        {"cone-density", cone_density_disk},
        {"vision-bound", [&] { return vision_bound(seed, threads); }},
        {"hopf-link", [&] { return hopf(seed); }},
        {"lambda", lambda_values},
        {"csf-circle", csf_circle},
        {"disk-stationary", disk_stationary},
        {"shrinker-residuals", shrinkers},
        {"deform", [&] { return deform_quadrilateral(seed, threads); }},
    };
    if (suite == "full") {
        checks.emplace_back("cylinder-entropy", [&] { return cylinder_entropy(seed, threads); });
        checks.emplace_back("disk-entropy", [&] { return disk_entropy(seed, threads); });
        checks.emplace_back("sphere-flow", sphere_flow);
        checks.emplace_back("mobius-lambda-flow", mobius_flow_lambda);
    }
    std::vector<CheckResult> results;
    for (const auto& [name, fn] : checks) {
        CheckResult r{name, false, {}};
        try {
            const Outcome o = fn();
            r.passed = o.ok;
            r.detail = o.detail;
        } catch (const std::exception& e) {
            r.detail = std::string("threw: ") + e.what();
        }
        progress << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        results.push_back(std::move(r));
    }
    return results;
}

} // namespace mcflab::cli
