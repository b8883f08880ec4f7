// Pipeline driver: path search, corridor generation, trajectory optimization,
// verification, profiling, tracking simulation, and efficiency benchmarks.
//
// Exit codes: 0 success, 1 bad config or inputs, 2 no path found,
// 3 corridor/solver failure, 4 tracking divergence.

#include "omnitraj/corridor.hpp"
#include "omnitraj/flatness.hpp"
#include "omnitraj/optimizer.hpp"
#include "omnitraj/rotation.hpp"
#include "omnitraj/scenarios.hpp"
#include "omnitraj/serialize.hpp"
#include "omnitraj/simtrack.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

using namespace omnitraj;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct GlobalOpts
{
    std::string configPath;
    std::string outDir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<double> dt;
};

double seconds(const std::chrono::steady_clock::time_point& a,
               const std::chrono::steady_clock::time_point& b)
{
    return std::chrono::duration<double>(b - a).count();
}

PlanConfig loadConfig(const GlobalOpts& opts)
{
    if (opts.configPath.empty())
    {
        throw ConfigError("missing --config");
    }
    PlanConfig cfg = planConfigFromFile(opts.configPath);
    if (opts.seed)
    {
        cfg.rrt.seed = *opts.seed;
    }
    return cfg;
}

PointCloud loadMap(const PlanConfig& cfg)
{
    std::vector<Eigen::Vector3d> points;
    if (!cfg.mapFile.empty())
    {
        points = loadCloudCsv(cfg.mapFile);
    }
    Aabb bounds;
    if (cfg.bounds)
    {
        bounds = *cfg.bounds;
    }
    else
    {
        bounds.lo = cfg.start.position.cwiseMin(cfg.goal.position);
        bounds.hi = cfg.start.position.cwiseMax(cfg.goal.position);
        for (const auto& p : points)
        {
            bounds.expand(p);
        }
        bounds.lo -= Eigen::Vector3d::Constant(1.0);
        bounds.hi += Eigen::Vector3d::Constant(1.0);
    }
    return PointCloud(std::move(points), bounds);
}

ProblemSpec specFromConfig(const PlanConfig& cfg, Corridor corridor)
{
    ProblemSpec spec;
    spec.corridor = std::move(corridor);
    spec.shape = VehicleShape::cuboid(cfg.shapeLx, cfg.shapeLy, cfg.shapeLz);
    spec.start = cfg.start;
    spec.goal = cfg.goal;
    spec.limits = cfg.limits;
    spec.weights = cfg.weights;
    spec.s = cfg.s;
    spec.dPiece = cfg.dPiece;
    spec.solver = cfg.lbfgs;
    return spec;
}

json reportJson(const SolveReport& r)
{
    return json{{"iterations", r.iterations},
                {"evaluations", r.evaluations},
                {"t_opt", r.optimizeSeconds},
                {"final_cost", r.finalCost},
                {"termination", r.termination},
                {"success", r.success},
                {"pieces", r.pieces},
                {"skipped_updates", r.skippedUpdates},
                {"max_violation",
                 json{{"velocity", r.velocityViolation},
                      {"acceleration", r.accelViolation},
                      {"omega", r.omegaViolation},
                      {"corridor", r.corridorViolation}}}};
}

int cmdPlan(const GlobalOpts& opts)
{
    const PlanConfig cfg = loadConfig(opts);
    const PointCloud map = loadMap(cfg);
    fs::create_directories(opts.outDir);

    const auto t0 = std::chrono::steady_clock::now();
    Path path;
    try
    {
        path = rrtSearch(map, cfg.start.position, cfg.goal.position, cfg.rrt);
    }
    catch (const NoPathError& e)
    {
        std::cerr << "plan: no path: " << e.what()
                  << " (nodes explored: " << e.nodesExplored << ")\n";
        return 2;
    }
    path = shortcut(path, map, cfg.rrt.sphereRadius);
    const auto t1 = std::chrono::steady_clock::now();

    Corridor corridor;
    try
    {
        corridor = decompose(path, map, cfg.sfc);
    }
    catch (const SfcError& e)
    {
        std::cerr << "plan: corridor generation failed at segment "
                  << e.segmentIndex << ": " << e.what() << "\n";
        return 3;
    }
    const auto t2 = std::chrono::steady_clock::now();

    const SolveResult solved = solve(specFromConfig(cfg, corridor));
    const auto t3 = std::chrono::steady_clock::now();

    writeFile(opts.outDir + "/path.json", pathToJson(path));
    writeFile(opts.outDir + "/corridor.json", corridorToJson(corridor));
    writeFile(opts.outDir + "/trajectory.json", trajectoryToJson(solved.trajectory));

    json report = reportJson(solved.report);
    report["manifest"] = json{
        {"config", opts.configPath},
        {"out_dir", opts.outDir},
        {"seed", cfg.rrt.seed},
        {"t_rrt", seconds(t0, t1)},
        {"t_sfc", seconds(t1, t2)},
        {"t_opt", seconds(t2, t3)},
        {"artifacts",
         json::array({"path.json", "corridor.json", "trajectory.json", "report.json"})},
        {"resolved_config", json::parse(planConfigToJson(cfg))}};
    writeFile(opts.outDir + "/report.json", report.dump(2) + "\n");

    std::cout << json{{"status", solved.report.success ? "ok" : "solver_failure"},
                      {"pieces", solved.report.pieces},
                      {"iterations", solved.report.iterations},
                      {"final_cost", solved.report.finalCost},
                      {"duration", solved.trajectory.totalDuration()}}
                     .dump()
              << "\n";
    if (!solved.report.success)
    {
        std::cerr << "plan: solver failed: " << solved.report.termination << "\n";
        return 3;
    }
    return 0;
}

int cmdCheck(const GlobalOpts& opts, double corridorTol, double limitSlack)
{
    const PlanConfig cfg = loadConfig(opts);
    const PointCloud map = loadMap(cfg);
    const Trajectory traj =
        trajectoryFromJson(readFile(opts.outDir + "/trajectory.json"));
    const Corridor corridor =
        corridorFromJson(readFile(opts.outDir + "/corridor.json"));

    const PieceAllocation alloc = allocatePieces(corridor, cfg.dPiece);
    if (alloc.pieces != traj.pieceCount())
    {
        std::cerr << "check: piece/polytope count mismatch (allocation "
                  << alloc.pieces << ", trajectory " << traj.pieceCount() << ")\n";
        return 1;
    }

    const VehicleShape shape = VehicleShape::cuboid(cfg.shapeLx, cfg.shapeLy, cfg.shapeLz);
    const Eigen::Vector3d half(0.5 * cfg.shapeLx, 0.5 * cfg.shapeLy, 0.5 * cfg.shapeLz);
    const double dt = opts.dt.value_or(0.005);

    double maxV = 0.0, maxA = 0.0, maxW = 0.0, maxCorridor = 0.0;
    int worstPiece = -1;
    std::vector<bool> pointInHull(map.size(), false);

    const double total = traj.totalDuration();
    const int samples = static_cast<int>(std::floor(total / dt));
    for (int k = 0; k <= samples; ++k)
    {
        const double t = std::min(k * dt, total);
        const auto z = traj.eval(t, 0);
        const auto zd = traj.eval(t, 1);
        const auto zdd = traj.eval(t, 2);
        const Eigen::Vector3d pos = z.head<3>();
        const Eigen::Matrix3d rot = rotmatFromQuat(quatFromRotvec(z.tail<3>()));

        maxV = std::max(maxV, zd.head<3>().norm());
        maxA = std::max(maxA, zdd.head<3>().norm());
        maxW = std::max(maxW, angularVelocity(z.tail<3>(), zd.tail<3>()).norm());

        double local = 0.0;
        const int piece = traj.pieceIndex(t, local);
        const auto& poly = corridor.polys[alloc.pieceToPoly[piece]];
        for (const auto& v : vehicleVerticesWorld(shape, pos, rot))
        {
            const double violation = poly.maxViolation(v);
            if (violation > maxCorridor)
            {
                maxCorridor = violation;
                worstPiece = piece;
            }
        }

        for (std::size_t i = 0; i < map.size(); ++i)
        {
            if (pointInHull[i])
            {
                continue;
            }
            const Eigen::Vector3d body = rot.transpose() * (map.points()[i] - pos);
            if ((body.array().abs() < half.array()).all())
            {
                pointInHull[i] = true;
            }
        }
    }

    int hullHits = 0;
    for (const bool hit : pointInHull)
    {
        hullHits += hit ? 1 : 0;
    }
    maxCorridor = std::max(0.0, maxCorridor);

    const bool pass = hullHits == 0 && maxCorridor <= corridorTol &&
                      maxV <= limitSlack * cfg.limits.vMax &&
                      maxA <= limitSlack * cfg.limits.aMax &&
                      maxW <= limitSlack * cfg.limits.omegaMax;

    const json out{{"pass", pass},
                   {"dt", dt},
                   {"cloud_points_in_hull", hullHits},
                   {"max_velocity", maxV},
                   {"max_acceleration", maxA},
                   {"max_omega", maxW},
                   {"max_corridor_violation", maxCorridor},
                   {"worst_corridor_piece", worstPiece},
                   {"limits",
                    json{{"v_max", cfg.limits.vMax},
                         {"a_max", cfg.limits.aMax},
                         {"omega_max", cfg.limits.omegaMax},
                         {"corridor_tol", corridorTol},
                         {"slack", limitSlack}}}};
    writeFile(opts.outDir + "/check.json", out.dump(2) + "\n");
    std::cout << out.dump() << "\n";
    return pass ? 0 : 3;
}

int cmdProfile(const GlobalOpts& opts)
{
    const PlanConfig cfg = loadConfig(opts);
    const Trajectory traj =
        trajectoryFromJson(readFile(opts.outDir + "/trajectory.json"));
    const auto rows = sampleProfile(traj, opts.dt.value_or(0.005), cfg.inertia);
    writeProfileCsv(opts.outDir + "/profile.csv", rows);

    double maxV = 0.0, maxA = 0.0, maxW = 0.0;
    for (const auto& r : rows)
    {
        maxV = std::max(maxV, r.vNorm);
        maxA = std::max(maxA, r.aNorm);
        maxW = std::max(maxW, r.omegaNorm);
    }
    std::cout << json{{"rows", rows.size()},
                      {"max_vnorm", maxV},
                      {"max_anorm", maxA},
                      {"max_wnorm", maxW}}
                     .dump()
              << "\n";
    return 0;
}

int cmdSimulate(const GlobalOpts& opts)
{
    const PlanConfig cfg = loadConfig(opts);
    const Trajectory traj =
        trajectoryFromJson(readFile(opts.outDir + "/trajectory.json"));
    const double dt = opts.dt.value_or(1e-3);
    TrackResult result;
    try
    {
        result = track(traj, cfg.gains, cfg.inertia, dt);
    }
    catch (const DivergenceError& e)
    {
        writeTrackLogCsv(opts.outDir + "/tracking.csv", e.result.log);
        std::cerr << "simulate: " << e.what() << "\n";
        return 4;
    }
    writeTrackLogCsv(opts.outDir + "/tracking.csv", result.log);
    std::cout << json{{"rms_pos_error", result.rmsPosError},
                      {"max_pos_error", result.maxPosError},
                      {"max_att_error_deg", result.maxAttError * 180.0 / M_PI},
                      {"steps", result.log.size()}}
                     .dump()
              << "\n";
    return 0;
}

int cmdBench(const GlobalOpts& opts, const std::vector<int>& pieceTargets, int reps)
{
    PlanConfig cfg;
    if (!opts.configPath.empty())
    {
        cfg = planConfigFromFile(opts.configPath);
    }
    const std::uint64_t baseSeed = opts.seed.value_or(cfg.rrt.seed);
    fs::create_directories(opts.outDir);

    std::string csv = "target,rep,seed,pieces,n_iter,t_rrt,t_sfc,t_opt,t_norm,status\n";
    for (const int target : pieceTargets)
    {
        for (int rep = 0; rep < reps; ++rep)
        {
            const std::uint64_t seed = baseSeed + 1000 * target + rep;
            FloatingObstacleParams params;
            params.bounds = {{0.0, 0.0, 0.0}, {target + 2.0, 8.0, 6.0}};
            params.obstacles = 3 * target;
            params.start = {1.0, 4.0, 3.0};
            params.goal = {target + 1.0, 4.0, 3.0};
            params.seed = seed;
            const PointCloud map = makeFloatingObstacleMap(params);

            PlanConfig run = cfg;
            run.start.position = params.start;
            run.goal.position = params.goal;
            run.bounds = params.bounds;
            run.rrt.seed = seed;

            std::string status = "ok";
            int pieces = 0, iters = 0;
            double tRrt = 0.0, tSfc = 0.0, tOpt = 0.0, tNorm = 0.0;
            try
            {
                const auto t0 = std::chrono::steady_clock::now();
                Path path = rrtSearch(map, run.start.position, run.goal.position, run.rrt);
                path = shortcut(path, map, run.rrt.sphereRadius);
                const auto t1 = std::chrono::steady_clock::now();
                const Corridor corridor = decompose(path, map, run.sfc);
                const auto t2 = std::chrono::steady_clock::now();
                const SolveResult solved = solve(specFromConfig(run, corridor));
                const auto t3 = std::chrono::steady_clock::now();
                (void)t3;
                tRrt = seconds(t0, t1);
                tSfc = seconds(t1, t2);
                tOpt = solved.report.optimizeSeconds;
                pieces = solved.report.pieces;
                iters = solved.report.iterations;
                tNorm = tOpt / (static_cast<double>(pieces) * std::max(1, iters));
                if (!solved.report.success)
                {
                    status = "solver_failure";
                }
            }
            catch (const std::exception& e)
            {
                status = std::string("failed: ") + e.what();
            }

            char line[256];
            std::snprintf(line, sizeof(line), "%d,%d,%llu,%d,%d,%.6g,%.6g,%.6g,%.6g,%s\n",
                          target, rep, static_cast<unsigned long long>(seed), pieces,
                          iters, tRrt, tSfc, tOpt, tNorm, status.c_str());
            csv += line;
        }
    }
    writeFile(opts.outDir + "/bench.csv", csv);
    std::cout << csv;
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"6-D rigid-body trajectory generation pipeline"};
    app.require_subcommand(0, 1);
    app.fallthrough(); // global flags may follow the subcommand

    GlobalOpts opts;
    bool printDefaults = false;
    app.add_option("--config", opts.configPath, "Run configuration JSON");
    app.add_option("--out", opts.outDir, "Artifact directory");
    std::uint64_t seedValue = 0;
    auto* seedOpt = app.add_option("--seed", seedValue, "Override the RRT seed");
    double dtValue = 0.0;
    auto* dtOpt = app.add_option("--dt", dtValue, "Sampling interval, seconds");
    app.add_flag("--print-defaults", printDefaults, "Print the default config and exit");

    auto* plan = app.add_subcommand("plan", "Search, build the corridor, optimize");
    auto* check = app.add_subcommand("check", "Verify artifacts against the map");
    double corridorTol = 0.01;
    double limitSlack = 1.05;
    check->add_option("--corridor-tol", corridorTol, "Whole-body violation bound, m");
    check->add_option("--limit-slack", limitSlack, "Kinodynamic slack factor");
    auto* profile = app.add_subcommand("profile", "Write the state/input profile CSV");
    auto* simulate = app.add_subcommand("simulate", "Closed-loop tracking simulation");
    auto* bench = app.add_subcommand("bench", "Random-map efficiency benchmark");
    std::vector<int> pieceTargets = {5, 10, 20, 40};
    int reps = 10;
    bench->add_option("--pieces", pieceTargets, "Target piece counts")->delimiter(',');
    bench->add_option("--reps", reps, "Repetitions per target");

    CLI11_PARSE(app, argc, argv);

    if (seedOpt->count() > 0)
    {
        opts.seed = seedValue;
    }
    if (dtOpt->count() > 0)
    {
        opts.dt = dtValue;
    }

    try
    {
        if (printDefaults)
        {
            std::cout << planConfigToJson(defaultPlanConfig());
            return 0;
        }
        if (plan->parsed())
        {
            return cmdPlan(opts);
        }
        if (check->parsed())
        {
            return cmdCheck(opts, corridorTol, limitSlack);
        }
        if (profile->parsed())
        {
            return cmdProfile(opts);
        }
        if (simulate->parsed())
        {
            return cmdSimulate(opts);
        }
        if (bench->parsed())
        {
            return cmdBench(opts, pieceTargets, reps);
        }
        std::cerr << app.help();
        return 1;
    }
    catch (const ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
