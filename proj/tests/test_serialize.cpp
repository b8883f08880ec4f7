#include "omnitraj/serialize.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>

using namespace omnitraj;

namespace {

std::filesystem::path tempDir()
{
    const auto dir =
        std::filesystem::temp_directory_path() / "omnitraj_serialize_test";
    std::filesystem::create_directories(dir);
    return dir;
}

Trajectory sampleTrajectory()
{
    std::mt19937_64 rng(131);
    Eigen::MatrixXd q(6, 1);
    for (int r = 0; r < 6; ++r)
    {
        q(r, 0) = testutil::uniform(rng, -1.0, 1.0);
    }
    Eigen::VectorXd T(2);
    T << 1.3, 0.9;
    BoundaryCondition bc0, bc1;
    bc0.derivs.setZero(4, 6);
    bc1.derivs.setZero(4, 6);
    bc1.derivs(0, 0) = 2.0;
    return constructTrajectory(q, T, bc0, bc1, 4);
}

} // namespace

TEST_CASE("trajectory json round-trips byte-identically")
{
    const Trajectory traj = sampleTrajectory();
    const std::string text = trajectoryToJson(traj);
    const Trajectory back = trajectoryFromJson(text);
    CHECK(back.order() == traj.order());
    CHECK(back.pieceCount() == traj.pieceCount());
    CHECK((back.coeffs() - traj.coeffs()).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((back.durations() - traj.durations()).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(trajectoryToJson(back) == text);
}

TEST_CASE("polyhedron and corridor json")
{
    Polyhedron poly = Polyhedron::box({-1.0, -2.0, 0.0}, {3.0, 2.0, 2.5});
    poly.add({Eigen::Vector3d(1.0, 1.0, 0.0).normalized(), 2.2});
    const std::string text = polyhedronToJson(poly);
    const Polyhedron back = polyhedronFromJson(text);
    REQUIRE(back.faceCount() == poly.faceCount());
    for (int i = 0; i < poly.faceCount(); ++i)
    {
        CHECK(std::abs(back.halfspaces()[i].n.norm() - 1.0) < 1e-12);
        CHECK((back.halfspaces()[i].n - poly.halfspaces()[i].n).norm() == 0.0);
        CHECK(back.halfspaces()[i].d == poly.halfspaces()[i].d);
    }
    CHECK(polyhedronToJson(back) == text);

    Corridor corridor;
    corridor.polys = {poly, Polyhedron::box({2.0, -2.0, 0.0}, {6.0, 2.0, 2.5})};
    corridor.path = {{0.0, 0.0, 1.0}, {2.5, 0.0, 1.0}, {5.0, 0.0, 1.0}};
    const std::string ctext = corridorToJson(corridor);
    const Corridor cback = corridorFromJson(ctext);
    CHECK(cback.polys.size() == corridor.polys.size());
    CHECK(cback.path.size() == corridor.path.size());
    CHECK(corridorToJson(cback) == ctext);

    const std::string ptext = pathToJson(corridor.path);
    CHECK(pathToJson(pathFromJson(ptext)) == ptext);
}

TEST_CASE("point cloud csv")
{
    const auto dir = tempDir();
    const std::string file = (dir / "cloud.csv").string();

    std::vector<Eigen::Vector3d> pts = {{0.125, -2.5, 1.0}, {3.0625, 0.5, -1.75}};
    saveCloudCsv(file, pts);
    const auto back = loadCloudCsv(file);
    REQUIRE(back.size() == pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        CHECK((back[i] - pts[i]).lpNorm<Eigen::Infinity>() < 1e-8);
    }

    // Headerless files parse too.
    writeFile(file, "1.5,2.5,3.5\n-1,0,2\n");
    const auto bare = loadCloudCsv(file);
    REQUIRE(bare.size() == 2);
    CHECK(bare[0].x() == 1.5);

    writeFile(file, "x,y,z\n1,2,nonsense,4\n");
    CHECK_THROWS_AS(loadCloudCsv(file), ConfigError);
}

TEST_CASE("profile csv header and shape")
{
    const auto dir = tempDir();
    const std::string file = (dir / "profile.csv").string();
    InertiaParams params;
    const auto rows = sampleProfile(sampleTrajectory(), 0.1, params);
    writeProfileCsv(file, rows);

    const std::string text = readFile(file);
    const std::string header = text.substr(0, text.find('\n'));
    CHECK(header ==
          "t,px,py,pz,qw,qx,qy,qz,vx,vy,vz,wx,wy,wz,ax,ay,az,"
          "fbx,fby,fbz,taux,tauy,tauz,vnorm,anorm,wnorm");

    // Every line carries one value per header column.
    std::size_t lines = 0;
    std::size_t at = text.find('\n') + 1;
    while (at < text.size())
    {
        const std::size_t end = text.find('\n', at);
        const std::string line = text.substr(at, end - at);
        CHECK(std::count(line.begin(), line.end(), ',') == 25);
        at = end + 1;
        ++lines;
    }
    CHECK(lines == rows.size());
}

TEST_CASE("plan config defaults match the reference settings")
{
    const PlanConfig cfg = defaultPlanConfig();
    CHECK(cfg.weights.kappa == 16);
    CHECK(cfg.limits.vMax == 0.6);
    CHECK(cfg.limits.aMax == 2.0);
    CHECK(cfg.limits.omegaMax == 0.5);
    CHECK(cfg.weights.wV == 1e5);
    CHECK(cfg.weights.wA == 1e5);
    CHECK(cfg.weights.wOmega == 1e5);
    CHECK(cfg.weights.wCorridor == 1e5);
    CHECK(cfg.weights.kRho == 10.0);
    CHECK(cfg.s == 4);
    CHECK(cfg.shapeLx == 1.1);
    CHECK(cfg.shapeLz == 0.42);
    CHECK(cfg.rrt.step == 0.3);
    CHECK(cfg.rrt.goalBias == 0.1);
    CHECK(cfg.rrt.maxIterations == 200000);
    CHECK(cfg.sfc.margin == 2.0);
    CHECK(cfg.sfc.maxFaces == 40);
    // r_sphere defaults to half the vehicle thickness.
    CHECK(cfg.rrt.sphereRadius == doctest::Approx(0.21));
}

TEST_CASE("plan config parsing")
{
    const std::string text = R"({
        "map_file": "m.csv",
        "start": {"p": [1, 2, 3], "Q": [0, 1, 0, 0]},
        "limits": {"v_max": 0.36},
        "weights": {"kappa": 8},
        "rrt": {"seed": 42},
        "sfc": {"max_faces": 20}
    })";
    const PlanConfig cfg = planConfigFromJson(text);
    CHECK(cfg.mapFile == "m.csv");
    CHECK(cfg.start.position.y() == 2.0);
    CHECK(cfg.start.attitude.x() == 1.0);
    CHECK(cfg.limits.vMax == 0.36);
    CHECK(cfg.limits.aMax == 2.0); // untouched default
    CHECK(cfg.weights.kappa == 8);
    CHECK(cfg.rrt.seed == 42);
    CHECK(cfg.sfc.maxFaces == 20);

    // Unknown keys are rejected by name.
    try
    {
        planConfigFromJson(R"({"map_fiel": "typo.csv"})");
        FAIL("expected ConfigError");
    }
    catch (const ConfigError& e)
    {
        CHECK(std::string(e.what()).find("map_fiel") != std::string::npos);
    }
    CHECK_THROWS_AS(planConfigFromJson(R"({"rrt": {"sede": 1}})"), ConfigError);
    CHECK_THROWS_AS(planConfigFromJson(R"({"start": {"Q": [1, 0, 0]}})"), ConfigError);
    CHECK_THROWS_AS(planConfigFromJson("not json"), ConfigError);

    // Round trip through the serializer parses cleanly.
    const PlanConfig again = planConfigFromJson(planConfigToJson(cfg));
    CHECK(again.limits.vMax == cfg.limits.vMax);
    CHECK(again.rrt.seed == cfg.rrt.seed);
}
