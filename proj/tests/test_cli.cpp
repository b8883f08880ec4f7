#include "omnitraj/scenarios.hpp"
#include "omnitraj/serialize.hpp"

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#ifndef OMNITRAJ_CLI_PATH
#error "OMNITRAJ_CLI_PATH must be defined"
#endif

using namespace omnitraj;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

const fs::path kWork = fs::temp_directory_path() / "omnitraj_cli_test";

int run(const std::string& args)
{
    const std::string cmd = std::string(OMNITRAJ_CLI_PATH) + " " + args +
                            " >" + (kWork / "stdout.txt").string() + " 2>" +
                            (kWork / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string capturedStdout()
{
    return readFile((kWork / "stdout.txt").string());
}

std::string capturedStderr()
{
    return readFile((kWork / "stderr.txt").string());
}

void writeEmptyMapConfig(const fs::path& cfgPath, const fs::path& mapPath)
{
    writeFile(mapPath.string(), "x,y,z\n");
    const json cfg{
        {"map_file", mapPath.string()},
        {"start", {{"p", {0.0, 0.0, 1.0}}, {"Q", {1, 0, 0, 0}}}},
        {"goal", {{"p", {1.2, 0.0, 1.0}}, {"Q", {1, 0, 0, 0}}}},
    };
    writeFile(cfgPath.string(), cfg.dump(2) + "\n");
}

} // namespace

TEST_CASE("plan on an empty map writes all artifacts")
{
    fs::create_directories(kWork);
    const fs::path out = kWork / "plain";
    fs::remove_all(out);
    writeEmptyMapConfig(kWork / "plain.json", kWork / "empty.csv");

    CHECK(run("plan --config " + (kWork / "plain.json").string() + " --out " +
              out.string()) == 0);
    for (const char* name : {"path.json", "corridor.json", "trajectory.json",
                             "report.json"})
    {
        CHECK(fs::exists(out / name));
    }
    const Trajectory traj = trajectoryFromJson(readFile((out / "trajectory.json").string()));
    CHECK(traj.pieceCount() >= 1);

    // check / profile / simulate run off the same artifacts.
    CHECK(run("check --config " + (kWork / "plain.json").string() + " --out " +
              out.string()) == 0);
    CHECK(run("profile --config " + (kWork / "plain.json").string() + " --out " +
              out.string()) == 0);
    CHECK(fs::exists(out / "profile.csv"));
    CHECK(run("simulate --config " + (kWork / "plain.json").string() + " --out " +
              out.string()) == 0);
    CHECK(fs::exists(out / "tracking.csv"));
}

TEST_CASE("plan exits 2 when the goal is sealed off")
{
    fs::create_directories(kWork);
    WallSlotParams wall;
    wall.slotWidth = 0.1; // narrower than the collision sphere
    const PointCloud map = makeWallSlotMap(wall);
    saveCloudCsv((kWork / "sealed.csv").string(), map.points());

    const json cfg{
        {"map_file", (kWork / "sealed.csv").string()},
        {"bounds", {{"lo", {-4.0, -3.0, 0.0}}, {"hi", {4.0, 3.0, 3.0}}}},
        {"start", {{"p", {-3.0, 0.0, 1.5}}, {"Q", {1, 0, 0, 0}}}},
        {"goal", {{"p", {3.0, 0.0, 1.5}}, {"Q", {1, 0, 0, 0}}}},
        {"rrt", {{"max_iter", 2000}}},
    };
    writeFile((kWork / "sealed.json").string(), cfg.dump(2) + "\n");
    CHECK(run("plan --config " + (kWork / "sealed.json").string() + " --out " +
              (kWork / "sealed_out").string()) == 2);
}

TEST_CASE("invalid config exits 1 and names the key")
{
    fs::create_directories(kWork);
    writeFile((kWork / "bad.json").string(), R"({"wieghts": {}})");
    CHECK(run("plan --config " + (kWork / "bad.json").string() + " --out " +
              (kWork / "bad_out").string()) == 1);
    CHECK(capturedStderr().find("wieghts") != std::string::npos);

    CHECK(run("plan --out " + (kWork / "bad_out").string()) == 1);
}

TEST_CASE("identical config and seed reproduce the trajectory byte for byte")
{
    fs::create_directories(kWork);
    writeEmptyMapConfig(kWork / "det.json", kWork / "det.csv");
    const std::string cfg = (kWork / "det.json").string();

    CHECK(run("plan --config " + cfg + " --out " + (kWork / "det1").string() +
              " --seed 7") == 0);
    CHECK(run("plan --config " + cfg + " --out " + (kWork / "det2").string() +
              " --seed 7") == 0);

    CHECK(readFile((kWork / "det1/trajectory.json").string()) ==
          readFile((kWork / "det2/trajectory.json").string()));
    const json r1 = json::parse(readFile((kWork / "det1/report.json").string()));
    const json r2 = json::parse(readFile((kWork / "det2/report.json").string()));
    CHECK(r1["iterations"] == r2["iterations"]);
}

TEST_CASE("check localizes a corrupted coefficient")
{
    fs::create_directories(kWork);
    const fs::path out = kWork / "corrupt";
    fs::remove_all(out);
    writeEmptyMapConfig(kWork / "corrupt.json", kWork / "corrupt.csv");
    REQUIRE(run("plan --config " + (kWork / "corrupt.json").string() + " --out " +
                out.string()) == 0);

    // Push the first piece a meter sideways: containment must break there.
    json traj = json::parse(readFile((out / "trajectory.json").string()));
    traj["pieces"][0]["coeffs"][0][1] = double(traj["pieces"][0]["coeffs"][0][1]) + 4.0;
    writeFile((out / "trajectory.json").string(), traj.dump(2) + "\n");

    CHECK(run("check --config " + (kWork / "corrupt.json").string() + " --out " +
              out.string()) == 3);
    const json result = json::parse(capturedStdout());
    CHECK(result["max_corridor_violation"].get<double>() > 0.5);
    CHECK(result["worst_corridor_piece"].get<int>() == 0);
}

TEST_CASE("simulate with dead gains diverges with exit 4")
{
    fs::create_directories(kWork);
    const fs::path out = kWork / "diverge";
    fs::remove_all(out);

    writeFile((kWork / "div_map.csv").string(), "x,y,z\n");
    json cfg{
        {"map_file", (kWork / "div_map.csv").string()},
        {"start", {{"p", {0.0, 0.0, 1.0}}, {"Q", {1, 0, 0, 0}}}},
        {"goal", {{"p", {7.0, 0.0, 1.0}}, {"Q", {1, 0, 0, 0}}}},
    };
    writeFile((kWork / "div.json").string(), cfg.dump(2) + "\n");
    REQUIRE(run("plan --config " + (kWork / "div.json").string() + " --out " +
                out.string()) == 0);

    const json zero3 = json::array({0.0, 0.0, 0.0});
    cfg["gains"] = json{{"kp_pos", zero3}, {"kp_vel", zero3}, {"ki_vel", zero3},
                        {"kd_vel", zero3}, {"kf_vel", zero3}, {"kp_att", zero3},
                        {"kp_rate", zero3}, {"ki_rate", zero3}, {"kd_rate", zero3},
                        {"kf_rate", zero3}};
    writeFile((kWork / "div.json").string(), cfg.dump(2) + "\n");
    CHECK(run("simulate --config " + (kWork / "div.json").string() + " --out " +
              out.string()) == 4);
    CHECK(fs::exists(out / "tracking.csv")); // log retained
}

TEST_CASE("print-defaults emits a parseable config")
{
    fs::create_directories(kWork);
    CHECK(run("--print-defaults") == 0);
    const PlanConfig cfg = planConfigFromJson(capturedStdout());
    CHECK(cfg.weights.kappa == 16);
}
