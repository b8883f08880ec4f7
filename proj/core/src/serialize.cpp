#include "omnitraj/serialize.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace omnitraj {

using nlohmann::json;

namespace {

json vecToJson(const Eigen::Vector3d& v)
{
    return json::array({v.x(), v.y(), v.z()});
}

Eigen::Vector3d vecFromJson(const json& j)
{
    if (!j.is_array() || j.size() != 3)
    {
        throw ConfigError("expected a 3-element array");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::string dump(const json& j)
{
    return j.dump(2) + "\n";
}

void requireKeys(const json& j, const std::vector<std::string>& allowed,
                 const std::string& where)
{
    for (const auto& item : j.items())
    {
        bool known = false;
        for (const auto& k : allowed)
        {
            if (item.key() == k)
            {
                known = true;
                break;
            }
        }
        if (!known)
        {
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
        }
    }
}

void csvRow(std::string& out, const double* values, int count)
{
    char buf[32];
    for (int i = 0; i < count; ++i)
    {
        std::snprintf(buf, sizeof(buf), "%.9g", values[i]);
        if (i > 0)
        {
            out += ',';
        }
        out += buf;
    }
    out += '\n';
}

} // namespace

std::string trajectoryToJson(const Trajectory& traj)
{
    json pieces = json::array();
    const int width = 2 * traj.order();
    for (int i = 0; i < traj.pieceCount(); ++i)
    {
        json coeffs = json::array();
        const auto c = traj.pieceCoeffs(i);
        for (int r = 0; r < width; ++r)
        {
            json row = json::array();
            for (int col = 0; col < 6; ++col)
            {
                row.push_back(c(r, col));
            }
            coeffs.push_back(row);
        }
        pieces.push_back(json{{"T", traj.durations()(i)}, {"coeffs", coeffs}});
    }
    return dump(json{{"s", traj.order()}, {"pieces", pieces}});
}

Trajectory trajectoryFromJson(const std::string& text)
{
    const json j = json::parse(text);
    const int s = j.at("s").get<int>();
    const auto& pieces = j.at("pieces");
    const int m = static_cast<int>(pieces.size());
    const int width = 2 * s;
    Eigen::VectorXd durations(m);
    Eigen::MatrixXd coeffs(width * m, 6);
    for (int i = 0; i < m; ++i)
    {
        durations(i) = pieces[i].at("T").get<double>();
        const auto& rows = pieces[i].at("coeffs");
        if (static_cast<int>(rows.size()) != width)
        {
            throw ConfigError("trajectory piece has wrong coefficient row count");
        }
        for (int r = 0; r < width; ++r)
        {
            for (int col = 0; col < 6; ++col)
            {
                coeffs(width * i + r, col) = rows[r][col].get<double>();
            }
        }
    }
    return Trajectory(s, durations, coeffs);
}

namespace {

json polyhedronJson(const Polyhedron& poly)
{
    json halfspaces = json::array();
    for (const auto& h : poly.halfspaces())
    {
        halfspaces.push_back(json{{"n", vecToJson(h.n)}, {"d", h.d}});
    }
    return json{{"halfspaces", halfspaces}};
}

Polyhedron polyhedronFromJsonValue(const json& j)
{
    std::vector<Halfspace> hs;
    for (const auto& h : j.at("halfspaces"))
    {
        hs.push_back({vecFromJson(h.at("n")), h.at("d").get<double>()});
    }
    return Polyhedron(std::move(hs));
}

} // namespace

std::string polyhedronToJson(const Polyhedron& poly)
{
    return dump(polyhedronJson(poly));
}

Polyhedron polyhedronFromJson(const std::string& text)
{
    return polyhedronFromJsonValue(json::parse(text));
}

std::string corridorToJson(const Corridor& corridor)
{
    json polys = json::array();
    for (const auto& p : corridor.polys)
    {
        polys.push_back(polyhedronJson(p));
    }
    json path = json::array();
    for (const auto& p : corridor.path)
    {
        path.push_back(vecToJson(p));
    }
    return dump(json{{"polys", polys}, {"path", path}});
}

Corridor corridorFromJson(const std::string& text)
{
    const json j = json::parse(text);
    Corridor c;
    for (const auto& p : j.at("polys"))
    {
        c.polys.push_back(polyhedronFromJsonValue(p));
    }
    for (const auto& p : j.at("path"))
    {
        c.path.push_back(vecFromJson(p));
    }
    return c;
}

std::string pathToJson(const Path& path)
{
    json waypoints = json::array();
    for (const auto& p : path)
    {
        waypoints.push_back(vecToJson(p));
    }
    return dump(json{{"waypoints", waypoints}});
}

Path pathFromJson(const std::string& text)
{
    const json j = json::parse(text);
    Path path;
    for (const auto& p : j.at("waypoints"))
    {
        path.push_back(vecFromJson(p));
    }
    return path;
}

std::vector<Eigen::Vector3d> loadCloudCsv(const std::string& file)
{
    std::ifstream in(file);
    if (!in)
    {
        throw ConfigError("cannot open point cloud file '" + file + "'");
    }
    std::vector<Eigen::Vector3d> pts;
    std::string line;
    bool first = true;
    while (std::getline(in, line))
    {
        if (line.empty())
        {
            continue;
        }
        double x = 0.0, y = 0.0, z = 0.0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &y, &z) != 3)
        {
            if (first)
            {
                first = false; // header
                continue;
            }
            throw ConfigError("malformed point cloud line: " + line);
        }
        first = false;
        pts.emplace_back(x, y, z);
    }
    return pts;
}

void saveCloudCsv(const std::string& file, const std::vector<Eigen::Vector3d>& points)
{
    std::string out = "x,y,z\n";
    for (const auto& p : points)
    {
        const double row[3] = {p.x(), p.y(), p.z()};
        csvRow(out, row, 3);
    }
    writeFile(file, out);
}

void writeProfileCsv(const std::string& file, const std::vector<ProfileRow>& rows)
{
    std::string out =
        "t,px,py,pz,qw,qx,qy,qz,vx,vy,vz,wx,wy,wz,ax,ay,az,"
        "fbx,fby,fbz,taux,tauy,tauz,vnorm,anorm,wnorm\n";
    for (const auto& r : rows)
    {
        const double row[26] = {
            r.t,
            r.p.x(), r.p.y(), r.p.z(),
            r.q.w(), r.q.x(), r.q.y(), r.q.z(),
            r.v.x(), r.v.y(), r.v.z(),
            r.omega.x(), r.omega.y(), r.omega.z(),
            r.a.x(), r.a.y(), r.a.z(),
            r.forceBody.x(), r.forceBody.y(), r.forceBody.z(),
            r.torqueBody.x(), r.torqueBody.y(), r.torqueBody.z(),
            r.vNorm, r.aNorm, r.omegaNorm};
        csvRow(out, row, 26);
    }
    writeFile(file, out);
}

void writeTrackLogCsv(const std::string& file, const std::vector<TrackLogRow>& rows)
{
    std::string out =
        "t,ref_px,ref_py,ref_pz,ref_qw,ref_qx,ref_qy,ref_qz,"
        "px,py,pz,qw,qx,qy,qz,epx,epy,epz,att_err,"
        "fbx,fby,fbz,taux,tauy,tauz\n";
    for (const auto& r : rows)
    {
        const double row[25] = {
            r.t,
            r.pRef.x(), r.pRef.y(), r.pRef.z(),
            r.qRef.w(), r.qRef.x(), r.qRef.y(), r.qRef.z(),
            r.pAct.x(), r.pAct.y(), r.pAct.z(),
            r.qAct.w(), r.qAct.x(), r.qAct.y(), r.qAct.z(),
            r.posError.x(), r.posError.y(), r.posError.z(),
            r.attError,
            r.forceBody.x(), r.forceBody.y(), r.forceBody.z(),
            r.torqueBody.x(), r.torqueBody.y(), r.torqueBody.z()};
        csvRow(out, row, 25);
    }
    writeFile(file, out);
}

PlanConfig defaultPlanConfig()
{
    return PlanConfig{};
}

namespace {

void parsePose(const json& j, Pose& pose, const std::string& where)
{
    requireKeys(j, {"p", "Q"}, where);
    if (j.contains("p"))
    {
        pose.position = vecFromJson(j.at("p"));
    }
    if (j.contains("Q"))
    {
        const auto& q = j.at("Q");
        if (!q.is_array() || q.size() != 4)
        {
            throw ConfigError(where + ".Q must be [w,x,y,z]");
        }
        pose.attitude = Eigen::Quaterniond(q[0].get<double>(), q[1].get<double>(),
                                           q[2].get<double>(), q[3].get<double>());
        const double norm = pose.attitude.norm();
        if (std::abs(norm - 1.0) > 1e-6)
        {
            throw ConfigError(where + ".Q is not a unit quaternion");
        }
        pose.attitude.normalize();
    }
}

} // namespace

PlanConfig planConfigFromJson(const std::string& text)
{
    json j;
    try
    {
        j = json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    requireKeys(j,
                {"map_file", "bounds", "start", "goal", "limits", "weights", "s",
                 "d_piece", "rrt", "sfc", "lbfgs", "shape", "gains", "inertia"},
                "config");

    PlanConfig c = defaultPlanConfig();
    if (j.contains("map_file"))
    {
        c.mapFile = j.at("map_file").get<std::string>();
    }
    if (j.contains("bounds"))
    {
        const auto& b = j.at("bounds");
        requireKeys(b, {"lo", "hi"}, "bounds");
        Aabb box;
        box.lo = vecFromJson(b.at("lo"));
        box.hi = vecFromJson(b.at("hi"));
        c.bounds = box;
    }
    if (j.contains("start"))
    {
        parsePose(j.at("start"), c.start, "start");
    }
    if (j.contains("goal"))
    {
        parsePose(j.at("goal"), c.goal, "goal");
    }
    if (j.contains("limits"))
    {
        const auto& l = j.at("limits");
        requireKeys(l, {"v_max", "a_max", "omega_max"}, "limits");
        c.limits.vMax = l.value("v_max", c.limits.vMax);
        c.limits.aMax = l.value("a_max", c.limits.aMax);
        c.limits.omegaMax = l.value("omega_max", c.limits.omegaMax);
    }
    if (j.contains("weights"))
    {
        const auto& w = j.at("weights");
        requireKeys(w, {"Wv", "Wa", "Womega", "Wc", "k_rho", "kappa"}, "weights");
        c.weights.wV = w.value("Wv", c.weights.wV);
        c.weights.wA = w.value("Wa", c.weights.wA);
        c.weights.wOmega = w.value("Womega", c.weights.wOmega);
        c.weights.wCorridor = w.value("Wc", c.weights.wCorridor);
        c.weights.kRho = w.value("k_rho", c.weights.kRho);
        c.weights.kappa = w.value("kappa", c.weights.kappa);
    }
    if (j.contains("s"))
    {
        c.s = j.at("s").get<int>();
        if (c.s < 2 || c.s > 4)
        {
            throw ConfigError("s must be 2, 3 or 4");
        }
    }
    if (j.contains("d_piece"))
    {
        c.dPiece = j.at("d_piece").get<double>();
    }
    if (j.contains("rrt"))
    {
        const auto& r = j.at("rrt");
        requireKeys(r, {"seed", "step", "goal_bias", "max_iter", "goal_tol", "r_sphere"},
                    "rrt");
        c.rrt.seed = r.value("seed", c.rrt.seed);
        c.rrt.step = r.value("step", c.rrt.step);
        c.rrt.goalBias = r.value("goal_bias", c.rrt.goalBias);
        c.rrt.maxIterations = r.value("max_iter", c.rrt.maxIterations);
        c.rrt.goalTol = r.value("goal_tol", c.rrt.goalTol);
        if (r.contains("r_sphere"))
        {
            c.rrt.sphereRadius = r.at("r_sphere").get<double>();
            c.rrtRadiusSet = true;
        }
    }
    if (j.contains("sfc"))
    {
        const auto& s = j.at("sfc");
        requireKeys(s, {"margin", "max_faces", "max_segment"}, "sfc");
        c.sfc.margin = s.value("margin", c.sfc.margin);
        c.sfc.maxFaces = s.value("max_faces", c.sfc.maxFaces);
        c.sfc.maxSegment = s.value("max_segment", c.sfc.maxSegment);
    }
    if (j.contains("lbfgs"))
    {
        const auto& l = j.at("lbfgs");
        requireKeys(l, {"memory", "g_tol", "max_iter"}, "lbfgs");
        c.lbfgs.memory = l.value("memory", c.lbfgs.memory);
        c.lbfgs.gTol = l.value("g_tol", c.lbfgs.gTol);
        c.lbfgs.maxIterations = l.value("max_iter", c.lbfgs.maxIterations);
    }
    if (j.contains("shape"))
    {
        const auto& s = j.at("shape");
        requireKeys(s, {"lx", "ly", "lz"}, "shape");
        c.shapeLx = s.value("lx", c.shapeLx);
        c.shapeLy = s.value("ly", c.shapeLy);
        c.shapeLz = s.value("lz", c.shapeLz);
    }
    if (j.contains("gains"))
    {
        const auto& g = j.at("gains");
        requireKeys(g,
                    {"kp_pos", "kp_vel", "ki_vel", "kd_vel", "kf_vel", "kp_att",
                     "kp_rate", "ki_rate", "kd_rate", "kf_rate", "d_com",
                     "integrator_limit"},
                    "gains");
        auto vec = [&](const char* key, Eigen::Vector3d& target)
        {
            if (g.contains(key))
            {
                target = vecFromJson(g.at(key));
            }
        };
        vec("kp_pos", c.gains.kPosP);
        vec("kp_vel", c.gains.kVelP);
        vec("ki_vel", c.gains.kVelI);
        vec("kd_vel", c.gains.kVelD);
        vec("kf_vel", c.gains.kVelF);
        vec("kp_att", c.gains.kAttP);
        vec("kp_rate", c.gains.kRateP);
        vec("ki_rate", c.gains.kRateI);
        vec("kd_rate", c.gains.kRateD);
        vec("kf_rate", c.gains.kRateF);
        vec("d_com", c.gains.comOffset);
        c.gains.integratorLimit = g.value("integrator_limit", c.gains.integratorLimit);
    }
    if (j.contains("inertia"))
    {
        const auto& m = j.at("inertia");
        requireKeys(m, {"mass", "J_diag"}, "inertia");
        c.inertia.mass = m.value("mass", c.inertia.mass);
        if (m.contains("J_diag"))
        {
            c.inertia.inertiaBody = vecFromJson(m.at("J_diag")).asDiagonal();
        }
    }

    if (!c.rrtRadiusSet)
    {
        c.rrt.sphereRadius = 0.5 * c.shapeLz;
    }
    return c;
}

PlanConfig planConfigFromFile(const std::string& file)
{
    return planConfigFromJson(readFile(file));
}

std::string planConfigToJson(const PlanConfig& c)
{
    json j;
    j["map_file"] = c.mapFile;
    if (c.bounds)
    {
        j["bounds"] = {{"lo", vecToJson(c.bounds->lo)}, {"hi", vecToJson(c.bounds->hi)}};
    }
    j["start"] = {{"p", vecToJson(c.start.position)},
                  {"Q", json::array({c.start.attitude.w(), c.start.attitude.x(),
                                     c.start.attitude.y(), c.start.attitude.z()})}};
    j["goal"] = {{"p", vecToJson(c.goal.position)},
                 {"Q", json::array({c.goal.attitude.w(), c.goal.attitude.x(),
                                    c.goal.attitude.y(), c.goal.attitude.z()})}};
    j["limits"] = {{"v_max", c.limits.vMax},
                   {"a_max", c.limits.aMax},
                   {"omega_max", c.limits.omegaMax}};
    j["weights"] = {{"Wv", c.weights.wV},     {"Wa", c.weights.wA},
                    {"Womega", c.weights.wOmega}, {"Wc", c.weights.wCorridor},
                    {"k_rho", c.weights.kRho},    {"kappa", c.weights.kappa}};
    j["s"] = c.s;
    j["d_piece"] = c.dPiece;
    j["rrt"] = {{"seed", c.rrt.seed},
                {"step", c.rrt.step},
                {"goal_bias", c.rrt.goalBias},
                {"max_iter", c.rrt.maxIterations},
                {"goal_tol", c.rrt.goalTol},
                {"r_sphere", c.rrt.sphereRadius}};
    j["sfc"] = {{"margin", c.sfc.margin},
               {"max_faces", c.sfc.maxFaces},
               {"max_segment", c.sfc.maxSegment}};
    j["lbfgs"] = {{"memory", c.lbfgs.memory},
                  {"g_tol", c.lbfgs.gTol},
                  {"max_iter", c.lbfgs.maxIterations}};
    j["shape"] = {{"lx", c.shapeLx}, {"ly", c.shapeLy}, {"lz", c.shapeLz}};
    auto vecJ = [](const Eigen::Vector3d& v) { return vecToJson(v); };
    j["gains"] = {{"kp_pos", vecJ(c.gains.kPosP)},
                  {"kp_vel", vecJ(c.gains.kVelP)},
                  {"ki_vel", vecJ(c.gains.kVelI)},
                  {"kd_vel", vecJ(c.gains.kVelD)},
                  {"kf_vel", vecJ(c.gains.kVelF)},
                  {"kp_att", vecJ(c.gains.kAttP)},
                  {"kp_rate", vecJ(c.gains.kRateP)},
                  {"ki_rate", vecJ(c.gains.kRateI)},
                  {"kd_rate", vecJ(c.gains.kRateD)},
                  {"kf_rate", vecJ(c.gains.kRateF)},
                  {"d_com", vecJ(c.gains.comOffset)},
                  {"integrator_limit", c.gains.integratorLimit}};
    j["inertia"] = {{"mass", c.inertia.mass},
                    {"J_diag", json::array({c.inertia.inertiaBody(0, 0),
                                            c.inertia.inertiaBody(1, 1),
                                            c.inertia.inertiaBody(2, 2)})}};
    return dump(j);
}

std::string readFile(const std::string& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
    {
        throw ConfigError("cannot open file '" + file + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void writeFile(const std::string& file, const std::string& content)
{
    std::ofstream out(file, std::ios::binary);
    if (!out)
    {
        throw ConfigError("cannot write file '" + file + "'");
    }
    out << content;
}

} // namespace omnitraj
