#ifndef OMNITRAJ_SCENARIOS_HPP
#define OMNITRAJ_SCENARIOS_HPP

#include "omnitraj/corridor.hpp"

#include <cstdint>

namespace omnitraj {

// Procedurally generated test environments.

struct WallSlotParams
{
    double wallX = 0.0;        // wall center plane
    double thickness = 0.3;    // extent in x
    double slotWidth = 0.7;    // gap in y, centered at y = 0
    double spacing = 0.1;      // point grid spacing
    Aabb bounds = {{-4.0, -3.0, 0.0}, {4.0, 3.0, 3.0}};
};

// A full-height wall with a vertical slot: passable for a thin body rolled
// onto its side, impassable upright.
PointCloud makeWallSlotMap(const WallSlotParams& params = {});

struct FloatingObstacleParams
{
    Aabb bounds = {{0.0, 0.0, 0.0}, {20.0, 8.0, 6.0}};
    int obstacles = 40;
    double sizeMin = 0.2;
    double sizeMax = 0.8;
    double spacing = 0.15;
    double clearRadius = 1.0; // sphere kept free around start/goal
    Eigen::Vector3d start = {0.5, 4.0, 3.0};
    Eigen::Vector3d goal = {19.5, 4.0, 3.0};
    std::uint64_t seed = 1;
};

// Randomly placed floating cuboids sampled into surface points.
PointCloud makeFloatingObstacleMap(const FloatingObstacleParams& params);

} // namespace omnitraj

#endif
