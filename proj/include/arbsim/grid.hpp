#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "arbsim/errors.hpp"
#include "arbsim/geometry.hpp"
#include "arbsim/world.hpp"

namespace arbsim {

enum class CellState : std::uint8_t { Free, Occupied, Unknown };

/// Ego-centric bird's-eye grid. Columns run along the ego heading (+x
/// forward), rows along +y (left); the ego sits at the grid center.
struct GridSpec {
    std::size_t width = 100;   // cells along forward axis
    std::size_t height = 100;  // cells along lateral axis
    double resolution = 0.5;   // m/cell
    double range = 50.0;       // sensor range r_max, m
    double fov_half_angle_deg = 90.0;  // forward half-plane by default

    double fov_half_angle() const { return fov_half_angle_deg * kPi / 180.0; }

    void validate() const {
        if (resolution <= 0.0) throw SemanticError("grid/resolution", "must be > 0");
        if (width == 0 || height == 0) throw SemanticError("grid/size", "must be nonzero");
    }
};

struct OccupancyGrid {
    GridSpec spec;
    std::vector<CellState> cells;  // row-major, cells[row * width + col]

    CellState at(std::size_t row, std::size_t col) const {
        return cells[row * spec.width + col];
    }

    std::size_t count(CellState s) const {
        std::size_t n = 0;
        for (const CellState c : cells)
            if (c == s) ++n;
        return n;
    }

    /// Cell center in the ego frame.
    Vec2 cell_center(std::size_t row, std::size_t col) const {
        const double fx = (static_cast<double>(col) + 0.5) * spec.resolution -
                          0.5 * static_cast<double>(spec.width) * spec.resolution;
        const double fy = (static_cast<double>(row) + 0.5) * spec.resolution -
                          0.5 * static_cast<double>(spec.height) * spec.resolution;
        return {fx, fy};
    }
};

/// Render the simulated sensor view: cells outside the field-of-view sector
/// are Unknown; in-view cells are Occupied when their center lies inside a
/// participant footprint or building polygon, Free otherwise. Participants
/// are obstacles; grids are a sensing product, not the collision model.
inline OccupancyGrid render_grid(const WorldState& world, const GridSpec& spec) {
    spec.validate();
    OccupancyGrid grid;
    grid.spec = spec;
    grid.cells.assign(spec.width * spec.height, CellState::Unknown);

    std::vector<OrientedRect> obstacles;
    obstacles.reserve(world.participants.size());
    for (const auto& [id, p] : world.participants) obstacles.push_back(p.footprint());

    const Vec2 ego_pos{world.ego.x, world.ego.y};
    for (std::size_t row = 0; row < spec.height; ++row) {
        for (std::size_t col = 0; col < spec.width; ++col) {
            const Vec2 local = grid.cell_center(row, col);
            const double range = local.norm();
            if (range > spec.range ||
                std::abs(std::atan2(local.y, local.x)) > spec.fov_half_angle())
                continue;  // stays Unknown
            const Vec2 world_pt = ego_pos + rotate(local, world.ego.heading);
            bool occupied = false;
            for (const OrientedRect& r : obstacles)
                if (point_in_rect(world_pt, r)) {
                    occupied = true;
                    break;
                }
            if (!occupied)
                for (const BuildingGeometry& b : world.buildings)
                    if (point_in_polygon(world_pt, b.polygon)) {
                        occupied = true;
                        break;
                    }
            grid.cells[row * spec.width + col] = occupied ? CellState::Occupied : CellState::Free;
        }
    }
    return grid;
}

/// Binary PGM snapshot: Free=255, Occupied=0, Unknown=128.
inline void write_pgm(const OccupancyGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path);
    out << "P5\n" << grid.spec.width << " " << grid.spec.height << "\n255\n";
    for (const CellState c : grid.cells) {
        const unsigned char byte = c == CellState::Free ? 255 : (c == CellState::Occupied ? 0 : 128);
        out.put(static_cast<char>(byte));
    }
    if (!out) throw IoError(path);
}

}  // namespace arbsim
