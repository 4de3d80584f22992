// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#include "rfseeker/polar_grid.hpp"

namespace rfseeker {

void PolarGrid::validate(const Scene &scene) const {
    if (n_rings < 2 || n_sectors < 4)
        throw std::invalid_argument("grid: need n_rings >= 2 and n_sectors >= 4");
    if (!(ring_spacing_m > 0.0) || !(r_min_m > 0.0))
        throw std::invalid_argument("grid: radii must be positive");
    for (int ring = 0; ring < n_rings; ++ring)
        for (int sector = 0; sector < n_sectors; ++sector)
            if (!scene.contains(cell_to_position(*this, {ring, sector})))
                throw std::invalid_argument("grid: cell outside the hall");
}

Vec3 cell_to_position(const PolarGrid &grid, const Cell &cell) {
    if (!grid.in_bounds(cell))
        throw std::invalid_argument("grid: cell out of range");
    double r = grid.ring_radius(cell.ring);
    double ang = 2.0 * kPi * cell.sector / grid.n_sectors;
    return {grid.center.x + r * std::cos(ang), grid.center.y + r * std::sin(ang),
            grid.center.z + grid.agent_height_m};
}

} // namespace rfseeker
