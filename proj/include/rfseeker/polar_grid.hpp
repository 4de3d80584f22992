// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

#include "rfseeker/scene.hpp"

namespace rfseeker {

struct Cell {
    int ring = 0;
    int sector = 0;
    bool operator==(const Cell &o) const { return ring == o.ring && sector == o.sector; }
};

// Concentric navigation rings around a center point, all at a fixed height.
// Ring 0 sits at radius r_min_m; sector 0 points along +x and sector indices
// grow counterclockwise.
struct PolarGrid {
    Vec3 center{18.0, 13.0, 0.0};
    int n_rings = 8;
    int n_sectors = 16;
    double ring_spacing_m = 1.5;
    double r_min_m = 1.5;
    double agent_height_m = 1.5;

    int n_cells() const { return n_rings * n_sectors; }

    int cell_index(const Cell &c) const { return c.ring * n_sectors + c.sector; }
    Cell cell_from_index(int idx) const { return {idx / n_sectors, idx % n_sectors}; }

    bool in_bounds(const Cell &c) const {
        return c.ring >= 0 && c.ring < n_rings && c.sector >= 0 && c.sector < n_sectors;
    }

    double ring_radius(int ring) const { return r_min_m + ring * ring_spacing_m; }

    // throws std::invalid_argument on bad counts or cells outside the hall
    void validate(const Scene &scene) const;
};

// center + ring radius at the sector azimuth, lifted to agent height;
// throws std::invalid_argument for out-of-range cells
Vec3 cell_to_position(const PolarGrid &grid, const Cell &cell);

} // namespace rfseeker
