#pragma once

#include "hofer/phase_space.hpp"

#include <vector>

namespace hofer {

// counts: per-coordinate sample counts at the coarsest level (annulus: theta, I; sphere:
// z rows, longitudes; plane: x, y).  Level k refines periodic counts to n*2^k and closed
// counts to (n-1)*2^k + 1, so coarse samples are a subset of finer ones.
struct GridSpec {
    std::vector<int> counts{64, 64};
    int refinements = 0;

    void validate() const;
    static GridSpec square(int n, int refinements = 0) { return {{n, n}, refinements}; }
};

struct SampleGrid {
    std::vector<Point> points;
    std::vector<int> level;       // coarsest refinement level containing each point
    std::vector<double> mesh;     // covering radius per level
    int finest = 0;

    double finest_mesh() const { return mesh.back(); }
};

SampleGrid make_grid(const Manifold& m, const GridSpec& g);

}  // namespace hofer
