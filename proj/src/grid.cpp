#include "hofer/grid.hpp"

#include "hofer/errors.hpp"

#include <algorithm>
#include <numbers>

namespace hofer {

void GridSpec::validate() const {
    if (counts.size() != 2) throw ConfigError("grid needs two counts");
    for (int c : counts)
        if (c < 2) throw ConfigError("grid counts must be >= 2");
    if (refinements < 0 || refinements > 12) throw ConfigError("grid refinements must be in [0, 12]");
}

namespace {

int level_of(int i, int finest) {
    // coarsest k such that i is a multiple of 2^(finest - k)
    for (int k = 0; k <= finest; ++k) {
        int stride = 1 << (finest - k);
        if (i % stride == 0) return k;
    }
    return finest;
}

}  // namespace

SampleGrid make_grid(const Manifold& m, const GridSpec& g) {
    g.validate();
    SampleGrid s;
    s.finest = g.refinements;
    const int R = g.refinements;
    const int scale = 1 << R;
    switch (m.kind) {
        case ManifoldKind::Annulus: {
            int nt = g.counts[0] * scale;
            int ni = (g.counts[1] - 1) * scale + 1;
            for (int i = 0; i < nt; ++i)
                for (int j = 0; j < ni; ++j) {
                    s.points.push_back(Point::annulus(static_cast<double>(i) / nt, static_cast<double>(j) / (ni - 1)));
                    s.level.push_back(std::max(level_of(i, R), level_of(j, R)));
                }
            for (int k = 0; k <= R; ++k) {
                double dt = 1.0 / (g.counts[0] << k), di = 1.0 / ((g.counts[1] - 1) << k);
                s.mesh.push_back(0.5 * std::sqrt(dt * dt + di * di));
            }
            break;
        }
        case ManifoldKind::Plane: {
            int nx = (g.counts[0] - 1) * scale + 1;
            int ny = (g.counts[1] - 1) * scale + 1;
            double h = m.plane_half_width;
            for (int i = 0; i < nx; ++i)
                for (int j = 0; j < ny; ++j) {
                    s.points.push_back(Point::plane(m.plane_center[0] - h + 2.0 * h * i / (nx - 1),
                                                    m.plane_center[1] - h + 2.0 * h * j / (ny - 1)));
                    s.level.push_back(std::max(level_of(i, R), level_of(j, R)));
                }
            for (int k = 0; k <= R; ++k) {
                double dx = 2.0 * h / ((g.counts[0] - 1) << k), dy = 2.0 * h / ((g.counts[1] - 1) << k);
                s.mesh.push_back(0.5 * std::sqrt(dx * dx + dy * dy));
            }
            break;
        }
        case ManifoldKind::Sphere: {
            int nz = (g.counts[0] - 1) * scale + 1;
            int nphi = g.counts[1] * scale;
            for (int j = 0; j < nz; ++j) {
                double z = -1.0 + 2.0 * j / (nz - 1);
                int lj = level_of(j, R);
                if (j == 0 || j == nz - 1) {
                    s.points.push_back(Point{ManifoldKind::Sphere, {0, 0, z}});
                    s.level.push_back(0);
                    continue;
                }
                double r = std::sqrt(std::max(0.0, 1.0 - z * z));
                for (int i = 0; i < nphi; ++i) {
                    double phi = 2.0 * std::numbers::pi * i / nphi;
                    s.points.push_back(Point{ManifoldKind::Sphere, {r * std::cos(phi), r * std::sin(phi), z}});
                    s.level.push_back(std::max(lj, level_of(i, R)));
                }
            }
            for (int k = 0; k <= R; ++k) {
                double dz = 2.0 / ((g.counts[0] - 1) << k);
                double ds = std::acos(1.0 - dz);  // widest row gap, at the poles
                double dphi = 2.0 * std::numbers::pi / (g.counts[1] << k);
                s.mesh.push_back(0.5 * std::sqrt(ds * ds + dphi * dphi));
            }
            break;
        }
    }
    return s;
}

}  // namespace hofer
