#pragma once

#include <optional>
#include <string>

#include "kobgeo/domain.hpp"

namespace kobgeo {

enum class ConeSide { Interior, Exterior };

/// Open right circular cone apex + Gamma(axis, aperture) clipped to
/// B(apex, reach), verified to lie inside the domain (Interior) or inside its
/// complement (Exterior).
struct ConeParams {
    cplx apex{0, 0};
    cplx axis{1, 0};  // unit vector
    double aperture = 0;
    double reach = 0;
    ConeSide side = ConeSide::Exterior;
};

struct ConeSearchGrid {
    int axes = 64;
    int apertures = 32;
    std::vector<double> reaches = {1.0, 0.5, 0.25, 0.125};
    int samples = 16;  // radial x angular sampling per verification pass
    double min_radial = 0.0;  // skip cone samples closer to the apex (rasters)
};

struct ConeSearchResult {
    std::optional<ConeParams> cone;
    std::string note;
};

/// Dense membership check of the clipped cone. `samples` counts both radial
/// steps and angular steps.
inline bool verify_cone(const PlanarDomain& dom, const ConeParams& cone, int samples,
                        double min_radial = 0.0) {
    bool want_inside = cone.side == ConeSide::Interior;
    for (int k = 0; k < samples; ++k) {
        double t = cone.reach * (k + 0.5) / samples;
        if (t < min_radial) continue;
        for (int m = 0; m < samples; ++m) {
            double phi = cone.aperture * ((m + 0.5) / samples - 0.5);
            cplx p = cone.apex + t * cone.axis * unit_dir(phi);
            if (dom.contains(p) != want_inside) return false;
        }
    }
    return true;
}

/// Widest (aperture, reach) cone at boundary point x found by discrete
/// search: `axes` directions, `apertures` aperture steps in (0, pi), reaches
/// from the grid. Ties break toward larger aperture, then larger reach, then
/// the first axis in index order. The winner is re-verified at 4x sampling.
inline ConeSearchResult estimate_cone_params(const PlanarDomain& dom, cplx x, ConeSide side,
                                             const ConeSearchGrid& grid = {}) {
    ConeSearchResult best;
    double best_theta = -1, best_reach = -1;
    for (int j = grid.apertures; j >= 1; --j) {
        double theta = kPi * j / (grid.apertures + 1.0);
        if (theta <= best_theta) break;
        for (double r0 : grid.reaches) {
            if (theta == best_theta && r0 <= best_reach) continue;
            for (int a = 0; a < grid.axes; ++a) {
                ConeParams cand;
                cand.apex = x;
                cand.axis = unit_dir(2 * kPi * a / grid.axes);
                cand.aperture = theta;
                cand.reach = r0;
                cand.side = side;
                if (!verify_cone(dom, cand, grid.samples, grid.min_radial)) continue;
                if (!verify_cone(dom, cand, grid.samples * 4, grid.min_radial)) continue;
                if (theta > best_theta || (theta == best_theta && r0 > best_reach)) {
                    best.cone = cand;
                    best_theta = theta;
                    best_reach = r0;
                }
                break;  // this (theta, r0) is witnessed; larger axes cannot improve it
            }
        }
    }
    if (!best.cone) best.note = "cone condition fails at x";
    return best;
}

/// Fraction c1 of delta realized by a ball inside the clipped cone, as in the
/// exterior-cone metric bound: with t = min(delta, reach/2) the ball
/// B(apex + t axis, c1 delta) fits inside the clipped cone.
inline double cone_ball_fraction(const ConeParams& cone, double delta) {
    double t = std::min(delta, cone.reach / 2);
    double r = std::min(t * std::sin(cone.aperture / 2), cone.reach - t);
    double c1 = r / delta;
    return std::clamp(c1, 0.0, 1.0);
}

}  // namespace kobgeo
