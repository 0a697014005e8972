#pragma once

#include "echosite/mesh.hpp"

#include <vector>

namespace echosite::phantom {

/// Class-I geodesic sphere: every icosahedron face split into frequency^2
/// triangles and projected onto the sphere. 20 * frequency^2 faces, closed,
/// outward normals.
SurfaceMesh geodesic_sphere(const Vec3& center, double radius, unsigned frequency);

/// Geodesic sphere scaled per axis.
SurfaceMesh ellipsoid(const Vec3& center, const Vec3& semi_axes, unsigned frequency);

/// Square plate of side `side` centered at `center`, lying in the plane
/// spanned by `u` and `normal x u`, with `divisions`^2 quads (two triangles
/// each). Normals equal `normal`.
SurfaceMesh plate(const Vec3& center, const Vec3& normal, const Vec3& u, double side, unsigned divisions);

/// Supine-body stand-in: two ellipsoid caps ("chest" and "thigh"), the parts
/// above a bed plane y = bed_height, body axis along x. Centers sit below the
/// bed, so each cap meets the bed at an angle and its normals stay within a
/// cone around +y. Open surface; normals face +y.
struct TwoEllipsoidParams {
    Vec3 chest_center{0.35, -0.08, 0.0};
    Vec3 chest_semi_axes{0.17, 0.17, 0.18};  // apex 0.09 m above the bed
    Vec3 thigh_center{0.85, -0.06, 0.0};
    Vec3 thigh_semi_axes{0.22, 0.13, 0.08};  // apex 0.07 m above the bed
    double bed_height = 0.0;
    double target_edge = 0.01;  // approximate facet edge length (m)

    /// Same shape scaled about the origin, keeping the facet size.
    TwoEllipsoidParams scaled(double factor) const;
};

struct Phantom {
    SurfaceMesh mesh;
    std::vector<SiteSpec> sites;
};

/// The mesh plus "chest" and "thigh" sites centered on each apex with the
/// given radius.
Phantom two_ellipsoid(const TwoEllipsoidParams& params = {}, double site_radius = 0.03);

/// Geodesic sphere with 50,000 facets (frequency 50), radius 4 cm: edge
/// length near a quarter wavelength at 79 GHz. Reference mesh for cost checks.
SurfaceMesh standard_phantom(const Vec3& center = Vec3::Zero());

} // namespace echosite::phantom
