#include "echosite/phantom.hpp"

#include "echosite/errors.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace echosite::phantom {

namespace {

constexpr double kPhi = 1.618033988749894848;

const std::array<Vec3, 12> kIcosaVertices = {
    Vec3(-1, kPhi, 0), Vec3(1, kPhi, 0),  Vec3(-1, -kPhi, 0), Vec3(1, -kPhi, 0),
    Vec3(0, -1, kPhi), Vec3(0, 1, kPhi),  Vec3(0, -1, -kPhi), Vec3(0, 1, -kPhi),
    Vec3(kPhi, 0, -1), Vec3(kPhi, 0, 1),  Vec3(-kPhi, 0, -1), Vec3(-kPhi, 0, 1),
};

const std::array<Face, 20> kIcosaFaces = {{
    {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
    {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
    {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
    {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
}};

/// Unit-sphere geodesic mesh. Vertices on shared icosahedron edges are keyed
/// by their exact integer barycentric coordinates, so they are shared.
void unit_geodesic(unsigned n, std::vector<Vec3>& vertices, std::vector<Face>& faces) {
    if (n == 0) throw InvalidInput("geodesic frequency must be >= 1");
    std::unordered_map<std::uint64_t, std::uint32_t> index;

    auto vertex_id = [&](const Face& tri, unsigned i, unsigned j) -> std::uint32_t {
        // Weights on the three corners; zero weights dropped, rest sorted by corner id.
        std::array<std::pair<std::uint32_t, unsigned>, 3> w = {{{tri[0], n - i - j}, {tri[1], i}, {tri[2], j}}};
        std::sort(w.begin(), w.end());
        std::uint64_t key = 0;
        for (const auto& [id, weight] : w) {
            if (weight == 0) continue;
            key = (key << 21) | (static_cast<std::uint64_t>(id) << 16) | weight;
        }
        auto [it, inserted] = index.try_emplace(key, static_cast<std::uint32_t>(vertices.size()));
        if (inserted) {
            Vec3 p = Vec3::Zero();
            for (const auto& [id, weight] : w) p += kIcosaVertices[id] * static_cast<double>(weight);
            vertices.push_back(p.normalized());
        }
        return it->second;
    };

    for (const Face& tri : kIcosaFaces) {
        for (unsigned i = 0; i < n; ++i) {
            for (unsigned j = 0; i + j < n; ++j) {
                faces.push_back({vertex_id(tri, i, j), vertex_id(tri, i + 1, j), vertex_id(tri, i, j + 1)});
                if (i + j + 1 < n) {
                    faces.push_back({vertex_id(tri, i + 1, j), vertex_id(tri, i + 1, j + 1), vertex_id(tri, i, j + 1)});
                }
            }
        }
    }
}

unsigned frequency_for_edge(double largest_semi_axis, double edge) {
    // Geodesic edges on a unit sphere are about 1.15 / frequency long.
    return std::max(1u, static_cast<unsigned>(std::ceil(1.15 * largest_semi_axis / edge)));
}

/// Upper part (y >= cut) of an ellipsoid, compacted.
void append_upper_ellipsoid(const Vec3& center, const Vec3& semi, double cut, double edge,
                            std::vector<Vec3>& vertices, std::vector<Face>& faces) {
    std::vector<Vec3> unit;
    std::vector<Face> unit_faces;
    unit_geodesic(frequency_for_edge(semi.maxCoeff(), edge), unit, unit_faces);

    std::vector<Vec3> pts(unit.size());
    for (std::size_t i = 0; i < unit.size(); ++i) pts[i] = center + unit[i].cwiseProduct(semi);

    std::vector<std::int64_t> remap(unit.size(), -1);
    for (const Face& f : unit_faces) {
        if (pts[f[0]].y() < cut || pts[f[1]].y() < cut || pts[f[2]].y() < cut) continue;
        Face g{};
        for (int k = 0; k < 3; ++k) {
            if (remap[f[k]] < 0) {
                remap[f[k]] = static_cast<std::int64_t>(vertices.size());
                vertices.push_back(pts[f[k]]);
            }
            g[k] = static_cast<std::uint32_t>(remap[f[k]]);
        }
        faces.push_back(g);
    }
}

} // namespace

SurfaceMesh geodesic_sphere(const Vec3& center, double radius, unsigned frequency) {
    return ellipsoid(center, Vec3::Constant(radius), frequency);
}

SurfaceMesh ellipsoid(const Vec3& center, const Vec3& semi_axes, unsigned frequency) {
    if (!(semi_axes.minCoeff() > 0.0)) throw InvalidInput("ellipsoid semi-axes must be positive");
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    unit_geodesic(frequency, vertices, faces);
    for (Vec3& v : vertices) v = center + v.cwiseProduct(semi_axes);
    return SurfaceMesh(std::move(vertices), std::move(faces));
}

SurfaceMesh plate(const Vec3& center, const Vec3& normal, const Vec3& u, double side, unsigned divisions) {
    if (divisions == 0 || !(side > 0.0)) throw InvalidInput("plate needs positive size and divisions");
    const Vec3 n = normal.normalized();
    const Vec3 e1 = (u - u.dot(n) * n).normalized();
    const Vec3 e2 = n.cross(e1);
    const unsigned m = divisions + 1;
    const double h = side / divisions;
    std::vector<Vec3> vertices;
    vertices.reserve(static_cast<std::size_t>(m) * m);
    for (unsigned j = 0; j < m; ++j) {
        for (unsigned i = 0; i < m; ++i) {
            vertices.push_back(center + (i * h - 0.5 * side) * e1 + (j * h - 0.5 * side) * e2);
        }
    }
    std::vector<Face> faces;
    faces.reserve(2ull * divisions * divisions);
    for (unsigned j = 0; j < divisions; ++j) {
        for (unsigned i = 0; i < divisions; ++i) {
            const std::uint32_t a = j * m + i, b = a + 1, c = a + m + 1, d = a + m;
            faces.push_back({a, b, c});
            faces.push_back({a, c, d});
        }
    }
    return SurfaceMesh(std::move(vertices), std::move(faces));
}

TwoEllipsoidParams TwoEllipsoidParams::scaled(double factor) const {
    TwoEllipsoidParams p = *this;
    p.chest_center *= factor;
    p.chest_semi_axes *= factor;
    p.thigh_center *= factor;
    p.thigh_semi_axes *= factor;
    p.bed_height *= factor;
    return p;
}

Phantom two_ellipsoid(const TwoEllipsoidParams& params, double site_radius) {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    append_upper_ellipsoid(params.chest_center, params.chest_semi_axes, params.bed_height, params.target_edge,
                           vertices, faces);
    append_upper_ellipsoid(params.thigh_center, params.thigh_semi_axes, params.bed_height, params.target_edge,
                           vertices, faces);
    SurfaceMesh mesh(std::move(vertices), std::move(faces));

    std::vector<SiteSpec> sites;
    sites.push_back({"chest", params.chest_center + Vec3(0, params.chest_semi_axes.y(), 0), site_radius, {}});
    sites.push_back({"thigh", params.thigh_center + Vec3(0, params.thigh_semi_axes.y(), 0), site_radius, {}});
    return {std::move(mesh), std::move(sites)};
}

SurfaceMesh standard_phantom(const Vec3& center) {
    return geodesic_sphere(center, 0.04, 50);
}

} // namespace echosite::phantom
