#pragma once

#include "echosite/mesh.hpp"

#include <cstdint>
#include <vector>

namespace echosite {

/// Bounding-volume hierarchy over the faces of a mesh, used for any-hit
/// occlusion queries. Holds a reference to the mesh; the mesh must outlive it.
class TriangleBvh {
public:
    explicit TriangleBvh(const SurfaceMesh& mesh);

    /// True if any face other than `ignore_face` intersects the open segment
    /// from `from` to `to`.
    bool occluded(const Vec3& from, const Vec3& to, std::uint32_t ignore_face) const;

private:
    struct Node {
        BoundingBox box;
        std::uint32_t first = 0;  // leaf: offset into order_; inner: left child index
        std::uint32_t count = 0;  // 0 for inner nodes
        std::uint32_t right = 0;
    };

    std::uint32_t build(std::uint32_t begin, std::uint32_t end);
    bool hits_triangle(std::uint32_t face, const Vec3& origin, const Vec3& dir, double t_max) const;

    const SurfaceMesh& mesh_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
};

} // namespace echosite
