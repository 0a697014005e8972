#include "echosite/bvh.hpp"

#include <algorithm>
#include <numeric>

namespace echosite {

namespace {

constexpr std::uint32_t kLeafSize = 4;

bool ray_box(const BoundingBox& box, const Vec3& origin, const Vec3& inv_dir, double t_max) {
    double t0 = 0.0, t1 = t_max;
    for (int a = 0; a < 3; ++a) {
        double near = (box.min[a] - origin[a]) * inv_dir[a];
        double far = (box.max[a] - origin[a]) * inv_dir[a];
        if (near > far) std::swap(near, far);
        t0 = std::max(t0, near);
        t1 = std::min(t1, far);
        if (t0 > t1) return false;
    }
    return true;
}

} // namespace

TriangleBvh::TriangleBvh(const SurfaceMesh& mesh) : mesh_(mesh) {
    order_.resize(mesh.face_count());
    std::iota(order_.begin(), order_.end(), 0u);
    nodes_.reserve(2 * mesh.face_count() / kLeafSize + 1);
    build(0, static_cast<std::uint32_t>(order_.size()));
}

std::uint32_t TriangleBvh::build(std::uint32_t begin, std::uint32_t end) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    BoundingBox box, centroid_box;
    const auto verts = mesh_.vertices();
    for (std::uint32_t i = begin; i < end; ++i) {
        for (auto v : mesh_.faces()[order_[i]]) box.extend(verts[v]);
        centroid_box.extend(mesh_.centroid(order_[i]));
    }
    nodes_[id].box = box;
    if (end - begin <= kLeafSize) {
        nodes_[id].first = begin;
        nodes_[id].count = end - begin;
        return id;
    }
    int axis = 0;
    centroid_box.extent().maxCoeff(&axis);
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         return mesh_.centroid(a)[axis] < mesh_.centroid(b)[axis];
                     });
    const std::uint32_t left = build(begin, mid);
    const std::uint32_t right = build(mid, end);
    nodes_[id].first = left;
    nodes_[id].right = right;
    return id;
}

bool TriangleBvh::hits_triangle(std::uint32_t face, const Vec3& origin, const Vec3& dir, double t_max) const {
    // Moller-Trumbore.
    const auto verts = mesh_.vertices();
    const Face& f = mesh_.faces()[face];
    const Vec3 e1 = verts[f[1]] - verts[f[0]];
    const Vec3 e2 = verts[f[2]] - verts[f[0]];
    const Vec3 p = dir.cross(e2);
    const double det = e1.dot(p);
    if (std::abs(det) < 1e-18) return false;
    const double inv = 1.0 / det;
    const Vec3 s = origin - verts[f[0]];
    const double u = s.dot(p) * inv;
    if (u < 0.0 || u > 1.0) return false;
    const Vec3 q = s.cross(e1);
    const double v = dir.dot(q) * inv;
    if (v < 0.0 || u + v > 1.0) return false;
    const double t = e2.dot(q) * inv;
    return t > 1e-9 && t < t_max;
}

bool TriangleBvh::occluded(const Vec3& from, const Vec3& to, std::uint32_t ignore_face) const {
    const Vec3 delta = to - from;
    const double length = delta.norm();
    if (length == 0.0) return false;
    const Vec3 dir = delta / length;
    const Vec3 inv_dir = dir.cwiseInverse();

    std::vector<std::uint32_t> stack{0};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        if (!ray_box(node.box, from, inv_dir, length)) continue;
        if (node.count > 0) {
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
                if (order_[i] != ignore_face && hits_triangle(order_[i], from, dir, length)) return true;
            }
        } else {
            stack.push_back(node.first);
            stack.push_back(node.right);
        }
    }
    return false;
}

} // namespace echosite
