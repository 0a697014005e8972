#include "echosite/mesh.hpp"

#include "echosite/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace echosite {

namespace {

struct RawFacet {
    Vec3 cross;  // (b - a) x (c - a)
    Vec3 centroid;
};

RawFacet raw_facet(std::span<const Vec3> v, const Face& f) {
    const Vec3& a = v[f[0]];
    const Vec3& b = v[f[1]];
    const Vec3& c = v[f[2]];
    return {(b - a).cross(c - a), (a + b + c) / 3.0};
}

} // namespace

SurfaceMesh::SurfaceMesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
    if (faces_.empty()) throw InvalidInput("mesh has no faces");
    for (const Vec3& p : vertices_) {
        if (!p.allFinite()) throw InvalidInput("mesh has a non-finite vertex");
        bounds_.extend(p);
    }
    normals_.reserve(faces_.size());
    centroids_.reserve(faces_.size());
    areas_.reserve(faces_.size());
    for (std::size_t i = 0; i < faces_.size(); ++i) {
        const Face& f = faces_[i];
        for (auto idx : f) {
            if (idx >= vertices_.size()) {
                throw InvalidInput("face " + std::to_string(i) + " references vertex " +
                                   std::to_string(idx) + " of " + std::to_string(vertices_.size()));
            }
        }
        const RawFacet raw = raw_facet(vertices_, f);
        const double twice_area = raw.cross.norm();
        if (!(0.5 * twice_area > kMinFacetArea)) {
            throw InvalidInput("face " + std::to_string(i) + " is degenerate");
        }
        normals_.push_back(raw.cross / twice_area);
        centroids_.push_back(raw.centroid);
        areas_.push_back(0.5 * twice_area);
        total_area_ += 0.5 * twice_area;
    }
}

double SurfaceMesh::max_edge_length() const {
    double longest = 0.0;
    for (const Face& f : faces_) {
        for (int e = 0; e < 3; ++e) {
            longest = std::max(longest, (vertices_[f[e]] - vertices_[f[(e + 1) % 3]]).norm());
        }
    }
    return longest;
}

double SurfaceMesh::signed_volume() const {
    double six_v = 0.0;
    for (const Face& f : faces_) {
        six_v += vertices_[f[0]].dot(vertices_[f[1]].cross(vertices_[f[2]]));
    }
    return six_v / 6.0;
}

bool SurfaceMesh::is_closed() const {
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> edge_use;
    for (const Face& f : faces_) {
        for (int e = 0; e < 3; ++e) {
            auto a = f[e];
            auto b = f[(e + 1) % 3];
            if (a > b) std::swap(a, b);
            ++edge_use[{a, b}];
        }
    }
    return std::all_of(edge_use.begin(), edge_use.end(), [](const auto& kv) { return kv.second == 2; });
}

std::vector<std::uint32_t> SurfaceMesh::one_ring(std::uint32_t face) const {
    if (face >= faces_.size()) throw std::out_of_range("face index out of range");
    const Face& target = faces_[face];
    std::vector<std::uint32_t> ring;
    for (std::uint32_t i = 0; i < faces_.size(); ++i) {
        if (i == face) continue;
        const Face& f = faces_[i];
        const bool shares = std::any_of(f.begin(), f.end(), [&](std::uint32_t v) {
            return v == target[0] || v == target[1] || v == target[2];
        });
        if (shares) ring.push_back(i);
    }
    return ring;
}

SurfaceMesh SurfaceMesh::flipped() const {
    std::vector<Face> faces = faces_;
    for (Face& f : faces) std::swap(f[1], f[2]);
    return SurfaceMesh(vertices_, std::move(faces));
}

SurfaceMesh SurfaceMesh::transformed(const Eigen::Isometry3d& transform) const {
    std::vector<Vec3> vertices;
    vertices.reserve(vertices_.size());
    for (const Vec3& p : vertices_) vertices.push_back(transform * p);
    return SurfaceMesh(std::move(vertices), faces_);
}

Facet facet_geometry(const SurfaceMesh& mesh, std::size_t face) {
    if (face >= mesh.face_count()) {
        throw std::out_of_range("face " + std::to_string(face) + " out of range (" +
                                std::to_string(mesh.face_count()) + " faces)");
    }
    return {mesh.normal(face), mesh.centroid(face), mesh.area(face)};
}

CleanedFaces drop_degenerate_faces(std::span<const Vec3> vertices, std::span<const Face> faces) {
    CleanedFaces out;
    out.faces.reserve(faces.size());
    for (const Face& f : faces) {
        if (f[0] >= vertices.size() || f[1] >= vertices.size() || f[2] >= vertices.size()) {
            throw InvalidInput("face references a missing vertex");
        }
        if (0.5 * raw_facet(vertices, f).cross.norm() > kMinFacetArea) {
            out.faces.push_back(f);
        } else {
            ++out.dropped;
        }
    }
    return out;
}

RegionOfInterest resolve_roi(const SurfaceMesh& mesh, const Vec3& center, double radius, std::string name) {
    if (!(radius > 0.0)) throw InvalidInput("region radius must be positive");
    RegionOfInterest roi{std::move(name), {}};
    const double r2 = radius * radius;
    const auto centroids = mesh.centroids();
    for (std::uint32_t f = 0; f < centroids.size(); ++f) {
        if ((centroids[f] - center).squaredNorm() <= r2) roi.facets.push_back(f);
    }
    if (roi.facets.empty()) {
        throw NoCoverageError("region '" + roi.name + "' selects no facets");
    }
    return roi;
}

RegionOfInterest resolve_site(const SurfaceMesh& mesh, const SiteSpec& site) {
    if (site.facets.empty()) return resolve_roi(mesh, site.center, site.radius, site.name);
    RegionOfInterest roi{site.name, site.facets};
    for (auto f : roi.facets) {
        if (f >= mesh.face_count()) throw InvalidInput("site '" + site.name + "' lists a missing facet");
    }
    std::sort(roi.facets.begin(), roi.facets.end());
    roi.facets.erase(std::unique(roi.facets.begin(), roi.facets.end()), roi.facets.end());
    return roi;
}

std::vector<RegionOfInterest> resolve_sites(const SurfaceMesh& mesh, std::span<const SiteSpec> sites) {
    std::vector<RegionOfInterest> out;
    out.reserve(sites.size());
    for (const auto& s : sites) out.push_back(resolve_site(mesh, s));
    return out;
}

} // namespace echosite
