#pragma once

#include "echosite/geometry.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace echosite {

using Face = std::array<std::uint32_t, 3>;

/// Flat-facet quantities of one triangle.
struct Facet {
    Vec3 normal;    // unit
    Vec3 centroid;  // m
    double area;    // m^2
};

/// Faces below this area are considered degenerate and never stored.
inline constexpr double kMinFacetArea = 1e-12;

/// Immutable triangle mesh of a target surface, in meters. Per-face normals,
/// centroids and areas are computed once on construction.
class SurfaceMesh {
public:
    /// Validates indices and geometry. Throws InvalidInput for out-of-range
    /// indices, degenerate faces, non-finite coordinates or an empty mesh.
    SurfaceMesh(std::vector<Vec3> vertices, std::vector<Face> faces);

    std::size_t face_count() const noexcept { return faces_.size(); }
    std::size_t vertex_count() const noexcept { return vertices_.size(); }

    std::span<const Vec3> vertices() const noexcept { return vertices_; }
    std::span<const Face> faces() const noexcept { return faces_; }
    std::span<const Vec3> normals() const noexcept { return normals_; }
    std::span<const Vec3> centroids() const noexcept { return centroids_; }
    std::span<const double> areas() const noexcept { return areas_; }

    const Vec3& normal(std::size_t f) const { return normals_[f]; }
    const Vec3& centroid(std::size_t f) const { return centroids_[f]; }
    double area(std::size_t f) const { return areas_[f]; }

    double total_area() const noexcept { return total_area_; }
    const BoundingBox& bounds() const noexcept { return bounds_; }
    double max_edge_length() const;

    /// Divergence-theorem volume; positive for a closed mesh with outward normals.
    double signed_volume() const;
    /// Every undirected edge is shared by exactly two faces.
    bool is_closed() const;

    /// Faces sharing at least one vertex with `face` (the face itself excluded).
    std::vector<std::uint32_t> one_ring(std::uint32_t face) const;

    SurfaceMesh flipped() const;
    SurfaceMesh transformed(const Eigen::Isometry3d& transform) const;

private:
    std::vector<Vec3> vertices_;
    std::vector<Face> faces_;
    std::vector<Vec3> normals_;
    std::vector<Vec3> centroids_;
    std::vector<double> areas_;
    double total_area_ = 0.0;
    BoundingBox bounds_;
};

/// Geometry of a single face. Throws std::out_of_range for a bad index.
Facet facet_geometry(const SurfaceMesh& mesh, std::size_t face);

/// Raw triangle soup with degenerate faces removed.
struct CleanedFaces {
    std::vector<Face> faces;
    std::size_t dropped = 0;
};
CleanedFaces drop_degenerate_faces(std::span<const Vec3> vertices, std::span<const Face> faces);

// ---------------------------------------------------------------------------
// File ingestion

enum class MeshFormat { Auto, PlyAscii, Obj, StlBinary };

enum class NormalOrientation {
    Keep,          // use file winding as is
    Auto,          // Outward if closed, TowardSensor otherwise
    Outward,       // flip so that signed volume is positive
    TowardSensor,  // flip so that the area-weighted normal faces `sensor_direction`
};

struct LoadOptions {
    MeshFormat format = MeshFormat::Auto;
    double unit_scale = 1.0;  // 1e-3 for millimeter files
    NormalOrientation orientation = NormalOrientation::Auto;
    Vec3 sensor_direction = Vec3::UnitY();
};

struct LoadedMesh {
    SurfaceMesh mesh;
    std::size_t dropped_degenerate = 0;
    bool flipped = false;
};

/// Throws FormatError on malformed input, InvalidInput when nothing usable
/// remains after cleaning.
LoadedMesh load_mesh(const std::filesystem::path& path, const LoadOptions& options = {});
LoadedMesh parse_mesh(const std::string& content, MeshFormat format, const LoadOptions& options = {});

MeshFormat format_from_extension(const std::filesystem::path& path);

void save_ply(const SurfaceMesh& mesh, const std::filesystem::path& path);
void save_obj(const SurfaceMesh& mesh, const std::filesystem::path& path);
void save_stl(const SurfaceMesh& mesh, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Regions of interest

struct RegionOfInterest {
    std::string name;
    std::vector<std::uint32_t> facets;
};

/// A named body site, either given by facet ids or by a center and radius.
struct SiteSpec {
    std::string name;
    Vec3 center = Vec3::Zero();
    double radius = 0.0;
    std::vector<std::uint32_t> facets;  // takes precedence when non-empty
};

/// All facets whose centroid lies within `radius` of `center`.
/// Throws InvalidInput for radius <= 0 and NoCoverageError when nothing is selected.
RegionOfInterest resolve_roi(const SurfaceMesh& mesh, const Vec3& center, double radius,
                             std::string name = {});

RegionOfInterest resolve_site(const SurfaceMesh& mesh, const SiteSpec& site);
std::vector<RegionOfInterest> resolve_sites(const SurfaceMesh& mesh, std::span<const SiteSpec> sites);

} // namespace echosite
