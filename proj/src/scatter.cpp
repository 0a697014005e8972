#include "echosite/scatter.hpp"

#include "echosite/bvh.hpp"
#include "echosite/errors.hpp"
#include "echosite/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <unordered_map>

namespace echosite {

namespace {

constexpr Complex kJ{0.0, 1.0};

double effective_a0(const PoOptions& options, const RadarConfig& cfg) {
    return options.a0 > 0.0 ? options.a0 : 5.0 * cfg.wavelength();
}

/// Uniform hash grid over facet centroids with cell size equal to the query radius.
class CentroidGrid {
public:
    CentroidGrid(const SurfaceMesh& mesh, const std::vector<std::uint32_t>& members, double cell)
        : inv_cell_(1.0 / cell) {
        for (auto f : members) cells_[key(cell_of(mesh.centroid(f)))].push_back(f);
    }

    template <typename Visit>
    void for_each_near(const Vec3& p, Visit&& visit) const {
        const Eigen::Vector3i c = cell_of(p);
        for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const auto it = cells_.find(key(c + Eigen::Vector3i(dx, dy, dz)));
                    if (it == cells_.end()) continue;
                    for (auto f : it->second) visit(f);
                }
    }

private:
    Eigen::Vector3i cell_of(const Vec3& p) const {
        return (p * inv_cell_).array().floor().cast<int>();
    }
    static std::uint64_t key(const Eigen::Vector3i& c) {
        const auto u = [](int v) { return static_cast<std::uint64_t>(static_cast<std::uint32_t>(v) & 0x1FFFFF); };
        return (u(c.x()) << 42) | (u(c.y()) << 21) | u(c.z());
    }

    double inv_cell_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

} // namespace

AntennaPose AntennaPose::at(const Vec3& position, const RadarConfig& cfg) {
    return {position, Vec3::UnitZ(), 0.5 * cfg.wavelength()};
}

void AntennaPose::validate() const {
    if (!position.allFinite()) throw InvalidInput("antenna position must be finite");
    if (std::abs(polarization.norm() - 1.0) > 1e-9) throw InvalidInput("antenna polarization must be a unit vector");
    if (!(dipole_length > 0.0)) throw InvalidInput("dipole length must be positive");
}

FieldPair incident_field(const AntennaPose& pose, const Vec3& point, double wavenumber, double impedance,
                         double far_field_wavelengths) {
    const Vec3 delta = point - pose.position;
    const double range = delta.norm();
    const double wavelength = 2.0 * kPi / wavenumber;
    if (!(range > far_field_wavelengths * wavelength)) {
        throw PreconditionError("incident field requested " + std::to_string(range) +
                                " m from the antenna, inside the far-field guard");
    }
    const Vec3 k_hat = delta / range;
    const Vec3& p = pose.polarization;
    // sin(theta) * theta_hat for a dipole along p.
    const Vec3 pattern = p.dot(k_hat) * k_hat - p;
    const Complex amplitude =
        kJ * wavenumber * impedance * pose.dipole_length / (4.0 * kPi * range) * std::exp(-kJ * wavenumber * range);
    FieldPair out;
    out.e = amplitude * pattern.cast<Complex>();
    out.h = k_hat.cast<Complex>().cross(out.e) / impedance;
    return out;
}

CVec3 po_current(const Vec3& normal, const CVec3& h_inc) {
    return 2.0 * normal.cast<Complex>().cross(h_inc);
}

Complex radiated_field_z(const CVec3& current, const Vec3& source, const Vec3& antenna, double wavenumber,
                         double impedance, double dipole_length, const Vec3& polarization) {
    const double range = (antenna - source).norm();
    if (!(range > 0.0)) throw PreconditionError("radiating element coincides with the antenna");
    const Complex projected = polarization.cast<Complex>().dot(current);  // conjugates the real axis only
    return kJ * wavenumber * impedance * dipole_length / (4.0 * kPi * range) * projected *
           std::exp(-kJ * wavenumber * range);
}

double eye_window(const Vec3& point, const Vec3& center, double a0) {
    const double d = (point - center).norm();
    if (d > a0) return 0.0;
    return 0.5 * (std::cos(kPi * d / a0) + 1.0);
}

const char* to_string(MapKind kind) {
    return kind == MapKind::PoIntensity ? "po-intensity" : "cos-xi";
}

std::size_t ReflectionMap::argmax() const {
    if (values.empty()) throw InvalidInput("empty reflection map");
    return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

std::vector<double> ReflectionMap::to_db() const {
    if (kind != MapKind::PoIntensity) return values;
    const double peak = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = peak > 0.0 && values[i] > 0.0 ? 10.0 * std::log10(values[i] / peak)
                                               : -std::numeric_limits<double>::infinity();
    }
    return out;
}

std::vector<bool> lit_facets(const SurfaceMesh& mesh, const AntennaPose& pose, bool raycast_shadow) {
    std::vector<bool> lit(mesh.face_count());
    std::optional<TriangleBvh> bvh;
    if (raycast_shadow) bvh.emplace(mesh);
    const double eps = 1e-9 * std::max(1.0, mesh.bounds().extent().norm());
    for (std::uint32_t f = 0; f < mesh.face_count(); ++f) {
        bool on = mesh.normal(f).dot(pose.position - mesh.centroid(f)) > 0.0;
        if (on && bvh) on = !bvh->occluded(mesh.centroid(f) + eps * mesh.normal(f), pose.position, f);
        lit[f] = on;
    }
    return lit;
}

namespace {

std::vector<Complex> contributions_for(const SurfaceMesh& mesh, const AntennaPose& pose, const RadarConfig& cfg,
                                       const PoOptions& options, const std::vector<bool>& lit) {
    const double k = cfg.wavenumber();
    std::vector<Complex> out(mesh.face_count(), Complex{});
    parallel_for(mesh.face_count(), [&](std::size_t f) {
        if (!lit[f]) return;
        const Vec3& r_src = mesh.centroid(f);
        const FieldPair inc = incident_field(pose, r_src, k, cfg.impedance, options.far_field_wavelengths);
        const CVec3 j = po_current(mesh.normal(f), inc.h);
        out[f] = radiated_field_z(j, r_src, pose.position, k, cfg.impedance, pose.dipole_length, pose.polarization) *
                 mesh.area(f);
    });
    return out;
}

} // namespace

std::vector<Complex> po_contributions(const SurfaceMesh& mesh, const AntennaPose& pose, const RadarConfig& cfg,
                                      const PoOptions& options) {
    pose.validate();
    return contributions_for(mesh, pose, cfg, options, lit_facets(mesh, pose, options.raycast_shadow));
}

Complex coherent_po_sum(const SurfaceMesh& mesh, const AntennaPose& pose, const RadarConfig& cfg,
                        const PoOptions& options) {
    const auto c = po_contributions(mesh, pose, cfg, options);
    Complex sum{};
    for (const Complex& v : c) sum += v;
    return sum;
}

ReflectionMap po_intensity_map(const SurfaceMesh& mesh, const AntennaPose& pose, const RadarConfig& cfg,
                               const PoOptions& options) {
    const double a0 = effective_a0(options, cfg);
    pose.validate();
    const std::vector<bool> lit = lit_facets(mesh, pose, options.raycast_shadow);
    const std::vector<Complex> contrib = contributions_for(mesh, pose, cfg, options, lit);

    std::vector<std::uint32_t> sources;
    for (std::uint32_t f = 0; f < lit.size(); ++f) {
        if (lit[f]) sources.push_back(f);
    }
    const CentroidGrid grid(mesh, sources, a0);

    ReflectionMap map;
    map.kind = MapKind::PoIntensity;
    map.pose = pose;
    map.frequency = cfg.center_frequency;
    map.a0 = a0;
    map.values.assign(mesh.face_count(), 0.0);

    std::atomic<std::uint64_t> terms{0};
    const double a0_sq = a0 * a0;
    parallel_chunks(mesh.face_count(), [&](std::size_t begin, std::size_t end, std::size_t) {
        std::uint64_t local_terms = 0;
        for (std::size_t i = begin; i < end; ++i) {
            const Vec3& center = mesh.centroid(i);
            Complex acc{};
            grid.for_each_near(center, [&](std::uint32_t s) {
                const double d2 = (mesh.centroid(s) - center).squaredNorm();
                if (d2 > a0_sq) return;
                acc += 0.5 * (std::cos(kPi * std::sqrt(d2) / a0) + 1.0) * contrib[s];
                ++local_terms;
            });
            map.values[i] = std::norm(acc);
        }
        terms += local_terms;
    });
    map.evaluated_terms = terms.load();
    for (double v : map.values) {
        if (!std::isfinite(v)) throw std::logic_error("PO map produced a non-finite value");
    }
    return map;
}

ReflectionMap cos_xi_map(const SurfaceMesh& mesh, const AntennaPose& pose, double frequency) {
    ReflectionMap map;
    map.kind = MapKind::CosXi;
    map.pose = pose;
    map.frequency = frequency;
    map.values.resize(mesh.face_count());
    const auto normals = mesh.normals();
    const auto centroids = mesh.centroids();
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        const Vec3 los = pose.position - centroids[f];
        const double range = los.norm();
        map.values[f] = range > 0.0 ? std::clamp(normals[f].dot(los) / range, -1.0, 1.0) : 0.0;
    }
    map.evaluated_terms = mesh.face_count();
    return map;
}

} // namespace echosite
