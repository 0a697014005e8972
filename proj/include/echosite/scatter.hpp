#pragma once

#include "echosite/mesh.hpp"
#include "echosite/radar_config.hpp"

#include <cstdint>
#include <vector>

namespace echosite {

/// Transmit/receive antenna modeled as an infinitesimal dipole.
struct AntennaPose {
    Vec3 position = Vec3::Zero();
    Vec3 polarization = Vec3::UnitZ();
    double dipole_length = 0.0;  // m; only scales amplitudes

    /// Dipole of length lambda/2 at `position`, z-polarized.
    static AntennaPose at(const Vec3& position, const RadarConfig& cfg);
    void validate() const;
};

struct FieldPair {
    CVec3 e;  // V/m
    CVec3 h;  // A/m
};

/// Far field of the antenna dipole (unit drive current) at `point`: theta-hat
/// polarized, magnitude k Z0 l sin(theta) / (4 pi R), phase exp(-jkR), and
/// H = k_hat x E / Z0. Throws PreconditionError when the range is not
/// larger than `far_field_wavelengths` wavelengths.
FieldPair incident_field(const AntennaPose& pose, const Vec3& point, double wavenumber,
                         double impedance = kFreeSpaceImpedance, double far_field_wavelengths = 10.0);

/// Physical-optics current on a perfect conductor: J = 2 n x H.
CVec3 po_current(const Vec3& normal, const CVec3& h_inc);

/// Field component along `polarization` (z by default) radiated to `antenna`
/// by a current element J at `source`:
///   j k Z0 l / (4 pi R) (p . J) exp(-jkR).
/// Throws PreconditionError when the points coincide.
Complex radiated_field_z(const CVec3& current, const Vec3& source, const Vec3& antenna, double wavenumber,
                         double impedance, double dipole_length, const Vec3& polarization = Vec3::UnitZ());

/// Raised-cosine window of radius a0 centered at `center`, evaluated at `point`.
double eye_window(const Vec3& point, const Vec3& center, double a0);

enum class MapKind { PoIntensity, CosXi };

const char* to_string(MapKind kind);

/// Per-facet scalar field for one antenna pose.
struct ReflectionMap {
    MapKind kind = MapKind::CosXi;
    std::vector<double> values;
    AntennaPose pose;
    double frequency = 0.0;
    double a0 = 0.0;                    // window radius; PO maps only
    std::uint64_t evaluated_terms = 0;  // per-facet (cos xi) or pairwise (PO) evaluations

    std::size_t argmax() const;  // smallest index among equal maxima
    /// 10 log10(value / max) for PO maps; cos xi maps are returned unchanged.
    std::vector<double> to_db() const;
};

struct PoOptions {
    double a0 = 0.0;  // window radius (m); 0 selects 5 wavelengths
    double far_field_wavelengths = 10.0;
    bool raycast_shadow = false;  // also require a clear line of sight to the antenna
};

/// Whether each facet carries PO current: n . (r - r') > 0, optionally also
/// unoccluded.
std::vector<bool> lit_facets(const SurfaceMesh& mesh, const AntennaPose& pose, bool raycast_shadow = false);

/// Received field contribution of each facet, E_z(r; r'') dS(r''), with the
/// PO current induced by the same antenna. Zero for unlit facets.
std::vector<Complex> po_contributions(const SurfaceMesh& mesh, const AntennaPose& pose, const RadarConfig& cfg,
                                      const PoOptions& options = {});

/// Unwindowed coherent PO return: sum of po_contributions.
Complex coherent_po_sum(const SurfaceMesh& mesh, const AntennaPose& pose, const RadarConfig& cfg,
                        const PoOptions& options = {});

/// Windowed PO intensity: for each facet center r',
///   |sum_{lit r'' : |r'' - r'| <= a0} w(r''; r') E_z(r; r'') dS(r'')|^2.
ReflectionMap po_intensity_map(const SurfaceMesh& mesh, const AntennaPose& pose, const RadarConfig& cfg,
                               const PoOptions& options = {});

/// cos xi = n . (r - r') / |r - r'| per facet, clipped to [-1, 1].
ReflectionMap cos_xi_map(const SurfaceMesh& mesh, const AntennaPose& pose, double frequency = 0.0);

} // namespace echosite
