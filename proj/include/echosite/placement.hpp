#pragma once

#include "echosite/mesh.hpp"
#include "echosite/radar_config.hpp"
#include "echosite/scatter.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace echosite {

/// Linear rail the radar slides along. A rail coordinate x maps to the
/// antenna position origin + height * up + x * direction.
struct RailSpec {
    Vec3 origin = Vec3::Zero();
    Vec3 direction = Vec3::UnitX();
    Vec3 up = Vec3::UnitY();
    double height = 1.1;  // m above the bed plane
    double x_min = 0.0;
    double x_max = 1.2;
    double step = 0.01;

    void validate() const;
    Vec3 position(double x) const;
    bool contains(double x) const;
    /// x_min, x_min + step, ... up to x_max (inclusive within 1e-9 * step).
    std::vector<double> candidates() const;
};

enum class Objective { CosXi, Po };

const char* to_string(Objective objective);

struct SiteScore {
    std::string name;
    double value = 0.0;  // best in-region value
    std::uint32_t best_facet = 0;
};

struct PositionScore {
    double x = 0.0;  // rail coordinate; 0 for direct pose queries
    double objective = 0.0;
    std::vector<SiteScore> sites;
};

struct PlacementReport {
    RailSpec rail;
    Objective objective = Objective::CosXi;
    std::vector<PositionScore> candidates;
    std::size_t best_index = 0;
    double best_x = 0.0;
    std::optional<double> baseline_x;  // best_x shifted by the baseline offset

    const PositionScore& best() const { return candidates.at(best_index); }
};

/// Scores a reflection map: per site the max value inside its region, and the
/// objective is the min over sites. Throws InvalidInput for no sites or an
/// empty region.
PositionScore score_map(const ReflectionMap& map, std::span<const RegionOfInterest> sites);

/// score_map on the cos xi map for `pose`.
PositionScore score_position(const SurfaceMesh& mesh, const AntennaPose& pose,
                             std::span<const RegionOfInterest> sites);

struct ScanOptions {
    Objective objective = Objective::CosXi;
    PoOptions po;                          // used when objective == Po
    std::optional<double> baseline_offset;  // e.g. 0.3 m
};

/// Evaluates every rail candidate. The argmax is deterministic: ties go to the
/// smaller x. PO-objective maps are normalized by their own maximum.
PlacementReport scan_rail(const SurfaceMesh& mesh, const RailSpec& rail, std::span<const RegionOfInterest> sites,
                          const RadarConfig& cfg, const ScanOptions& options = {});

/// best_x + offset if that stays on the rail, otherwise best_x - offset.
double baseline_position(const RailSpec& rail, double best_x, double offset);

} // namespace echosite
