#include "echosite/placement.hpp"

#include "echosite/errors.hpp"
#include "echosite/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace echosite {

void RailSpec::validate() const {
    if (!(x_min < x_max)) throw InvalidInput("rail needs x_min < x_max");
    if (!(step > 0.0)) throw InvalidInput("rail step must be positive");
    if (std::abs(direction.norm() - 1.0) > 1e-9) throw InvalidInput("rail direction must be a unit vector");
    if (candidates().size() < 2) throw InvalidInput("rail step leaves fewer than two candidates");
}

Vec3 RailSpec::position(double x) const {
    return origin + height * up + x * direction;
}

bool RailSpec::contains(double x) const {
    const double tol = 1e-9 * std::max(1.0, std::abs(x_max - x_min));
    return std::isfinite(x) && x >= x_min - tol && x <= x_max + tol;
}

std::vector<double> RailSpec::candidates() const {
    std::vector<double> xs;
    if (!(step > 0.0) || !(x_max >= x_min)) return xs;
    const auto n = static_cast<std::size_t>(std::floor((x_max - x_min) / step + 1e-9)) + 1;
    xs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) xs.push_back(x_min + static_cast<double>(i) * step);
    return xs;
}

const char* to_string(Objective objective) {
    return objective == Objective::Po ? "po" : "cosxi";
}

PositionScore score_map(const ReflectionMap& map, std::span<const RegionOfInterest> sites) {
    if (sites.empty()) throw InvalidInput("at least one site is required");
    PositionScore score;
    score.objective = std::numeric_limits<double>::infinity();
    for (const auto& roi : sites) {
        if (roi.facets.empty()) throw InvalidInput("site '" + roi.name + "' has no facets");
        SiteScore s{roi.name, -std::numeric_limits<double>::infinity(), roi.facets.front()};
        for (auto f : roi.facets) {
            if (f >= map.values.size()) throw InvalidInput("site '" + roi.name + "' facet outside the map");
            if (map.values[f] > s.value) {
                s.value = map.values[f];
                s.best_facet = f;
            }
        }
        score.objective = std::min(score.objective, s.value);
        score.sites.push_back(std::move(s));
    }
    return score;
}

PositionScore score_position(const SurfaceMesh& mesh, const AntennaPose& pose,
                             std::span<const RegionOfInterest> sites) {
    return score_map(cos_xi_map(mesh, pose), sites);
}

double baseline_position(const RailSpec& rail, double best_x, double offset) {
    if (rail.contains(best_x + offset)) return best_x + offset;
    return best_x - offset;
}

PlacementReport scan_rail(const SurfaceMesh& mesh, const RailSpec& rail, std::span<const RegionOfInterest> sites,
                          const RadarConfig& cfg, const ScanOptions& options) {
    rail.validate();
    if (sites.empty()) throw InvalidInput("at least one site is required");

    PlacementReport report;
    report.rail = rail;
    report.objective = options.objective;
    const std::vector<double> xs = rail.candidates();
    report.candidates.resize(xs.size());

    auto evaluate = [&](std::size_t i) {
        const AntennaPose pose = AntennaPose::at(rail.position(xs[i]), cfg);
        PositionScore score;
        if (options.objective == Objective::CosXi) {
            score = score_map(cos_xi_map(mesh, pose, cfg.center_frequency), sites);
        } else {
            ReflectionMap map = po_intensity_map(mesh, pose, cfg, options.po);
            const double peak = *std::max_element(map.values.begin(), map.values.end());
            if (peak > 0.0) {
                for (double& v : map.values) v /= peak;
            }
            score = score_map(map, sites);
        }
        score.x = xs[i];
        report.candidates[i] = std::move(score);
    };
    if (options.objective == Objective::CosXi) {
        parallel_for(xs.size(), evaluate);
    } else {
        // The PO map is itself parallel over facets.
        for (std::size_t i = 0; i < xs.size(); ++i) evaluate(i);
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < report.candidates.size(); ++i) {
        if (report.candidates[i].objective > report.candidates[best].objective) best = i;
    }
    report.best_index = best;
    report.best_x = xs[best];
    if (options.baseline_offset) report.baseline_x = baseline_position(rail, report.best_x, *options.baseline_offset);
    return report;
}

} // namespace echosite
