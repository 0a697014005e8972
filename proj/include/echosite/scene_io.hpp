#pragma once

#include "echosite/mesh.hpp"
#include "echosite/placement.hpp"
#include "echosite/radar_config.hpp"
#include "echosite/sim.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace echosite {

RadarConfig config_from_json(const nlohmann::json& j, RadarConfig base = {});
nlohmann::json config_to_json(const RadarConfig& cfg);

RailSpec rail_from_json(const nlohmann::json& j, RailSpec base = {});
nlohmann::json rail_to_json(const RailSpec& rail);

/// {"objective", "rail", "best_index", "best_x_m", "baseline_x_m"?, "candidates": [{"x_m", "objective", "sites"}]}
nlohmann::json placement_report_to_json(const PlacementReport& report);

// ---------------------------------------------------------------------------
// Sites file: {"rail": {...}?, "sites": [{"name", "center": [x,y,z], "radius"} | {"name", "facets": [...]}]}

struct SitesFile {
    std::vector<SiteSpec> sites;
    std::optional<RailSpec> rail;
};

SitesFile parse_sites_json(const std::string& text);
std::string sites_to_json(const SitesFile& file);
SitesFile load_sites(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Scene file
//
// {
//   "config": {...}?, "duration_s": 30, "snr_db": 20?, "seed": 7?,
//   "range_axis": {"start_m", "spacing_m", "bins"}?,
//   "targets": [{"range_m", "theta_deg", "reflectivity": 1 | [re, im],
//                "waveform": {"kind": "pulse" | "sine" | "static" | "file", ...}}]
// }
//
// pulse: heart_rate_bpm, amplitude_m, ptt_s, pulse_width
// sine:  frequency_hz, amplitude_m, phase_rad
// file:  path (trace CSV, relative to the scene file), amplitude_m, ptt_s

enum class WaveformKind { Pulse, Sine, Static, File };

struct WaveformSpec {
    WaveformKind kind = WaveformKind::Pulse;
    PulseSpec pulse;             // Pulse and File
    double frequency = 1.2;      // Sine, Hz
    double amplitude = 50e-6;    // Sine, m
    double phase = 0.0;          // Sine, rad
    std::filesystem::path path;  // File
};

struct TargetSpec {
    double range = 1.0;
    double theta = 0.0;  // rad
    Complex reflectivity{1.0, 0.0};
    WaveformSpec waveform;
};

struct SceneSpec {
    RadarConfig config;
    double duration = 30.0;  // s
    std::optional<RangeAxis> axis;
    std::optional<double> snr_db;
    std::uint64_t seed = 0;
    std::vector<TargetSpec> targets;
};

/// Relative waveform paths are resolved against `base_dir`.
SceneSpec parse_scene_json(const std::string& text, const std::filesystem::path& base_dir = {});
SceneSpec load_scene(const std::filesystem::path& path);

/// Sampled displacement of one target at the scene's slow-time rate.
DisplacementTrace target_displacement(const WaveformSpec& spec, const SceneSpec& scene);
std::vector<SceneTarget> build_targets(const SceneSpec& scene);

} // namespace echosite
