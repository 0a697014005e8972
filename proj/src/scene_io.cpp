#include "echosite/scene_io.hpp"

#include "echosite/errors.hpp"
#include "echosite/map_io.hpp"

#include <cmath>

namespace echosite {

namespace {

using nlohmann::json;

Vec3 vec3_from(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) throw InvalidInput(std::string(what) + " must be a 3-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3_to(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json parse_document(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string(what) + ": " + e.what(), e.byte);
    }
}

template <typename Fn>
auto with_context(const char* what, Fn&& fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw InvalidInput(std::string(what) + ": " + e.what());
    }
}

} // namespace

RadarConfig config_from_json(const json& j, RadarConfig base) {
    base.center_frequency = j.value("center_frequency_hz", base.center_frequency);
    base.bandwidth = j.value("bandwidth_hz", base.bandwidth);
    base.tx_count = j.value("tx_count", base.tx_count);
    base.rx_count = j.value("rx_count", base.rx_count);
    base.element_spacing_wavelengths = j.value("element_spacing_wavelengths", base.element_spacing_wavelengths);
    base.slow_time_rate = j.value("slow_time_rate_hz", base.slow_time_rate);
    base.impedance = j.value("impedance_ohm", base.impedance);
    base.validate();
    return base;
}

json config_to_json(const RadarConfig& cfg) {
    return {{"center_frequency_hz", cfg.center_frequency},
            {"bandwidth_hz", cfg.bandwidth},
            {"tx_count", cfg.tx_count},
            {"rx_count", cfg.rx_count},
            {"element_spacing_wavelengths", cfg.element_spacing_wavelengths},
            {"slow_time_rate_hz", cfg.slow_time_rate},
            {"impedance_ohm", cfg.impedance}};
}

RailSpec rail_from_json(const json& j, RailSpec base) {
    if (j.contains("origin")) base.origin = vec3_from(j["origin"], "rail origin");
    if (j.contains("direction")) base.direction = vec3_from(j["direction"], "rail direction").normalized();
    if (j.contains("up")) base.up = vec3_from(j["up"], "rail up").normalized();
    base.height = j.value("height_m", base.height);
    base.x_min = j.value("x_min_m", base.x_min);
    base.x_max = j.value("x_max_m", base.x_max);
    base.step = j.value("step_m", base.step);
    base.validate();
    return base;
}

json rail_to_json(const RailSpec& rail) {
    return {{"origin", vec3_to(rail.origin)}, {"direction", vec3_to(rail.direction)}, {"up", vec3_to(rail.up)},
            {"height_m", rail.height},        {"x_min_m", rail.x_min},                {"x_max_m", rail.x_max},
            {"step_m", rail.step}};
}

json placement_report_to_json(const PlacementReport& report) {
    json j;
    j["objective"] = to_string(report.objective);
    j["rail"] = rail_to_json(report.rail);
    j["best_index"] = report.best_index;
    j["best_x_m"] = report.best_x;
    j["baseline_x_m"] = report.baseline_x ? json(*report.baseline_x) : json(nullptr);
    j["candidates"] = json::array();
    for (const PositionScore& c : report.candidates) {
        json sites = json::array();
        for (const SiteScore& s : c.sites) sites.push_back({{"name", s.name}, {"value", s.value}, {"best_facet", s.best_facet}});
        j["candidates"].push_back({{"x_m", c.x}, {"objective", c.objective}, {"sites", sites}});
    }
    return j;
}

SitesFile parse_sites_json(const std::string& text) {
    const json doc = parse_document(text, "sites file");
    return with_context("sites file", [&] {
        SitesFile out;
        const json& list = doc.is_array() ? doc : doc.at("sites");
        for (const json& s : list) {
            SiteSpec site;
            site.name = s.at("name").get<std::string>();
            if (s.contains("facets")) {
                site.facets = s["facets"].get<std::vector<std::uint32_t>>();
                if (site.facets.empty()) throw InvalidInput("site '" + site.name + "' lists no facets");
            } else {
                site.center = vec3_from(s.at("center"), "site center");
                site.radius = s.at("radius").get<double>();
            }
            out.sites.push_back(std::move(site));
        }
        if (out.sites.empty()) throw InvalidInput("sites file defines no sites");
        if (doc.is_object() && doc.contains("rail")) out.rail = rail_from_json(doc["rail"]);
        return out;
    });
}

std::string sites_to_json(const SitesFile& file) {
    json doc;
    doc["sites"] = json::array();
    for (const SiteSpec& s : file.sites) {
        json j{{"name", s.name}};
        if (!s.facets.empty()) j["facets"] = s.facets;
        else {
            j["center"] = vec3_to(s.center);
            j["radius"] = s.radius;
        }
        doc["sites"].push_back(j);
    }
    if (file.rail) doc["rail"] = rail_to_json(*file.rail);
    return doc.dump(2) + "\n";
}

SitesFile load_sites(const std::filesystem::path& path) {
    return parse_sites_json(read_text_file(path));
}

namespace {

WaveformSpec waveform_from_json(const json& j, const std::filesystem::path& base_dir) {
    WaveformSpec w;
    const std::string kind = j.value("kind", "pulse");
    if (kind == "pulse") w.kind = WaveformKind::Pulse;
    else if (kind == "sine") w.kind = WaveformKind::Sine;
    else if (kind == "static") w.kind = WaveformKind::Static;
    else if (kind == "file") w.kind = WaveformKind::File;
    else throw InvalidInput("unknown waveform kind '" + kind + "'");

    w.pulse.heart_rate_bpm = j.value("heart_rate_bpm", w.pulse.heart_rate_bpm);
    w.pulse.ptt = j.value("ptt_s", w.pulse.ptt);
    w.pulse.pulse_width = j.value("pulse_width", w.pulse.pulse_width);
    w.pulse.amplitude = j.value("amplitude_m", w.pulse.amplitude);
    w.amplitude = j.value("amplitude_m", w.amplitude);
    w.frequency = j.value("frequency_hz", w.frequency);
    w.phase = j.value("phase_rad", w.phase);
    if (w.kind == WaveformKind::File) {
        w.path = j.at("path").get<std::string>();
        if (w.path.is_relative()) w.path = base_dir / w.path;
    }
    return w;
}

} // namespace

SceneSpec parse_scene_json(const std::string& text, const std::filesystem::path& base_dir) {
    const json doc = parse_document(text, "scene file");
    return with_context("scene file", [&] {
        SceneSpec scene;
        if (doc.contains("config")) scene.config = config_from_json(doc["config"]);
        scene.duration = doc.value("duration_s", scene.duration);
        if (!(scene.duration > 0.0)) throw InvalidInput("scene duration must be positive");
        if (doc.contains("snr_db") && !doc["snr_db"].is_null()) scene.snr_db = doc["snr_db"].get<double>();
        scene.seed = doc.value("seed", scene.seed);
        if (doc.contains("range_axis")) {
            const json& a = doc["range_axis"];
            RangeAxis axis;
            axis.start = a.value("start_m", 0.0);
            axis.spacing = a.value("spacing_m", scene.config.range_resolution());
            axis.bins = a.at("bins").get<std::size_t>();
            scene.axis = axis;
        }
        for (const json& t : doc.at("targets")) {
            TargetSpec target;
            target.range = t.at("range_m").get<double>();
            target.theta = t.value("theta_deg", 0.0) * kPi / 180.0;
            if (t.contains("reflectivity")) {
                const json& r = t["reflectivity"];
                target.reflectivity = r.is_array() ? Complex(r.at(0).get<double>(), r.at(1).get<double>())
                                                   : Complex(r.get<double>(), 0.0);
            }
            if (t.contains("waveform")) target.waveform = waveform_from_json(t["waveform"], base_dir);
            scene.targets.push_back(std::move(target));
        }
        if (scene.targets.empty()) throw InvalidInput("scene has no targets");
        return scene;
    });
}

SceneSpec load_scene(const std::filesystem::path& path) {
    return parse_scene_json(read_text_file(path), path.parent_path());
}

DisplacementTrace target_displacement(const WaveformSpec& spec, const SceneSpec& scene) {
    const double rate = scene.config.slow_time_rate;
    const auto n = static_cast<std::size_t>(std::llround(scene.duration * rate));
    switch (spec.kind) {
    case WaveformKind::Pulse:
    case WaveformKind::File: {
        PulseSpec pulse = spec.pulse;
        pulse.duration = scene.duration;
        pulse.sample_rate = rate;
        if (spec.kind == WaveformKind::File) {
            pulse.kind = PulseTemplate::File;
            pulse.file_template = load_trace(spec.path);
        }
        return pulse_waveform(pulse).trace;
    }
    case WaveformKind::Sine: {
        DisplacementTrace t;
        t.sample_rate = rate;
        t.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            t.samples[i] = spec.amplitude * std::sin(2.0 * kPi * spec.frequency * static_cast<double>(i) / rate + spec.phase);
        }
        return t;
    }
    case WaveformKind::Static:
        break;
    }
    DisplacementTrace t;
    t.sample_rate = rate;
    t.samples.assign(n, 0.0);
    return t;
}

std::vector<SceneTarget> build_targets(const SceneSpec& scene) {
    std::vector<SceneTarget> out;
    out.reserve(scene.targets.size());
    for (const TargetSpec& t : scene.targets) {
        out.push_back({t.range, t.theta, t.reflectivity, target_displacement(t.waveform, scene)});
    }
    return out;
}

} // namespace echosite
