// Command-line front end for the echosite library.

#include "echosite/beamform.hpp"
#include "echosite/errors.hpp"
#include "echosite/eval.hpp"
#include "echosite/map_io.hpp"
#include "echosite/mesh.hpp"
#include "echosite/phantom.hpp"
#include "echosite/placement.hpp"
#include "echosite/scatter.hpp"
#include "echosite/scene_io.hpp"
#include "echosite/service.hpp"
#include "echosite/sim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

using namespace echosite;
using nlohmann::json;

namespace {

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") std::cout << text;
    else write_text_file(out, text);
}

LoadOptions load_options(const std::string& orientation, double unit_scale) {
    LoadOptions o;
    o.unit_scale = unit_scale;
    if (orientation == "keep") o.orientation = NormalOrientation::Keep;
    else if (orientation == "outward") o.orientation = NormalOrientation::Outward;
    else if (orientation == "sensor") o.orientation = NormalOrientation::TowardSensor;
    return o;
}

struct MeshArgs {
    std::string path;
    std::string orientation = "auto";
    double unit_scale = 1.0;

    void add(CLI::App* cmd, bool positional = false) {
        if (positional) cmd->add_option("path", path, "Mesh file (.ply, .obj, .stl)")->required();
        else cmd->add_option("--mesh", path, "Mesh file (.ply, .obj, .stl)")->required();
        cmd->add_option("--orient", orientation, "Normal orientation")
            ->check(CLI::IsMember({"auto", "keep", "outward", "sensor"}));
        cmd->add_option("--unit-scale", unit_scale, "Multiply coordinates, e.g. 0.001 for mm files");
    }
    LoadedMesh load() const { return load_mesh(path, load_options(orientation, unit_scale)); }
};

struct RailArgs {
    RailSpec rail;
    void add(CLI::App* cmd) {
        cmd->add_option("--height", rail.height, "Rail height above the bed plane (m)");
        cmd->add_option("--xmin", rail.x_min, "Rail start (m)");
        cmd->add_option("--xmax", rail.x_max, "Rail end (m)");
        cmd->add_option("--step", rail.step, "Rail step (m)");
    }
};

json mesh_info(const LoadedMesh& loaded) {
    const SurfaceMesh& m = loaded.mesh;
    const auto& b = m.bounds();
    return {{"face_count", m.face_count()},
            {"vertex_count", m.vertex_count()},
            {"area_m2", m.total_area()},
            {"bbox", {{"min", {b.min.x(), b.min.y(), b.min.z()}}, {"max", {b.max.x(), b.max.y(), b.max.z()}}}},
            {"closed", m.is_closed()},
            {"max_edge_m", m.max_edge_length()},
            {"dropped_degenerate", loaded.dropped_degenerate},
            {"flipped", loaded.flipped}};
}

void save_any(const SurfaceMesh& mesh, const std::string& path) {
    switch (format_from_extension(path)) {
    case MeshFormat::Obj: save_obj(mesh, path); break;
    case MeshFormat::StlBinary: save_stl(mesh, path); break;
    default: save_ply(mesh, path); break;
    }
}

std::vector<SiteSpec> load_site_specs(const std::string& path, std::optional<RailSpec>* rail = nullptr) {
    SitesFile file = load_sites(path);
    if (rail) *rail = file.rail;
    return file.sites;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radar placement, scattering and pulse-wave extraction toolkit"};
    app.require_subcommand(1);

    // mesh -----------------------------------------------------------------
    auto* mesh_cmd = app.add_subcommand("mesh", "Mesh utilities");
    mesh_cmd->require_subcommand(1);
    MeshArgs info_args;
    auto* info_cmd = mesh_cmd->add_subcommand("info", "Print face count, area and bounding box as JSON");
    info_args.add(info_cmd, true);
    info_cmd->callback([&] { std::cout << mesh_info(info_args.load()).dump(2) << '\n'; });

    std::string phantom_kind = "two-ellipsoid", phantom_out, phantom_sites;
    double phantom_scale = 1.0;
    auto* phantom_cmd = mesh_cmd->add_subcommand("phantom", "Write a synthetic phantom mesh");
    phantom_cmd->add_option("--kind", phantom_kind, "Phantom kind")
        ->check(CLI::IsMember({"two-ellipsoid", "sphere", "standard"}));
    phantom_cmd->add_option("--scale", phantom_scale, "Scale factor for the two-ellipsoid phantom");
    phantom_cmd->add_option("--out", phantom_out, "Output mesh path")->required();
    phantom_cmd->add_option("--sites", phantom_sites, "Also write the phantom's sites file");
    phantom_cmd->callback([&] {
        if (phantom_kind == "two-ellipsoid") {
            const auto p = phantom::two_ellipsoid(phantom::TwoEllipsoidParams{}.scaled(phantom_scale));
            save_any(p.mesh, phantom_out);
            if (!phantom_sites.empty()) write_text_file(phantom_sites, sites_to_json(SitesFile{p.sites, RailSpec{}}));
        } else {
            const SurfaceMesh m = phantom_kind == "standard"
                                      ? phantom::standard_phantom()
                                      : phantom::geodesic_sphere(Vec3(0.6, 0.0, 0.0), 0.1, 16);
            save_any(m, phantom_out);
        }
    });

    // scatter --------------------------------------------------------------
    auto* scatter_cmd = app.add_subcommand("scatter", "Reflection maps for one radar position");
    scatter_cmd->require_subcommand(1);
    MeshArgs scatter_mesh;
    RailArgs scatter_rail;
    double radar_x = 0.6, freq = 79e9, a0_lambda = 5.0;
    std::string map_out, map_format = "json";
    bool in_db = false, shadow = false;
    for (const char* kind : {"po", "cosxi"}) {
        auto* cmd = scatter_cmd->add_subcommand(kind, std::string(kind) == "po" ? "Windowed physical-optics intensity map"
                                                                             : "cos(xi) fast-path map");
        scatter_mesh.add(cmd);
        scatter_rail.add(cmd);
        cmd->add_option("--radar-x", radar_x, "Rail coordinate of the radar (m)");
        cmd->add_option("--freq", freq, "Carrier frequency (Hz)");
        cmd->add_option("--out", map_out, "Output path (stdout if omitted)");
        cmd->add_option("--format", map_format, "Output format")->check(CLI::IsMember({"json", "csv"}));
        if (std::string(kind) == "po") {
            cmd->add_option("--a0-lambda", a0_lambda, "Window radius in wavelengths");
            cmd->add_flag("--db", in_db, "Write values in dB relative to the maximum");
            cmd->add_flag("--shadow", shadow, "Ray-cast shadowing in addition to back-face culling");
        }
        cmd->callback([&, po = std::string(kind) == "po"] {
            const SurfaceMesh mesh = scatter_mesh.load().mesh;
            RadarConfig cfg;
            cfg.center_frequency = freq;
            const RailSpec& rail = scatter_rail.rail;
            const AntennaPose pose = AntennaPose::at(rail.position(radar_x), cfg);
            ReflectionMap map;
            if (po) {
                PoOptions opt;
                opt.a0 = a0_lambda * cfg.wavelength();
                opt.raycast_shadow = shadow;
                map = po_intensity_map(mesh, pose, cfg, opt);
            } else {
                map = cos_xi_map(mesh, pose, freq);
            }
            emit(map_format == "csv" ? map_to_csv(map, in_db) : map_to_json(map, in_db), map_out);
        });
    }

    // place ----------------------------------------------------------------
    auto* place_cmd = app.add_subcommand("place", "Radar placement along the rail");
    place_cmd->require_subcommand(1);
    auto* scan_cmd = place_cmd->add_subcommand("scan", "Score every rail position and pick the best");
    MeshArgs scan_mesh;
    RailArgs scan_rail_args;
    std::string scan_sites, scan_out, scan_objective = "cosxi";
    double baseline = 0.3;
    scan_mesh.add(scan_cmd);
    scan_rail_args.add(scan_cmd);
    scan_cmd->add_option("--sites", scan_sites, "Sites file")->required();
    scan_cmd->add_option("--objective", scan_objective, "Scoring map")->check(CLI::IsMember({"cosxi", "po"}));
    scan_cmd->add_option("--baseline-offset", baseline, "Offset of the reported baseline position (m)");
    scan_cmd->add_option("--out", scan_out, "Report path (stdout if omitted)");
    scan_cmd->callback([&] {
        const SurfaceMesh mesh = scan_mesh.load().mesh;
        const auto specs = load_site_specs(scan_sites);
        const auto rois = resolve_sites(mesh, specs);
        ScanOptions opt;
        opt.objective = scan_objective == "po" ? Objective::Po : Objective::CosXi;
        opt.baseline_offset = baseline;
        const PlacementReport report = scan_rail(mesh, scan_rail_args.rail, rois, RadarConfig{}, opt);
        emit(placement_report_to_json(report).dump(2) + "\n", scan_out);
    });

    // sim ------------------------------------------------------------------
    auto* sim_cmd = app.add_subcommand("sim", "Radar cube synthesis");
    sim_cmd->require_subcommand(1);
    auto* make_cmd = sim_cmd->add_subcommand("make", "Simulate a radar cube from a scene file");
    std::string scene_path, cube_out;
    std::optional<double> snr;
    std::optional<std::uint64_t> seed;
    make_cmd->add_option("--scene", scene_path, "Scene JSON")->required();
    make_cmd->add_option("--snr", snr, "SNR in dB relative to the strongest target");
    make_cmd->add_option("--seed", seed, "Noise seed");
    make_cmd->add_option("--out", cube_out, "Cube path; a .json sidecar is written next to it")->required();
    make_cmd->callback([&] {
        const SceneSpec scene = load_scene(scene_path);
        SimOptions opt;
        if (scene.axis) opt.axis = *scene.axis;
        opt.snr_db = snr ? snr : scene.snr_db;
        opt.seed = seed.value_or(scene.seed);
        const auto targets = build_targets(scene);
        const RadarCube cube = simulate_cube(targets, scene.config, opt);
        save_cube(cube, cube_out);
        json summary{{"elements", cube.elements()}, {"bins", cube.bins()}, {"times", cube.times()}, {"targets", json::array()}};
        for (const SceneTarget& t : targets) {
            summary["targets"].push_back({{"range_m", t.range}, {"bin", cube.range_axis().nearest(t.range)}});
        }
        std::cout << summary.dump(2) << '\n';
    });

    // beamform -------------------------------------------------------------
    auto* bf_cmd = app.add_subcommand("beamform", "MVDR beamforming and displacement extraction");
    bf_cmd->require_subcommand(1);
    auto* extract_cmd = bf_cmd->add_subcommand("extract", "Recover a displacement trace at one bin and angle");
    std::string cube_path, trace_out, corr_mode = "centered";
    std::optional<std::size_t> bin;
    double theta_deg = 0.0, loading = 1e-3;
    extract_cmd->add_option("--cube", cube_path, "Cube path")->required();
    extract_cmd->add_option("--bin", bin, "Range bin (peak-power bin if omitted)");
    extract_cmd->add_option("--theta-deg", theta_deg, "Look direction (degrees)");
    extract_cmd->add_option("--loading", loading, "Diagonal loading factor");
    extract_cmd->add_option("--correlation", corr_mode, "Correlation estimate")
        ->check(CLI::IsMember({"centered", "raw"}));
    extract_cmd->add_option("--out", trace_out, "Trace CSV (stdout if omitted)");
    extract_cmd->callback([&] {
        const RadarCube cube = load_cube(cube_path);
        const std::size_t b = bin.value_or(peak_power_bin(cube));
        ExtractOptions opt;
        opt.loading = loading;
        opt.mode = corr_mode == "raw" ? CorrelationMode::Raw : CorrelationMode::Centered;
        const DisplacementTrace trace =
            extract_displacement(cube, b, theta_deg * kPi / 180.0, cube.config().wavenumber(), opt);
        if (trace.low_signal) std::cerr << "warning: beamformer output vanished at some samples\n";
        emit(trace_to_csv(trace), trace_out);
    });

    // eval -----------------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("eval", "Score traces against references");
    eval_cmd->require_subcommand(1);
    auto* score_cmd = eval_cmd->add_subcommand("score", "Correlation and scale-fitted RMS error for one pair");
    std::string est_path, ref_path, score_out;
    EvalWindow window;
    double max_lag = 0.0;
    score_cmd->add_option("--est", est_path, "Estimated trace CSV")->required();
    score_cmd->add_option("--ref", ref_path, "Reference trace CSV")->required();
    score_cmd->add_option("--T", window.length, "Window length (s)");
    score_cmd->add_option("--start", window.start, "Window start (s)");
    score_cmd->add_option("--max-lag", max_lag, "Lag search range (s); 0 disables alignment");
    score_cmd->add_option("--out", score_out, "Score JSON (stdout if omitted)");
    score_cmd->callback([&] {
        EvalCase c{load_trace(est_path), load_trace(ref_path), "site", "method", "1"};
        std::vector<std::string> warnings;
        const CaseScore s = score_case(c, ReportOptions{window, max_lag}, &warnings);
        for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
        emit(json{{"rho", s.rho}, {"epsilon_m", s.epsilon}, {"alpha", s.alpha}, {"lag_s", s.lag}, {"window_s", window.length}}
                     .dump(2) + "\n",
             score_out);
    });

    auto* report_cmd = eval_cmd->add_subcommand("report", "Per-method table over many cases");
    std::string cases_path, report_out, report_format = "text";
    ReportOptions report_opt;
    report_cmd->add_option("--cases", cases_path,
                           "JSON list of {est, ref, site, method, trial}; paths relative to the file")
        ->required();
    report_cmd->add_option("--T", report_opt.window.length, "Window length (s)");
    report_cmd->add_option("--start", report_opt.window.start, "Window start (s)");
    report_cmd->add_option("--max-lag", report_opt.max_lag, "Lag search range (s)");
    report_cmd->add_option("--format", report_format, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));
    report_cmd->add_option("--out", report_out, "Output path (stdout if omitted)");
    report_cmd->callback([&] {
        const std::filesystem::path base = std::filesystem::path(cases_path).parent_path();
        const json list = json::parse(read_text_file(cases_path));
        std::vector<EvalCase> cases;
        for (const json& j : list) {
            auto resolve = [&](const std::string& p) {
                const std::filesystem::path path(p);
                return path.is_relative() ? base / path : path;
            };
            cases.push_back({load_trace(resolve(j.at("est").get<std::string>())),
                             load_trace(resolve(j.at("ref").get<std::string>())), j.at("site").get<std::string>(),
                             j.at("method").get<std::string>(), j.value("trial", std::string("1"))});
        }
        const EvalReport report = make_report(cases, report_opt);
        for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
        emit(report_format == "csv"    ? report_to_csv(report)
             : report_format == "json" ? report_to_json(report)
                                       : report_to_text(report),
             report_out);
    });

    // serve ----------------------------------------------------------------
    auto* serve_cmd = app.add_subcommand("serve", "Local HTTP service for the placement UI");
    MeshArgs serve_mesh;
    RailArgs serve_rail;
    std::string serve_sites, static_dir;
    ServerOptions server_opt;
    serve_mesh.add(serve_cmd);
    serve_rail.add(serve_cmd);
    serve_cmd->add_option("--sites", serve_sites, "Sites file")->required();
    serve_cmd->add_option("--port", server_opt.port, "TCP port");
    serve_cmd->add_option("--host", server_opt.host, "Bind address");
    serve_cmd->add_option("--static", static_dir, "Directory served at /");
    serve_cmd->callback([&] {
        std::optional<RailSpec> file_rail;
        auto specs = load_site_specs(serve_sites, &file_rail);
        const RailSpec rail = file_rail && serve_cmd->count("--xmin") + serve_cmd->count("--xmax") +
                                                   serve_cmd->count("--step") + serve_cmd->count("--height") ==
                                               0
                                  ? *file_rail
                                  : serve_rail.rail;
        PlacementService service(RadarConfig{}, rail);
        service.load(serve_mesh.load().mesh, std::move(specs), rail);
        if (!static_dir.empty()) server_opt.static_dir = static_dir;
        HttpServer server(service, server_opt);
        const int port = server.start();
        std::cout << "serving on http://" << server_opt.host << ':' << port << std::endl;
        server.wait();
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
