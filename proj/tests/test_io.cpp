#include <doctest.h>

#include "echosite/errors.hpp"
#include "echosite/map_io.hpp"
#include "echosite/phantom.hpp"
#include "echosite/scene_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace echosite;

namespace {

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "echosite_test_io";
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("trace CSV round trip") {
    DisplacementTrace tr;
    tr.sample_rate = 145.6;
    tr.t0 = 0.25;
    for (int i = 0; i < 300; ++i) tr.samples.push_back(1e-4 * std::sin(0.05 * i));
    const std::string csv = trace_to_csv(tr);
    CHECK(csv.rfind("t,displacement_m\n", 0) == 0);
    const DisplacementTrace back = trace_from_csv(csv);
    REQUIRE(back.size() == tr.size());
    CHECK(back.sample_rate == doctest::Approx(145.6).epsilon(1e-9));
    CHECK(back.t0 == doctest::Approx(0.25).epsilon(1e-12));
    for (std::size_t i = 0; i < tr.size(); ++i) CHECK(back.samples[i] == doctest::Approx(tr.samples[i]).epsilon(1e-12));

    const auto path = temp_dir() / "trace.csv";
    save_trace(tr, path);
    CHECK(load_trace(path).size() == tr.size());
}

TEST_CASE("trace CSV errors") {
    CHECK_THROWS_AS(trace_from_csv("t,displacement_m\n0,1\n0.1 2\n"), FormatError);
    CHECK_THROWS_AS(trace_from_csv("t,displacement_m\n0,1\n0.1,abc\n"), FormatError);
    CHECK_THROWS_AS(trace_from_csv("t,displacement_m\n0,1\n0.1,2\n0.3,2\n"), FormatError);
    CHECK_THROWS_AS(trace_from_csv("t,displacement_m\n0,1\n"), InvalidInput);
}

TEST_CASE("trace interpolation and resampling") {
    DisplacementTrace tr{{0.0, 2.0, 4.0}, 10.0};
    CHECK(tr.value_at(0.05) == doctest::Approx(1.0));
    CHECK(tr.value_at(-1.0) == 0.0);
    CHECK(tr.value_at(5.0) == 4.0);
    const DisplacementTrace r = tr.resampled(20.0, 0.0, 5);
    CHECK(r.samples == std::vector<double>{0.0, 1.0, 2.0, 3.0, 4.0});
    DisplacementTrace bad{{1.0, NAN}, 10.0};
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("cube save and load") {
    RadarConfig cfg;
    RadarCube cube(cfg, {0.5, cfg.range_resolution(), 4}, 20, 1.5);
    for (std::size_t m = 0; m < cube.elements(); ++m)
        for (std::size_t b = 0; b < 4; ++b)
            for (std::size_t t = 0; t < 20; ++t) cube.at(m, b, t) = Complex(0.1 * m - 0.3 * b, 0.01 * t);
    cube.seed = 77;
    cube.snr_db = 12.5;
    const auto path = temp_dir() / "cube.rc";
    save_cube(cube, path);
    CHECK(std::filesystem::file_size(path) == 12 * 4 * 20 * 8);
    const RadarCube back = load_cube(path);
    CHECK(back.elements() == 12);
    CHECK(back.bins() == 4);
    CHECK(back.times() == 20);
    CHECK(back.t0() == 1.5);
    CHECK(back.range_axis().start == 0.5);
    CHECK(back.seed == 77u);
    CHECK(back.snr_db == 12.5);
    CHECK(back.config().center_frequency == cfg.center_frequency);
    for (std::size_t i = 0; i < cube.data().size(); ++i) {
        CHECK(std::abs(back.data()[i] - cube.data()[i]) < 1e-6);
    }

    std::filesystem::resize_file(path, 12 * 4 * 20 * 8 - 8);
    CHECK_THROWS_AS(load_cube(path), FormatError);
}

TEST_CASE("reflection map JSON and CSV") {
    const SurfaceMesh sphere = phantom::geodesic_sphere(Vec3::Zero(), 0.05, 3);
    const RadarConfig cfg;
    const ReflectionMap map = cos_xi_map(sphere, AntennaPose::at(Vec3(0.1, 0.5, 0), cfg), cfg.center_frequency);
    const ReflectionMap back = map_from_json(map_to_json(map));
    CHECK(back.kind == MapKind::CosXi);
    CHECK(back.values == map.values);
    CHECK((back.pose.position - map.pose.position).norm() == 0.0);
    CHECK(back.frequency == map.frequency);

    const std::string csv = map_to_csv(map);
    CHECK(csv.rfind("face_id,value\n0,", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == sphere.face_count() + 1);

    ReflectionMap po = map;
    po.kind = MapKind::PoIntensity;
    po.values.assign(sphere.face_count(), 1.0);
    po.values[0] = 10.0;
    po.values[1] = 0.0;
    const auto j = nlohmann::json::parse(map_to_json(po, true));
    CHECK(j["scale"] == "db-relative-to-max");
    CHECK(j["values"][0] == 0.0);
    CHECK(j["values"][1].is_null());
    CHECK(j["values"][2].get<double>() == doctest::Approx(-10.0));
    CHECK_THROWS_AS(map_from_json(map_to_json(po, true)), InvalidInput);
}

TEST_CASE("config and rail JSON round trip") {
    RadarConfig cfg;
    cfg.center_frequency = 77e9;
    cfg.tx_count = 2;
    const RadarConfig back = config_from_json(config_to_json(cfg));
    CHECK(back.center_frequency == 77e9);
    CHECK(back.tx_count == 2);
    CHECK(back.virtual_elements() == 8);

    RailSpec rail;
    rail.height = 0.9;
    rail.x_min = -0.2;
    const RailSpec rb = rail_from_json(rail_to_json(rail));
    CHECK(rb.height == 0.9);
    CHECK(rb.x_min == -0.2);
    CHECK(rb.step == rail.step);
}

TEST_CASE("sites files") {
    const SitesFile f = parse_sites_json(R"({
        "sites": [{"name": "chest", "center": [0.35, 0.09, 0], "radius": 0.03},
                  {"name": "thigh", "facets": [1, 2, 3]}],
        "rail": {"height_m": 1.0, "x_min_m": 0.1, "x_max_m": 1.1, "step_m": 0.05}})");
    REQUIRE(f.sites.size() == 2);
    CHECK(f.sites[0].name == "chest");
    CHECK(f.sites[0].radius == 0.03);
    CHECK((f.sites[0].center - Vec3(0.35, 0.09, 0)).norm() == 0.0);
    CHECK(f.sites[1].facets == std::vector<std::uint32_t>{1, 2, 3});
    REQUIRE(f.rail);
    CHECK(f.rail->height == 1.0);
    CHECK(f.rail->step == 0.05);

    const SitesFile again = parse_sites_json(sites_to_json(f));
    CHECK(again.sites.size() == 2);
    CHECK(again.sites[1].facets == f.sites[1].facets);
    CHECK(again.rail->x_max == 1.1);

    const SitesFile bare = parse_sites_json(R"([{"name": "a", "center": [0, 0, 0], "radius": 0.1}])");
    CHECK(bare.sites.size() == 1);
    CHECK(!bare.rail);

    CHECK_THROWS_AS(parse_sites_json("{\"sites\": [}"), FormatError);
    CHECK_THROWS_AS(parse_sites_json(R"({"sites": []})"), InvalidInput);
    CHECK_THROWS_AS(parse_sites_json(R"({"sites": [{"name": "x", "center": [0, 0], "radius": 1}]})"), InvalidInput);
}

TEST_CASE("scene files build targets") {
    const auto dir = temp_dir();
    DisplacementTrace tpl;
    tpl.sample_rate = 200.0;
    for (int i = 0; i < 200; ++i) tpl.samples.push_back(std::sin(2 * kPi * i / 200.0));
    save_trace(tpl, dir / "template.csv");

    const std::string text = R"({
        "duration_s": 4, "snr_db": 15, "seed": 9,
        "range_axis": {"start_m": 0.0, "bins": 40},
        "targets": [
          {"range_m": 1.0, "theta_deg": 15, "reflectivity": [0.6, 0.6],
           "waveform": {"kind": "pulse", "heart_rate_bpm": 62, "amplitude_m": 1e-4, "ptt_s": 0.12}},
          {"range_m": 1.0, "theta_deg": -15,
           "waveform": {"kind": "sine", "frequency_hz": 1.2, "amplitude_m": 5e-5}},
          {"range_m": 0.8, "waveform": {"kind": "static"}},
          {"range_m": 0.9, "waveform": {"kind": "file", "path": "template.csv", "amplitude_m": 2e-5}}
        ]})";
    {
        std::ofstream out(dir / "scene.json");
        out << text;
    }
    const SceneSpec scene = load_scene(dir / "scene.json");
    CHECK(scene.duration == 4.0);
    CHECK(scene.snr_db == 15.0);
    CHECK(scene.seed == 9u);
    REQUIRE(scene.axis);
    CHECK(scene.axis->bins == 40);
    CHECK(scene.axis->spacing == doctest::Approx(scene.config.range_resolution()));
    REQUIRE(scene.targets.size() == 4);
    CHECK(scene.targets[0].theta == doctest::Approx(15 * kPi / 180));
    CHECK(scene.targets[0].reflectivity == Complex(0.6, 0.6));
    CHECK(scene.targets[1].reflectivity == Complex(1.0, 0.0));
    CHECK(scene.targets[0].waveform.pulse.ptt == 0.12);

    const auto targets = build_targets(scene);
    REQUIRE(targets.size() == 4);
    for (const auto& t : targets) CHECK(t.displacement.size() == 582);
    CHECK(targets[1].displacement.samples[30] ==
          doctest::Approx(5e-5 * std::sin(2 * kPi * 1.2 * 30 / 145.6)).epsilon(1e-12));
    for (double v : targets[2].displacement.samples) CHECK(v == 0.0);
    double peak = 0.0;
    for (double v : targets[3].displacement.samples) peak = std::max(peak, std::abs(v));
    CHECK(peak == doctest::Approx(2e-5));
    CHECK_NOTHROW(simulate_cube(targets, scene.config, {.axis = *scene.axis, .snr_db = scene.snr_db, .seed = scene.seed}));

    CHECK_THROWS_AS(parse_scene_json(R"({"targets": []})"), InvalidInput);
    CHECK_THROWS_AS(parse_scene_json(R"({"targets": [{"range_m": 1, "waveform": {"kind": "saw"}}]})"), InvalidInput);
    CHECK_THROWS_AS(parse_scene_json("{\"targets\": "), FormatError);
}
