#include "echosite/errors.hpp"
#include "echosite/map_io.hpp"
#include "echosite/scene_io.hpp"
#include "echosite/sim.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>

namespace echosite {

static_assert(std::endian::native == std::endian::little, "cube files are written in native little-endian order");

namespace {

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
    return std::filesystem::path(path.string() + ".json");
}

} // namespace

void save_cube(const RadarCube& cube, const std::filesystem::path& path) {
    const RadarConfig& cfg = cube.config();
    nlohmann::json meta;
    meta["format"] = "echosite-cube";
    meta["version"] = 1;
    meta["sample_type"] = "complex64-le";
    meta["layout"] = "element, range, time";
    meta["elements"] = cube.elements();
    meta["bins"] = cube.bins();
    meta["times"] = cube.times();
    meta["t0_s"] = cube.t0();
    meta["range_axis"] = {{"start_m", cube.range_axis().start}, {"spacing_m", cube.range_axis().spacing}};
    meta["config"] = config_to_json(cfg);
    meta["seed"] = cube.seed ? nlohmann::json(*cube.seed) : nlohmann::json(nullptr);
    meta["snr_db"] = cube.snr_db ? nlohmann::json(*cube.snr_db) : nlohmann::json(nullptr);
    write_text_file(sidecar_path(path), meta.dump(2) + "\n");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + path.string());
    std::vector<float> buffer;
    buffer.reserve(2 * cube.data().size());
    for (const Complex& v : cube.data()) {
        buffer.push_back(static_cast<float>(v.real()));
        buffer.push_back(static_cast<float>(v.imag()));
    }
    out.write(reinterpret_cast<const char*>(buffer.data()), static_cast<std::streamsize>(buffer.size() * sizeof(float)));
}

RadarCube load_cube(const std::filesystem::path& path) {
    const auto meta = nlohmann::json::parse(read_text_file(sidecar_path(path)));
    if (meta.value("format", "") != "echosite-cube") throw InvalidInput("not a cube sidecar: " + path.string());
    const RadarConfig cfg = config_from_json(meta.at("config"));

    RangeAxis axis;
    axis.start = meta.at("range_axis").at("start_m").get<double>();
    axis.spacing = meta.at("range_axis").at("spacing_m").get<double>();
    axis.bins = meta.at("bins").get<std::size_t>();

    RadarCube cube(cfg, axis, meta.at("times").get<std::size_t>(), meta.value("t0_s", 0.0));
    if (meta.at("elements").get<std::size_t>() != cube.elements()) {
        throw InvalidInput("cube sidecar element count disagrees with its config");
    }
    if (!meta["seed"].is_null()) cube.seed = meta["seed"].get<std::uint64_t>();
    if (!meta["snr_db"].is_null()) cube.snr_db = meta["snr_db"].get<double>();

    const std::string bytes = read_text_file(path);
    const std::size_t expected = cube.data().size() * 2 * sizeof(float);
    if (bytes.size() != expected) {
        throw FormatError("cube payload has " + std::to_string(bytes.size()) + " bytes, expected " +
                              std::to_string(expected),
                          std::min(bytes.size(), expected));
    }
    auto data = cube.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        float pair[2];
        std::memcpy(pair, bytes.data() + i * sizeof(pair), sizeof(pair));
        data[i] = Complex(pair[0], pair[1]);
    }
    cube.validate();
    return cube;
}

} // namespace echosite
