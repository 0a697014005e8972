#include "echosite/map_io.hpp"

#include "echosite/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>

namespace echosite {

namespace {

nlohmann::json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

Vec3 json_vec(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3) throw InvalidInput("expected a 3-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

} // namespace

std::string map_to_json(const ReflectionMap& map, bool in_db) {
    nlohmann::json doc;
    doc["kind"] = to_string(map.kind);
    doc["pose"] = {{"position", vec_json(map.pose.position)},
                   {"polarization", vec_json(map.pose.polarization)},
                   {"dipole_length_m", map.pose.dipole_length}};
    doc["frequency_hz"] = map.frequency;
    doc["face_count"] = map.values.size();
    doc["a0_m"] = map.a0;
    doc["evaluated_terms"] = map.evaluated_terms;
    doc["scale"] = in_db ? "db-relative-to-max" : "linear";
    nlohmann::json values = nlohmann::json::array();
    for (double v : in_db ? map.to_db() : map.values) {
        if (std::isfinite(v)) values.push_back(v);
        else values.push_back(nullptr);  // -inf dB for zero intensity
    }
    doc["values"] = std::move(values);
    return doc.dump(2);
}

ReflectionMap map_from_json(const std::string& text) {
    const auto doc = nlohmann::json::parse(text);
    ReflectionMap map;
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "po-intensity") map.kind = MapKind::PoIntensity;
    else if (kind == "cos-xi") map.kind = MapKind::CosXi;
    else throw InvalidInput("unknown map kind '" + kind + "'");
    if (doc.value("scale", "linear") != "linear") throw InvalidInput("only linear-scale maps can be read back");
    map.pose.position = json_vec(doc.at("pose").at("position"));
    map.pose.polarization = json_vec(doc.at("pose").at("polarization"));
    map.pose.dipole_length = doc.at("pose").at("dipole_length_m").get<double>();
    map.frequency = doc.at("frequency_hz").get<double>();
    map.a0 = doc.value("a0_m", 0.0);
    map.evaluated_terms = doc.value("evaluated_terms", std::uint64_t{0});
    map.values = doc.at("values").get<std::vector<double>>();
    if (map.values.size() != doc.at("face_count").get<std::size_t>()) {
        throw InvalidInput("map face_count does not match its values");
    }
    return map;
}

std::string map_to_csv(const ReflectionMap& map, bool in_db) {
    std::ostringstream out;
    out << "face_id,value\n" << std::setprecision(17);
    const auto values = in_db ? map.to_db() : map.values;
    for (std::size_t i = 0; i < values.size(); ++i) out << i << ',' << values[i] << '\n';
    return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << text;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace echosite
