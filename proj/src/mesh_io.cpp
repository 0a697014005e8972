#include "echosite/errors.hpp"
#include "echosite/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <tuple>

namespace echosite {

namespace {

struct Soup {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
};

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

template <typename T>
T parse_number(std::string_view token, std::size_t line_no) {
    T value{};
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (!token.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw FormatError("cannot parse number '" + std::string(token) + "'", line_no);
    }
    return value;
}

class LineReader {
public:
    explicit LineReader(const std::string& text) : text_(text) {}

    bool next(std::string_view& line) {
        if (pos_ >= text_.size()) return false;
        const std::size_t end = text_.find('\n', pos_);
        const std::size_t stop = end == std::string::npos ? text_.size() : end;
        line = std::string_view(text_).substr(pos_, stop - pos_);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos_ = stop + 1;
        ++line_no_;
        return true;
    }
    std::size_t line_no() const { return line_no_; }

private:
    const std::string& text_;
    std::size_t pos_ = 0;
    std::size_t line_no_ = 0;
};

void add_polygon(Soup& soup, const std::vector<std::uint32_t>& poly, std::size_t line_no) {
    if (poly.size() < 3) throw FormatError("face with fewer than 3 vertices", line_no);
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
        soup.faces.push_back({poly[0], poly[i], poly[i + 1]});
    }
}

Soup parse_ply(const std::string& text) {
    LineReader reader(text);
    std::string_view line;
    if (!reader.next(line) || split_ws(line) != std::vector<std::string_view>{"ply"}) {
        throw FormatError("missing 'ply' magic", 1);
    }

    struct Element {
        std::string name;
        std::size_t count = 0;
        std::vector<std::string> properties;
        bool has_list = false;
    };
    std::vector<Element> elements;
    bool ascii = false;
    bool header_done = false;
    while (reader.next(line)) {
        const auto tok = split_ws(line);
        if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
        if (tok[0] == "format") {
            if (tok.size() < 2 || tok[1] != "ascii") {
                throw FormatError("only ASCII PLY is supported", reader.line_no());
            }
            ascii = true;
        } else if (tok[0] == "element") {
            if (tok.size() != 3) throw FormatError("bad element line", reader.line_no());
            elements.push_back({std::string(tok[1]), parse_number<std::size_t>(tok[2], reader.line_no()), {}, false});
        } else if (tok[0] == "property") {
            if (elements.empty()) throw FormatError("property before element", reader.line_no());
            if (tok.size() >= 2 && tok[1] == "list") {
                if (tok.size() != 5) throw FormatError("bad list property", reader.line_no());
                elements.back().has_list = true;
                elements.back().properties.emplace_back(tok[4]);
            } else {
                if (tok.size() != 3) throw FormatError("bad property line", reader.line_no());
                elements.back().properties.emplace_back(tok[2]);
            }
        } else if (tok[0] == "end_header") {
            header_done = true;
            break;
        } else {
            throw FormatError("unexpected header line", reader.line_no());
        }
    }
    if (!header_done) throw FormatError("unterminated PLY header", reader.line_no());
    if (!ascii) throw FormatError("missing format line", reader.line_no());

    Soup soup;
    auto next_data_line = [&](std::vector<std::string_view>& tok) {
        while (reader.next(line)) {
            tok = split_ws(line);
            if (!tok.empty()) return;
        }
        throw FormatError("unexpected end of PLY data", reader.line_no());
    };

    for (const Element& el : elements) {
        std::vector<std::string_view> tok;
        if (el.name == "vertex") {
            const auto find = [&](const char* name) -> std::size_t {
                const auto it = std::find(el.properties.begin(), el.properties.end(), name);
                if (it == el.properties.end()) throw FormatError(std::string("vertex lacks '") + name + "'", reader.line_no());
                return static_cast<std::size_t>(it - el.properties.begin());
            };
            if (el.has_list) throw FormatError("list property on vertex element", reader.line_no());
            const std::size_t ix = find("x"), iy = find("y"), iz = find("z");
            soup.vertices.reserve(el.count);
            for (std::size_t i = 0; i < el.count; ++i) {
                next_data_line(tok);
                if (tok.size() < el.properties.size()) throw FormatError("short vertex record", reader.line_no());
                soup.vertices.emplace_back(parse_number<double>(tok[ix], reader.line_no()),
                                           parse_number<double>(tok[iy], reader.line_no()),
                                           parse_number<double>(tok[iz], reader.line_no()));
            }
        } else if (el.name == "face") {
            soup.faces.reserve(el.count);
            std::vector<std::uint32_t> poly;
            for (std::size_t i = 0; i < el.count; ++i) {
                next_data_line(tok);
                const auto n = parse_number<std::size_t>(tok[0], reader.line_no());
                if (tok.size() < n + 1) throw FormatError("short face record", reader.line_no());
                poly.clear();
                for (std::size_t k = 0; k < n; ++k) {
                    const auto idx = parse_number<long long>(tok[k + 1], reader.line_no());
                    if (idx < 0 || static_cast<std::size_t>(idx) >= soup.vertices.size()) {
                        throw FormatError("face index out of range", reader.line_no());
                    }
                    poly.push_back(static_cast<std::uint32_t>(idx));
                }
                add_polygon(soup, poly, reader.line_no());
            }
        } else {
            for (std::size_t i = 0; i < el.count; ++i) next_data_line(tok);
        }
    }
    return soup;
}

Soup parse_obj(const std::string& text) {
    LineReader reader(text);
    std::string_view line;
    Soup soup;
    std::vector<std::uint32_t> poly;
    while (reader.next(line)) {
        const auto tok = split_ws(line);
        if (tok.empty()) continue;
        if (tok[0] == "v") {
            if (tok.size() < 4) throw FormatError("vertex needs 3 coordinates", reader.line_no());
            soup.vertices.emplace_back(parse_number<double>(tok[1], reader.line_no()),
                                       parse_number<double>(tok[2], reader.line_no()),
                                       parse_number<double>(tok[3], reader.line_no()));
        } else if (tok[0] == "f") {
            poly.clear();
            for (std::size_t k = 1; k < tok.size(); ++k) {
                const auto slash = tok[k].find('/');
                const auto idx = parse_number<long long>(tok[k].substr(0, slash), reader.line_no());
                const long long n = static_cast<long long>(soup.vertices.size());
                const long long resolved = idx < 0 ? n + idx : idx - 1;
                if (idx == 0 || resolved < 0 || resolved >= n) {
                    throw FormatError("face index out of range", reader.line_no());
                }
                poly.push_back(static_cast<std::uint32_t>(resolved));
            }
            add_polygon(soup, poly, reader.line_no());
        }
        // Every other record type (vn, vt, g, o, usemtl, ...) is ignored.
    }
    return soup;
}

Soup parse_stl_binary(const std::string& bytes) {
    if (bytes.size() < 84) throw FormatError("STL shorter than its header", bytes.size());
    std::uint32_t count = 0;
    std::memcpy(&count, bytes.data() + 80, 4);
    const std::size_t expected = 84 + static_cast<std::size_t>(count) * 50;
    if (bytes.size() != expected) {
        if (bytes.rfind("solid", 0) == 0) throw FormatError("ASCII STL is not supported", 0);
        throw FormatError("STL size does not match triangle count " + std::to_string(count),
                          std::min(bytes.size(), expected));
    }
    Soup soup;
    // Binary STL repeats coordinates per triangle; weld exact duplicates so
    // that adjacency queries see shared vertices.
    std::map<std::tuple<float, float, float>, std::uint32_t> index;
    soup.faces.reserve(count);
    for (std::uint32_t t = 0; t < count; ++t) {
        const char* rec = bytes.data() + 84 + static_cast<std::size_t>(t) * 50;
        Face face{};
        for (int k = 0; k < 3; ++k) {
            float xyz[3];
            std::memcpy(xyz, rec + 12 + 12 * k, 12);
            const auto key = std::make_tuple(xyz[0], xyz[1], xyz[2]);
            auto [it, inserted] = index.try_emplace(key, static_cast<std::uint32_t>(soup.vertices.size()));
            if (inserted) soup.vertices.emplace_back(xyz[0], xyz[1], xyz[2]);
            face[k] = it->second;
        }
        soup.faces.push_back(face);
    }
    return soup;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

LoadedMesh finish(Soup soup, const LoadOptions& options) {
    if (soup.vertices.empty() || soup.faces.empty()) throw InvalidInput("mesh file contains no faces");
    if (options.unit_scale != 1.0) {
        for (Vec3& v : soup.vertices) v *= options.unit_scale;
    }
    CleanedFaces cleaned = drop_degenerate_faces(soup.vertices, soup.faces);
    if (cleaned.faces.empty()) throw InvalidInput("mesh has only degenerate faces");
    SurfaceMesh mesh(std::move(soup.vertices), std::move(cleaned.faces));

    bool flip = false;
    NormalOrientation mode = options.orientation;
    if (mode == NormalOrientation::Auto) {
        mode = mesh.is_closed() ? NormalOrientation::Outward : NormalOrientation::TowardSensor;
    }
    if (mode == NormalOrientation::Outward) {
        flip = mesh.signed_volume() < 0.0;
    } else if (mode == NormalOrientation::TowardSensor) {
        double facing = 0.0;
        for (std::size_t f = 0; f < mesh.face_count(); ++f) {
            facing += mesh.area(f) * mesh.normal(f).dot(options.sensor_direction);
        }
        flip = facing < 0.0;
    }
    if (flip) return {mesh.flipped(), cleaned.dropped, true};
    return {std::move(mesh), cleaned.dropped, false};
}

} // namespace

MeshFormat format_from_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".ply") return MeshFormat::PlyAscii;
    if (ext == ".obj") return MeshFormat::Obj;
    if (ext == ".stl") return MeshFormat::StlBinary;
    throw InvalidInput("unknown mesh extension '" + ext + "'");
}

LoadedMesh parse_mesh(const std::string& content, MeshFormat format, const LoadOptions& options) {
    switch (format) {
    case MeshFormat::PlyAscii: return finish(parse_ply(content), options);
    case MeshFormat::Obj: return finish(parse_obj(content), options);
    case MeshFormat::StlBinary: return finish(parse_stl_binary(content), options);
    case MeshFormat::Auto: break;
    }
    throw InvalidInput("parse_mesh needs an explicit format");
}

LoadedMesh load_mesh(const std::filesystem::path& path, const LoadOptions& options) {
    const MeshFormat format = options.format == MeshFormat::Auto ? format_from_extension(path) : options.format;
    return parse_mesh(read_file(path), format, options);
}

void save_ply(const SurfaceMesh& mesh, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << "ply\nformat ascii 1.0\n"
        << "element vertex " << mesh.vertex_count() << "\nproperty double x\nproperty double y\nproperty double z\n"
        << "element face " << mesh.face_count() << "\nproperty list uchar int vertex_indices\nend_header\n";
    out << std::setprecision(17);
    for (const Vec3& v : mesh.vertices()) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const Face& f : mesh.faces()) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

void save_obj(const SurfaceMesh& mesh, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << std::setprecision(17);
    for (const Vec3& v : mesh.vertices()) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const Face& f : mesh.faces()) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

void save_stl(const SurfaceMesh& mesh, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + path.string());
    char header[80] = "binary STL written by echosite";
    out.write(header, 80);
    const auto count = static_cast<std::uint32_t>(mesh.face_count());
    out.write(reinterpret_cast<const char*>(&count), 4);
    const auto verts = mesh.vertices();
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        float rec[12];
        const Vec3& n = mesh.normal(f);
        rec[0] = static_cast<float>(n.x());
        rec[1] = static_cast<float>(n.y());
        rec[2] = static_cast<float>(n.z());
        for (int k = 0; k < 3; ++k) {
            const Vec3& v = verts[mesh.faces()[f][k]];
            for (int c = 0; c < 3; ++c) rec[3 + 3 * k + c] = static_cast<float>(v[c]);
        }
        out.write(reinterpret_cast<const char*>(rec), sizeof(rec));
        const std::uint16_t attr = 0;
        out.write(reinterpret_cast<const char*>(&attr), 2);
    }
}

} // namespace echosite
