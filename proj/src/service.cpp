#include "echosite/service.hpp"

#include "echosite/errors.hpp"
#include "echosite/scatter.hpp"
#include "echosite/scene_io.hpp"

#include <httplib.h>
#include <json.hpp>

#include <charconv>
#include <random>
#include <thread>

namespace echosite {

namespace {

using nlohmann::json;

std::shared_ptr<const std::string> share(std::string s) {
    return std::make_shared<const std::string>(std::move(s));
}

HttpResponse json_response(int status, const json& body) {
    return {status, "application/json", share(body.dump() + "\n"), {}};
}

HttpResponse error_response(int status, const std::string& message) {
    return json_response(status, json{{"error", message}});
}

void append_double(std::string& out, double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, r.ptr);
}

void append_float(std::string& out, float v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, r.ptr);
}

std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 1469598103934665603ull) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string mesh_json(const SurfaceMesh& mesh) {
    std::string out;
    out.reserve(mesh.vertex_count() * 60 + mesh.face_count() * 24);
    out += "{\"vertex_count\":";
    out += std::to_string(mesh.vertex_count());
    out += ",\"face_count\":";
    out += std::to_string(mesh.face_count());
    out += ",\"vertices\":[";
    bool first = true;
    for (const Vec3& v : mesh.vertices()) {
        out += first ? "[" : ",[";
        first = false;
        append_double(out, v.x());
        out += ',';
        append_double(out, v.y());
        out += ',';
        append_double(out, v.z());
        out += ']';
    }
    out += "],\"faces\":[";
    first = true;
    for (const Face& f : mesh.faces()) {
        out += first ? "[" : ",[";
        first = false;
        out += std::to_string(f[0]);
        out += ',';
        out += std::to_string(f[1]);
        out += ',';
        out += std::to_string(f[2]);
        out += ']';
    }
    out += "]}\n";
    return out;
}

std::string make_session_id() {
    std::random_device rd;
    const std::uint64_t v = (std::uint64_t{rd()} << 32) ^ rd();
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::optional<double> parse_number(const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto r = std::from_chars(text.data(), end, v);
    if (r.ec != std::errc() || r.ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

} // namespace

const std::string& HttpResponse::text() const {
    static const std::string empty;
    return body ? *body : empty;
}

PlacementService::PlacementService(RadarConfig cfg, RailSpec rail)
    : cfg_(cfg), id_(make_session_id()), created_at_(std::chrono::system_clock::now()), rail_(rail) {
    cfg_.validate();
    rail_.validate();
}

void PlacementService::load(SurfaceMesh mesh, std::vector<SiteSpec> sites, RailSpec rail) {
    rail.validate();
    std::vector<RegionOfInterest> rois = resolve_sites(mesh, sites);
    auto body = share(mesh_json(mesh));
    const std::uint64_t hash = fnv1a(*body);

    std::unique_lock lock(mutex_);
    mesh_ = std::move(mesh);
    mesh_body_ = std::move(body);
    mesh_hash_ = hash;
    rail_ = rail;
    site_specs_ = std::move(sites);
    sites_ = std::move(rois);
    if (committed_ && !rail_.contains(*committed_)) committed_.reset();
}

HttpResponse PlacementService::health() const {
    std::shared_lock lock(mutex_);
    const auto created =
        std::chrono::duration_cast<std::chrono::seconds>(created_at_.time_since_epoch()).count();
    return json_response(200, json{{"status", "ok"},
                                   {"session_id", id_},
                                   {"created_at_unix_s", created},
                                   {"mesh_loaded", mesh_.has_value()},
                                   {"face_count", mesh_ ? mesh_->face_count() : 0},
                                   {"rail", rail_to_json(rail_)}});
}

HttpResponse PlacementService::mesh() const {
    std::shared_lock lock(mutex_);
    if (!mesh_) return error_response(409, "no mesh loaded");
    return {200, "application/json", mesh_body_, {}};
}

HttpResponse PlacementService::cosxi(const std::optional<std::string>& x_text) const {
    if (!x_text) return error_response(400, "missing query parameter x");
    const std::optional<double> x = parse_number(*x_text);
    if (!x) return error_response(400, "x must be a finite number");

    std::shared_lock lock(mutex_);
    if (!mesh_) return error_response(409, "no mesh loaded");
    if (!rail_.contains(*x)) return error_response(400, "x outside the rail range");

    const AntennaPose pose = AntennaPose::at(rail_.position(*x), cfg_);
    const ReflectionMap map = cos_xi_map(*mesh_, pose, cfg_.center_frequency);
    const PositionScore score = score_map(map, sites_);

    std::string out;
    out.reserve(map.values.size() * 12 + 512);
    out += "{\"x_m\":";
    append_double(out, *x);
    out += ",\"position\":[";
    for (int i = 0; i < 3; ++i) {
        if (i) out += ',';
        append_double(out, pose.position[i]);
    }
    out += "],\"objective\":";
    append_double(out, score.objective);
    out += ",\"sites\":[";
    for (std::size_t i = 0; i < score.sites.size(); ++i) {
        const SiteScore& s = score.sites[i];
        if (i) out += ',';
        out += "{\"name\":";
        out += json(s.name).dump();
        out += ",\"value\":";
        append_double(out, s.value);
        out += ",\"best_facet\":";
        out += std::to_string(s.best_facet);
        out += '}';
    }
    out += "],\"values\":[";
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        if (i) out += ',';
        append_float(out, static_cast<float>(map.values[i]));
    }
    out += "]}\n";
    return {200, "application/json", share(std::move(out)), {}};
}

HttpResponse PlacementService::commit(const std::string& body) {
    double x = 0.0;
    try {
        const json j = json::parse(body);
        if (!j.is_object() || !j.contains("x") || !j["x"].is_number()) {
            return error_response(400, "body must be {\"x\": <meters>}");
        }
        x = j["x"].get<double>();
    } catch (const json::exception&) {
        return error_response(400, "body is not valid JSON");
    }
    std::unique_lock lock(mutex_);
    if (!rail_.contains(x)) return error_response(400, "x outside the rail range");
    committed_ = x;
    return json_response(200, json{{"x", x}});
}

HttpResponse PlacementService::committed() const {
    std::shared_lock lock(mutex_);
    return json_response(200, json{{"x", committed_ ? json(*committed_) : json(nullptr)}});
}

HttpResponse PlacementService::scan() const {
    std::shared_lock lock(mutex_);
    if (!mesh_) return error_response(409, "no mesh loaded");
    const std::string key = std::to_string(mesh_hash_) + "|" + rail_to_json(rail_).dump() + "|" +
                            sites_to_json(SitesFile{site_specs_, std::nullopt});

    std::lock_guard scan_lock(scan_mutex_);
    if (const auto it = scan_cache_.find(key); it != scan_cache_.end()) {
        return {200, "application/json", it->second, {{"X-Cache", "hit"}}};
    }
    const PlacementReport report = scan_rail(*mesh_, rail_, sites_, cfg_);
    auto body = share(placement_report_to_json(report).dump() + "\n");
    scan_cache_.emplace(key, body);
    return {200, "application/json", body, {{"X-Cache", "miss"}}};
}

HttpResponse PlacementService::dispatch(const std::string& method, const std::string& path,
                                        const std::map<std::string, std::string>& query, const std::string& body) {
    auto param = [&](const char* name) -> std::optional<std::string> {
        const auto it = query.find(name);
        if (it == query.end()) return std::nullopt;
        return it->second;
    };
    try {
        if (path == "/health") return method == "GET" ? health() : error_response(405, "method not allowed");
        if (path == "/mesh") return method == "GET" ? mesh() : error_response(405, "method not allowed");
        if (path == "/cosxi") return method == "GET" ? cosxi(param("x")) : error_response(405, "method not allowed");
        if (path == "/scan") return method == "GET" ? scan() : error_response(405, "method not allowed");
        if (path == "/commit") {
            if (method == "POST") return commit(body);
            if (method == "GET") return committed();
            return error_response(405, "method not allowed");
        }
    } catch (const std::exception& e) {
        return error_response(500, e.what());
    }
    return error_response(404, "not found");
}

std::optional<double> PlacementService::committed_x() const {
    std::shared_lock lock(mutex_);
    return committed_;
}

std::size_t PlacementService::scan_cache_size() const {
    std::lock_guard lock(scan_mutex_);
    return scan_cache_.size();
}

// ---------------------------------------------------------------------------

struct HttpServer::Impl {
    PlacementService& service;
    ServerOptions options;
    httplib::Server server;
    std::thread thread;
    int port = 0;

    Impl(PlacementService& s, ServerOptions o) : service(s), options(std::move(o)) {}

    void reply(const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> query;
        for (const auto& [k, v] : req.params) query.emplace(k, v);
        const HttpResponse r = service.dispatch(req.method, req.path, query, req.body);
        res.status = r.status;
        for (const auto& [k, v] : r.headers) res.set_header(k, v);
        const auto body = r.body ? r.body : share({});
        if (body->size() > options.chunk_threshold) {
            static constexpr std::size_t kChunk = 64 * 1024;
            res.set_chunked_content_provider(r.content_type, [body](std::size_t offset, httplib::DataSink& sink) {
                if (offset < body->size()) {
                    const std::size_t n = std::min(kChunk, body->size() - offset);
                    if (!sink.write(body->data() + offset, n)) return false;
                }
                if (offset + kChunk >= body->size()) sink.done();
                return true;
            });
        } else {
            res.set_content(*body, r.content_type);
        }
    }
};

HttpServer::HttpServer(PlacementService& service, ServerOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
    auto& srv = impl_->server;
    const int workers = std::max(1, impl_->options.worker_threads);
    srv.new_task_queue = [workers] { return new httplib::ThreadPool(static_cast<std::size_t>(workers)); };
    auto handler = [impl = impl_.get()](const httplib::Request& req, httplib::Response& res) { impl->reply(req, res); };
    for (const char* path : {"/health", "/mesh", "/cosxi", "/scan", "/commit"}) {
        srv.Get(path, handler);
        srv.Post(path, handler);
    }
    if (impl_->options.static_dir && !srv.set_mount_point("/", impl_->options.static_dir->string())) {
        throw InvalidInput("static directory not found: " + impl_->options.static_dir->string());
    }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start() {
    auto& srv = impl_->server;
    if (impl_->options.port == 0) {
        impl_->port = srv.bind_to_any_port(impl_->options.host);
    } else {
        impl_->port = srv.bind_to_port(impl_->options.host, impl_->options.port) ? impl_->options.port : -1;
    }
    if (impl_->port <= 0) {
        throw std::runtime_error("cannot bind " + impl_->options.host + ":" + std::to_string(impl_->options.port));
    }
    impl_->thread = std::thread([&srv] { srv.listen_after_bind(); });
    srv.wait_until_ready();
    return impl_->port;
}

void HttpServer::wait() {
    if (impl_->thread.joinable()) impl_->thread.join();
}

void HttpServer::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

} // namespace echosite
