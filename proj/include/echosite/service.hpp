#pragma once

#include "echosite/mesh.hpp"
#include "echosite/placement.hpp"
#include "echosite/radar_config.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

namespace echosite {

struct HttpResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::shared_ptr<const std::string> body;
    std::vector<std::pair<std::string, std::string>> headers;

    const std::string& text() const;
};

/// Single-operator placement session behind the HTTP endpoints. Reads run
/// concurrently under a shared lock; load and commit take it exclusively.
/// Every response is a pure function of the session state and the request.
class PlacementService {
public:
    explicit PlacementService(RadarConfig cfg = {}, RailSpec rail = {});

    /// Replaces mesh, sites and rail. A committed x outside the new rail is
    /// dropped. Throws for invalid rails or sites that select no facets.
    void load(SurfaceMesh mesh, std::vector<SiteSpec> sites, RailSpec rail);

    const std::string& session_id() const noexcept { return id_; }

    HttpResponse health() const;
    HttpResponse mesh() const;                                      // 409 without a mesh
    HttpResponse cosxi(const std::optional<std::string>& x) const;  // 400 bad x, 409 without a mesh
    HttpResponse commit(const std::string& body);                   // 400 bad x
    HttpResponse committed() const;
    HttpResponse scan() const;  // cached per (mesh, rail, sites); X-Cache: hit | miss

    /// Routes one request. Unknown paths give 404, wrong methods 405.
    HttpResponse dispatch(const std::string& method, const std::string& path,
                          const std::map<std::string, std::string>& query, const std::string& body);

    std::optional<double> committed_x() const;
    std::size_t scan_cache_size() const;

private:
    RadarConfig cfg_;
    std::string id_;
    std::chrono::system_clock::time_point created_at_;

    mutable std::shared_mutex mutex_;
    std::optional<SurfaceMesh> mesh_;
    std::shared_ptr<const std::string> mesh_body_;
    std::uint64_t mesh_hash_ = 0;
    RailSpec rail_;
    std::vector<SiteSpec> site_specs_;
    std::vector<RegionOfInterest> sites_;
    std::optional<double> committed_;

    mutable std::mutex scan_mutex_;
    mutable std::map<std::string, std::shared_ptr<const std::string>> scan_cache_;
};

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8732;  // 0 picks a free port
    std::optional<std::filesystem::path> static_dir;
    std::size_t chunk_threshold = std::size_t{1} << 20;  // bodies above this are sent chunked
    int worker_threads = 8;
};

/// HTTP transport for a PlacementService.
class HttpServer {
public:
    HttpServer(PlacementService& service, ServerOptions options = {});
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds and starts serving on a background thread; returns the port.
    int start();
    /// Blocks until stop() is called from another thread.
    void wait();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace echosite
