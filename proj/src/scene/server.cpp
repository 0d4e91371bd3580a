#include <charconv>

#include "cortex_atlas/digest.hpp"
#include "cortex_atlas/error.hpp"
#include "cortex_atlas/scene.hpp"

// After Eigen: <resolv.h> defines a `_res` macro that clashes with Eigen
// parameter names.
#include <httplib.h>

namespace cortex {

namespace {

constexpr const char* kFallbackPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>cortex-atlas</title></head>
<body>
<h1>cortex-atlas</h1>
<p>No viewer bundle is installed. The Scene is available at <a href="/api/scene">/api/scene</a>.</p>
</body></html>
)";

HttpReply error_reply(int status, const std::string& message) {
    return {status, "application/json", to_canonical_json(Json{{"error", message}}) + "\n"};
}

HttpReply json_reply(const Json& body) { return {200, "application/json", to_canonical_json(body) + "\n"}; }

std::optional<int> parse_id(const std::string& text) {
    int value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end) return std::nullopt;
    return value;
}

std::string content_type(const std::filesystem::path& p) {
    const auto ext = p.extension().string();
    if (ext == ".html") return "text/html; charset=utf-8";
    if (ext == ".js" || ext == ".mjs") return "text/javascript";
    if (ext == ".css") return "text/css";
    if (ext == ".json") return "application/json";
    if (ext == ".svg") return "image/svg+xml";
    if (ext == ".png") return "image/png";
    return "application/octet-stream";
}

HttpReply correlation(const SceneService& s, const std::map<std::string, std::string>& query) {
    if (!s.series) return error_reply(404, "no time series loaded; start the service with --tsf");
    const bool by_vertex = query.count("vertex") > 0;
    const bool by_region = query.count("region") > 0;
    if (by_vertex == by_region) return error_reply(400, "give exactly one of vertex=<id> or region=<id>");
    const auto& raw = by_vertex ? query.at("vertex") : query.at("region");
    const auto id = parse_id(raw);
    if (!id) return error_reply(400, "'" + raw + "' is not an integer id");
    try {
        if (by_vertex) {
            if (*id < 0 || static_cast<std::size_t>(*id) >= s.series->vertices)
                return error_reply(400, "unknown vertex " + raw);
            return json_reply(overlay_to_json(seed_correlation(*s.series, Seed::vertex(*id))));
        }
        if (std::find(s.labels.begin(), s.labels.end(), *id) == s.labels.end())
            return error_reply(400, "unknown region " + raw);
        return json_reply(overlay_to_json(seed_correlation(*s.series, Seed::region(*id), s.labels)));
    } catch (const DomainError& e) {
        return error_reply(400, e.what());
    }
}

HttpReply bundles(const SceneService& s, const std::map<std::string, std::string>& query) {
    if (!query.count("region_a") || !query.count("region_b"))
        return error_reply(400, "region_a and region_b are required");
    const auto a = parse_id(query.at("region_a"));
    const auto b = parse_id(query.at("region_b"));
    if (!a || !b) return error_reply(400, "region ids must be integers");
    const int lo = std::min(*a, *b), hi = std::max(*a, *b);
    Json out = Json::array();
    for (const auto& bundle : s.scene["bundles"]) {
        if (!bundle["assigned"].get<bool>()) continue;
        const int s0 = bundle["region_start"].get<int>(), s1 = bundle["region_end"].get<int>();
        if (std::min(s0, s1) == lo && std::max(s0, s1) == hi) out.push_back(bundle);
    }
    return json_reply(out);
}

HttpReply static_asset(const SceneService& s, const std::string& path) {
    const std::string rel = path == "/" ? "index.html" : path.substr(1);
    if (rel.find("..") != std::string::npos) return error_reply(404, "not found");
    const auto file = s.web_root / rel;
    if (!s.web_root.empty() && std::filesystem::is_regular_file(file)) return {200, content_type(file), read_file(file)};
    if (rel == "index.html") return {200, "text/html; charset=utf-8", kFallbackPage};
    return error_reply(404, "not found: " + path);
}

}  // namespace

std::filesystem::path default_web_root() { return CORTEX_WEB_DIR; }

SceneService make_service(Json scene, std::optional<TimeSeriesField> series, bool regress,
                          const std::filesystem::path& web_root, Warnings* warnings) {
    const auto problems = validate_scene(scene);
    if (!problems.empty()) throw DomainError("invalid Scene: " + problems.front());
    SceneService s;
    s.scene_body = format_scene(scene) + "\n";
    for (const char* key : {"left", "right"}) {
        if (!scene["meshes"].contains(key)) continue;
        const auto& labels = scene["meshes"][key]["labels"];
        if (labels.empty()) {
            s.labels.clear();
            break;
        }
        for (const auto& l : labels) s.labels.push_back(l.get<int>());
    }
    const auto vertices = scene["vertex_count"].get<std::size_t>();
    if (series) {
        if (series->vertices != vertices)
            throw DomainError("time series has " + std::to_string(series->vertices) + " rows, Scene has " +
                              std::to_string(vertices) + " vertices");
        if (regress) series = regress_mean_gray(*series, warnings);
    }
    s.series = std::move(series);
    s.scene = std::move(scene);
    s.web_root = web_root;
    return s;
}

HttpReply handle_request(const SceneService& s, const std::string& path,
                         const std::map<std::string, std::string>& query) {
    if (path == "/api/scene") return {200, "application/json", s.scene_body};
    if (path == "/api/correlation") return correlation(s, query);
    if (path == "/api/bundles") return bundles(s, query);
    if (path.rfind("/api/", 0) == 0) return error_reply(404, "unknown endpoint " + path);
    return static_asset(s, path);
}

struct SceneServer::Impl {
    const SceneService& service;
    httplib::Server server;
};

SceneServer::SceneServer(const SceneService& service) : impl_(new Impl{service, {}}) {
    impl_->server.Get(".*", [this](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> query;
        for (const auto& [k, v] : req.params) query.emplace(k, v);
        const auto reply = handle_request(impl_->service, req.path, query);
        res.status = reply.status;
        res.set_content(reply.body, reply.content_type);
    });
}

SceneServer::~SceneServer() { stop(); }

int SceneServer::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = impl_->server.bind_to_any_port(host);
        if (bound <= 0) throw IoError("cannot bind " + host);
        return bound;
    }
    if (!impl_->server.bind_to_port(host, port)) throw IoError("cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void SceneServer::listen() { impl_->server.listen_after_bind(); }

void SceneServer::stop() {
    if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace cortex
