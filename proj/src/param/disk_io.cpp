#include <json.hpp>

#include "cortex_atlas/error.hpp"
#include "cortex_atlas/param_map.hpp"

namespace cortex {

std::string format_disk_map(const DiskMap& map) {
    nlohmann::json doc;
    doc["version"] = 1;
    auto& uv = doc["uv"] = nlohmann::json::array();
    for (const auto& p : map.uv) uv.push_back({p.x(), p.y()});
    doc["boundary"] = map.boundary;
    doc["boundary_param"] = map.boundary_param;
    doc["source_mesh_id"] = map.source_mesh_id;
    return doc.dump() + "\n";
}

DiskMap parse_disk_map(const std::string& text) {
    try {
        const auto doc = nlohmann::json::parse(text);
        DiskMap map;
        for (const auto& p : doc.at("uv")) map.uv.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        map.boundary = doc.at("boundary").get<std::vector<int>>();
        if (doc.contains("boundary_param")) {
            map.boundary_param = doc["boundary_param"].get<std::vector<double>>();
        } else {
            for (int b : map.boundary) map.boundary_param.push_back(std::atan2(map.uv.at(b).y(), map.uv.at(b).x()));
        }
        if (map.boundary_param.size() != map.boundary.size())
            throw ParseError("disk map boundary_param length mismatch");
        for (int b : map.boundary)
            if (b < 0 || static_cast<std::size_t>(b) >= map.uv.size())
                throw ParseError("disk map boundary index out of range");
        map.source_mesh_id = doc.value("source_mesh_id", std::string());
        return map;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("disk map JSON: ") + e.what());
    }
}

}  // namespace cortex
