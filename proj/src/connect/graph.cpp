#include <sstream>

#include "cortex_atlas/connect.hpp"
#include "cortex_atlas/error.hpp"

namespace cortex {

const GraphEdge* ConnectivityGraph::edge(int a, int b) const {
    const auto it = edges.find({std::min(a, b), std::max(a, b)});
    return it == edges.end() ? nullptr : &it->second;
}

std::size_t ConnectivityGraph::streamline_total() const {
    std::size_t n = 0;
    for (const auto& [pair, e] : edges) n += e.streamline_count;
    return n;
}

ConnectivityGraph build_graph(const std::vector<Bundle>& bundles, const RegionTable& regions) {
    ConnectivityGraph graph;
    std::map<Hemisphere, double> totals;
    for (const auto& [id, r] : regions) totals[r.hemisphere] += r.area_mm2;
    for (const auto& [id, r] : regions) {
        if (!(r.area_mm2 > 0.0)) continue;
        graph.nodes[id] = GraphNode{r.name, r.hemisphere, r.area_mm2, r.area_mm2 / totals[r.hemisphere], r.color};
    }
    for (const auto& b : bundles) {
        if (!b.assigned) {
            ++graph.unassigned_bundles;
            graph.unassigned_streamlines += b.member_count;
            continue;
        }
        for (int id : {b.region_start, b.region_end})
            if (!graph.nodes.count(id))
                throw DomainError("bundle " + std::to_string(b.cluster) + " references region " + std::to_string(id) +
                                  " missing from the region table");
        auto& e = graph.edges[b.region_pair()];
        ++e.bundle_count;
        e.streamline_count += b.member_count;
    }
    return graph;
}

std::string format_graph_csv(const ConnectivityGraph& graph) {
    std::ostringstream out;
    out << "region_a,region_b,bundle_count,streamline_count\n";
    for (const auto& [pair, e] : graph.edges)
        out << pair.first << ',' << pair.second << ',' << e.bundle_count << ',' << e.streamline_count << '\n';
    return out.str();
}

}  // namespace cortex
