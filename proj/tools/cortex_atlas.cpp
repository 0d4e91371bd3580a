// cortex-atlas: pipeline driver. Every subcommand writes its artifact plus a
// run report (timings, warnings); failures print a JSON error on stderr.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "cortex_atlas/connect.hpp"
#include "cortex_atlas/digest.hpp"
#include "cortex_atlas/error.hpp"
#include "cortex_atlas/parallel.hpp"
#include "cortex_atlas/scene.hpp"
#include "cortex_atlas/simd/kernels.hpp"

namespace fs = std::filesystem;
using namespace cortex;

namespace {

enum Exit { ok = 0, failure = 1, usage = 2, domain = 3, invalid_input = 4, io = 5, numeric = 6 };

struct Run {
    std::string command;
    std::set<std::string> input_flags;   // file inputs: digested, not echoed as paths
    std::set<std::string> output_flags;  // locations only, left out of provenance
    Json provenance;
    Json timings = Json::object();
    Json details = Json::object();
    Json outputs = Json::object();
    Warnings warnings;
    std::string report;

    template <class F>
    auto timed(const std::string& stage, F&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(f())>) {
            f();
            timings[stage] = elapsed(t0);
        } else {
            auto result = f();
            timings[stage] = elapsed(t0);
            return result;
        }
    }

    static double elapsed(std::chrono::steady_clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
};

Json upstream_provenance(const fs::path& path) {
    if (path.extension() != ".json") return nullptr;
    try {
        const auto doc = read_json_file(path);
        if (doc.is_object() && doc.contains("provenance")) return doc["provenance"];
    } catch (const Error&) {
    }
    return nullptr;
}

// Mirrors every option of the subcommand: parameters by value (defaults
// included), inputs by file name and digest, upstream artifact provenance
// by flag.
Json build_provenance(const CLI::App& sub, const Run& run) {
    Json parameters = Json::object(), inputs = Json::object(), upstream = Json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_single_name();
        if (name == "help" || name.empty() || run.output_flags.count(name)) continue;
        if (run.input_flags.count(name)) {
            if (opt->count() == 0) continue;
            Json files = Json::array();
            for (const auto& r : opt->results()) {
                files.push_back({{"file", fs::path(r).filename().string()}, {"sha256", sha256_file(r)}});
                if (auto up = upstream_provenance(r); !up.is_null()) upstream[name] = up;
            }
            inputs[name] = files.size() == 1 ? files[0] : files;
            continue;
        }
        if (opt->get_expected_min() == 0) {
            parameters[name] = opt->count() > 0;
        } else if (opt->count() > 0) {
            const auto& r = opt->results();
            parameters[name] = r.size() == 1 ? Json(r[0]) : Json(r);
        } else {
            parameters[name] = opt->get_default_str().empty() ? Json(nullptr) : Json(opt->get_default_str());
        }
    }
    return {{"command", run.command}, {"parameters", parameters}, {"inputs", inputs}, {"upstream", upstream}};
}

void write_report(const Run& run, const std::optional<std::pair<std::string, std::string>>& error) {
    if (run.report.empty()) return;
    Json doc;
    doc["command"] = run.command;
    doc["status"] = error ? "error" : "ok";
    if (error) doc["error"] = {{"kind", error->first}, {"message", error->second}};
    doc["timings_ms"] = run.timings;
    doc["warnings"] = run.warnings;
    doc["details"] = run.details;
    doc["outputs"] = run.outputs;
    doc["threads"] = thread_budget();
    doc["simd"] = std::string(simd::isa_name(simd::active_isa()));
    try {
        write_file(run.report, doc.dump(2) + "\n");
    } catch (const Error&) {
    }
}

StreamlineFormat streamline_format(const std::string& flag, const fs::path& path) {
    if (!flag.empty()) {
        const auto f = parse_streamline_format(flag);
        if (!f) throw DomainError("unknown streamline format '" + flag + "'");
        return *f;
    }
    return path.extension() == ".trks" ? StreamlineFormat::binary : StreamlineFormat::text;
}

Json json_with_provenance(Json doc, const Run& run) {
    doc["provenance"] = run.provenance;
    return doc;
}

void emit(Run& run, const std::string& key, const fs::path& path, const std::string& bytes) {
    write_file(path, bytes);
    run.outputs[key] = path.string();
}

std::optional<TriMesh> load_optional_mesh(const std::string& path) {
    if (path.empty()) return std::nullopt;
    return load_mesh(path);
}

TriMesh combined_mesh(const std::optional<TriMesh>& left, const std::optional<TriMesh>& right) {
    if (!left && !right) throw DomainError("give --left-mesh and/or --right-mesh");
    return combine_hemispheres(left ? &*left : nullptr, right ? &*right : nullptr);
}

DiskMap load_disk(const std::string& path) { return parse_disk_map(read_file(path)); }

void check_disk(const DiskMap& disk, const TriMesh& mesh, const char* side) {
    if (disk.uv.size() != mesh.vertex_count())
        throw DomainError(std::string(side) + " disk map has " + std::to_string(disk.uv.size()) +
                          " vertices but the mesh has " + std::to_string(mesh.vertex_count()));
}

// ---------------------------------------------------------------------------

struct ParamArgs {
    std::string mesh, labels, hemisphere, out, mesh_out, harmonic_out, preconditioner = "sobolev";
    std::optional<int> remove_region;
    bool no_area_correct = false;
    int max_iters = AreaCorrectConfig{}.max_iters;
    double step = AreaCorrectConfig{}.step;
    double tol = AreaCorrectConfig{}.tol;
};

Json distortion_json(const TriMesh& mesh, const DiskMap& map) {
    const auto d = distortion_report(mesh, map);
    return {{"rms_log_area_ratio", d.rms_log_area_ratio},
            {"max_dilatation", d.max_dilatation},
            {"mean_dilatation", d.mean_dilatation},
            {"flipped_faces", count_flipped(mesh, map.uv)}};
}

void cmd_param(const ParamArgs& a, Run& run) {
    AreaCorrectConfig cfg;
    cfg.max_iters = a.max_iters;
    cfg.step = a.step;
    cfg.tol = a.tol;
    if (a.preconditioner == "sobolev") cfg.preconditioner = AreaPreconditioner::sobolev;
    else if (a.preconditioner == "none") cfg.preconditioner = AreaPreconditioner::none;
    else throw DomainError("--preconditioner must be sobolev or none");
    if (cfg.max_iters < 0 || !(cfg.step > 0.0) || !(cfg.tol > 0.0))
        throw DomainError("area-correction settings need max-iters >= 0, step > 0, tol > 0");

    TriMesh mesh = run.timed("load", [&] { return load_mesh(a.mesh); });
    if (!a.hemisphere.empty()) {
        mesh.hemisphere = parse_hemisphere(a.hemisphere);
        for (auto& [id, r] : mesh.regions) r.hemisphere = mesh.hemisphere;
    }
    if (!a.labels.empty()) mesh = attach_labels(mesh, a.labels);
    if (a.remove_region) {
        if (!mesh.labeled()) throw DomainError("--remove-region needs a labeled mesh");
        const std::size_t before = mesh.vertex_count();
        mesh = run.timed("remove_region", [&] { return remove_region(mesh, *a.remove_region).mesh; });
        if (mesh.vertex_count() == before) warn(&run.warnings, "region " + std::to_string(*a.remove_region) + " is not used; nothing removed");
    }
    const auto topo = topology_report(mesh);
    run.details["topology"] = {{"vertices", topo.vertices},       {"edges", topo.edges},
                               {"faces", topo.faces},             {"euler_characteristic", topo.euler_characteristic},
                               {"boundary_loops", topo.boundary_loops}, {"components", topo.components}};

    SolveStats stats;
    const DiskMap harmonic = run.timed("harmonic", [&] { return harmonic_disk_map(mesh, &stats); });
    run.details["solve"] = {{"unknowns", stats.unknowns},
                            {"relative_residual", stats.relative_residual},
                            {"refinement_steps", stats.refinement_steps}};
    run.details["harmonic"] = distortion_json(mesh, harmonic);

    DiskMap result = harmonic;
    if (!a.no_area_correct) {
        const auto corrected = run.timed("area_correct", [&] { return area_correct(harmonic, mesh, cfg); });
        result = corrected.map;
        run.details["area_correct"] = {{"iterations", corrected.iterations},
                                       {"rejected", corrected.rejected},
                                       {"converged", corrected.converged},
                                       {"energy_initial", corrected.energy.front()},
                                       {"energy_final", corrected.energy.back()}};
        run.details["corrected"] = distortion_json(mesh, result);
        if (!corrected.converged) warn(&run.warnings, "area correction stopped at max-iters before converging");
    }

    emit(run, "disk", a.out, json_with_provenance(Json::parse(format_disk_map(result)), run).dump() + "\n");
    if (!a.harmonic_out.empty())
        emit(run, "harmonic", a.harmonic_out,
             json_with_provenance(Json::parse(format_disk_map(harmonic)), run).dump() + "\n");
    if (!a.mesh_out.empty()) emit(run, "mesh", a.mesh_out, format_mesh(mesh, MeshFormat::json));
}

struct SphereArgs {
    std::string left, right, left_mesh, right_mesh, out;
    std::vector<double> scales;
    int samples = 256;
};

void cmd_sphere(const SphereArgs& a, Run& run) {
    if (a.samples < 3) throw DomainError("--samples must be at least 3");
    for (double s : a.scales)
        if (!(s >= 1.0)) throw DomainError("explode scale s must be >= 1 (got " + std::to_string(s) + ")");
    const DiskMap left = load_disk(a.left), right = load_disk(a.right);
    const auto lower = inverse_stereographic(left, Cap::lower);
    const auto upper = inverse_stereographic(right, Cap::upper);
    const auto aligned = run.timed("align", [&] { return align_hemispheres(lower, upper, a.samples); });
    SphereArtifact art{aligned.combined, aligned.rotation, aligned.reflected, aligned.offset, aligned.rms, a.samples, {}};
    run.details["rotation"] = aligned.rotation;
    run.details["reflected"] = aligned.reflected;
    run.details["seam_rms"] = aligned.rms;

    if (!a.scales.empty()) {
        if (a.left_mesh.empty() || a.right_mesh.empty())
            throw DomainError("exploded views need --left-mesh and --right-mesh for the region labels");
        const TriMesh lm = load_mesh(a.left_mesh), rm = load_mesh(a.right_mesh);
        check_disk(left, lm, "left");
        check_disk(right, rm, "right");
        const TriMesh both = combine_hemispheres(&lm, &rm);
        if (!both.labeled()) throw DomainError("exploded views need labeled meshes");
        run.timed("explode", [&] {
            for (double s : a.scales) art.exploded.push_back(exploded_view(art.sphere, both.labels, both.regions, s, {}, &run.warnings));
        });
    }
    emit(run, "sphere", a.out, json_with_provenance(sphere_to_json(art), run).dump() + "\n");
}

struct ClusterArgs {
    std::string streamlines, format, out;
    double theta = kDefaultTheta;
    int k = kDefaultResample;
};

void cmd_cluster(const ClusterArgs& a, Run& run) {
    if (!(a.theta >= 0.0)) throw DomainError("theta must be >= 0");
    if (a.k < 2) throw DomainError("k must be >= 2");
    const auto set = run.timed("load", [&] { return load_streamlines(a.streamlines, streamline_format(a.format, a.streamlines)); });
    const auto result = run.timed("quickbundles", [&] { return quickbundles(set, a.theta, a.k, &run.warnings); });
    run.details["streamlines"] = set.size();
    run.details["clusters"] = result.clusters.size();
    run.details["skipped"] = result.skipped.size();
    emit(run, "clusters", a.out, json_with_provenance(clusters_to_json(result), run).dump() + "\n");
}

struct ConnectArgs {
    std::string clusters, streamlines, format, left_mesh, right_mesh, left_disk, right_disk, sphere, out, graph_out, csv;
    std::string strategy = "endpoints";
    double dmax = kDefaultMaxEndpointDistance;
};

void cmd_connect(const ConnectArgs& a, Run& run) {
    if (!std::isfinite(a.dmax) || a.dmax < 0.0) throw DomainError("dmax must be finite and >= 0");
    // Only endpoint coalescing exists; the option is kept for interior strategies.
    if (a.strategy != "endpoints") throw DomainError("--strategy must be endpoints");
    const auto clusters = clusters_from_json(read_json_file(a.clusters));
    const auto set = load_streamlines(a.streamlines, streamline_format(a.format, a.streamlines));
    if (clusters.assignment.size() != set.size())
        throw DomainError("clusters were built from " + std::to_string(clusters.assignment.size()) +
                          " streamlines, input has " + std::to_string(set.size()));
    const auto left = load_optional_mesh(a.left_mesh), right = load_optional_mesh(a.right_mesh);
    const TriMesh both = combined_mesh(left, right);

    ParamTransfer transfer;
    if (!a.left_disk.empty() || !a.right_disk.empty()) {
        if ((!a.left_disk.empty()) != left.has_value() || (!a.right_disk.empty()) != right.has_value())
            throw DomainError("give one disk map per mesh");
        for (const auto& [path, mesh, side] :
             {std::tuple{a.left_disk, &left, "left"}, std::tuple{a.right_disk, &right, "right"}}) {
            if (path.empty()) continue;
            const auto disk = load_disk(path);
            check_disk(disk, **mesh, side);
            transfer.disk_uv.insert(transfer.disk_uv.end(), disk.uv.begin(), disk.uv.end());
        }
    }
    if (!a.sphere.empty()) {
        const auto sphere = sphere_from_json(read_json_file(a.sphere));
        if (sphere.sphere.xyz.size() != both.vertex_count())
            throw DomainError("sphere map does not match the combined meshes");
        transfer.sphere_xyz = sphere.sphere.xyz;
    }

    const auto ends = run.timed("endpoints", [&] { return assign_endpoints(set, both, a.dmax); });
    const auto result = run.timed("coalesce", [&] { return coalesce(clusters, set, ends, both, transfer); });
    const auto graph = run.timed("graph", [&] { return build_graph(result.bundles, both.regions); });
    run.details["assigned_streamlines"] = result.assigned_streamlines;
    run.details["unassigned_streamlines"] = result.unassigned_streamlines;
    run.details["skipped_streamlines"] = result.skipped_streamlines;
    run.details["bundles"] = result.bundles.size();
    run.details["edges"] = graph.edges.size();
    if (result.unassigned_streamlines > 0)
        warn(&run.warnings, std::to_string(graph.unassigned_bundles) + " bundles (" +
                                std::to_string(result.unassigned_streamlines) + " streamlines) have no region pair");

    emit(run, "bundles", a.out, json_with_provenance(bundles_to_json(result), run).dump() + "\n");
    if (!a.graph_out.empty())
        emit(run, "graph", a.graph_out, json_with_provenance(graph_to_json(graph), run).dump() + "\n");
    if (!a.csv.empty()) emit(run, "csv", a.csv, format_graph_csv(graph));
}

struct OverlayArgs {
    std::string left_mesh, right_mesh, tsf, out;
    std::vector<std::string> channels;
    std::optional<int> seed_region, seed_vertex;
    bool regress = false;
};

void cmd_overlay(const OverlayArgs& a, Run& run) {
    const auto left = load_optional_mesh(a.left_mesh), right = load_optional_mesh(a.right_mesh);
    const TriMesh both = combined_mesh(left, right);
    std::vector<OverlayField> overlays;
    for (const auto& name : a.channels) overlays.push_back(attach_overlay(both, name));

    if (a.seed_region && a.seed_vertex) throw DomainError("give one of --seed-region or --seed-vertex");
    const bool seeded = a.seed_region || a.seed_vertex;
    if (!a.tsf.empty() != seeded) throw DomainError("--tsf and a seed (--seed-region or --seed-vertex) go together");
    if (a.regress && a.tsf.empty()) throw DomainError("--regress-mean-gray needs --tsf");
    if (seeded) {
        auto ts = run.timed("load_tsf", [&] { return load_tsf(a.tsf); });
        if (ts.vertices != both.vertex_count())
            throw DomainError("time series has " + std::to_string(ts.vertices) + " rows, meshes have " +
                              std::to_string(both.vertex_count()) + " vertices");
        if (a.regress) ts = run.timed("regress", [&] { return regress_mean_gray(ts, &run.warnings); });
        const Seed seed = a.seed_region ? Seed::region(*a.seed_region) : Seed::vertex(*a.seed_vertex);
        if (seed.kind == Seed::Kind::region && !both.labeled()) throw DomainError("region seeds need labeled meshes");
        auto field = run.timed("correlation", [&] { return seed_correlation(ts, seed, both.labels); });
        if (!field.flagged.empty())
            warn(&run.warnings, std::to_string(field.flagged.size()) + " vertices have zero-variance series (correlation 0)");
        run.details["flagged"] = field.flagged.size();
        overlays.push_back(attach_overlay(both, std::move(field)));
    }
    if (overlays.empty()) throw DomainError("nothing to do: give --channel and/or --tsf with a seed");
    Json list = Json::array();
    for (const auto& o : overlays) list.push_back(overlay_to_json(o));
    emit(run, "overlays", a.out, json_with_provenance(Json{{"version", 1}, {"overlays", list}}, run).dump() + "\n");
}

struct ExportArgs {
    std::string left_mesh, right_mesh, left_disk, right_disk, sphere, bundles, graph, out;
    std::vector<std::string> overlays;
};

void cmd_export(const ExportArgs& a, Run& run) {
    SceneInputs in;
    for (const auto& [mesh_path, disk_path, slot, side] :
         {std::tuple{a.left_mesh, a.left_disk, &in.left, "left"}, std::tuple{a.right_mesh, a.right_disk, &in.right, "right"}}) {
        if (mesh_path.empty()) {
            if (!disk_path.empty()) throw DomainError(std::string("--") + side + "-disk needs --" + side + "-mesh");
            continue;
        }
        SceneHemisphere h{load_mesh(mesh_path), std::nullopt};
        if (!disk_path.empty()) {
            h.disk = load_disk(disk_path);
            check_disk(*h.disk, h.mesh, side);
        }
        *slot = std::move(h);
    }
    if (!a.sphere.empty()) in.sphere = sphere_from_json(read_json_file(a.sphere));
    if (!a.bundles.empty()) in.bundles = bundles_from_json(read_json_file(a.bundles));
    if (!a.graph.empty()) in.graph = graph_from_json(read_json_file(a.graph));
    for (const auto& path : a.overlays) {
        const auto doc = read_json_file(path);
        for (const auto& o : doc.at("overlays")) in.overlays.push_back(overlay_from_json(o));
    }
    in.provenance = run.provenance;
    const auto scene = run.timed("build", [&] { return build_scene(in); });
    emit(run, "scene", a.out, format_scene(scene) + "\n");
    run.details["vertex_count"] = scene["vertex_count"];
    run.details["bundles"] = scene["bundles"].size();
    run.details["overlays"] = scene["overlays"].size();
}

struct ServeArgs {
    std::string scene, tsf, host = "127.0.0.1", web;
    int port = 8080;
    bool regress = false;
};

void cmd_serve(const ServeArgs& a, Run& run) {
    if (a.port < 0 || a.port > 65535) throw DomainError("--port out of range");
    std::optional<TimeSeriesField> ts;
    if (!a.tsf.empty()) ts = load_tsf(a.tsf);
    const auto service = make_service(read_json_file(a.scene), std::move(ts), a.regress,
                                      a.web.empty() ? default_web_root() : fs::path(a.web), &run.warnings);
    for (const auto& w : run.warnings) std::cerr << "warning: " << w << '\n';
    SceneServer server(service);
    const int port = server.bind(a.host, a.port);
    std::cout << "serving http://" << a.host << ':' << port << "/" << std::endl;
    server.listen();
}

void cmd_validate(const std::string& path, Run& run) {
    const auto problems = validate_scene(read_json_file(path));
    run.details["problems"] = problems;
    for (const auto& p : problems) std::cerr << p << '\n';
    if (!problems.empty()) throw DomainError(std::to_string(problems.size()) + " Scene problem(s); first: " + problems.front());
    std::cout << "valid" << std::endl;
}

struct FixtureArgs {
    std::string out_dir;
    int rings = 70;
    std::size_t streamlines = 10000;
    std::size_t bundles = 40;
    std::size_t samples = 120;
    std::uint64_t seed = 7;
};

// Two synthetic hemispheres (medial wall = label 0), streamlines and a time
// series. The series rows follow the Scene vertex order: left then right,
// after the medial wall is removed.
void cmd_fixture(const FixtureArgs& a, Run& run) {
    if (a.rings < 8) throw DomainError("--rings must be at least 8");
    synth::CortexOptions opts;
    opts.rings = a.rings;
    const fs::path dir = a.out_dir;
    const auto lh = synth::cortex_hemisphere(Hemisphere::left, opts);
    const auto rh = synth::cortex_hemisphere(Hemisphere::right, opts);
    emit(run, "left_mesh", dir / "lh.json", format_mesh(lh, MeshFormat::json));
    emit(run, "right_mesh", dir / "rh.json", format_mesh(rh, MeshFormat::json));
    const auto lr = remove_region(lh, 0).mesh, rr = remove_region(rh, 0).mesh;
    const TriMesh both = combine_hemispheres(&lr, &rr);
    synth::StreamlineOptions so;
    so.count = a.streamlines;
    so.bundles = a.bundles;
    so.seed = a.seed;
    emit(run, "streamlines", dir / "streamlines.trks", format_streamlines(synth::streamlines(both, so), StreamlineFormat::binary));
    synth::TimeSeriesOptions to;
    to.samples = a.samples;
    to.seed = a.seed + 1;
    emit(run, "series", dir / "series.tsf", format_tsf(synth::time_series(both.labels, to)));
    run.details["vertices_full"] = lh.vertex_count() + rh.vertex_count();
    run.details["vertices_scene"] = both.vertex_count();
}

std::string kind_of(const std::exception& e) {
    if (const auto* ce = dynamic_cast<const Error*>(&e)) return std::string(ce->kind_name());
    return "internal";
}

int exit_code(const std::exception& e) {
    if (dynamic_cast<const DomainError*>(&e)) return domain;
    if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const TopologyError*>(&e)) return invalid_input;
    if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const NotFoundError*>(&e)) return io;
    if (dynamic_cast<const NumericError*>(&e)) return numeric;
    return failure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cortical surface disk/sphere mapping, streamline bundling and connectivity scene export"};
    app.name("cortex-atlas");
    app.require_subcommand(1);

    Run run;
    std::function<void()> action;
    CLI::App* chosen = nullptr;
    auto sub = [&](const char* name, const char* help) {
        auto* s = app.add_subcommand(name, help);
        s->add_option("--report", run.report, "Run report path (default: <out>.report.json)");
        return s;
    };

    ParamArgs pa;
    auto* param = sub("param", "Map a disk-topology mesh onto the unit disk");
    param->add_option("--mesh", pa.mesh, "Mesh (.off, .vtk, .json)")->required()->check(CLI::ExistingFile);
    param->add_option("--labels", pa.labels, "Label CSV")->check(CLI::ExistingFile);
    param->add_option("--hemisphere", pa.hemisphere, "left | right | other");
    param->add_option("--remove-region", pa.remove_region, "Label to cut away (e.g. the medial wall)");
    param->add_flag("--no-area-correct", pa.no_area_correct, "Keep the harmonic map");
    param->add_option("--max-iters", pa.max_iters, "Area-correction iteration cap")->capture_default_str();
    param->add_option("--step", pa.step, "Area-correction initial step")->capture_default_str();
    param->add_option("--tol", pa.tol, "Relative energy change to stop at")->capture_default_str();
    param->add_option("--preconditioner", pa.preconditioner, "sobolev | none")->capture_default_str();
    param->add_option("--out", pa.out, "Disk map JSON")->required();
    param->add_option("--mesh-out", pa.mesh_out, "Disk-topology mesh JSON (after region removal)");
    param->add_option("--harmonic-out", pa.harmonic_out, "Harmonic (pre-correction) disk map JSON");
    param->callback([&] {
        run.input_flags = {"mesh", "labels"};
        run.output_flags = {"out", "mesh-out", "harmonic-out", "report"};
        if (run.report.empty()) run.report = pa.out + ".report.json";
        action = [&] { cmd_param(pa, run); };
    });

    SphereArgs sa;
    auto* sphere = sub("sphere", "Combine two disk maps into an aligned sphere with exploded variants");
    sphere->add_option("--left", sa.left, "Left disk map JSON")->required()->check(CLI::ExistingFile);
    sphere->add_option("--right", sa.right, "Right disk map JSON")->required()->check(CLI::ExistingFile);
    sphere->add_option("--left-mesh", sa.left_mesh, "Left mesh (labels for exploded views)")->check(CLI::ExistingFile);
    sphere->add_option("--right-mesh", sa.right_mesh, "Right mesh")->check(CLI::ExistingFile);
    sphere->add_option("--scale", sa.scales, "Explode scale s >= 1 (repeatable)");
    sphere->add_option("--samples", sa.samples, "Seam samples for alignment")->capture_default_str();
    sphere->add_option("--out", sa.out, "Sphere JSON")->required();
    sphere->callback([&] {
        run.input_flags = {"left", "right", "left-mesh", "right-mesh"};
        run.output_flags = {"out", "report"};
        if (run.report.empty()) run.report = sa.out + ".report.json";
        action = [&] { cmd_sphere(sa, run); };
    });

    ClusterArgs ca;
    auto* cluster = sub("cluster", "QuickBundles clustering of streamlines");
    cluster->add_option("--streamlines", ca.streamlines, "Streamlines (.trks binary or text)")->required()->check(CLI::ExistingFile);
    cluster->add_option("--format", ca.format, "text | binary (default from extension)");
    cluster->add_option("--theta", ca.theta, "MDF threshold (mm)")->capture_default_str();
    cluster->add_option("--k", ca.k, "Resampled points per streamline")->capture_default_str();
    cluster->add_option("--out", ca.out, "Clusters JSON")->required();
    cluster->callback([&] {
        run.input_flags = {"streamlines"};
        run.output_flags = {"out", "report"};
        if (run.report.empty()) run.report = ca.out + ".report.json";
        action = [&] { cmd_cluster(ca, run); };
    });

    ConnectArgs co;
    auto* connect = sub("connect", "Coalesce clusters into region-pair bundles and build the graph");
    connect->add_option("--clusters", co.clusters, "Clusters JSON")->required()->check(CLI::ExistingFile);
    connect->add_option("--streamlines", co.streamlines, "Streamlines the clusters came from")->required()->check(CLI::ExistingFile);
    connect->add_option("--format", co.format, "text | binary (default from extension)");
    connect->add_option("--left-mesh", co.left_mesh, "Left mesh JSON")->check(CLI::ExistingFile);
    connect->add_option("--right-mesh", co.right_mesh, "Right mesh JSON")->check(CLI::ExistingFile);
    connect->add_option("--left-disk", co.left_disk, "Left disk map JSON")->check(CLI::ExistingFile);
    connect->add_option("--right-disk", co.right_disk, "Right disk map JSON")->check(CLI::ExistingFile);
    connect->add_option("--sphere", co.sphere, "Sphere JSON")->check(CLI::ExistingFile);
    connect->add_option("--strategy", co.strategy, "Coalescing strategy (endpoints)")->capture_default_str();
    connect->add_option("--dmax", co.dmax, "Endpoint to surface distance limit (mm)")->capture_default_str();
    connect->add_option("--out", co.out, "Bundles JSON")->required();
    connect->add_option("--graph-out", co.graph_out, "Graph JSON");
    connect->add_option("--csv", co.csv, "Graph adjacency CSV");
    connect->callback([&] {
        run.input_flags = {"clusters", "streamlines", "left-mesh", "right-mesh", "left-disk", "right-disk", "sphere"};
        run.output_flags = {"out", "graph-out", "csv", "report"};
        if (run.report.empty()) run.report = co.out + ".report.json";
        action = [&] { cmd_connect(co, run); };
    });

    OverlayArgs oa;
    auto* overlay = sub("overlay", "Scalar and functional-correlation overlays");
    overlay->add_option("--left-mesh", oa.left_mesh, "Left mesh JSON")->check(CLI::ExistingFile);
    overlay->add_option("--right-mesh", oa.right_mesh, "Right mesh JSON")->check(CLI::ExistingFile);
    overlay->add_option("--channel", oa.channels, "Mesh channel to export (repeatable)");
    overlay->add_option("--tsf", oa.tsf, "TSF1 time series (rows in Scene vertex order)")->check(CLI::ExistingFile);
    overlay->add_option("--seed-region", oa.seed_region, "Seed region id (mean series)");
    overlay->add_option("--seed-vertex", oa.seed_vertex, "Seed vertex id");
    overlay->add_flag("--regress-mean-gray", oa.regress, "Regress out the global mean series first");
    overlay->add_option("--out", oa.out, "Overlays JSON")->required();
    overlay->callback([&] {
        run.input_flags = {"left-mesh", "right-mesh", "tsf"};
        run.output_flags = {"out", "report"};
        if (run.report.empty()) run.report = oa.out + ".report.json";
        action = [&] { cmd_overlay(oa, run); };
    });

    ExportArgs ea;
    auto* exp = sub("export", "Assemble the Scene JSON");
    exp->add_option("--left-mesh", ea.left_mesh, "Left mesh JSON")->check(CLI::ExistingFile);
    exp->add_option("--right-mesh", ea.right_mesh, "Right mesh JSON")->check(CLI::ExistingFile);
    exp->add_option("--left-disk", ea.left_disk, "Left disk map JSON")->check(CLI::ExistingFile);
    exp->add_option("--right-disk", ea.right_disk, "Right disk map JSON")->check(CLI::ExistingFile);
    exp->add_option("--sphere", ea.sphere, "Sphere JSON")->check(CLI::ExistingFile);
    exp->add_option("--bundles", ea.bundles, "Bundles JSON")->check(CLI::ExistingFile);
    exp->add_option("--graph", ea.graph, "Graph JSON")->check(CLI::ExistingFile);
    exp->add_option("--overlays", ea.overlays, "Overlays JSON (repeatable)")->check(CLI::ExistingFile);
    exp->add_option("--out", ea.out, "Scene JSON")->required();
    exp->callback([&] {
        run.input_flags = {"left-mesh", "right-mesh", "left-disk", "right-disk", "sphere", "bundles", "graph", "overlays"};
        run.output_flags = {"out", "report"};
        if (run.report.empty()) run.report = ea.out + ".report.json";
        action = [&] { cmd_export(ea, run); };
    });

    ServeArgs sv;
    auto* serve = sub("serve", "Serve a Scene and on-demand queries over local HTTP");
    serve->add_option("--scene", sv.scene, "Scene JSON")->required()->check(CLI::ExistingFile);
    serve->add_option("--tsf", sv.tsf, "TSF1 time series for /api/correlation")->check(CLI::ExistingFile);
    serve->add_flag("--regress-mean-gray", sv.regress, "Regress out the global mean series at load");
    serve->add_option("--host", sv.host, "Bind address")->capture_default_str();
    serve->add_option("--port", sv.port, "Port (0 picks a free one)")->capture_default_str();
    serve->add_option("--web", sv.web, "Static viewer directory");
    serve->callback([&] {
        run.input_flags = {"scene", "tsf"};
        run.output_flags = {"report"};
        action = [&] { cmd_serve(sv, run); };
    });

    std::string validate_path;
    auto* validate = sub("validate", "Check a Scene JSON for structural problems");
    validate->add_option("scene", validate_path, "Scene JSON")->required()->check(CLI::ExistingFile);
    validate->callback([&] { action = [&] { cmd_validate(validate_path, run); }; });

    FixtureArgs fa;
    auto* fixture = sub("fixture", "Write the synthetic two-hemisphere fixture");
    fixture->add_option("--out-dir", fa.out_dir, "Output directory")->required();
    fixture->add_option("--rings", fa.rings, "Latitude rings per hemisphere")->capture_default_str();
    fixture->add_option("--streamlines", fa.streamlines, "Streamline count")->capture_default_str();
    fixture->add_option("--bundles", fa.bundles, "Underlying bundle templates")->capture_default_str();
    fixture->add_option("--samples", fa.samples, "Time samples")->capture_default_str();
    fixture->add_option("--seed", fa.seed, "Random seed")->capture_default_str();
    fixture->callback([&] {
        if (run.report.empty()) run.report = (fs::path(fa.out_dir) / "fixture.report.json").string();
        action = [&] { cmd_fixture(fa, run); };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << Json{{"error", {{"kind", "usage"}, {"message", e.what()}}}}.dump() << '\n';
        return usage;
    }
    for (auto* s : app.get_subcommands()) chosen = s;
    run.command = chosen->get_name();

    try {
        run.provenance = build_provenance(*chosen, run);
        action();
        write_report(run, std::nullopt);
        return ok;
    } catch (const std::exception& e) {
        const std::string kind = kind_of(e);
        std::cerr << Json{{"error", {{"kind", kind}, {"message", e.what()}, {"command", run.command}}}}.dump() << '\n';
        write_report(run, std::make_pair(kind, std::string(e.what())));
        return exit_code(e);
    }
}
