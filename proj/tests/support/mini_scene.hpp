#pragma once

// Small two-hemisphere Scene assembled in-process from the library calls the
// CLI chains together.

#include "cortex_atlas/scene.hpp"

namespace mini_scene {

using namespace cortex;

struct Parts {
    SceneInputs inputs;
    TriMesh combined;
    TimeSeriesField series;
};

inline Parts build(int rings = 14) {
    Parts p;
    synth::CortexOptions opts;
    opts.rings = rings;
    const auto lh = remove_region(synth::cortex_hemisphere(Hemisphere::left, opts), 0).mesh;
    const auto rh = remove_region(synth::cortex_hemisphere(Hemisphere::right, opts), 0).mesh;
    const auto ld = harmonic_disk_map(lh), rd = harmonic_disk_map(rh);
    p.combined = combine_hemispheres(&lh, &rh);

    const auto aligned = align_hemispheres(inverse_stereographic(ld, Cap::lower), inverse_stereographic(rd, Cap::upper), 64);
    SphereArtifact art{aligned.combined, aligned.rotation, aligned.reflected, aligned.offset, aligned.rms, 64, {}};
    art.exploded.push_back(exploded_view(art.sphere, p.combined.labels, p.combined.regions, 1.5));

    const auto set = synth::streamlines(p.combined, {.count = 400, .bundles = 10});
    const auto qb = quickbundles(set, kDefaultTheta);
    ParamTransfer transfer;
    transfer.disk_uv = ld.uv;
    transfer.disk_uv.insert(transfer.disk_uv.end(), rd.uv.begin(), rd.uv.end());
    transfer.sphere_xyz = art.sphere.xyz;
    auto bundles = coalesce(qb, set, assign_endpoints(set, p.combined), p.combined, transfer);
    auto graph = build_graph(bundles.bundles, p.combined.regions);

    p.series = synth::time_series(p.combined.labels, {.samples = 40});
    p.inputs.left = SceneHemisphere{lh, ld};
    p.inputs.right = SceneHemisphere{rh, rd};
    p.inputs.sphere = art;
    p.inputs.overlays.push_back(attach_overlay(p.combined, "myelin"));
    p.inputs.overlays.push_back(attach_overlay(p.combined, seed_correlation(p.series, Seed::region(3), p.combined.labels)));
    p.inputs.bundles = std::move(bundles);
    p.inputs.graph = std::move(graph);
    p.inputs.provenance = Json{{"test", true}};
    return p;
}

}  // namespace mini_scene
