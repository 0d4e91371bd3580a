// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Oracles live in tests/support and never call the routine
// they check.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "cortex_atlas/connect.hpp"
#include "cortex_atlas/parallel.hpp"
#include "cortex_atlas/scene.hpp"
#include "cortex_atlas/simd/kernels.hpp"
#include "four_region.hpp"
#include "oracles.hpp"
#include "pipeline.hpp"

using namespace cortex;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    // Records a check; the detail text is shown either way.
    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (detail.tellp() > 0) detail << "; ";
        detail << (ok ? "" : "FAILED ") << what;
    }
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

int failures = 0;

void criterion(const char* name, const std::function<void(Verdict&)>& body) {
    Verdict v;
    const auto t0 = Clock::now();
    try {
        body(v);
    } catch (const std::exception& e) {
        v.require(false, std::string("exception: ") + e.what());
    }
    if (!v.pass) ++failures;
    std::printf("%s  %-34s %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", name, v.detail.str().c_str(), seconds_since(t0));
    std::fflush(stdout);
}

// The hemisphere fixtures: the unit hemisphere (~5k faces) and one side of
// the 30k-vertex cortex fixture with its medial wall cut away.
struct Fixture {
    const char* name;
    TriMesh mesh;
};

std::vector<Fixture>& fixtures() {
    static std::vector<Fixture> f = [] {
        synth::CortexOptions opts;
        opts.rings = 120;
        return std::vector<Fixture>{
            {"unit hemisphere", synth::hemisphere(31)},
            {"cortex lh", remove_region(synth::cortex_hemisphere(Hemisphere::left, opts), 0).mesh},
        };
    }();
    return f;
}

std::map<std::string, DiskMap>& harmonic_maps() {
    static std::map<std::string, DiskMap> maps;
    return maps;
}

void harmonic_validity(Verdict& v) {
    for (const auto& fx : fixtures()) {
        const auto t0 = Clock::now();
        const auto map = harmonic_disk_map(fx.mesh);
        const double secs = seconds_since(t0);
        harmonic_maps()[fx.name] = map;

        double radius_error = 0.0;
        for (int b : map.boundary) radius_error = std::max(radius_error, std::abs(map.uv[b].norm() - 1.0));
        const auto residual = oracle::mean_value_residual(fx.mesh, map.uv, map.boundary);
        const auto flipped = oracle::flipped_faces(fx.mesh, map.uv);
        const std::string tag = std::string(fx.name) + " (" + std::to_string(fx.mesh.vertex_count()) + " v)";
        v.require(flipped == 0, tag + " flipped=" + std::to_string(flipped));
        v.require(radius_error < 1e-9, "radius err " + fmt("%.1e", radius_error));
        v.require(residual.max_relative < 1e-8 && residual.max_absolute < 1e-8,
                  "mean-value residual " + fmt("%.1e", residual.max_absolute) + " abs / " +
                      fmt("%.1e", residual.max_relative) + " rel");
        v.require(secs < 10.0, "solve " + fmt("%.2f s", secs));
    }
}

void area_correction(Verdict& v) {
    for (const auto& fx : fixtures()) {
        const auto& harmonic = harmonic_maps().at(fx.name);
        const auto t0 = Clock::now();
        const auto out = area_correct(harmonic, fx.mesh);
        const double secs = seconds_since(t0);
        const double before = oracle::rms_log_area(fx.mesh, harmonic.uv);
        const double after = oracle::rms_log_area(fx.mesh, out.map.uv);
        bool monotone = true;
        for (std::size_t i = 1; i < out.energy.size(); ++i) monotone = monotone && out.energy[i] <= out.energy[i - 1];
        v.require(after <= 0.5 * before, std::string(fx.name) + " RMS(log rho) " + fmt("%.4f", before) + " -> " +
                                             fmt("%.4f", after) + " (" + fmt("%.1f%%", 100.0 * after / before) + ")");
        v.require(oracle::flipped_faces(fx.mesh, out.map.uv) == 0, "fold-free");
        v.require(monotone, "E non-increasing over " + std::to_string(out.iterations) + " steps");
        v.require(secs < 30.0, fmt("%.2f s", secs));
    }
}

void stereographic_round_trip(Verdict& v) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double r = std::sqrt(u(rng)), a = 2 * std::numbers::pi * u(rng);
        const Vec2 p(r * std::cos(a), r * std::sin(a));
        for (Cap cap : {Cap::lower, Cap::upper}) worst = std::max(worst, (stereographic(inverse_stereographic(p, cap), cap) - p).norm());
    }
    v.require(worst <= 1e-12, "10k points, max round-trip err " + fmt("%.1e", worst));

    // Per-face dilatation of the differential, evaluated at face centroids of
    // a refined disk by central differences.
    const auto grid = synth::flat_disk(48);
    const double h = 1e-6;
    double worst_k = 0.0;
    for (const auto& f : grid.faces) {
        const Vec3 c3 = (grid.vertices[f[0]] + grid.vertices[f[1]] + grid.vertices[f[2]]) / 3.0;
        const Vec2 c(c3.x(), c3.y());
        for (Cap cap : {Cap::lower, Cap::upper}) {
            Eigen::Matrix<double, 3, 2> J;
            J.col(0) = (inverse_stereographic(Vec2(c + Vec2(h, 0)), cap) - inverse_stereographic(Vec2(c - Vec2(h, 0)), cap)) / (2 * h);
            J.col(1) = (inverse_stereographic(Vec2(c + Vec2(0, h)), cap) - inverse_stereographic(Vec2(c - Vec2(0, h)), cap)) / (2 * h);
            Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>> svd(J);
            worst_k = std::max(worst_k, std::abs(svd.singularValues()(0) / svd.singularValues()(1) - 1.0));
        }
    }
    v.require(worst_k <= 1e-6, std::to_string(grid.face_count()) + " faces, max |K-1| " + fmt("%.1e", worst_k));
}

void alignment_recovery(Verdict& v) {
    constexpr double rot = 17.0 * std::numbers::pi / 180.0;
    for (const auto& fx : fixtures()) {
        const auto& left = harmonic_maps().at(fx.name);
        DiskMap right = left;
        const Eigen::Rotation2Dd r(rot);
        for (auto& p : right.uv) p = r * p;
        const auto a = align_hemispheres(inverse_stereographic(left, Cap::lower), inverse_stereographic(right, Cap::upper), 256);
        const double err = std::abs(a.rotation + rot);
        v.require(err < 1e-6 && !a.reflected, std::string(fx.name) + " angle err " + fmt("%.1e", err) + " rad");
        v.require(a.rms < 1e-9, "seam RMS " + fmt("%.1e", a.rms));
    }
}

void quickbundles_oracle(Verdict& v) {
    std::mt19937_64 rng(4711);
    int exact = 0;
    double worst_centroid = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        StreamlineSet set;
        set.streamlines = oracle::random_streamlines(rng, 1 + rng() % 50);
        const double theta = 0.5 + static_cast<double>(rng() % 150) / 10.0;
        const auto got = quickbundles(set, theta);
        const auto want = oracle::quickbundles(set.streamlines, theta, kDefaultResample);
        bool same = got.assignment == want.assignment && got.clusters.size() == want.members.size();
        for (std::size_t c = 0; same && c < want.members.size(); ++c) {
            same = got.clusters[c].members == want.members[c];
            for (std::size_t i = 0; i < want.centroids[c].size(); ++i) {
                const double d = (got.clusters[c].centroid[i] - want.centroids[c][i]).norm();
                worst_centroid = std::max(worst_centroid, d);
                same = same && d <= 1e-12;
            }
        }
        exact += same;
    }
    v.require(exact == 200, std::to_string(exact) + "/200 sets identical, max centroid diff " + fmt("%.1e", worst_centroid));

    const double grid[] = {0, 0.5, 1, 2, 3, 5, 8, 10, 13, 21, 34, 55, std::numeric_limits<double>::infinity()};
    int monotone = 0;
    for (int trial = 0; trial < 200; ++trial) {
        StreamlineSet set;
        set.streamlines = oracle::random_streamlines(rng, 1 + rng() % 100);
        std::size_t previous = std::numeric_limits<std::size_t>::max();
        bool ok = true;
        for (double theta : grid) {
            const auto n = quickbundles(set, theta).clusters.size();
            ok = ok && n <= previous;
            previous = n;
        }
        monotone += ok;
    }
    v.require(monotone == 200, "cluster count monotone on " + std::to_string(monotone) + "/200 sets over 13 thetas");
}

Polyline reversed(Polyline p) {
    std::reverse(p.begin(), p.end());
    return p;
}

void mdf_properties(Verdict& v) {
    std::mt19937_64 rng(99);
    const auto lines = oracle::random_streamlines(rng, 1001);
    double asym = 0.0, rev = 0.0, both_rev = 0.0, min_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
        const auto a = resample(lines[i], 12), b = resample(lines[i + 1], 12);
        const double d = mdf(a, b);
        min_d = std::min(min_d, d);
        asym = std::max(asym, std::abs(d - mdf(b, a)));
        rev = std::max(rev, mdf(a, reversed(a)));
        both_rev = std::max(both_rev, std::abs(d - mdf(reversed(a), reversed(b))));
    }
    v.require(asym <= 1e-12, "max |mdf(a,b)-mdf(b,a)| " + fmt("%.1e", asym));
    v.require(min_d >= 0.0, "min " + fmt("%.3g", min_d));
    v.require(rev <= 1e-12, "max mdf(a,rev a) " + fmt("%.1e", rev));
    v.require(both_rev <= 1e-12, "reversing both " + fmt("%.1e", both_rev));

    std::normal_distribution<double> n(0.0, 1.0);
    double offset_err = 0.0;
    for (int i = 0; i < 200; ++i) {
        const Vec3 p(n(rng), n(rng), n(rng)), dir = Vec3(n(rng), n(rng), n(rng)).normalized();
        const Vec3 perp = dir.cross(Vec3(n(rng), n(rng), n(rng))).normalized();
        const double len = 1.0 + 20.0 * std::abs(n(rng));
        const int k = 2 + static_cast<int>(rng() % 30);
        const auto a = resample(Polyline{p, p + len * dir}, k);
        const auto b = resample(Polyline{p + perp, p + perp + len * dir}, k);
        offset_err = std::max(offset_err, std::abs(mdf(a, b) - 1.0));
    }
    v.require(offset_err <= 1e-12, "unit-offset segments max |mdf-1| " + fmt("%.1e", offset_err));
}

void connectivity_bookkeeping(Verdict& v) {
    synth::CortexOptions opts;
    opts.rings = 40;
    const auto lh = remove_region(synth::cortex_hemisphere(Hemisphere::left, opts), 0).mesh;
    const auto rh = remove_region(synth::cortex_hemisphere(Hemisphere::right, opts), 0).mesh;
    const auto both = combine_hemispheres(&lh, &rh);
    synth::StreamlineOptions so;
    so.count = 3000;
    so.degenerate_fraction = 0.01;
    const auto set = synth::streamlines(both, so);
    const auto qb = quickbundles(set, kDefaultTheta);
    const auto bundles = coalesce(qb, set, assign_endpoints(set, both), both);
    const auto graph = build_graph(bundles.bundles, both.regions);
    const std::size_t total = bundles.assigned_streamlines + bundles.unassigned_streamlines + bundles.skipped_streamlines;
    v.require(total == set.size() && graph.streamline_total() == bundles.assigned_streamlines,
              std::to_string(bundles.assigned_streamlines) + " + " + std::to_string(bundles.unassigned_streamlines) +
                  " + " + std::to_string(bundles.skipped_streamlines) + " = " + std::to_string(total) + " of " +
                  std::to_string(set.size()));

    std::map<Hemisphere, double> sums;
    for (const auto& [id, node] : graph.nodes) sums[node.hemisphere] += node.relative_area;
    double worst = 0.0;
    for (const auto& [h, s] : sums) worst = std::max(worst, std::abs(s - 1.0));
    v.require(sums.size() == 2 && worst <= 1e-12, "relative area sums off by " + fmt("%.1e", worst));

    const auto g4 = four_region::graph();
    const auto want = four_region::expected_edges();
    bool matrix = g4.edges.size() == want.size() && g4.unassigned_bundles == four_region::kUnassignedBundles &&
                  g4.unassigned_streamlines == four_region::kUnassignedStreamlines;
    for (const auto& [pair, counts] : want) {
        const auto* e = g4.edge(pair.first, pair.second);
        matrix = matrix && e && e->bundle_count == counts.first && e->streamline_count == counts.second;
    }
    v.require(matrix, "4-region matrix (" + std::to_string(g4.edges.size()) + " edges)");
}

void functional_overlays(Verdict& v) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n(0.0, 1.0);
    const std::size_t T = 64;
    std::vector<double> seed(T), values;
    for (auto& x : seed) x = 50.0 + 3.0 * n(rng);
    values.insert(values.end(), seed.begin(), seed.end());
    for (double x : seed) values.push_back(-x);
    values.insert(values.end(), T, 7.25);
    for (std::size_t i = 0; i < T; ++i) values.push_back(n(rng));
    const auto ts = make_time_series(4, T, values);
    const auto o = seed_correlation(ts, Seed::vertex(0));
    v.require(std::abs(o.values[0] - 1.0) <= 1e-12, "self " + fmt("%.17g", o.values[0]));
    v.require(std::abs(o.values[1] + 1.0) <= 1e-12, "negation " + fmt("%.17g", o.values[1]));
    v.require(o.values[2] == 0.0 && o.flagged == std::vector<int>{2}, "flat -> 0, flagged");

    double ortho = 0.0, idem = 0.0;
    const auto check = [&](const TimeSeriesField& field) {
        std::vector<double> g(field.samples, 0.0);
        for (std::size_t vtx = 0; vtx < field.vertices; ++vtx)
            for (std::size_t t = 0; t < field.samples; ++t) g[t] += field.series(vtx)[t] / field.vertices;
        double gm = 0.0;
        for (double x : g) gm += x / field.samples;
        const auto r = regress_mean_gray(field);
        for (std::size_t vtx = 0; vtx < field.vertices; ++vtx) {
            double dot = 0.0;
            for (std::size_t t = 0; t < field.samples; ++t) dot += r.series(vtx)[t] * (g[t] - gm);
            ortho = std::max(ortho, std::abs(dot));
        }
        const auto r2 = regress_mean_gray(r);
        for (std::size_t i = 0; i < r.values.size(); ++i) idem = std::max(idem, std::abs(r2.values[i] - r.values[i]));
    };
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> vals(10 * 20);
        for (auto& x : vals) x = 10.0 * n(rng) + 3.0;
        check(make_time_series(10, 20, vals));
    }
    synth::CortexOptions opts;
    opts.rings = 40;
    const auto lh = remove_region(synth::cortex_hemisphere(Hemisphere::left, opts), 0).mesh;
    check(synth::time_series(lh.labels));
    v.require(ortho < 1e-10, "max |<r,g>| " + fmt("%.1e", ortho));
    v.require(idem < 1e-10, "idempotence " + fmt("%.1e", idem));
}

void determinism(Verdict& v) {
    const auto a = pipeline::fresh_dir("det_a"), b = pipeline::fresh_dir("det_b"), c = pipeline::fresh_dir("det_c");
    for (const auto& dir : {a, b, c}) {
        const int rc = pipeline::fixture(dir, 70, 10000);
        if (rc != 0) return v.require(false, "fixture exit " + std::to_string(rc));
    }
    v.require(pipeline::full(a) == 0 && pipeline::full(b) == 0, "two runs completed");
    const auto sa = pipeline::slurp(a / "scene.json"), sb = pipeline::slurp(b / "scene.json");
    v.require(!sa.empty() && sa == sb, "scene.json identical (" + std::to_string(sa.size()) + " bytes)");
    // Third run forced onto the scalar kernels and a single thread.
    v.require(pipeline::full(c, "CORTEX_ATLAS_SIMD=scalar CORTEX_ATLAS_THREADS=1") == 0 &&
                  pipeline::slurp(c / "scene.json") == sa,
              "scalar single-thread run identical");
}

void end_to_end(Verdict& v) {
    const auto dir = pipeline::fresh_dir("e2e");
    if (const int rc = pipeline::fixture(dir, 120, 10000); rc != 0) return v.require(false, "fixture exit " + std::to_string(rc));
    const auto t0 = Clock::now();
    const int rc = pipeline::full(dir);
    const double secs = seconds_since(t0);
    v.require(rc == 0, "pipeline exit " + std::to_string(rc));
    if (rc != 0) return;
    const auto scene = Json::parse(pipeline::slurp(dir / "scene.json"));
    const auto problems = validate_scene(scene);
    v.require(problems.empty(), problems.empty() ? "scene valid" : problems.front());
    const auto vertices = scene["vertex_count"].get<std::size_t>();
    v.require(vertices >= 30000, std::to_string(vertices) + " vertices, " + std::to_string(scene["bundles"].size()) + " bundles");
    v.require(secs < 60.0, "param+sphere+cluster+connect+overlay+export " + fmt("%.1f s", secs));
}

}  // namespace

int main() {
    std::printf("cortex-atlas acceptance (simd %s, %u threads)\n",
                std::string(simd::isa_name(simd::active_isa())).c_str(), thread_budget());
    criterion("harmonic_map_validity", harmonic_validity);
    criterion("area_correction_efficacy", area_correction);
    criterion("stereographic_round_trip", stereographic_round_trip);
    criterion("hemisphere_alignment_recovery", alignment_recovery);
    criterion("quickbundles_oracle_equivalence", quickbundles_oracle);
    criterion("mdf_properties", mdf_properties);
    criterion("connectivity_bookkeeping", connectivity_bookkeeping);
    criterion("functional_overlays", functional_overlays);
    criterion("determinism", determinism);
    criterion("end_to_end_runtime", end_to_end);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
