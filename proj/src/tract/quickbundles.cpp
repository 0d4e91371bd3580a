#include <algorithm>
#include <cmath>
#include <limits>

#include "cortex_atlas/error.hpp"
#include "cortex_atlas/simd/kernels.hpp"
#include "cortex_atlas/tract.hpp"

namespace cortex {

namespace {

// Point at arc length fraction i / (k - 1), walking from the front of `at`.
template <typename At>
Vec3 point_at(const At& at, std::size_t n, const std::vector<double>& cumulative, int i, int k) {
    const double s = cumulative.back() * i / (k - 1);
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), s);
    std::size_t seg = static_cast<std::size_t>(it - cumulative.begin());
    seg = std::clamp<std::size_t>(seg, 1, n - 1) - 1;
    const double span = cumulative[seg + 1] - cumulative[seg];
    const double f = span > 0.0 ? (s - cumulative[seg]) / span : 0.0;
    return (1.0 - f) * at(seg) + f * at(seg + 1);
}

}  // namespace

// Each half is measured from its own end, so resample(reversed(x)) is exactly
// reversed(resample(x)) and MDF sees a flipped copy at distance 0.
Polyline resample(const Polyline& line, int k) {
    if (k < 2) throw DomainError("resample count must be >= 2");
    if (line.size() < 2) throw DomainError("polyline needs at least two points");
    const std::size_t n = line.size();
    std::vector<double> forward(n, 0.0), backward(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        forward[i] = forward[i - 1] + (line[i] - line[i - 1]).norm();
        backward[i] = backward[i - 1] + (line[n - 1 - i] - line[n - i]).norm();
    }
    if (!(forward.back() > 0.0)) throw DomainError("cannot resample a zero-length polyline");

    const auto front = [&](std::size_t j) { return line[j]; };
    const auto back = [&](std::size_t j) { return line[n - 1 - j]; };
    Polyline out(static_cast<std::size_t>(k));
    out.front() = line.front();
    out.back() = line.back();
    for (int i = 1; i + 1 < k; ++i) {
        const int mirror = k - 1 - i;
        if (i < mirror)
            out[static_cast<std::size_t>(i)] = point_at(front, n, forward, i, k);
        else if (i > mirror)
            out[static_cast<std::size_t>(i)] = point_at(back, n, backward, mirror, k);
        else
            out[static_cast<std::size_t>(i)] = 0.5 * (point_at(front, n, forward, i, k) + point_at(back, n, backward, i, k));
    }
    return out;
}

namespace {

void flatten(const Polyline& line, std::vector<double>& out) {
    out.resize(line.size() * 3);
    for (std::size_t i = 0; i < line.size(); ++i) {
        out[3 * i] = line[i].x();
        out[3 * i + 1] = line[i].y();
        out[3 * i + 2] = line[i].z();
    }
}

}  // namespace

double mdf(const Polyline& a, const Polyline& b) {
    if (a.size() != b.size()) throw DomainError("mdf needs polylines with the same number of points");
    if (a.empty()) throw DomainError("mdf of empty polylines");
    std::vector<double> fa, fb;
    flatten(a, fa);
    flatten(b, fb);
    const auto sums = simd::mdf_sums(fa.data(), fb.data(), a.size());
    return std::min(sums.direct, sums.flipped) / static_cast<double>(a.size());
}

QuickBundlesResult quickbundles(const StreamlineSet& set, double theta, int k, Warnings* warnings) {
    if (!(theta >= 0.0)) throw DomainError("theta must be >= 0");
    if (k < 2) throw DomainError("k must be >= 2");

    QuickBundlesResult result;
    result.theta = theta;
    result.k = k;
    result.assignment.assign(set.size(), -1);
    result.admitted_at.assign(set.size(), std::numeric_limits<double>::quiet_NaN());

    const std::size_t stride = static_cast<std::size_t>(k) * 3;
    std::vector<double> centroids;  // clusters x k x 3, contiguous
    std::vector<double> sample;
    std::vector<double> reversed(stride);
    const double inv_k = 1.0 / k;

    for (std::size_t s = 0; s < set.size(); ++s) {
        Polyline line;
        try {
            line = resample(set.streamlines[s], k);
        } catch (const DomainError&) {
            result.skipped.push_back(s);
            continue;
        }
        flatten(line, sample);

        double best = std::numeric_limits<double>::infinity();
        std::size_t best_cluster = 0;
        bool best_flipped = false;
        for (std::size_t c = 0; c < result.clusters.size(); ++c) {
            const auto sums = simd::mdf_sums(centroids.data() + c * stride, sample.data(), static_cast<std::size_t>(k));
            const bool flipped = sums.flipped < sums.direct;
            const double d = (flipped ? sums.flipped : sums.direct) * inv_k;
            if (d < best) {
                best = d;
                best_cluster = c;
                best_flipped = flipped;
            }
        }

        if (!result.clusters.empty() && best <= theta) {
            auto& cluster = result.clusters[best_cluster];
            const double* src = sample.data();
            if (best_flipped) {
                for (int i = 0; i < k; ++i)
                    for (int a = 0; a < 3; ++a) reversed[3 * i + a] = sample[3 * (k - 1 - i) + a];
                src = reversed.data();
            }
            cluster.members.push_back(s);
            const double n = static_cast<double>(cluster.members.size());
            double* c = centroids.data() + best_cluster * stride;
            for (std::size_t i = 0; i < stride; ++i) c[i] += (src[i] - c[i]) / n;
            result.assignment[s] = cluster.id;
            result.admitted_at[s] = best;
        } else {
            Cluster cluster;
            cluster.id = static_cast<int>(result.clusters.size());
            cluster.k = k;
            cluster.members.push_back(s);
            result.clusters.push_back(std::move(cluster));
            centroids.insert(centroids.end(), sample.begin(), sample.end());
            result.assignment[s] = result.clusters.back().id;
        }
    }

    for (std::size_t c = 0; c < result.clusters.size(); ++c) {
        auto& centroid = result.clusters[c].centroid;
        centroid.resize(static_cast<std::size_t>(k));
        const double* src = centroids.data() + c * stride;
        for (int i = 0; i < k; ++i) centroid[static_cast<std::size_t>(i)] = Vec3(src[3 * i], src[3 * i + 1], src[3 * i + 2]);
    }
    if (!result.skipped.empty()) {
        std::string ids;
        for (std::size_t i = 0; i < std::min<std::size_t>(result.skipped.size(), 10); ++i)
            ids += (i ? ", " : "") + std::to_string(result.skipped[i]);
        if (result.skipped.size() > 10) ids += ", ...";
        warn(warnings, std::to_string(result.skipped.size()) + " zero-length streamline(s) skipped: " + ids);
    }
    return result;
}

}  // namespace cortex
