#include <cmath>
#include <numbers>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "cortex_atlas/error.hpp"
#include "cortex_atlas/param_map.hpp"

namespace cortex {

DiskMap harmonic_disk_map(const TriMesh& mesh, SolveStats* stats) {
    validate_disk_topology(mesh);
    const auto topo = topology_report(mesh);
    const std::size_t nv = mesh.vertex_count();
    if (topo.isolated_vertices > 0) {
        std::vector<char> used(nv, 0);
        for (const auto& f : mesh.faces)
            for (int c : f) used[c] = 1;
        for (std::size_t v = 0; v < nv; ++v)
            if (!used[v])
                throw NumericError("singular Laplacian: interior vertex " + std::to_string(v) +
                                   " has no incident faces");
    }

    DiskMap map;
    map.source_mesh_id = mesh_digest(mesh);
    map.uv.assign(nv, Vec2::Zero());
    map.boundary = boundary_loops(mesh).front();

    const auto& loop = map.boundary;
    std::vector<double> cumulative(loop.size(), 0.0);
    for (std::size_t k = 1; k < loop.size(); ++k)
        cumulative[k] = cumulative[k - 1] + (mesh.vertices[loop[k]] - mesh.vertices[loop[k - 1]]).norm();
    const double perimeter = cumulative.back() + (mesh.vertices[loop.front()] - mesh.vertices[loop.back()]).norm();

    std::vector<int> unknown(nv, -1);
    std::vector<char> on_boundary(nv, 0);
    map.boundary_param.resize(loop.size());
    for (std::size_t k = 0; k < loop.size(); ++k) {
        const double theta = 2.0 * std::numbers::pi * cumulative[k] / perimeter;
        map.boundary_param[k] = theta;
        map.uv[loop[k]] = Vec2(std::cos(theta), std::sin(theta));
        on_boundary[loop[k]] = 1;
    }
    int n = 0;
    for (std::size_t v = 0; v < nv; ++v)
        if (!on_boundary[v]) unknown[v] = n++;
    if (stats) *stats = SolveStats{static_cast<std::size_t>(n), 0.0, 0};
    if (n == 0) return map;

    const auto weights = cotangent_weights(mesh);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(weights.edges.size() * 4);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, 2);
    for (std::size_t e = 0; e < weights.edges.size(); ++e) {
        const auto [i, j] = weights.edges[e];
        const double w = weights.weights[e];
        const int ui = unknown[i], uj = unknown[j];
        if (ui >= 0) triplets.emplace_back(ui, ui, w);
        if (uj >= 0) triplets.emplace_back(uj, uj, w);
        if (ui >= 0 && uj >= 0) {
            triplets.emplace_back(ui, uj, -w);
            triplets.emplace_back(uj, ui, -w);
        } else if (ui >= 0) {
            rhs.row(ui) += w * map.uv[j].transpose();
        } else if (uj >= 0) {
            rhs.row(uj) += w * map.uv[i].transpose();
        }
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(triplets.begin(), triplets.end());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success) throw NumericError("cotangent Laplacian factorization failed");
    Eigen::MatrixXd x = solver.solve(rhs);
    const double rhs_norm = std::max(rhs.norm(), 1e-300);
    double residual = (A * x - rhs).norm() / rhs_norm;
    int steps = 0;
    while (residual > kSolveTolerance && steps < 5) {
        x += solver.solve(rhs - A * x);
        residual = (A * x - rhs).norm() / rhs_norm;
        ++steps;
    }
    if (!(residual <= kSolveTolerance))
        throw NumericError("harmonic solve did not reach relative residual 1e-10 (got " + std::to_string(residual) + ")");
    if (stats) {
        stats->relative_residual = residual;
        stats->refinement_steps = steps;
    }
    for (std::size_t v = 0; v < nv; ++v)
        if (unknown[v] >= 0) map.uv[v] = x.row(unknown[v]).transpose();
    return map;
}

}  // namespace cortex
