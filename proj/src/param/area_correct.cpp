#include <cmath>
#include <numbers>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "cortex_atlas/error.hpp"
#include "cortex_atlas/param_map.hpp"

namespace cortex {

namespace {

struct AreaModel {
    std::vector<double> target;  // A3_f rescaled so the targets sum to pi
    std::vector<double> weight;  // A3_f / A3_total

    explicit AreaModel(const TriMesh& mesh) {
        const auto a3 = face_areas(mesh);
        double total = 0.0;
        for (double a : a3) total += a;
        target.resize(a3.size());
        weight.resize(a3.size());
        for (std::size_t f = 0; f < a3.size(); ++f) {
            weight[f] = a3[f] / total;
            target[f] = weight[f] * std::numbers::pi;
        }
    }
};

struct Evaluation {
    double energy = 0.0;
    double rms_log = 0.0;
    bool fold_free = true;
};

Evaluation evaluate(const TriMesh& mesh, const AreaModel& model, const std::vector<Vec2>& uv) {
    Evaluation ev;
    double log_sq = 0.0;
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        const double a2 = signed_area(uv, mesh.faces[f]);
        if (!(a2 > 0.0)) {
            ev.fold_free = false;
            return ev;
        }
        const double rho = a2 / model.target[f];
        ev.energy += (rho - 1.0) * (rho - 1.0) * model.weight[f];
        const double l = std::log(rho);
        log_sq += l * l;
    }
    ev.rms_log = std::sqrt(log_sq / static_cast<double>(mesh.face_count()));
    return ev;
}

// dE/duv for every vertex; boundary rows are zeroed by the caller.
void energy_gradient(const TriMesh& mesh, const AreaModel& model, const std::vector<Vec2>& uv,
                     std::vector<Vec2>& grad) {
    grad.assign(uv.size(), Vec2::Zero());
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        const auto& t = mesh.faces[f];
        const double rho = signed_area(uv, t) / model.target[f];
        // dE/dA2 = 2 (rho - 1) w_f / T_f
        const double scale = 2.0 * (rho - 1.0) * model.weight[f] / model.target[f];
        for (int c = 0; c < 3; ++c) {
            const Vec2& next = uv[t[(c + 1) % 3]];
            const Vec2& prev = uv[t[(c + 2) % 3]];
            // dA2/du_c = (v_next - v_prev) / 2, dA2/dv_c = (u_prev - u_next) / 2
            grad[t[c]] += scale * 0.5 * Vec2(next.y() - prev.y(), prev.x() - next.x());
        }
    }
}

}  // namespace

double signed_area(const std::vector<Vec2>& uv, const Face& f) {
    const Vec2 a = uv[f[1]] - uv[f[0]];
    const Vec2 b = uv[f[2]] - uv[f[0]];
    return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

std::size_t count_flipped(const TriMesh& mesh, const std::vector<Vec2>& uv) {
    std::size_t n = 0;
    for (const auto& f : mesh.faces)
        if (!(signed_area(uv, f) > 0.0)) ++n;
    return n;
}

double area_energy(const TriMesh& mesh, const std::vector<Vec2>& uv) {
    const AreaModel model(mesh);
    double e = 0.0;
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        const double rho = signed_area(uv, mesh.faces[f]) / model.target[f];
        e += (rho - 1.0) * (rho - 1.0) * model.weight[f];
    }
    return e;
}

AreaCorrectResult area_correct(const DiskMap& map, const TriMesh& mesh, const AreaCorrectConfig& cfg) {
    if (map.uv.size() != mesh.vertex_count()) throw DomainError("disk map does not match mesh vertex count");
    if (cfg.max_iters < 0 || !(cfg.step > 0.0) || !(cfg.tol >= 0.0))
        throw DomainError("area_correct needs max_iters >= 0, step > 0, tol >= 0");
    if (const auto flipped = count_flipped(mesh, map.uv); flipped > 0)
        throw DomainError("input disk map has " + std::to_string(flipped) + " flipped triangles");

    const AreaModel model(mesh);
    AreaCorrectResult result;
    result.map = map;
    Evaluation current = evaluate(mesh, model, map.uv);
    result.energy.push_back(current.energy);
    result.rms_log_area.push_back(current.rms_log);
    if (cfg.max_iters == 0 || current.energy == 0.0) {
        result.converged = current.energy == 0.0;
        return result;
    }

    std::vector<char> fixed(mesh.vertex_count(), 0);
    for (int b : map.boundary) fixed[b] = 1;
    std::vector<int> unknown(mesh.vertex_count(), -1);
    int n = 0;
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
        if (!fixed[v]) unknown[v] = n++;
    if (n == 0) return result;

    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> sobolev;
    if (cfg.preconditioner == AreaPreconditioner::sobolev) {
        std::vector<Eigen::Triplet<double>> triplets;
        for (const auto& f : mesh.faces) {
            for (int e = 0; e < 3; ++e) {
                // Each interior edge appears in two faces; weight 1/2 per face.
                const int ui = unknown[f[e]], uj = unknown[f[(e + 1) % 3]];
                if (ui >= 0) triplets.emplace_back(ui, ui, 0.5);
                if (uj >= 0) triplets.emplace_back(uj, uj, 0.5);
                if (ui >= 0 && uj >= 0) {
                    triplets.emplace_back(ui, uj, -0.5);
                    triplets.emplace_back(uj, ui, -0.5);
                }
            }
        }
        Eigen::SparseMatrix<double> L(n, n);
        L.setFromTriplets(triplets.begin(), triplets.end());
        sobolev.compute(L);
        if (sobolev.info() != Eigen::Success) throw NumericError("area-correction preconditioner factorization failed");
    }

    std::vector<Vec2> grad;
    std::vector<Vec2> direction(mesh.vertex_count(), Vec2::Zero());
    std::vector<Vec2> candidate;
    Eigen::MatrixXd g(n, 2);
    double step = cfg.step;
    constexpr double kMinStepFraction = 1e-12;

    while (result.iterations < cfg.max_iters) {
        energy_gradient(mesh, model, result.map.uv, grad);
        for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
            if (unknown[v] >= 0) g.row(unknown[v]) = grad[v].transpose();
        if (cfg.preconditioner == AreaPreconditioner::sobolev) g = sobolev.solve(g).eval();
        for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
            direction[v] = unknown[v] >= 0 ? Vec2(g.row(unknown[v]).transpose()) : Vec2::Zero();

        bool accepted = false;
        Evaluation next;
        while (step >= cfg.step * kMinStepFraction) {
            candidate = result.map.uv;
            for (std::size_t v = 0; v < candidate.size(); ++v) candidate[v] -= step * direction[v];
            next = evaluate(mesh, model, candidate);
            if (next.fold_free && next.energy <= current.energy && next.rms_log <= current.rms_log) {
                accepted = true;
                break;
            }
            step *= 0.5;
            ++result.rejected;
        }
        if (!accepted) break;

        const double relative_change = (current.energy - next.energy) / current.energy;
        result.map.uv.swap(candidate);
        current = next;
        ++result.iterations;
        result.energy.push_back(current.energy);
        result.rms_log_area.push_back(current.rms_log);
        if (relative_change < cfg.tol || current.energy == 0.0) {
            result.converged = true;
            break;
        }
        step = std::min(cfg.step, step * 1.5);
    }
    return result;
}

}  // namespace cortex
