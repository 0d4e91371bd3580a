#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "cortex_atlas/mesh.hpp"

namespace cortex {

/// Per-vertex coordinates on the closed unit disk. `boundary` lists the
/// boundary loop in traversal order and `boundary_param` the matching angles.
struct DiskMap {
    std::vector<Vec2> uv;
    std::vector<int> boundary;
    std::vector<double> boundary_param;
    std::string source_mesh_id;
};

struct SolveStats {
    std::size_t unknowns = 0;
    double relative_residual = 0.0;
    int refinement_steps = 0;
};

inline constexpr double kSolveTolerance = 1e-10;

/// Angle-preserving stage: boundary on the unit circle at angles
/// proportional to 3D arc length (smallest boundary index at angle 0),
/// interior from the cotangent-Laplacian Dirichlet problem.
DiskMap harmonic_disk_map(const TriMesh& mesh, SolveStats* stats = nullptr);

enum class AreaPreconditioner {
    none,     // plain Euclidean gradient of E
    sobolev,  // gradient in the metric of the interior graph Laplacian
};

struct AreaCorrectConfig {
    int max_iters = 500;
    double step = 0.1;
    double tol = 1e-7;
    AreaPreconditioner preconditioner = AreaPreconditioner::sobolev;
};

struct AreaCorrectResult {
    DiskMap map;
    std::vector<double> energy;        // E at the input and after every accepted step
    std::vector<double> rms_log_area;  // RMS(log rho) at the same points
    int iterations = 0;                // accepted steps
    int rejected = 0;                  // halvings
    bool converged = false;            // |dE|/E < tol reached
};

/// Area-correction stage: descent on E = sum_f (rho_f - 1)^2 * A3_f / A3_total
/// over interior vertices. A step is accepted only if it keeps every face
/// positively oriented and increases neither E nor RMS(log rho); otherwise
/// the step halves. Throws DomainError if the input map has folds.
AreaCorrectResult area_correct(const DiskMap& map, const TriMesh& mesh, const AreaCorrectConfig& cfg = {});

/// E as minimised by area_correct.
double area_energy(const TriMesh& mesh, const std::vector<Vec2>& uv);

struct DistortionReport {
    std::vector<double> area_ratio;   // rho_f
    std::vector<double> dilatation;   // K_f = sigma1 / sigma2
    double rms_log_area_ratio = 0.0;
    double max_dilatation = 0.0;
    double mean_dilatation = 0.0;
};

/// Throws NumericError on a face with non-positive 2D area.
DistortionReport distortion_report(const TriMesh& mesh, const DiskMap& map);

/// Signed area of face f under uv.
double signed_area(const std::vector<Vec2>& uv, const Face& f);
std::size_t count_flipped(const TriMesh& mesh, const std::vector<Vec2>& uv);

struct SamplePoint {
    std::size_t face = 0;
    std::array<double, 3> weights{};
    Vec3 position = Vec3::Zero();
    bool snapped = false;
};

inline constexpr double kSnapTolerance = 1e-6;

/// Point location in the 2D triangulation of a disk map with barycentric
/// interpolation of the 3D positions. Queries in a numerical gap snap to the
/// nearest face within kSnapTolerance.
class DiskSampler {
public:
    DiskSampler(const DiskMap& map, const TriMesh& mesh);
    ~DiskSampler();
    DiskSampler(DiskSampler&&) noexcept;
    DiskSampler& operator=(DiskSampler&&) noexcept;

    /// Throws DomainError outside the unit disk or in a gap beyond tolerance.
    SamplePoint sample(const Vec2& query) const;

private:
    struct Grid;
    const DiskMap* map_;
    const TriMesh* mesh_;
    std::unique_ptr<Grid> grid_;
};

SamplePoint sample_back(const DiskMap& map, const TriMesh& mesh, const Vec2& query);

// Standalone artifact: {version, uv, boundary, boundary_param, source_mesh_id}
// with shortest round-trip reals.
std::string format_disk_map(const DiskMap& map);
DiskMap parse_disk_map(const std::string& text);

}  // namespace cortex
