#pragma once

// Discrete boundary spheres: meshes on S^{p-1}, Lipschitz maps into S^q,
// their classification, the shrink/smoothing deformations, and convex-hull
// separation in the projective model.

#include <optional>
#include <utility>
#include <vector>

#include "hpq/charts.hpp"
#include "hpq/core.hpp"

namespace hpq {

// Antipode-closed mesh on S^{p-1}; edge lengths are spherical distances.
struct SphereMesh {
  int p = 2;                                  // sphere dimension + 1
  Mat vertices;                               // N x p, unit rows
  std::vector<std::pair<int, int>> edges;     // index pairs, i < j
  std::vector<double> edge_lengths;           // spherical lengths
  std::vector<int> antipode;                  // index of -v per vertex

  int num_vertices() const { return static_cast<int>(vertices.rows()); }
};

// Uniform 2N-gon on S^1 (vertex k at angle pi k / n_half, antipode k + n_half).
SphereMesh circle_mesh(int n_half);

// Icosahedron subdivided `subdivisions` times, normalized to S^2; the vertex
// set is antipodally symmetric at every level.
SphereMesh icosphere_mesh(int subdivisions);

// Rebuilds edges for loaded vertex sets: circle meshes by angular order,
// S^2 meshes by proximity (1-ring detection).
SphereMesh mesh_from_vertices(const Mat& vertices);

struct LipschitzSphereMap {
  SphereMesh mesh;
  Mat values;  // N x (q+1), unit rows
  int q = 1;
};

double spherical_distance(const Vec& a, const Vec& b);

// max over edges of d(phi(a), phi(b)) / d(a, b).
double lipschitz_estimate(const LipschitzSphereMap& phi);

enum class SphereClass {
  Positive,
  NonNegativeAdmissible,
  NonNegativeNonAdmissible,
  NotNonNegative,
};

struct SphereClassification {
  SphereClass tag;
  double lipschitz_estimate;
  std::pair<int, int> worst_pair;  // worst edge, or the antipodal pair
  bool positive_triple_checked = false;
  bool positive_triple_found = false;
};

// tol_strict separates Positive from NonNegative; the p = 2 positive-triple
// condition is sampled (exhaustive triple sweep behind `exhaustive_triples`).
SphereClassification classify_sphere(const LipschitzSphereMap& phi,
                                     bool exhaustive_triples = false);

// Feasible hemisphere center: y with <y, phi(v)> > 0 for every vertex, or
// nullopt when 0 lies in the convex hull of the image.
std::optional<Vec> hemisphere_center(const LipschitzSphereMap& phi);

// Geodesic rescaling toward the hemisphere center; (1-t)-Lipschitz factor.
LipschitzSphereMap shrink_family(const LipschitzSphereMap& phi, double t);

// Shrink by a delta-budgeted amount, mollify with a spherical-cap kernel,
// radially project back to S^q; output is Positive and C0-close to phi.
LipschitzSphereMap smooth_strictly_lipschitz_approx(
    const LipschitzSphereMap& phi, double delta);

struct SeparationResult {
  bool inside;
  Vec functional;  // witness: >= 0 on lifted points, < 0 at x (when separated)
};

// Decides membership of x in the projective convex hull of the boundary
// points. Points are lifted to b(. , x_ref) = -1 representatives and the
// separating functional is found by a linear feasibility solve.
SeparationResult convex_hull_separation(const std::vector<BoundaryPoint>& points,
                                        const QuadricPoint& x,
                                        const QuadricPoint& x_ref);

// Graph of phi as boundary rays of the chart, one per mesh vertex.
std::vector<BoundaryPoint> boundary_rays(const LipschitzSphereMap& phi,
                                         const FermiChart& chart);

// Suspension identity residual along the great circles through an antipodal
// pair with antipodal images (the lightlike-foliation criterion); returns
// the max deviation at `samples` points per circle.
double lightlike_suspension_residual(const LipschitzSphereMap& phi,
                                     std::pair<int, int> pair, int samples);

}  // namespace hpq
