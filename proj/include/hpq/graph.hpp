#pragma once

// Discrete spacelike graphs in a Fermi chart: induced metric, mean
// curvature, the Jacobi operator, curvature reports, and the beta
// diagnostic between two graphs.

#include <functional>
#include <map>
#include <optional>

#include "hpq/kernels.hpp"
#include "hpq/spheres.hpp"

namespace hpq {

struct GridParams {
  int n = 96;            // nodes across the active diameter
  double margin = 0.05;  // truncation in stereographic coordinates
};

// Prescribes ring values directly (closed-form traces for oracle runs);
// receives the ball coordinate u, returns a unit value in the W frame.
using BoundaryTrace = std::function<Vec(const Vec&)>;

// Node roles on the padded tensor grid.
enum class NodeRole : uint8_t { Void = 0, Ring = 1, Interior = 2 };

struct SpacelikeGraphGrid {
  FermiChart chart;
  GridParams params;
  double h = 0.0;
  double r_active = 0.0;
  StructuredGrid grid;
  Mat u;       // num_nodes x p
  Mat values;  // num_nodes x (q+1)
  std::vector<NodeRole> role;
  std::vector<int> interior_nodes;
  std::vector<int> interior_pos;  // node -> index into interior_nodes, or -1
  LipschitzSphereMap boundary;    // asymptotic boundary data

  int p() const { return chart.signature().p; }
  int q() const { return chart.signature().q; }
  int num_nodes() const { return static_cast<int>(u.rows()); }
  int num_interior() const { return static_cast<int>(interior_nodes.size()); }

  // Node whose coordinates are closest to the chart origin.
  int center_node() const;
};

// Evaluates a discrete sphere map at an arbitrary direction (slerp on
// circle meshes, barycentric over the nearest triangle on icospheres).
Vec sphere_map_eval(const LipschitzSphereMap& phi, const Vec& direction);

// Builds the padded grid; every value starts from the radial extension of
// phi (or the supplied trace). Throws when margin < 1.75 h, where diagonal
// stencils would leave the chart ball.
SpacelikeGraphGrid make_graph_grid(const FermiChart& chart,
                                   const LipschitzSphereMap& phi,
                                   const GridParams& params);

// Re-pins ring values from a (possibly deformed) boundary map or trace.
void set_ring_values(SpacelikeGraphGrid& G, const LipschitzSphereMap& phi);
void set_ring_values(SpacelikeGraphGrid& G, const BoundaryTrace& trace);

// Quadric embedding of all non-void nodes.
Mat embed_graph(const SpacelikeGraphGrid& G, int threads = 0);

// Induced metric at a node from central differences of the embedding;
// throws SpacelikeViolation when the smallest eigenvalue is <= h^2.
Mat induced_metric(const SpacelikeGraphGrid& G, int node);

struct MeanCurvatureField {
  Mat h_field;      // num_interior x dim, ambient vectors (normal part)
  Vec h_norm;       // |H| per interior node
  Vec residual;     // q components per interior node, flattened
  Vec min_metric_eig;
  double sup_h = 0.0;
  double min_eig = 0.0;
};

MeanCurvatureField mean_curvature(const SpacelikeGraphGrid& G,
                                  int threads = 0);

// Mean curvature of an arbitrary immersion given by node positions on the
// same grid topology (used by the definitional Jacobi oracle and the cone
// cross-checks): H = P_N(g^{ab} d2E_ab) with the radial span included.
// Nodes without a full stencil are skipped (mask = false).
struct ImmersionCurvature {
  Mat h_field;
  std::vector<bool> valid;
};
ImmersionCurvature immersion_mean_curvature(const StructuredGrid& grid,
                                            const Mat& positions,
                                            const Signature& sig,
                                            const std::vector<int>& nodes);

// J sigma = Delta^N sigma - p sigma + sum g(II(e_m,e_n), sigma) II(e_m,e_n).
// sigma is given on every non-void node (ambient vectors, b-orthogonal to
// the tangent spaces to 1e-8); the result is returned on interior nodes.
Mat jacobi_apply(const SpacelikeGraphGrid& G, const Mat& sigma,
                 int threads = 0);

struct CurvatureReport {
  double sup_norm_II = 0.0;
  double sup_norm_II_sq = 0.0;
  bool sup_check_ishihara = false;
  double renormalized_area = 0.0;  // p = 2 only
  double decay_slope = 0.0;
  double volume_growth_exponent = 0.0;
  std::map<double, double> L_s_integrals;
  std::map<double, double> last_annulus_increment;  // relative, per s
  double r_max = 0.0;
};

// Reports are measured in the polar chart about the embedded center node.
CurvatureReport curvature_report(const SpacelikeGraphGrid& G,
                                 const std::vector<double>& s_values,
                                 int threads = 0);

struct BetaDiagnostic {
  double sup_beta;
  int argmax_node_1;
  int argmax_node_2;
};

// Maximizes b(x,y) over interior node pairs: coarse strided sweep plus a
// full-resolution pass over a window around the coarse argmax.
BetaDiagnostic beta_diagnostic(const SpacelikeGraphGrid& G1,
                               const SpacelikeGraphGrid& G2, int threads = 0);

}  // namespace hpq
