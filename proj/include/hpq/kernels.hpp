#pragma once

// OpenMP-parallel field kernels for the hot inner loops, each with a serial
// reference implementation kept for testing. Parallel variants write only
// per-node slots and reduce with max, so results are identical to the serial
// ones regardless of the thread count.

#include <functional>

#include "hpq/charts.hpp"
#include "hpq/stencil.hpp"

namespace hpq::kernels {

// Worker count: explicit `threads` if > 0, else HPQ_THREADS, else OpenMP.
int resolve_threads(int threads);

void parallel_for(int n, int threads, const std::function<void(int)>& body);

// Quadric embedding of graph values through a Fermi chart.
void embed_field(const FermiChart& chart, const Mat& u, const Mat& values,
                 Mat& out, int threads);
void embed_field_serial(const FermiChart& chart, const Mat& u,
                        const Mat& values, Mat& out);

struct GraphFieldRequest {
  const StructuredGrid* grid = nullptr;
  const FermiChart* chart = nullptr;
  const Mat* u = nullptr;        // node coordinates
  const Mat* embedded = nullptr; // quadric positions per node
  const Mat* values = nullptr;   // sphere values per node
  const std::vector<int>* nodes = nullptr;  // nodes to evaluate
};

struct GraphFields {
  Mat mean_curvature;   // per requested node, ambient vector
  Mat residual;         // per requested node, q normal components
  Vec min_metric_eig;   // per requested node
  Vec h_norm;           // per requested node, |H| = sqrt(|b(H,H)|)
};

// Projection-form mean curvature: H = P_N(g^{ab} d2F_ab), with residual
// components measured against a projected vertical frame.
void graph_fields(const GraphFieldRequest& req, GraphFields& out, int threads);
void graph_fields_serial(const GraphFieldRequest& req, GraphFields& out);

struct PairSweepResult {
  double max_value;
  int argmax_i;
  int argmax_j;
};

// max over (i in rows of A) x (j in rows of B) of b(A_i, B_j).
PairSweepResult pair_sweep_max(const Mat& a, const Mat& b,
                               const Signature& sig, int stride_a,
                               int stride_b, int threads);
PairSweepResult pair_sweep_max_serial(const Mat& a, const Mat& b,
                                      const Signature& sig, int stride_a,
                                      int stride_b);

}  // namespace hpq::kernels
