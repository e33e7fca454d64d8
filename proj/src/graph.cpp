#include "hpq/graph.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

namespace hpq {

namespace {

Vec slerp(const Vec& a, const Vec& b, double t) {
  const double ang = spherical_distance(a, b);
  if (ang < 1e-14) return a;
  const double sa = std::sin((1.0 - t) * ang);
  const double sb = std::sin(t * ang);
  return ((sa * a + sb * b) / std::sin(ang)).normalized();
}

}  // namespace

Vec sphere_map_eval(const LipschitzSphereMap& phi, const Vec& direction) {
  const SphereMesh& mesh = phi.mesh;
  Vec dir = direction.normalized();
  if (mesh.p == 2) {
    const double th = std::atan2(dir[1], dir[0]);
    int best = 0, second = 0;
    double bd = 1e300, sd = 1e300;
    for (int i = 0; i < mesh.num_vertices(); ++i) {
      const double d = spherical_distance(mesh.vertices.row(i), dir);
      if (d < bd) {
        sd = bd;
        second = best;
        bd = d;
        best = i;
      } else if (d < sd) {
        sd = d;
        second = i;
      }
    }
    (void)th;
    const double span =
        spherical_distance(mesh.vertices.row(best), mesh.vertices.row(second));
    if (span < 1e-14 || bd < 1e-14) return phi.values.row(best);
    return slerp(phi.values.row(best), phi.values.row(second), bd / span);
  }

  // p = 3: gnomonic barycentric over the three nearest vertices.
  std::array<int, 3> near = {-1, -1, -1};
  std::array<double, 3> nd = {1e300, 1e300, 1e300};
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const double d = spherical_distance(mesh.vertices.row(i), dir);
    for (int k = 0; k < 3; ++k) {
      if (d < nd[k]) {
        for (int m = 2; m > k; --m) {
          nd[m] = nd[m - 1];
          near[m] = near[m - 1];
        }
        nd[k] = d;
        near[k] = i;
        break;
      }
    }
  }
  Eigen::Matrix3d V;
  for (int k = 0; k < 3; ++k) V.col(k) = mesh.vertices.row(near[k]).transpose();
  Eigen::Vector3d lam = V.fullPivLu().solve(Eigen::Vector3d(dir));
  bool ok = lam.minCoeff() > -1e-9 && std::abs(lam.sum()) > 1e-9;
  Vec acc = Vec::Zero(phi.q + 1);
  if (ok) {
    for (int k = 0; k < 3; ++k)
      acc += lam[k] * phi.values.row(near[k]).transpose();
  } else {
    for (int k = 0; k < 3; ++k)
      acc += (1.0 / (nd[k] + 1e-12)) * phi.values.row(near[k]).transpose();
  }
  return acc.normalized();
}

int SpacelikeGraphGrid::center_node() const {
  int best = 0;
  double bd = 1e300;
  for (int i = 0; i < num_nodes(); ++i) {
    if (role[i] == NodeRole::Void) continue;
    const double d = u.row(i).norm();
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

SpacelikeGraphGrid make_graph_grid(const FermiChart& chart,
                                   const LipschitzSphereMap& phi,
                                   const GridParams& params) {
  const Signature sig = chart.signature();
  const int p = sig.p;
  if (phi.mesh.p != p || phi.q != sig.q)
    throw_error(ErrorCode::DimensionMismatch,
                "boundary map does not match the chart signature");
  if (params.n < 8)
    throw_error(ErrorCode::InvalidParameter, "grid needs n >= 8");
  if (params.margin <= 0.0 || params.margin >= 1.0)
    throw_error(ErrorCode::InvalidParameter, "margin must be in (0,1)");

  SpacelikeGraphGrid G;
  G.chart = chart;
  G.params = params;
  G.boundary = phi;
  G.r_active = 1.0 - params.margin;
  G.h = 2.0 * G.r_active / (params.n - 1);
  if (params.margin < 1.75 * G.h)
    throw_error(ErrorCode::InvalidParameter,
                "margin must be at least 1.75 h so diagonal stencils stay "
                "inside the chart ball; raise n or margin");

  const int pad = 2;
  const int m = params.n + 2 * pad;
  G.grid.dims.assign(p, m);
  G.grid.cyclic.assign(p, false);
  G.grid.spacing.assign(p, G.h);

  const int num = G.grid.num_nodes();
  G.u.resize(num, p);
  G.values.resize(num, sig.q + 1);
  G.role.assign(num, NodeRole::Void);
  G.interior_pos.assign(num, -1);

  const double origin = -G.r_active - pad * G.h;
  const double band = G.r_active + 1.5 * G.h;
  std::vector<int> c(p, 0);
  for (int idx = 0; idx < num; ++idx) {
    int rem = idx;
    for (int a = p - 1; a >= 0; --a) {
      c[a] = rem % m;
      rem /= m;
    }
    for (int a = 0; a < p; ++a) G.u(idx, a) = origin + c[a] * G.h;
    const double rr = G.u.row(idx).norm();
    if (rr < G.r_active - 1e-12) {
      G.role[idx] = NodeRole::Interior;
      G.interior_pos[idx] = static_cast<int>(G.interior_nodes.size());
      G.interior_nodes.push_back(idx);
    } else if (rr <= band) {
      G.role[idx] = NodeRole::Ring;
    }
    G.values.row(idx).setZero();
    G.values(idx, 0) = 1.0;
  }

  // Initial iterate: radial extension of the boundary map everywhere.
  for (int idx = 0; idx < num; ++idx) {
    if (G.role[idx] == NodeRole::Void) continue;
    const double rr = G.u.row(idx).norm();
    if (rr < 1e-12) continue;  // keep the pole seed at the W pole
    G.values.row(idx) =
        sphere_map_eval(phi, G.u.row(idx).transpose()).transpose();
  }
  // Seed the center from its surroundings rather than (1,0,...).
  const int ctr = G.center_node();
  if (G.u.row(ctr).norm() < 1e-12) {
    Vec acc = Vec::Zero(sig.q + 1);
    for (int a = 0; a < p; ++a) {
      acc += G.values.row(G.grid.neighbor(ctr, a, 1)).transpose();
      acc += G.values.row(G.grid.neighbor(ctr, a, -1)).transpose();
    }
    G.values.row(ctr) = acc.normalized().transpose();
  }
  return G;
}

void set_ring_values(SpacelikeGraphGrid& G, const LipschitzSphereMap& phi) {
  for (int idx = 0; idx < G.num_nodes(); ++idx) {
    if (G.role[idx] != NodeRole::Ring) continue;
    G.values.row(idx) =
        sphere_map_eval(phi, G.u.row(idx).transpose()).transpose();
  }
}

void set_ring_values(SpacelikeGraphGrid& G, const BoundaryTrace& trace) {
  for (int idx = 0; idx < G.num_nodes(); ++idx) {
    if (G.role[idx] != NodeRole::Ring) continue;
    Vec w = trace(G.u.row(idx).transpose());
    G.values.row(idx) = w.normalized().transpose();
  }
}

Mat embed_graph(const SpacelikeGraphGrid& G, int threads) {
  Mat out;
  kernels::embed_field(G.chart, G.u, G.values, out, threads);
  return out;
}

Mat induced_metric(const SpacelikeGraphGrid& G, int node) {
  const Signature sig = G.chart.signature();
  const int p = sig.p;
  const Mat E = embed_graph(G);
  Mat dF(sig.dim(), p);
  for (int a = 0; a < p; ++a) {
    const int ip = G.grid.neighbor(node, a, 1);
    const int im = G.grid.neighbor(node, a, -1);
    if (ip < 0 || im < 0 || G.role[ip] == NodeRole::Void ||
        G.role[im] == NodeRole::Void)
      throw_error(ErrorCode::InvalidParameter,
                  "node has no full central stencil");
    dF.col(a) = (E.row(ip) - E.row(im)).transpose() / (2.0 * G.h);
  }
  Mat g(p, p);
  for (int a = 0; a < p; ++a)
    for (int b = a; b < p; ++b) {
      g(a, b) = bilinear_form(dF.col(a), dF.col(b), sig);
      g(b, a) = g(a, b);
    }
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  if (es.eigenvalues().minCoeff() <= G.h * G.h)
    throw_error(ErrorCode::SpacelikeViolation,
                "induced metric is not positive definite at the node");
  return g;
}

MeanCurvatureField mean_curvature(const SpacelikeGraphGrid& G, int threads) {
  const Mat E = embed_graph(G, threads);
  kernels::GraphFieldRequest req;
  req.grid = &G.grid;
  req.chart = &G.chart;
  req.u = &G.u;
  req.embedded = &E;
  req.values = &G.values;
  req.nodes = &G.interior_nodes;
  kernels::GraphFields fields;
  kernels::graph_fields(req, fields, threads);

  MeanCurvatureField out;
  out.h_field = std::move(fields.mean_curvature);
  out.h_norm = std::move(fields.h_norm);
  out.min_metric_eig = std::move(fields.min_metric_eig);
  const int q = G.q();
  out.residual.resize(G.num_interior() * q);
  for (int k = 0; k < G.num_interior(); ++k)
    out.residual.segment(k * q, q) = fields.residual.row(k).transpose();
  out.sup_h = out.h_norm.size() ? out.h_norm.maxCoeff() : 0.0;
  out.min_eig = out.min_metric_eig.size() ? out.min_metric_eig.minCoeff() : 0.0;
  if (out.min_eig <= G.h * G.h)
    throw_error(ErrorCode::SpacelikeViolation,
                "graph lost spacelikeness at an interior node");
  return out;
}

ImmersionCurvature immersion_mean_curvature(const StructuredGrid& grid,
                                            const Mat& positions,
                                            const Signature& sig,
                                            const std::vector<int>& nodes) {
  const int p = grid.axes();
  const int dim = sig.dim();
  ImmersionCurvature out;
  out.h_field = Mat::Zero(static_cast<int>(nodes.size()), dim);
  out.valid.assign(nodes.size(), false);

  for (size_t k = 0; k < nodes.size(); ++k) {
    const int node = nodes[k];
    Mat dF(dim, p), ddF(dim, p * p);
    bool ok = true;
    for (int a = 0; a < p && ok; ++a) {
      const int ip = grid.neighbor(node, a, 1);
      const int im = grid.neighbor(node, a, -1);
      if (ip < 0 || im < 0) {
        ok = false;
        break;
      }
      const double ha = grid.spacing[a];
      dF.col(a) = (positions.row(ip) - positions.row(im)).transpose() / (2 * ha);
      ddF.col(a * p + a) =
          (positions.row(ip) - 2.0 * positions.row(node) + positions.row(im))
              .transpose() /
          (ha * ha);
    }
    for (int a = 0; a < p && ok; ++a)
      for (int b = a + 1; b < p && ok; ++b) {
        const int pa = grid.neighbor(node, a, 1);
        const int ma = grid.neighbor(node, a, -1);
        const int pp = pa < 0 ? -1 : grid.neighbor(pa, b, 1);
        const int pm = pa < 0 ? -1 : grid.neighbor(pa, b, -1);
        const int mp = ma < 0 ? -1 : grid.neighbor(ma, b, 1);
        const int mm = ma < 0 ? -1 : grid.neighbor(ma, b, -1);
        if (pp < 0 || pm < 0 || mp < 0 || mm < 0) {
          ok = false;
          break;
        }
        const double hh = 4.0 * grid.spacing[a] * grid.spacing[b];
        ddF.col(a * p + b) = (positions.row(pp) - positions.row(pm) -
                              positions.row(mp) + positions.row(mm))
                                 .transpose() /
                             hh;
        ddF.col(b * p + a) = ddF.col(a * p + b);
      }
    if (!ok) continue;

    Mat g(p, p);
    for (int a = 0; a < p; ++a)
      for (int b = a; b < p; ++b) {
        g(a, b) = bilinear_form(dF.col(a), dF.col(b), sig);
        g(b, a) = g(a, b);
      }
    Mat ginv = g.inverse();
    Vec T = Vec::Zero(dim);
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) T += ginv(a, b) * ddF.col(a * p + b);

    Mat basis(dim, p + 1);
    basis.leftCols(p) = dF;
    basis.col(p) = positions.row(node).transpose();
    Mat gram(p + 1, p + 1);
    Vec rhs(p + 1);
    for (int a = 0; a <= p; ++a) {
      for (int b = a; b <= p; ++b) {
        gram(a, b) = bilinear_form(basis.col(a), basis.col(b), sig);
        gram(b, a) = gram(a, b);
      }
      rhs[a] = bilinear_form(basis.col(a), T, sig);
    }
    Vec coeff = gram.partialPivLu().solve(rhs);
    out.h_field.row(k) = (T - basis * coeff).transpose();
    out.valid[k] = true;
  }
  return out;
}

namespace {

// Per-node tangent/normal data for operator assembly.
struct NodeFrame {
  Mat dF;              // dim x p
  Mat basis;           // dim x (p+1): dF columns plus the position
  Mat g, ginv;         // p x p
  Eigen::PartialPivLU<Mat> gram_lu;
  bool ok = false;
};

NodeFrame build_frame(const SpacelikeGraphGrid& G, const Mat& E, int node) {
  const Signature sig = G.chart.signature();
  const int p = sig.p;
  NodeFrame f;
  if (G.role[node] == NodeRole::Void) return f;
  f.dF.resize(sig.dim(), p);
  for (int a = 0; a < p; ++a) {
    const int ip = G.grid.neighbor(node, a, 1);
    const int im = G.grid.neighbor(node, a, -1);
    if (ip < 0 || im < 0 || G.role[ip] == NodeRole::Void ||
        G.role[im] == NodeRole::Void)
      return f;
    f.dF.col(a) = (E.row(ip) - E.row(im)).transpose() / (2.0 * G.h);
  }
  f.g.resize(p, p);
  for (int a = 0; a < p; ++a)
    for (int b = a; b < p; ++b) {
      f.g(a, b) = bilinear_form(f.dF.col(a), f.dF.col(b), sig);
      f.g(b, a) = f.g(a, b);
    }
  f.ginv = f.g.inverse();
  f.basis.resize(sig.dim(), p + 1);
  f.basis.leftCols(p) = f.dF;
  f.basis.col(p) = E.row(node).transpose();
  Mat gram(p + 1, p + 1);
  for (int a = 0; a <= p; ++a)
    for (int b = a; b <= p; ++b) {
      gram(a, b) = bilinear_form(f.basis.col(a), f.basis.col(b), sig);
      gram(b, a) = gram(a, b);
    }
  f.gram_lu.compute(gram);
  f.ok = true;
  return f;
}

Vec project_normal(const NodeFrame& f, const Signature& sig, const Vec& v) {
  const int k = static_cast<int>(f.basis.cols());
  Vec rhs(k);
  for (int a = 0; a < k; ++a)
    rhs[a] = bilinear_form(f.basis.col(a), v, sig);
  return v - f.basis * f.gram_lu.solve(rhs);
}

// Second-order derivative of a vector field stored per node; falls back to
// one-sided stencils where the central one leaves the valid set.
bool field_derivative(const StructuredGrid& grid, const Mat& field,
                      const std::vector<bool>& valid, int node, int axis,
                      Vec& out) {
  const double h = grid.spacing[axis];
  const int ip = grid.neighbor(node, axis, 1);
  const int im = grid.neighbor(node, axis, -1);
  const bool okp = ip >= 0 && valid[ip];
  const bool okm = im >= 0 && valid[im];
  if (okp && okm) {
    out = (field.row(ip) - field.row(im)).transpose() / (2.0 * h);
    return true;
  }
  if (okp) {
    const int ipp = grid.neighbor(ip, axis, 1);
    if (ipp < 0 || !valid[ipp]) return false;
    out = (-3.0 * field.row(node) + 4.0 * field.row(ip) - field.row(ipp))
              .transpose() /
          (2.0 * h);
    return true;
  }
  if (okm) {
    const int imm = grid.neighbor(im, axis, -1);
    if (imm < 0 || !valid[imm]) return false;
    out = (3.0 * field.row(node) - 4.0 * field.row(im) + field.row(imm))
              .transpose() /
          (2.0 * h);
    return true;
  }
  return false;
}

}  // namespace

Mat jacobi_apply(const SpacelikeGraphGrid& G, const Mat& sigma, int threads) {
  const Signature sig = G.chart.signature();
  const int p = sig.p;
  const int dim = sig.dim();
  const int num = G.num_nodes();
  if (sigma.rows() != num || sigma.cols() != dim)
    throw_error(ErrorCode::DimensionMismatch,
                "sigma must be given per node as ambient vectors");

  const Mat E = embed_graph(G, threads);
  std::vector<NodeFrame> frames(num);
  std::vector<bool> framed(num, false);
  kernels::parallel_for(num, threads, [&](int i) {
    frames[i] = build_frame(G, E, i);
    framed[i] = frames[i].ok;
  });

  // Normality check on interior nodes.
  for (int k = 0; k < G.num_interior(); ++k) {
    const int node = G.interior_nodes[k];
    const NodeFrame& f = frames[node];
    for (int a = 0; a < p; ++a) {
      const double misfit =
          std::abs(bilinear_form(sigma.row(node).transpose(), f.dF.col(a), sig));
      const double scale =
          1.0 + sigma.row(node).norm() * f.dF.col(a).norm();
      if (misfit > 1e-8 * scale)
        throw_error(ErrorCode::NotNormal,
                    "sigma is not b-orthogonal to the tangent space");
    }
  }

  // First covariant derivatives of sigma wherever frames exist.
  Mat dsig[3];
  std::vector<bool> dvalid(num, false);
  for (int a = 0; a < p; ++a) dsig[a] = Mat::Zero(num, dim);
  std::vector<bool> sig_valid(num, false);
  for (int i = 0; i < num; ++i) sig_valid[i] = G.role[i] != NodeRole::Void;

  kernels::parallel_for(num, threads, [&](int i) {
    if (!framed[i]) return;
    Vec d(dim);
    for (int a = 0; a < p; ++a) {
      if (!field_derivative(G.grid, sigma, sig_valid, i, a, d)) return;
      dsig[a].row(i) = project_normal(frames[i], sig, d).transpose();
    }
    dvalid[i] = true;
  });

  // Metric field for the Christoffel correction.
  Mat gfield = Mat::Zero(num, p * p);
  for (int i = 0; i < num; ++i)
    if (framed[i])
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) gfield(i, a * p + b) = frames[i].g(a, b);
  std::vector<bool> gvalid(framed.begin(), framed.end());

  Mat out = Mat::Zero(G.num_interior(), dim);
  std::atomic<bool> stencil_error{false};
  kernels::parallel_for(G.num_interior(), threads, [&](int k) {
    const int node = G.interior_nodes[k];
    const NodeFrame& f = frames[node];

    // Hessian of sigma: nabla_a nabla_b sigma via derivative of the field.
    Mat hess(dim, p * p);
    for (int b = 0; b < p; ++b) {
      for (int a = 0; a < p; ++a) {
        Vec d(dim);
        if (!field_derivative(G.grid, dsig[b], dvalid, node, a, d)) {
          stencil_error = true;
          return;
        }
        hess.col(a * p + b) = project_normal(f, sig, d);
      }
    }

    // Christoffel symbols from the metric field.
    Mat dg(p * p, p);  // d_c g_ab in column c
    for (int cax = 0; cax < p; ++cax) {
      Vec d(p * p);
      if (!field_derivative(G.grid, gfield, gvalid, node, cax, d)) {
        stencil_error = true;
        return;
      }
      dg.col(cax) = d;
    }
    auto christoffel = [&](int cu, int a, int b) {
      double s = 0.0;
      for (int dx = 0; dx < p; ++dx)
        s += f.ginv(cu, dx) * (dg(dx * p + b, a) + dg(a * p + dx, b) -
                               dg(a * p + b, dx));
      return 0.5 * s;
    };

    Vec lap = Vec::Zero(dim);
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) lap += f.ginv(a, b) * hess.col(a * p + b);
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b)
        for (int cu = 0; cu < p; ++cu)
          lap -= f.ginv(a, b) * christoffel(cu, a, b) *
                 dsig[cu].row(node).transpose();

    // Second fundamental form at the node for the coupling term.
    Mat II(dim, p * p);
    for (int a = 0; a < p; ++a) {
      const int ip = G.grid.neighbor(node, a, 1);
      const int im = G.grid.neighbor(node, a, -1);
      Vec dd = (E.row(ip) - 2.0 * E.row(node) + E.row(im)).transpose() /
               (G.h * G.h);
      II.col(a * p + a) = project_normal(f, sig, dd);
    }
    for (int a = 0; a < p; ++a)
      for (int b = a + 1; b < p; ++b) {
        const int pp = G.grid.neighbor(G.grid.neighbor(node, a, 1), b, 1);
        const int pm = G.grid.neighbor(G.grid.neighbor(node, a, 1), b, -1);
        const int mp = G.grid.neighbor(G.grid.neighbor(node, a, -1), b, 1);
        const int mm = G.grid.neighbor(G.grid.neighbor(node, a, -1), b, -1);
        Vec dd = (E.row(pp) - E.row(pm) - E.row(mp) + E.row(mm)).transpose() /
                 (4.0 * G.h * G.h);
        II.col(a * p + b) = project_normal(f, sig, dd);
        II.col(b * p + a) = II.col(a * p + b);
      }

    const Vec s_here = sigma.row(node).transpose();
    Vec coupling = Vec::Zero(dim);
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b)
        for (int c2 = 0; c2 < p; ++c2)
          for (int d2 = 0; d2 < p; ++d2)
            coupling += f.ginv(a, c2) * f.ginv(b, d2) *
                        bilinear_form(II.col(a * p + b), s_here, sig) *
                        II.col(c2 * p + d2);

    out.row(k) = (lap - p * s_here + coupling).transpose();
  });
  if (stencil_error)
    throw_error(ErrorCode::InvalidParameter,
                "jacobi stencil leaves the grid band");
  return out;
}

CurvatureReport curvature_report(const SpacelikeGraphGrid& G,
                                 const std::vector<double>& s_values,
                                 int threads) {
  const Signature sig = G.chart.signature();
  const int p = sig.p;
  const Mat E = embed_graph(G, threads);
  const int nint = G.num_interior();

  Vec ii_sq(nint), dvol(nint), radius(nint);
  kernels::parallel_for(nint, threads, [&](int k) {
    const int node = G.interior_nodes[k];
    NodeFrame f = build_frame(G, E, node);
    Mat II(sig.dim(), p * p);
    for (int a = 0; a < p; ++a) {
      const int ip = G.grid.neighbor(node, a, 1);
      const int im = G.grid.neighbor(node, a, -1);
      Vec dd = (E.row(ip) - 2.0 * E.row(node) + E.row(im)).transpose() /
               (G.h * G.h);
      II.col(a * p + a) = project_normal(f, sig, dd);
    }
    for (int a = 0; a < p; ++a)
      for (int b = a + 1; b < p; ++b) {
        const int pp = G.grid.neighbor(G.grid.neighbor(node, a, 1), b, 1);
        const int pm = G.grid.neighbor(G.grid.neighbor(node, a, 1), b, -1);
        const int mp = G.grid.neighbor(G.grid.neighbor(node, a, -1), b, 1);
        const int mm = G.grid.neighbor(G.grid.neighbor(node, a, -1), b, -1);
        Vec dd = (E.row(pp) - E.row(pm) - E.row(mp) + E.row(mm)).transpose() /
                 (4.0 * G.h * G.h);
        II.col(a * p + b) = project_normal(f, sig, dd);
        II.col(b * p + a) = II.col(a * p + b);
      }
    double total = 0.0;
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b)
        for (int c2 = 0; c2 < p; ++c2)
          for (int d2 = 0; d2 < p; ++d2)
            total -= f.ginv(a, c2) * f.ginv(b, d2) *
                     bilinear_form(II.col(a * p + b), II.col(c2 * p + d2), sig);
    ii_sq[k] = std::max(0.0, total);
    dvol[k] = std::sqrt(std::max(0.0, f.g.determinant())) * std::pow(G.h, p);
  });

  const int ctr = G.center_node();
  for (int k = 0; k < nint; ++k) {
    const double b =
        bilinear_form(E.row(G.interior_nodes[k]).transpose(),
                      E.row(ctr).transpose(), sig);
    radius[k] = std::acosh(std::max(1.0, -b));
  }

  CurvatureReport rep;
  rep.sup_norm_II_sq = nint ? ii_sq.maxCoeff() : 0.0;
  rep.sup_norm_II = std::sqrt(rep.sup_norm_II_sq);
  rep.sup_check_ishihara = rep.sup_norm_II_sq <= p * sig.q + 1e-6;
  rep.r_max = nint ? radius.maxCoeff() : 0.0;
  if (p == 2)
    for (int k = 0; k < nint; ++k)
      rep.renormalized_area += ii_sq[k] * dvol[k];

  // Annulus statistics in the polar radius about the embedded center.
  const double width = 0.5;
  const int nann = std::max(1, static_cast<int>(std::ceil(rep.r_max / width)));
  std::vector<double> ann_sup(nann, 0.0), ann_vol(nann, 0.0);
  std::vector<std::vector<double>> ann_int(s_values.size(),
                                           std::vector<double>(nann, 0.0));
  for (int k = 0; k < nint; ++k) {
    const int bucket =
        std::min(nann - 1, static_cast<int>(radius[k] / width));
    ann_sup[bucket] = std::max(ann_sup[bucket], std::sqrt(ii_sq[k]));
    ann_vol[bucket] += dvol[k];
    for (size_t si = 0; si < s_values.size(); ++si)
      ann_int[si][bucket] +=
          std::pow(std::sqrt(ii_sq[k]), s_values[si]) * dvol[k];
  }

  for (size_t si = 0; si < s_values.size(); ++si) {
    double total = std::accumulate(ann_int[si].begin(), ann_int[si].end(), 0.0);
    rep.L_s_integrals[s_values[si]] = total;
    rep.last_annulus_increment[s_values[si]] =
        total > 0.0 ? ann_int[si][nann - 1] / total : 0.0;
  }

  // Least-squares fits over the outer window [r_max - 2.5, r_max - 0.5].
  const double lo = rep.r_max - 2.5, hi = rep.r_max - 0.5;
  auto fit_slope = [&](const std::vector<double>& values) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int a = 0; a < nann; ++a) {
      const double mid = (a + 0.5) * width;
      if (mid < lo || mid > hi || values[a] <= 0.0) continue;
      const double x = mid, y = std::log(values[a]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++cnt;
    }
    if (cnt < 2) return 0.0;
    return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  };
  rep.decay_slope = fit_slope(ann_sup);
  rep.volume_growth_exponent = fit_slope(ann_vol);
  return rep;
}

BetaDiagnostic beta_diagnostic(const SpacelikeGraphGrid& G1,
                               const SpacelikeGraphGrid& G2, int threads) {
  if (G1.p() != G2.p() || G1.q() != G2.q())
    throw_error(ErrorCode::DimensionMismatch, "graphs must share (p,q)");
  const Signature sig = G1.chart.signature();
  const Mat E1 = embed_graph(G1, threads);
  const Mat E2 = embed_graph(G2, threads);
  Mat A(G1.num_interior(), sig.dim());
  Mat B(G2.num_interior(), sig.dim());
  for (int k = 0; k < G1.num_interior(); ++k)
    A.row(k) = E1.row(G1.interior_nodes[k]);
  for (int k = 0; k < G2.num_interior(); ++k)
    B.row(k) = E2.row(G2.interior_nodes[k]);

  const double total = static_cast<double>(A.rows()) * B.rows();
  kernels::PairSweepResult res;
  if (total <= 1.6e8) {
    res = kernels::pair_sweep_max(A, B, sig, 1, 1, threads);
  } else {
    const int stride = std::max(1, static_cast<int>(std::sqrt(total / 1.6e8)));
    res = kernels::pair_sweep_max(A, B, sig, stride, stride, threads);
    // Full-resolution refinement in list windows around the coarse argmax.
    const int w = 2 * stride + 1;
    const int lo1 = std::max(0, res.argmax_i - w);
    const int hi1 = std::min<int>(A.rows(), res.argmax_i + w + 1);
    Mat Awin = A.middleRows(lo1, hi1 - lo1);
    auto rw = kernels::pair_sweep_max(Awin, B, sig, 1, 1, threads);
    if (rw.max_value > res.max_value)
      res = {rw.max_value, rw.argmax_i + lo1, rw.argmax_j};
  }
  return BetaDiagnostic{res.max_value, G1.interior_nodes[res.argmax_i],
                        G2.interior_nodes[res.argmax_j]};
}

}  // namespace hpq
