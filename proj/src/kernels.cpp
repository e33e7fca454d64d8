#include "hpq/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>

namespace hpq::kernels {

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  if (const char* env = std::getenv("HPQ_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return omp_get_max_threads();
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  const int t = resolve_threads(threads);
  if (t <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
#pragma omp parallel for schedule(static) num_threads(t)
  for (int i = 0; i < n; ++i) body(i);
}

namespace {

void embed_one(const FermiChart& chart, const Mat& u, const Mat& values,
               Mat& out, int i) {
  const int q = chart.signature().q;
  const double t = u.row(i).norm();
  if (t >= 1.0) {
    out.row(i).setZero();
    return;
  }
  const double f = fermi_warp(t);
  const double su = 2.0 / (1.0 + t * t);
  Vec x = chart.u_frame * (f * su * u.row(i).transpose());
  x += chart.basepoint.coords * (f * values(i, 0));
  x += chart.v_frame * (f * values.row(i).tail(q).transpose());
  out.row(i) = x.transpose();
}

// All row work for one node of a graph-field request. Returns false when the
// stencil is incomplete (caller marks the node unusable).
struct NodeScratch {
  Mat dF, g, ginv, basis, gram, vert;
  Vec T, H, rhs, coeff;
};

bool node_fields(const GraphFieldRequest& req, int node, NodeScratch& s,
                 double* min_eig, double* h_norm, Vec& residual, Vec& mean_curv) {
  const StructuredGrid& grid = *req.grid;
  const Mat& E = *req.embedded;
  const FermiChart& chart = *req.chart;
  const Signature sig = chart.signature();
  const int p = sig.p;
  const int q = sig.q;
  const int dim = sig.dim();

  s.dF.resize(dim, p);
  Mat ddF(dim, p * p);
  for (int a = 0; a < p; ++a) {
    const int ip = grid.neighbor(node, a, 1);
    const int im = grid.neighbor(node, a, -1);
    if (ip < 0 || im < 0) return false;
    const double ha = grid.spacing[a];
    s.dF.col(a) = (E.row(ip) - E.row(im)).transpose() / (2.0 * ha);
    ddF.col(a * p + a) =
        (E.row(ip) - 2.0 * E.row(node) + E.row(im)).transpose() / (ha * ha);
  }
  for (int a = 0; a < p; ++a) {
    for (int b = a + 1; b < p; ++b) {
      const int pp = grid.neighbor(grid.neighbor(node, a, 1), b, 1);
      const int pm = grid.neighbor(grid.neighbor(node, a, 1), b, -1);
      const int mp = grid.neighbor(grid.neighbor(node, a, -1), b, 1);
      const int mm = grid.neighbor(grid.neighbor(node, a, -1), b, -1);
      if (pp < 0 || pm < 0 || mp < 0 || mm < 0) return false;
      const double hh = 4.0 * grid.spacing[a] * grid.spacing[b];
      ddF.col(a * p + b) =
          (E.row(pp) - E.row(pm) - E.row(mp) + E.row(mm)).transpose() / hh;
      ddF.col(b * p + a) = ddF.col(a * p + b);
    }
  }

  const Vec form = detail::form_diagonal(sig);
  auto bform = [&](const Vec& x, const Vec& y) {
    return (x.array() * form.array() * y.array()).sum();
  };

  s.g.resize(p, p);
  for (int a = 0; a < p; ++a)
    for (int b = a; b < p; ++b) {
      s.g(a, b) = bform(s.dF.col(a), s.dF.col(b));
      s.g(b, a) = s.g(a, b);
    }
  Eigen::SelfAdjointEigenSolver<Mat> es(s.g);
  *min_eig = es.eigenvalues().minCoeff();
  s.ginv = s.g.inverse();

  s.T = Vec::Zero(dim);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) s.T += s.ginv(a, b) * ddF.col(a * p + b);

  // Project out span(dF_1..dF_p, F): what is left is normal to the surface.
  s.basis.resize(dim, p + 1);
  s.basis.leftCols(p) = s.dF;
  s.basis.col(p) = E.row(node).transpose();
  s.gram.resize(p + 1, p + 1);
  for (int a = 0; a <= p; ++a)
    for (int b = a; b <= p; ++b) {
      s.gram(a, b) = bform(s.basis.col(a), s.basis.col(b));
      s.gram(b, a) = s.gram(a, b);
    }
  Eigen::PartialPivLU<Mat> gram_lu(s.gram);
  s.rhs.resize(p + 1);
  for (int a = 0; a <= p; ++a) s.rhs[a] = bform(s.basis.col(a), s.T);
  s.coeff = gram_lu.solve(s.rhs);
  s.H = s.T - s.basis * s.coeff;
  mean_curv = s.H;
  *h_norm = std::sqrt(std::abs(bform(s.H, s.H)));

  // Residual components against the projected vertical frame.
  const Vec w = req.values->row(node).transpose();
  Mat tau(q + 1, q);
  if (q == 1) {
    tau(0, 0) = -w[1];
    tau(1, 0) = w[0];
  } else {
    // Householder frame sending e_0 to w; columns 1..q span w-perp.
    Vec v = w;
    v[0] -= 1.0;
    const double nv = v.norm();
    if (nv < 1e-12) {
      tau.setZero();
      for (int a = 0; a < q; ++a) tau(a + 1, a) = 1.0;
    } else {
      v /= nv;
      for (int a = 0; a < q; ++a) {
        Vec e = Vec::Zero(q + 1);
        e[a + 1] = 1.0;
        tau.col(a) = e - 2.0 * v[a + 1] * v;
      }
    }
  }
  const double tnorm = req.u->row(node).norm();
  const double f = fermi_warp(tnorm);
  residual.resize(q);
  s.vert.resize(dim, q);
  for (int a = 0; a < q; ++a) {
    Vec va = chart.basepoint.coords * (f * tau(0, a));
    va += chart.v_frame * (f * tau.col(a).tail(q));
    for (int b = 0; b <= p; ++b) s.rhs[b] = bform(s.basis.col(b), va);
    s.coeff = gram_lu.solve(s.rhs);
    s.vert.col(a) = va - s.basis * s.coeff;
    residual[a] = -bform(s.vert.col(a), s.H);
  }
  return true;
}

void run_graph_fields(const GraphFieldRequest& req, GraphFields& out,
                      int threads, bool serial) {
  const int n = static_cast<int>(req.nodes->size());
  const Signature sig = req.chart->signature();
  out.mean_curvature.resize(n, sig.dim());
  out.residual.resize(n, sig.q);
  out.min_metric_eig.resize(n);
  out.h_norm.resize(n);

  auto body = [&](int k) {
    NodeScratch scratch;
    Vec res, H;
    double me = 0.0, hn = 0.0;
    if (!node_fields(req, (*req.nodes)[k], scratch, &me, &hn, res, H)) {
      out.min_metric_eig[k] = -1e300;
      out.h_norm[k] = 1e300;
      out.residual.row(k).setZero();
      out.mean_curvature.row(k).setZero();
      return;
    }
    out.mean_curvature.row(k) = H.transpose();
    out.residual.row(k) = res.transpose();
    out.min_metric_eig[k] = me;
    out.h_norm[k] = hn;
  };

  if (serial) {
    for (int k = 0; k < n; ++k) body(k);
  } else {
    parallel_for(n, threads, body);
  }
}

}  // namespace

void embed_field(const FermiChart& chart, const Mat& u, const Mat& values,
                 Mat& out, int threads) {
  out.resize(u.rows(), chart.signature().dim());
  parallel_for(static_cast<int>(u.rows()), threads,
               [&](int i) { embed_one(chart, u, values, out, i); });
}

void embed_field_serial(const FermiChart& chart, const Mat& u,
                        const Mat& values, Mat& out) {
  out.resize(u.rows(), chart.signature().dim());
  for (int i = 0; i < u.rows(); ++i) embed_one(chart, u, values, out, i);
}

void graph_fields(const GraphFieldRequest& req, GraphFields& out,
                  int threads) {
  run_graph_fields(req, out, threads, false);
}

void graph_fields_serial(const GraphFieldRequest& req, GraphFields& out) {
  run_graph_fields(req, out, 1, true);
}

PairSweepResult pair_sweep_max(const Mat& a, const Mat& b,
                               const Signature& sig, int stride_a,
                               int stride_b, int threads) {
  const Vec form = detail::form_diagonal(sig);
  const int na = static_cast<int>(a.rows());
  const int nb = static_cast<int>(b.rows());
  const int t = resolve_threads(threads);

  std::vector<PairSweepResult> best(
      std::max(1, t), PairSweepResult{-1e300, -1, -1});
#pragma omp parallel num_threads(std::max(1, t))
  {
    const int tid = omp_get_thread_num();
#pragma omp for schedule(static)
    for (int i = 0; i < na; i += stride_a) {
      const Vec ai = (a.row(i).transpose().array() * form.array()).matrix();
      for (int j = 0; j < nb; j += stride_b) {
        const double v = ai.dot(b.row(j).transpose());
        if (v > best[tid].max_value ||
            (v == best[tid].max_value &&
             (i < best[tid].argmax_i ||
              (i == best[tid].argmax_i && j < best[tid].argmax_j)))) {
          best[tid] = PairSweepResult{v, i, j};
        }
      }
    }
  }
  PairSweepResult out{-1e300, -1, -1};
  for (const auto& cand : best) {
    if (cand.max_value > out.max_value ||
        (cand.max_value == out.max_value &&
         (cand.argmax_i < out.argmax_i ||
          (cand.argmax_i == out.argmax_i && cand.argmax_j < out.argmax_j)))) {
      out = cand;
    }
  }
  return out;
}

PairSweepResult pair_sweep_max_serial(const Mat& a, const Mat& b,
                                      const Signature& sig, int stride_a,
                                      int stride_b) {
  const Vec form = detail::form_diagonal(sig);
  PairSweepResult out{-1e300, -1, -1};
  for (int i = 0; i < a.rows(); i += stride_a) {
    const Vec ai = (a.row(i).transpose().array() * form.array()).matrix();
    for (int j = 0; j < b.rows(); j += stride_b) {
      const double v = ai.dot(b.row(j).transpose());
      if (v > out.max_value) out = PairSweepResult{v, i, j};
    }
  }
  return out;
}

}  // namespace hpq::kernels
