#include "hpq/spheres.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>

#include "hpq/linprog.hpp"

namespace hpq {

namespace {

void finalize_antipodes(SphereMesh& mesh) {
  const int n = mesh.num_vertices();
  mesh.antipode.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    if (mesh.antipode[i] >= 0) continue;
    int best = -1;
    double bd = 1e300;
    for (int j = 0; j < n; ++j) {
      const double d = (mesh.vertices.row(i) + mesh.vertices.row(j)).norm();
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    if (bd > 1e-6)
      throw_error(ErrorCode::InvalidParameter,
                  "mesh is not closed under the antipodal map");
    mesh.antipode[i] = best;
    mesh.antipode[best] = i;
    mesh.vertices.row(best) = -mesh.vertices.row(i);  // make the pair exact
  }
}

void compute_edge_lengths(SphereMesh& mesh) {
  mesh.edge_lengths.resize(mesh.edges.size());
  for (size_t e = 0; e < mesh.edges.size(); ++e) {
    const auto [a, b] = mesh.edges[e];
    mesh.edge_lengths[e] =
        spherical_distance(mesh.vertices.row(a), mesh.vertices.row(b));
  }
}

}  // namespace

double spherical_distance(const Vec& a, const Vec& b) {
  const double c = std::clamp(a.dot(b), -1.0, 1.0);
  return std::acos(c);
}

SphereMesh circle_mesh(int n_half) {
  if (n_half < 3)
    throw_error(ErrorCode::InvalidParameter, "circle mesh needs n_half >= 3");
  SphereMesh mesh;
  mesh.p = 2;
  const int n = 2 * n_half;
  mesh.vertices.resize(n, 2);
  for (int k = 0; k < n; ++k) {
    const double th = M_PI * k / n_half;
    mesh.vertices(k, 0) = std::cos(th);
    mesh.vertices(k, 1) = std::sin(th);
  }
  for (int k = 0; k < n; ++k) mesh.edges.push_back({k, (k + 1) % n});
  mesh.antipode.resize(n);
  for (int k = 0; k < n; ++k) mesh.antipode[k] = (k + n_half) % n;
  compute_edge_lengths(mesh);
  return mesh;
}

SphereMesh icosphere_mesh(int subdivisions) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> verts = {
      {-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Eigen::Vector3d m = (verts[a] + verts[b]).normalized();
      verts.push_back(m);
      const int idx = static_cast<int>(verts.size()) - 1;
      midpoint[key] = idx;
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = mid(f[0], f[1]);
      const int bc = mid(f[1], f[2]);
      const int ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  SphereMesh mesh;
  mesh.p = 3;
  mesh.vertices.resize(static_cast<int>(verts.size()), 3);
  for (size_t i = 0; i < verts.size(); ++i)
    mesh.vertices.row(static_cast<int>(i)) = verts[i].transpose();
  std::map<std::pair<int, int>, bool> seen;
  for (const auto& f : faces) {
    for (int e = 0; e < 3; ++e) {
      auto key = std::minmax(f[e], f[(e + 1) % 3]);
      if (!seen.count(key)) {
        seen[key] = true;
        mesh.edges.push_back(key);
      }
    }
  }
  finalize_antipodes(mesh);
  compute_edge_lengths(mesh);
  return mesh;
}

SphereMesh mesh_from_vertices(const Mat& vertices) {
  const int p = static_cast<int>(vertices.cols());
  const int n = static_cast<int>(vertices.rows());
  SphereMesh mesh;
  mesh.p = p;
  mesh.vertices = vertices;
  for (int i = 0; i < n; ++i) mesh.vertices.row(i).normalize();

  if (p == 2) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> angle(n);
    for (int i = 0; i < n; ++i)
      angle[i] = std::atan2(mesh.vertices(i, 1), mesh.vertices(i, 0));
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return angle[a] < angle[b]; });
    for (int k = 0; k < n; ++k)
      mesh.edges.push_back(std::minmax(order[k], order[(k + 1) % n]));
  } else if (p == 3) {
    // 1-ring reconstruction: connect pairs no longer than 1.45x the
    // shortest chord (separates mesh edges from second-ring chords on
    // subdivided icosahedra).
    double dmin = 1e300;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        dmin = std::min(dmin,
                        (mesh.vertices.row(i) - mesh.vertices.row(j)).norm());
    const double cutoff = 1.45 * dmin;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if ((mesh.vertices.row(i) - mesh.vertices.row(j)).norm() <= cutoff)
          mesh.edges.push_back({i, j});
  } else {
    throw_error(ErrorCode::NotSupported, "meshes exist for p = 2 and p = 3");
  }
  finalize_antipodes(mesh);
  compute_edge_lengths(mesh);
  return mesh;
}

double lipschitz_estimate(const LipschitzSphereMap& phi) {
  if (phi.mesh.edges.empty())
    throw_error(ErrorCode::EmptyInput, "mesh has no edges");
  double best = 0.0;
  for (size_t e = 0; e < phi.mesh.edges.size(); ++e) {
    const auto [a, b] = phi.mesh.edges[e];
    const double len = phi.mesh.edge_lengths[e];
    if (len < 1e-12)
      throw_error(ErrorCode::DegenerateEdge, "edge shorter than 1e-12");
    const double dv = spherical_distance(phi.values.row(a), phi.values.row(b));
    best = std::max(best, dv / len);
  }
  return best;
}

namespace {

constexpr double kTolStrict = 1e-6;   // Positive vs NonNegative
constexpr double kTolLip = 1e-9;      // 1-Lipschitz acceptance cushion
constexpr double kTolAntipodal = 1e-8;

BoundaryPoint product_ray(const LipschitzSphereMap& phi, int vertex) {
  const int p = phi.mesh.p;
  const Signature sig(p, phi.q);
  Vec x(sig.dim());
  x.head(p) = phi.mesh.vertices.row(vertex).transpose();
  x.tail(phi.q + 1) = phi.values.row(vertex).transpose();
  return BoundaryPoint{x / x.norm(), sig};
}

bool sample_positive_triple(const LipschitzSphereMap& phi, bool exhaustive) {
  const int n = phi.mesh.num_vertices();
  auto is_positive = [&](int i, int j, int k) {
    try {
      return classify_triple(product_ray(phi, i), product_ray(phi, j),
                             product_ray(phi, k))
                 .tag == TripleClass::Positive;
    } catch (const Error&) {
      return false;
    }
  };
  if (exhaustive) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k)
          if (is_positive(i, j, k)) return true;
    return false;
  }
  const int stride = std::max(1, n / 24);
  for (int i = 0; i < n; i += stride)
    for (int j = i + stride; j < n; j += stride)
      for (int k = j + stride; k < n; k += stride)
        if (is_positive(i, j, k)) return true;
  return false;
}

}  // namespace

SphereClassification classify_sphere(const LipschitzSphereMap& phi,
                                     bool exhaustive_triples) {
  SphereClassification out;
  double best = 0.0;
  std::pair<int, int> worst = phi.mesh.edges.empty()
                                  ? std::pair<int, int>{-1, -1}
                                  : phi.mesh.edges.front();
  for (size_t e = 0; e < phi.mesh.edges.size(); ++e) {
    const auto [a, b] = phi.mesh.edges[e];
    const double len = phi.mesh.edge_lengths[e];
    if (len < 1e-12) continue;
    const double ratio =
        spherical_distance(phi.values.row(a), phi.values.row(b)) / len;
    if (ratio > best) {
      best = ratio;
      worst = {a, b};
    }
  }
  out.lipschitz_estimate = best;
  out.worst_pair = worst;

  std::pair<int, int> antipodal_images = {-1, -1};
  for (int i = 0; i < phi.mesh.num_vertices(); ++i) {
    const int j = phi.mesh.antipode[i];
    if (j <= i) continue;
    const double d = phi.values.row(i).dot(phi.values.row(j));
    if (d <= -1.0 + kTolAntipodal) {
      antipodal_images = {i, j};
      break;
    }
  }

  if (best < 1.0 - kTolStrict) {
    out.tag = SphereClass::Positive;
  } else if (best <= 1.0 + kTolLip) {
    if (antipodal_images.first < 0) {
      out.tag = SphereClass::NonNegativeAdmissible;
    } else {
      out.tag = SphereClass::NonNegativeNonAdmissible;
      out.worst_pair = antipodal_images;
    }
  } else {
    out.tag = SphereClass::NotNonNegative;
  }

  if (phi.mesh.p == 2 && out.tag != SphereClass::NotNonNegative) {
    out.positive_triple_checked = true;
    out.positive_triple_found = sample_positive_triple(phi, exhaustive_triples);
  }
  return out;
}

std::optional<Vec> hemisphere_center(const LipschitzSphereMap& phi) {
  const int n = phi.mesh.num_vertices();
  const int d = phi.q + 1;
  // Variables (sigma_1..sigma_d, m) with y = sigma - 1 in [-1,1]^d;
  // maximize the margin m subject to <phi_i, y> >= m.
  const int rows = n + d + 1;
  Mat A = Mat::Zero(rows, d + 1);
  Vec b(rows);
  for (int i = 0; i < n; ++i) {
    A.row(i).head(d) = -phi.values.row(i);
    A(i, d) = 1.0;
    b[i] = -phi.values.row(i).sum();
  }
  for (int j = 0; j < d; ++j) {
    A(n + j, j) = 1.0;
    b[n + j] = 2.0;
  }
  A(n + d, d) = 1.0;
  b[n + d] = 1.0;
  Vec c = Vec::Zero(d + 1);
  c[d] = 1.0;

  const LpResult lp = solve_lp_max(A, b, c);
  if (lp.status != LpResult::Status::Optimal || lp.objective <= 1e-9)
    return std::nullopt;
  Vec y = lp.x.head(d).array() - 1.0;
  y.normalize();
  for (int i = 0; i < n; ++i)
    if (phi.values.row(i).dot(y) <= 0.0) return std::nullopt;
  return y;
}

LipschitzSphereMap shrink_family(const LipschitzSphereMap& phi, double t) {
  if (t < 0.0 || t > 1.0)
    throw_error(ErrorCode::InvalidParameter, "t must lie in [0,1]");
  auto center = hemisphere_center(phi);
  if (!center)
    throw_error(ErrorCode::NotAdmissible, "image is not in an open hemisphere");
  const Vec y = *center;

  const int n = phi.mesh.num_vertices();
  double r = 0.0;
  for (int i = 0; i < n; ++i)
    r = std::max(r, spherical_distance(y, phi.values.row(i)));
  r = std::min(r, M_PI / 2 - 1e-12);

  LipschitzSphereMap out = phi;
  if (r < 1e-14) {
    for (int i = 0; i < n; ++i) out.values.row(i) = y.transpose();
    return out;
  }
  const double s = std::asin((1.0 - t) * std::sin(r)) / r;
  for (int i = 0; i < n; ++i) {
    const Vec w = phi.values.row(i).transpose();
    const double ri = spherical_distance(y, w);
    if (ri < 1e-15) {
      out.values.row(i) = y.transpose();
      continue;
    }
    Vec xi = w - w.dot(y) * y;
    xi /= xi.norm();
    out.values.row(i) =
        (std::cos(s * ri) * y + std::sin(s * ri) * xi).normalized().transpose();
  }
  return out;
}

LipschitzSphereMap smooth_strictly_lipschitz_approx(
    const LipschitzSphereMap& phi, double delta) {
  if (delta <= 0.0)
    throw_error(ErrorCode::InvalidParameter, "delta must be positive");
  const SphereClassification cls = classify_sphere(phi);
  if (cls.tag != SphereClass::Positive &&
      cls.tag != SphereClass::NonNegativeAdmissible)
    throw_error(ErrorCode::NotAdmissible, "map must be admissible");

  auto center = hemisphere_center(phi);
  if (!center)
    throw_error(ErrorCode::NotAdmissible, "image is not in an open hemisphere");
  const Vec y = *center;
  const int n = phi.mesh.num_vertices();
  double r = 0.0;
  for (int i = 0; i < n; ++i)
    r = std::max(r, spherical_distance(y, phi.values.row(i)));

  double eps = 1e-5;
  if (r > 1e-12) {
    const double d3 = std::min(delta / 3.0, r / 2.0);
    eps = std::max(eps, 1.0 - std::sin(r - d3) / std::sin(r));
    eps = std::min(eps, 0.9);
  }
  LipschitzSphereMap shrunk = shrink_family(phi, eps);

  double rho = 0.0;
  for (double len : phi.mesh.edge_lengths) rho = std::max(rho, len);
  rho *= 2.0;
  const double min_edge =
      *std::min_element(phi.mesh.edge_lengths.begin(),
                        phi.mesh.edge_lengths.end());

  while (rho > min_edge / 4.0) {
    LipschitzSphereMap cand = shrunk;
    for (int i = 0; i < n; ++i) {
      Vec acc = Vec::Zero(phi.q + 1);
      for (int j = 0; j < n; ++j) {
        const double d =
            spherical_distance(phi.mesh.vertices.row(i), phi.mesh.vertices.row(j));
        if (d < rho) {
          const double wgt = std::pow(std::cos(M_PI * d / (2.0 * rho)), 2);
          acc += wgt * shrunk.values.row(j).transpose();
        }
      }
      cand.values.row(i) = acc.normalized().transpose();  // radial projection
    }
    double dist = 0.0;
    for (int i = 0; i < n; ++i)
      dist = std::max(dist,
                      spherical_distance(cand.values.row(i), shrunk.values.row(i)));
    if (dist <= delta / 3.0 &&
        lipschitz_estimate(cand) <= (1.0 - eps / 2.0) + 1e-12)
      return cand;
    rho /= 2.0;
  }
  return shrunk;
}

SeparationResult convex_hull_separation(const std::vector<BoundaryPoint>& points,
                                        const QuadricPoint& x,
                                        const QuadricPoint& x_ref) {
  if (points.empty())
    throw_error(ErrorCode::EmptyInput, "need at least one boundary point");
  const Signature sig = x.sig;
  const int d = sig.dim();
  const int n = static_cast<int>(points.size());

  Mat lifted(d, n);
  for (int i = 0; i < n; ++i) {
    const double s = bilinear_form(points[i].coords, x_ref.coords, sig);
    if (s >= -1e-12)
      throw_error(ErrorCode::InvalidParameter,
                  "points must satisfy b(., x_ref) < 0");
    lifted.col(i) = points[i].coords / (-s);
  }
  const double sx = bilinear_form(x.coords, x_ref.coords, sig);
  if (sx >= -1e-12)
    throw_error(ErrorCode::InvalidParameter, "x must satisfy b(x, x_ref) < 0");
  const Vec xq = x.coords / (-sx);

  // Membership LP: theta >= 0, sum theta = 1, lifted * theta = xq (within a
  // small band so surface points touching a facet still count as inside).
  const double band = 1e-7;
  const int rows = 2 * d + 2;
  Mat A(rows, n);
  Vec b(rows);
  for (int k = 0; k < d; ++k) {
    A.row(2 * k) = lifted.row(k);
    b[2 * k] = xq[k] + band;
    A.row(2 * k + 1) = -lifted.row(k);
    b[2 * k + 1] = -xq[k] + band;
  }
  A.row(2 * d).setOnes();
  b[2 * d] = 1.0;
  A.row(2 * d + 1).setConstant(-1.0);
  b[2 * d + 1] = -1.0;
  const LpResult member = solve_lp_max(A, b, Vec::Zero(n));
  if (member.status == LpResult::Status::Optimal)
    return SeparationResult{true, Vec::Zero(d)};

  // Witness functional: psi with psi(P_i) >= 0, psi(xq) <= -eps.
  const int vars = d + 1;  // psi = sigma - 1, plus the margin
  const int wrows = n + 1 + d + 1;
  Mat Aw = Mat::Zero(wrows, vars);
  Vec bw(wrows);
  for (int i = 0; i < n; ++i) {
    Aw.row(i).head(d) = -lifted.col(i).transpose();
    bw[i] = -lifted.col(i).sum();
  }
  Aw.row(n).head(d) = xq.transpose();
  Aw(n, d) = 1.0;
  bw[n] = xq.sum();
  for (int j = 0; j < d; ++j) {
    Aw(n + 1 + j, j) = 1.0;
    bw[n + 1 + j] = 2.0;
  }
  Aw(n + 1 + d, d) = 1.0;
  bw[n + 1 + d] = 1.0;
  Vec cw = Vec::Zero(vars);
  cw[d] = 1.0;
  const LpResult witness = solve_lp_max(Aw, bw, cw);
  SeparationResult out;
  out.inside = false;
  out.functional = witness.status == LpResult::Status::Optimal
                       ? Vec(witness.x.head(d).array() - 1.0)
                       : Vec::Zero(d);
  return out;
}

std::vector<BoundaryPoint> boundary_rays(const LipschitzSphereMap& phi,
                                         const FermiChart& chart) {
  std::vector<BoundaryPoint> out;
  out.reserve(phi.mesh.num_vertices());
  for (int i = 0; i < phi.mesh.num_vertices(); ++i)
    out.push_back(fermi_boundary_ray(chart, phi.mesh.vertices.row(i),
                                     phi.values.row(i)));
  return out;
}

double lightlike_suspension_residual(const LipschitzSphereMap& phi,
                                     std::pair<int, int> pair, int samples) {
  const int i0 = pair.first;
  const Vec u0 = phi.mesh.vertices.row(i0).transpose();
  const Vec w0 = phi.values.row(i0).transpose();

  auto nearest = [&](const Vec& u) {
    int best = 0;
    double bd = 1e300;
    for (int i = 0; i < phi.mesh.num_vertices(); ++i) {
      const double d = (phi.mesh.vertices.row(i).transpose() - u).norm();
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    return best;
  };

  double residual = 0.0;
  for (int s = 0; s < samples; ++s) {
    const int i = (s * phi.mesh.num_vertices()) / samples;
    const Vec u = phi.mesh.vertices.row(i).transpose();
    const double st = std::clamp(u.dot(u0), -1.0, 1.0);
    const double ct = std::sqrt(std::max(0.0, 1.0 - st * st));
    if (ct < 0.3) continue;  // too close to the pair for a stable direction
    const Vec v = (u - st * u0) / ct;
    const Vec phib = phi.values.row(nearest(v)).transpose();
    Vec expected = st * w0 + ct * phib;
    expected.normalize();
    residual = std::max(
        residual, spherical_distance(phi.values.row(i).transpose(), expected));
  }
  return residual;
}

}  // namespace hpq
