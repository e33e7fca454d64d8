#include "hpq/charts.hpp"

#include <cmath>

namespace hpq {

Mat FermiChart::frame() const {
  const Signature sig = basepoint.sig;
  Mat f(sig.dim(), sig.dim());
  f.leftCols(sig.p) = u_frame;
  f.col(sig.p) = basepoint.coords;
  f.rightCols(sig.q) = v_frame;
  return f;
}

FermiChart standard_chart(const Signature& sig) {
  FermiChart chart;
  Mat id = Mat::Identity(sig.dim(), sig.dim());
  chart.basepoint = QuadricPoint{id.col(sig.p), sig};
  chart.u_frame = id.leftCols(sig.p);
  chart.v_frame = id.rightCols(sig.q);
  return chart;
}

FermiChart recentered_chart(const FermiChart& chart, const Vec& w_pole) {
  const Signature sig = chart.signature();
  if (w_pole.size() != sig.q + 1)
    throw_error(ErrorCode::DimensionMismatch, "w_pole must live in the W-frame");
  Mat w_frame(sig.dim(), sig.q + 1);
  w_frame.col(0) = chart.basepoint.coords;
  w_frame.rightCols(sig.q) = chart.v_frame;

  Vec pole = w_frame * w_pole;
  pole /= std::sqrt(-bilinear_form(pole, pole, sig));
  // Complete pole to an orthonormal basis of W by Gram-Schmidt in the
  // (positive) -b inner product, seeded with the old frame.
  Mat new_w(sig.dim(), sig.q + 1);
  new_w.col(0) = pole;
  int filled = 1;
  for (int c = 0; c < sig.q + 1 && filled < sig.q + 1; ++c) {
    Vec cand = w_frame.col(c);
    for (int k = 0; k < filled; ++k)
      cand += bilinear_form(new_w.col(k), cand, sig) * new_w.col(k);
    const double nrm = std::sqrt(std::max(0.0, -bilinear_form(cand, cand, sig)));
    if (nrm > 1e-8) new_w.col(filled++) = cand / nrm;
  }
  if (filled < sig.q + 1)
    throw_error(ErrorCode::InvalidParameter, "could not complete W frame");

  FermiChart out;
  out.basepoint = QuadricPoint{new_w.col(0), sig};
  out.u_frame = chart.u_frame;
  out.v_frame = new_w.rightCols(sig.q);
  return out;
}

void validate_chart(const FermiChart& chart, double tol) {
  const Signature sig = chart.signature();
  const Mat f = chart.frame();
  const Vec d = detail::form_diagonal(sig);
  Mat gram(sig.dim(), sig.dim());
  for (int i = 0; i < sig.dim(); ++i)
    for (int j = 0; j < sig.dim(); ++j)
      gram(i, j) = bilinear_form(f.col(i), f.col(j), sig);
  gram.diagonal() -= d;
  if (gram.cwiseAbs().maxCoeff() > tol)
    throw_error(ErrorCode::InvalidParameter, "chart frame is not b-orthonormal");
}

double fermi_warp(double t) { return (1.0 + t * t) / (1.0 - t * t); }

QuadricPoint fermi_forward(const FermiChart& chart, const Vec& u,
                           const Vec& w) {
  const Signature sig = chart.signature();
  if (u.size() != sig.p || w.size() != sig.q + 1)
    throw_error(ErrorCode::DimensionMismatch, "fermi coordinates sized (p, q+1)");
  const double t = u.norm();
  if (t >= 1.0)
    throw_error(ErrorCode::OutOfBall, "|u| must be < 1");
  const double f = fermi_warp(t);
  const double su = 2.0 / (1.0 + t * t);
  Vec x = chart.u_frame * (f * su * u);
  x += chart.basepoint.coords * (f * w[0]);
  x += chart.v_frame * (f * w.tail(sig.q));
  return QuadricPoint{x, sig};
}

FermiCoords fermi_inverse(const FermiChart& chart, const QuadricPoint& x) {
  const Signature sig = chart.signature();
  Vec a(sig.p);
  for (int i = 0; i < sig.p; ++i)
    a[i] = bilinear_form(x.coords, chart.u_frame.col(i), sig);
  Vec c(sig.q + 1);
  c[0] = -bilinear_form(x.coords, chart.basepoint.coords, sig);
  for (int j = 0; j < sig.q; ++j)
    c[j + 1] = -bilinear_form(x.coords, chart.v_frame.col(j), sig);

  const double f = c.norm();  // f(|u|) >= 1
  const double t2 = (f - 1.0) / (f + 1.0);
  FermiCoords out;
  out.u = a * ((1.0 + t2) / (2.0 * f));
  out.w = c / f;
  return out;
}

double fermi_metric_factor(const Vec& u) {
  const double t = u.norm();
  if (t >= 1.0)
    throw_error(ErrorCode::OutOfBall, "|u| must be < 1");
  const double f = fermi_warp(t);
  return f * f;
}

BoundaryPoint fermi_boundary_ray(const FermiChart& chart, const Vec& u_unit,
                                 const Vec& w) {
  const Signature sig = chart.signature();
  if (u_unit.size() != sig.p || w.size() != sig.q + 1)
    throw_error(ErrorCode::DimensionMismatch, "boundary coordinates sized (p, q+1)");
  if (std::abs(u_unit.norm() - 1.0) > 1e-10 || std::abs(w.norm() - 1.0) > 1e-10)
    throw_error(ErrorCode::InvalidParameter, "boundary coordinates must be unit");
  Vec x = chart.u_frame * u_unit;
  x += chart.basepoint.coords * w[0];
  x += chart.v_frame * w.tail(sig.q);
  return BoundaryPoint{x / x.norm(), sig};
}

FermiCoords fermi_boundary_coords(const FermiChart& chart,
                                  const BoundaryPoint& ray) {
  const Signature sig = chart.signature();
  Vec a(sig.p);
  for (int i = 0; i < sig.p; ++i)
    a[i] = bilinear_form(ray.coords, chart.u_frame.col(i), sig);
  Vec c(sig.q + 1);
  c[0] = -bilinear_form(ray.coords, chart.basepoint.coords, sig);
  for (int j = 0; j < sig.q; ++j)
    c[j + 1] = -bilinear_form(ray.coords, chart.v_frame.col(j), sig);
  const double na = a.norm();
  if (na < 1e-14)
    throw_error(ErrorCode::InvalidParameter, "ray has no U component");
  FermiCoords out;
  out.u = a / na;
  out.w = c / c.norm();
  return out;
}

QuadricPoint polar_forward(const PolarChart& chart, const Vec& v, double r) {
  const Signature sig = chart.basepoint.sig;
  if (std::abs(bilinear_form(v, v, sig) - 1.0) > 1e-10 ||
      std::abs(bilinear_form(v, chart.basepoint.coords, sig)) > 1e-10)
    throw_error(ErrorCode::BadDirection,
                "v must satisfy b(v,v)=1 and b(x0,v)=0");
  if (r <= 0.0)
    throw_error(ErrorCode::BadDirection, "polar radius must be positive");
  return QuadricPoint{
      std::cosh(r) * chart.basepoint.coords + std::sinh(r) * v, sig};
}

PolarCoords polar_inverse(const PolarChart& chart, const QuadricPoint& y) {
  const Signature sig = chart.basepoint.sig;
  const double byx = bilinear_form(y.coords, chart.basepoint.coords, sig);
  if (byx >= -1.0)
    throw_error(ErrorCode::OutsideDomain,
                "polar chart covers exactly {b(y,x0) < -1}");
  const double r = std::acosh(-byx);
  PolarCoords out;
  out.r = r;
  out.v = y.coords / std::sinh(r) -
          (std::cosh(r) / std::sinh(r)) * chart.basepoint.coords;
  return out;
}

bool polar_domain_contains(const PolarChart& chart, const QuadricPoint& y) {
  return bilinear_form(y.coords, chart.basepoint.coords, y.sig) < -1.0;
}

BoundaryPoint polar_boundary(const PolarChart& chart, const Vec& v) {
  const Signature sig = chart.basepoint.sig;
  if (std::abs(bilinear_form(v, v, sig) - 1.0) > 1e-10 ||
      std::abs(bilinear_form(v, chart.basepoint.coords, sig)) > 1e-10)
    throw_error(ErrorCode::BadDirection,
                "v must satisfy b(v,v)=1 and b(x0,v)=0");
  Vec x = chart.basepoint.coords + v;
  return BoundaryPoint{x / x.norm(), sig};
}

Vec polar_boundary_inverse(const PolarChart& chart, const BoundaryPoint& ray) {
  const Signature sig = chart.basepoint.sig;
  const double s = bilinear_form(ray.coords, chart.basepoint.coords, sig);
  if (s >= -1e-12)
    throw_error(ErrorCode::OutsidePolarDomain,
                "ray must satisfy b(ray, x0) < 0");
  return ray.coords / (-s) - chart.basepoint.coords;
}

}  // namespace hpq
