#pragma once

// Fermi charts of H^{p,q}_+ and spacelike polar coordinates about a point.

#include "hpq/core.hpp"

namespace hpq {

// Fermi chart of a marked hyperbolic p-space: orthogonal decomposition
// E = l + U + V with l spanned by the (oriented) basepoint, U spacelike,
// V timelike. W = l + V carries -b as a positive inner product; its frame
// is ordered (basepoint, V_1, ..., V_q).
struct FermiChart {
  QuadricPoint basepoint;
  Mat u_frame;  // (p+q+1) x p, b = +1 columns
  Mat v_frame;  // (p+q+1) x q, b = -1 columns

  Signature signature() const { return basepoint.sig; }

  // Frame matrix with columns (U_1..U_p, basepoint, V_1..V_q).
  Mat frame() const;
};

// Chart adapted to the standard basis: U = e_1..e_p, basepoint = e_{p+1}.
FermiChart standard_chart(const Signature& sig);

// Chart with the same U-span but basepoint moved to the W-direction
// `w_pole` (unit vector in the W-frame of `chart`).
FermiChart recentered_chart(const FermiChart& chart, const Vec& w_pole);

// Validates b-orthonormality of the stored frames.
void validate_chart(const FermiChart& chart, double tol = 1e-10);

// f(t) = (1+t^2)/(1-t^2), the warped-product factor.
double fermi_warp(double t);

// Phi^(u, w) = f(|u|) * ((2u/(1+|u|^2)) in U, w in W), |u| < 1, |w| = 1.
QuadricPoint fermi_forward(const FermiChart& chart, const Vec& u, const Vec& w);

struct FermiCoords {
  Vec u;  // ball coordinates, length p
  Vec w;  // W-frame coordinates, length q+1, unit
};

FermiCoords fermi_inverse(const FermiChart& chart, const QuadricPoint& x);

// Conformal factor f(|u|)^2 of the pulled-back metric.
double fermi_metric_factor(const Vec& u);

// Boundary ray of the chart with sphere coordinates (u in S^{p-1}, w in S^q).
BoundaryPoint fermi_boundary_ray(const FermiChart& chart, const Vec& u_unit,
                                 const Vec& w);

// Sphere coordinates of a boundary ray lying over this chart.
FermiCoords fermi_boundary_coords(const FermiChart& chart,
                                  const BoundaryPoint& ray);

struct PolarChart {
  QuadricPoint basepoint;
};

// cosh(r) x0 + sinh(r) v for a unit spacelike v orthogonal to x0.
QuadricPoint polar_forward(const PolarChart& chart, const Vec& v, double r);

struct PolarCoords {
  Vec v;
  double r;
};

// Defined on {b(y, x0) < -1}; r = arccosh(-b(x0,y)).
PolarCoords polar_inverse(const PolarChart& chart, const QuadricPoint& y);

bool polar_domain_contains(const PolarChart& chart, const QuadricPoint& y);

// Ideal endpoint x0 + v of the radial geodesic in direction v.
BoundaryPoint polar_boundary(const PolarChart& chart, const Vec& v);

// Direction recovering a boundary ray with b(ray, x0) < 0; inverse of
// polar_boundary after scaling the representative to b(. , x0) = -1.
Vec polar_boundary_inverse(const PolarChart& chart, const BoundaryPoint& ray);

}  // namespace hpq
