#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hpq/charts.hpp"

using namespace hpq;

namespace {

std::mt19937 rng(908172);

Vec random_ball_point(int p, double rmax = 0.9) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u01(0.05, rmax);
  Vec u(p);
  for (int i = 0; i < p; ++i) u[i] = g(rng);
  u *= u01(rng) / u.norm();
  return u;
}

Vec random_unit(int n) {
  std::normal_distribution<double> g;
  Vec w(n);
  for (int i = 0; i < n; ++i) w[i] = g(rng);
  return w / w.norm();
}

// A non-trivial chart: boost the standard frame by an isometry.
FermiChart boosted_chart(const Signature& sig, double mu) {
  FermiChart chart = standard_chart(sig);
  Mat boost = Mat::Identity(sig.dim(), sig.dim());
  boost(0, 0) = std::cosh(mu);
  boost(0, sig.p) = std::sinh(mu);
  boost(sig.p, 0) = std::sinh(mu);
  boost(sig.p, sig.p) = std::cosh(mu);
  FermiChart out;
  out.basepoint = QuadricPoint{boost * chart.basepoint.coords, sig};
  out.u_frame = boost * chart.u_frame;
  out.v_frame = boost * chart.v_frame;
  return out;
}

}  // namespace

TEST_CASE("fermi_forward at the pole and quadric constraint") {
  Signature sig(2, 1);
  FermiChart chart = standard_chart(sig);
  validate_chart(chart);

  Vec u = Vec::Zero(2);
  Vec w = random_unit(2);
  QuadricPoint x = fermi_forward(chart, u, w);
  CHECK(bilinear_form(x.coords, x.coords, sig) ==
        doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(x.coords[0] == doctest::Approx(0.0));
  CHECK(x.coords[1] == doctest::Approx(0.0));
  CHECK(x.coords[2] == doctest::Approx(w[0]));
  CHECK(x.coords[3] == doctest::Approx(w[1]));

  CHECK_THROWS_AS(fermi_forward(chart, 1.5 * random_unit(2), w), Error);
}

TEST_CASE("fermi round trips on random samples") {
  for (auto pq : {std::pair{2, 1}, std::pair{3, 2}}) {
    Signature sig(pq.first, pq.second);
    FermiChart chart = boosted_chart(sig, 0.6);
    validate_chart(chart);
    for (int trial = 0; trial < 200; ++trial) {
      Vec u = random_ball_point(sig.p);
      Vec w = random_unit(sig.q + 1);
      QuadricPoint x = fermi_forward(chart, u, w);
      FermiCoords back = fermi_inverse(chart, x);
      CHECK((back.u - u).norm() < 1e-12);
      CHECK((back.w - w).norm() < 1e-12);
      QuadricPoint x2 = fermi_forward(chart, back.u, back.w);
      CHECK((x2.coords - x.coords).norm() < 1e-10);
    }
  }
}

TEST_CASE("fermi basepoint inverts to the origin") {
  Signature sig(2, 2);
  FermiChart chart = boosted_chart(sig, 0.4);
  FermiCoords c = fermi_inverse(chart, chart.basepoint);
  CHECK(c.u.norm() < 1e-12);
  CHECK(c.w[0] == doctest::Approx(1.0));
}

TEST_CASE("antipode round trip") {
  Signature sig(2, 1);
  FermiChart chart = standard_chart(sig);
  Vec u = random_ball_point(2);
  Vec w = random_unit(2);
  QuadricPoint x = fermi_forward(chart, u, w);
  QuadricPoint minus{-x.coords, sig};
  FermiCoords c = fermi_inverse(chart, minus);
  QuadricPoint back = fermi_forward(chart, c.u, c.w);
  CHECK((back.coords + x.coords).norm() < 1e-10);
  // the antipode sits over the opposite ball point with the opposite fiber value
  CHECK((c.u + u).norm() < 1e-12);
  CHECK((c.w + w).norm() < 1e-12);
}

TEST_CASE("fermi_metric_factor values and pull-back") {
  Vec u(2);
  u << 0.0, 0.0;
  CHECK(fermi_metric_factor(u) == doctest::Approx(1.0));
  u << 0.5, 0.0;
  CHECK(fermi_metric_factor(u) == doctest::Approx(25.0 / 9.0).epsilon(1e-14));

  // Finite-difference pull-back of b through fermi_forward equals
  // f^2 (g_{S^p} - g_{S^q}) in ball/sphere coordinates.
  Signature sig(2, 1);
  FermiChart chart = boosted_chart(sig, 0.3);
  const double h = 1e-4;
  for (int trial = 0; trial < 20; ++trial) {
    Vec u0 = random_ball_point(2, 0.7);
    const double theta0 = std::uniform_real_distribution<double>(0, 2 * M_PI)(rng);
    auto embed = [&](double a, double b_, double th) {
      Vec uu(2);
      uu << a, b_;
      Vec ww(2);
      ww << std::cos(th), std::sin(th);
      return fermi_forward(chart, uu, ww).coords;
    };
    const Vec d_u0 =
        (embed(u0[0] + h, u0[1], theta0) - embed(u0[0] - h, u0[1], theta0)) /
        (2 * h);
    const Vec d_u1 =
        (embed(u0[0], u0[1] + h, theta0) - embed(u0[0], u0[1] - h, theta0)) /
        (2 * h);
    const Vec d_th =
        (embed(u0[0], u0[1], theta0 + h) - embed(u0[0], u0[1], theta0 - h)) /
        (2 * h);
    const double f2 = fermi_metric_factor(u0);
    const double t2 = u0.squaredNorm();
    // Spherical metric on the ball via stereographic projection: the
    // round hemisphere metric is 4/(1+|u|^2)^2 times Euclidean.
    const double sph = 4.0 / ((1 + t2) * (1 + t2));
    CHECK(bilinear_form(d_u0, d_u0, sig) ==
          doctest::Approx(f2 * sph).epsilon(1e-5));
    CHECK(bilinear_form(d_u1, d_u1, sig) ==
          doctest::Approx(f2 * sph).epsilon(1e-5));
    CHECK(bilinear_form(d_u0, d_u1, sig) ==
          doctest::Approx(0.0).epsilon(1e-5));
    // Timelike block: -f^2 g_{S^q}; the S^1 fiber has unit speed in theta.
    CHECK(bilinear_form(d_th, d_th, sig) ==
          doctest::Approx(-f2).epsilon(1e-5));
  }
}

TEST_CASE("fermi boundary ray limit") {
  Signature sig(2, 1);
  FermiChart chart = standard_chart(sig);
  Vec dir = random_unit(2);
  Vec w = random_unit(2);
  BoundaryPoint ray = fermi_boundary_ray(chart, dir, w);
  for (double t : {0.9, 0.99, 0.999}) {
    QuadricPoint x = fermi_forward(chart, t * dir, w);
    Vec n = x.coords / x.coords.norm();
    CHECK((n - ray.coords).norm() < 2.0 * (1.0 - t));
  }
  FermiCoords bc = fermi_boundary_coords(chart, ray);
  CHECK((bc.u - dir).norm() < 1e-12);
  CHECK((bc.w - w).norm() < 1e-12);
}

TEST_CASE("fermi projection monotonicity on same-fiber pairs") {
  Signature sig(2, 2);
  FermiChart chart = boosted_chart(sig, 0.5);
  for (int trial = 0; trial < 200; ++trial) {
    Vec u = random_ball_point(2);
    Vec w1 = random_unit(3);
    Vec w2 = random_unit(3);
    QuadricPoint x1 = fermi_forward(chart, u, w1);
    QuadricPoint x2 = fermi_forward(chart, u, w2);
    const double b12 = bilinear_form(x1.coords, x2.coords, sig);
    CHECK(b12 >= -1.0 - 1e-12);
    if ((w1 - w2).norm() > 1e-8) CHECK(b12 > -1.0);
  }
}

TEST_CASE("polar chart identities") {
  Signature sig(2, 1);
  Vec bp(4);
  bp << 0, 0, 1, 0;
  PolarChart chart{normalize_to_quadric(bp, sig)};

  Vec v(4);
  v << 1, 0, 0, 0;  // spacelike, orthogonal to basepoint
  for (double r : {0.2, 1.0, 3.0}) {
    QuadricPoint y = polar_forward(chart, v, r);
    CHECK(bilinear_form(y.coords, chart.basepoint.coords, sig) ==
          doctest::Approx(-std::cosh(r)).epsilon(1e-12));
    PolarCoords back = polar_inverse(chart, y);
    CHECK(back.r == doctest::Approx(r).epsilon(1e-10));
    CHECK((back.v - v).norm() < 1e-10);
  }

  // r -> 0 limit approaches the basepoint.
  QuadricPoint near = polar_forward(chart, v, 1e-8);
  CHECK((near.coords - chart.basepoint.coords).norm() < 1e-7);

  // Basepoint itself is outside the chart domain.
  CHECK_THROWS_AS(polar_inverse(chart, chart.basepoint), Error);
  CHECK_THROWS_AS(polar_forward(chart, 2.0 * v, 1.0), Error);
}

TEST_CASE("polar chart membership agrees with inversion on random samples") {
  Signature sig(2, 1);
  FermiChart fc = standard_chart(sig);
  PolarChart chart{fc.basepoint};
  int inside = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Vec u = random_ball_point(2);
    Vec w = random_unit(2);
    QuadricPoint y = fermi_forward(fc, u, w);
    const bool member = polar_domain_contains(chart, y);
    bool inverted = true;
    try {
      PolarCoords c = polar_inverse(chart, y);
      QuadricPoint back = polar_forward(chart, c.v, c.r);
      CHECK((back.coords - y.coords).norm() < 1e-10);
    } catch (const Error&) {
      inverted = false;
    }
    CHECK(member == inverted);
    inside += member ? 1 : 0;
  }
  CHECK(inside > 0);
  CHECK(inside < 1000);
}

TEST_CASE("polar boundary rays") {
  Signature sig(3, 1);
  FermiChart fc = standard_chart(sig);
  PolarChart chart{fc.basepoint};
  for (int trial = 0; trial < 50; ++trial) {
    Vec raw = Vec::Zero(5);
    raw.head(3) = random_unit(3);
    Vec v = raw;  // spacelike unit, orthogonal to e_4 basepoint
    BoundaryPoint ray = polar_boundary(chart, v);
    CHECK(std::abs(bilinear_form(ray.coords, ray.coords, sig)) < 1e-12);
    const double bray = bilinear_form(ray.coords, chart.basepoint.coords, sig);
    CHECK(bray < 0.0);
    Vec back = polar_boundary_inverse(chart, ray);
    CHECK((back - v).norm() < 1e-10);
  }
}

TEST_CASE("boundary conformal class is the difference of round metrics") {
  Signature sig(2, 1);
  FermiChart chart = boosted_chart(sig, 0.7);
  const double h = 1e-4;
  for (int trial = 0; trial < 10; ++trial) {
    const double a0 = std::uniform_real_distribution<double>(0, 2 * M_PI)(rng);
    const double b0 = std::uniform_real_distribution<double>(0, 2 * M_PI)(rng);
    auto rep = [&](double a, double b_) {
      Vec uu(2);
      uu << std::cos(a), std::sin(a);
      Vec ww(2);
      ww << std::cos(b_), std::sin(b_);
      return fermi_boundary_ray(chart, uu, ww).coords;
    };
    Vec da = (rep(a0 + h, b0) - rep(a0 - h, b0)) / (2 * h);
    Vec db = (rep(a0, b0 + h) - rep(a0, b0 - h)) / (2 * h);
    const double gaa = bilinear_form(da, da, sig);
    const double gbb = bilinear_form(db, db, sig);
    const double gab = bilinear_form(da, db, sig);
    CHECK(gaa > 0.0);
    CHECK(gbb < 0.0);
    CHECK(-gbb / gaa == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(std::abs(gab) < 1e-5 * gaa);
  }
}
