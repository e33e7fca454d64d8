#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hpq/spheres.hpp"

using namespace hpq;

namespace {

std::mt19937 rng(5551212);

Vec random_unit(int n) {
  std::normal_distribution<double> g;
  Vec w(n);
  for (int i = 0; i < n; ++i) w[i] = g(rng);
  return w / w.norm();
}

LipschitzSphereMap constant_map(const SphereMesh& mesh, const Vec& w) {
  LipschitzSphereMap phi;
  phi.mesh = mesh;
  phi.q = static_cast<int>(w.size()) - 1;
  phi.values.resize(mesh.num_vertices(), w.size());
  for (int i = 0; i < mesh.num_vertices(); ++i)
    phi.values.row(i) = w.transpose();
  return phi;
}

// Graph of theta -> angle_map(theta) as a circle-to-circle sphere map.
LipschitzSphereMap circle_graph(int n_half,
                                const std::function<double(double)>& f) {
  SphereMesh mesh = circle_mesh(n_half);
  LipschitzSphereMap phi;
  phi.mesh = mesh;
  phi.q = 1;
  phi.values.resize(mesh.num_vertices(), 2);
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const double th = std::atan2(mesh.vertices(i, 1), mesh.vertices(i, 0));
    const double ft = f(th);
    phi.values(i, 0) = std::cos(ft);
    phi.values(i, 1) = std::sin(ft);
  }
  return phi;
}

}  // namespace

TEST_CASE("mesh construction invariants") {
  SphereMesh circle = circle_mesh(16);
  CHECK(circle.num_vertices() == 32);
  for (int i = 0; i < circle.num_vertices(); ++i) {
    CHECK(circle.antipode[circle.antipode[i]] == i);
    CHECK((circle.vertices.row(i) + circle.vertices.row(circle.antipode[i]))
              .norm() < 1e-12);
  }
  for (size_t e = 0; e < circle.edges.size(); ++e)
    CHECK(circle.edge_lengths[e] == doctest::Approx(M_PI / 16).epsilon(1e-12));

  SphereMesh ico = icosphere_mesh(1);
  CHECK(ico.num_vertices() == 42);
  for (int i = 0; i < ico.num_vertices(); ++i)
    CHECK((ico.vertices.row(i) + ico.vertices.row(ico.antipode[i])).norm() <
          1e-12);
  for (size_t e = 0; e < ico.edges.size(); ++e) {
    const auto [a, b] = ico.edges[e];
    CHECK(ico.edge_lengths[e] ==
          doctest::Approx(spherical_distance(ico.vertices.row(a),
                                             ico.vertices.row(b))));
  }
}

TEST_CASE("lipschitz_estimate basics") {
  SphereMesh mesh = circle_mesh(24);
  CHECK(lipschitz_estimate(constant_map(mesh, random_unit(2))) ==
        doctest::Approx(0.0));
  auto identity = circle_graph(24, [](double t) { return t; });
  CHECK(lipschitz_estimate(identity) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("classify_sphere tags") {
  auto constant = constant_map(circle_mesh(24), random_unit(2));
  CHECK(classify_sphere(constant).tag == SphereClass::Positive);

  auto identity = circle_graph(24, [](double t) { return t; });
  auto cls = classify_sphere(identity);
  CHECK(cls.tag == SphereClass::NonNegativeNonAdmissible);
  // worst pair is an antipodal pair with antipodal images
  const auto [i, j] = cls.worst_pair;
  CHECK(identity.mesh.antipode[i] == j);

  auto shrunk = shrink_family(constant, 0.0);
  CHECK(classify_sphere(shrunk).tag == SphereClass::Positive);

  auto expanding = circle_graph(24, [](double t) { return 1.5 * t; });
  CHECK(classify_sphere(expanding).tag == SphereClass::NotNonNegative);

  auto cap =
      circle_graph(48, [](double t) { return 0.3 * std::sin(2 * t); });
  CHECK(classify_sphere(cap).tag == SphereClass::Positive);
  CHECK(classify_sphere(cap).positive_triple_checked);
  CHECK(classify_sphere(cap).positive_triple_found);
}

TEST_CASE("classification invariant under domain rotation and target isometry") {
  auto wobble =
      circle_graph(32, [](double t) { return t + 0.25 * std::sin(3 * t); });
  const auto base = classify_sphere(wobble);

  std::uniform_real_distribution<double> ang(0, 2 * M_PI);
  for (int trial = 0; trial < 5; ++trial) {
    const double a = ang(rng), b = ang(rng);
    Eigen::Matrix2d R, S;
    R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    S << std::cos(b), -std::sin(b), std::sin(b), std::cos(b);
    LipschitzSphereMap moved = wobble;
    moved.mesh.vertices = wobble.mesh.vertices * R.transpose();
    moved.values = wobble.values * S.transpose();
    // edge lengths are rotation invariant; antipodes unchanged
    CHECK(classify_sphere(moved).tag == base.tag);
  }
}

TEST_CASE("pairwise product characterization of non-negativity") {
  // b(x,y) <= 0 for all product-lifted pairs iff the map is 1-Lipschitz.
  auto check_pairs = [](const LipschitzSphereMap& phi) {
    double worst = -1e300;
    for (int i = 0; i < phi.mesh.num_vertices(); ++i)
      for (int j = i + 1; j < phi.mesh.num_vertices(); ++j) {
        const double b = phi.mesh.vertices.row(i).dot(phi.mesh.vertices.row(j)) -
                         phi.values.row(i).dot(phi.values.row(j));
        worst = std::max(worst, b);
      }
    return worst;
  };
  auto nonneg =
      circle_graph(24, [](double t) { return 0.2 * std::sin(2 * t); });
  CHECK(check_pairs(nonneg) <= 1e-9);
  CHECK(classify_sphere(nonneg).tag != SphereClass::NotNonNegative);

  auto bad = circle_graph(24, [](double t) { return 1.4 * t; });
  CHECK(check_pairs(bad) > 1e-6);
  CHECK(classify_sphere(bad).tag == SphereClass::NotNonNegative);
}

TEST_CASE("hemisphere_center feasibility") {
  Vec w = random_unit(2);
  auto constant = constant_map(circle_mesh(16), w);
  auto c = hemisphere_center(constant);
  REQUIRE(c.has_value());
  for (int i = 0; i < constant.mesh.num_vertices(); ++i)
    CHECK(c->dot(constant.values.row(i)) > 0.0);

  auto identity = circle_graph(16, [](double t) { return t; });
  CHECK(!hemisphere_center(identity).has_value());

  auto wobble =
      circle_graph(32, [](double t) { return t + 0.3 * std::sin(2 * t); });
  // image covers the full circle: no hemisphere center
  CHECK(!hemisphere_center(wobble).has_value());

  // admissible random map into a cap
  SphereMesh ico = icosphere_mesh(1);
  LipschitzSphereMap cap;
  cap.mesh = ico;
  cap.q = 1;
  cap.values.resize(ico.num_vertices(), 2);
  std::uniform_real_distribution<double> small(-0.6, 0.6);
  for (int i = 0; i < ico.num_vertices(); ++i) {
    const double a = small(rng);
    cap.values(i, 0) = std::cos(a);
    cap.values(i, 1) = std::sin(a);
  }
  auto y = hemisphere_center(cap);
  REQUIRE(y.has_value());
  double worst = 1e300;
  for (int i = 0; i < ico.num_vertices(); ++i)
    worst = std::min(worst, y->dot(cap.values.row(i)));
  CHECK(worst > 0.0);
}

TEST_CASE("shrink_family endpoints and Lipschitz contraction") {
  SphereMesh mesh = circle_mesh(24);
  LipschitzSphereMap cap;
  cap.mesh = mesh;
  cap.q = 1;
  cap.values.resize(mesh.num_vertices(), 2);
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const double th = M_PI * i / 24;
    const double a = 0.8 * std::sin(th) * std::cos(th);
    cap.values(i, 0) = std::cos(a);
    cap.values(i, 1) = std::sin(a);
  }
  const double base_est = lipschitz_estimate(cap);

  auto t0 = shrink_family(cap, 0.0);
  for (int i = 0; i < mesh.num_vertices(); ++i)
    CHECK((t0.values.row(i) - cap.values.row(i)).norm() < 1e-12);

  auto t1 = shrink_family(cap, 1.0);
  for (int i = 1; i < mesh.num_vertices(); ++i)
    CHECK((t1.values.row(i) - t1.values.row(0)).norm() < 1e-12);

  for (double t : {0.1, 0.5, 0.9}) {
    auto ft = shrink_family(cap, t);
    CHECK(lipschitz_estimate(ft) <= (1.0 - t) * base_est + 1e-9);
  }

  auto identity = circle_graph(24, [](double t) { return t; });
  CHECK_THROWS_AS(shrink_family(identity, 0.5), Error);
}

TEST_CASE("shrink of an admissible non-negative map is Positive for t > 0") {
  SphereMesh mesh = circle_mesh(48);
  LipschitzSphereMap phi;
  phi.mesh = mesh;
  phi.q = 1;
  phi.values.resize(mesh.num_vertices(), 2);
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const double th = M_PI * i / 48;
    const double a = 0.7 * std::sin(th);
    phi.values(i, 0) = std::cos(a);
    phi.values(i, 1) = std::sin(a);
  }
  CHECK(classify_sphere(phi).tag != SphereClass::NotNonNegative);
  for (double t : {0.05, 0.3, 0.8}) {
    auto shrunk = shrink_family(phi, t);
    CHECK(classify_sphere(shrunk).tag == SphereClass::Positive);
  }
}

TEST_CASE("smooth_strictly_lipschitz_approx") {
  // Already-positive smooth map: output Positive and close.
  auto smooth =
      circle_graph(48, [](double t) { return 0.5 * std::sin(t); });
  auto out = smooth_strictly_lipschitz_approx(smooth, 0.1);
  CHECK(classify_sphere(out).tag == SphereClass::Positive);
  double dist = 0.0;
  for (int i = 0; i < smooth.mesh.num_vertices(); ++i)
    dist = std::max(dist, spherical_distance(out.values.row(i),
                                             smooth.values.row(i)));
  CHECK(dist < 0.1);

  // Estimate exactly 1 on some edge (sawtooth cap profile), admissible.
  SphereMesh mesh = circle_mesh(64);
  LipschitzSphereMap saw;
  saw.mesh = mesh;
  saw.q = 1;
  saw.values.resize(mesh.num_vertices(), 2);
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const double th = M_PI * i / 64;
    // Triangle wave with slope exactly +-1, image inside an open cap,
    // equal values at antipodal vertices.
    const double tri = std::abs(std::remainder(th, M_PI)) - M_PI / 4;
    saw.values(i, 0) = std::cos(tri);
    saw.values(i, 1) = std::sin(tri);
  }
  const double est = lipschitz_estimate(saw);
  CHECK(est == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(classify_sphere(saw).tag == SphereClass::NonNegativeAdmissible);
  auto approx = smooth_strictly_lipschitz_approx(saw, 0.2);
  CHECK(lipschitz_estimate(approx) < 1.0);
  CHECK(classify_sphere(approx).tag == SphereClass::Positive);

  CHECK_THROWS_AS(smooth_strictly_lipschitz_approx(smooth, 0.0), Error);
}

TEST_CASE("convex_hull_separation on equator configurations") {
  Signature sig(2, 1);
  FermiChart chart = standard_chart(sig);

  // Boundary of the totally geodesic plane through the basepoint.
  std::vector<BoundaryPoint> pts;
  Vec w0(2);
  w0 << 1.0, 0.0;
  for (int k = 0; k < 64; ++k) {
    const double th = 2 * M_PI * k / 64;
    Vec dir(2);
    dir << std::cos(th), std::sin(th);
    pts.push_back(fermi_boundary_ray(chart, dir, w0));
  }

  // The basepoint lies on that plane: inside the hull.
  auto res = convex_hull_separation(pts, chart.basepoint, chart.basepoint);
  CHECK(res.inside);

  // A point of the plane away from the center is still inside.
  Vec u(2);
  u << 0.4, 0.1;
  QuadricPoint on_plane = fermi_forward(chart, u, w0);
  CHECK(convex_hull_separation(pts, on_plane, chart.basepoint).inside);

  // A point displaced into the timelike fiber direction escapes the hull.
  Vec w_off(2);
  const double a = 0.9;
  w_off << std::cos(a), std::sin(a);
  QuadricPoint off_plane = fermi_forward(chart, u, w_off);
  auto sep = convex_hull_separation(pts, off_plane, chart.basepoint);
  CHECK(!sep.inside);
  // The witness functional is nonnegative on the points and negative at x.
  const Vec psi = sep.functional;
  const double sx = bilinear_form(off_plane.coords, chart.basepoint.coords, sig);
  const Vec xq = off_plane.coords / (-sx);
  CHECK(psi.dot(xq) < 0.0);
  for (const auto& p : pts) {
    const double sp = bilinear_form(p.coords, chart.basepoint.coords, sig);
    CHECK(psi.dot(p.coords / (-sp)) > -1e-7);
  }

  // Single point: any quadric point is separated.
  std::vector<BoundaryPoint> one = {pts[0]};
  CHECK(!convex_hull_separation(one, chart.basepoint, chart.basepoint).inside);

  CHECK_THROWS_AS(
      convex_hull_separation({}, chart.basepoint, chart.basepoint), Error);
}

TEST_CASE("lightlike suspension identity for the identity map") {
  auto identity = circle_graph(64, [](double t) { return t; });
  auto cls = classify_sphere(identity);
  REQUIRE(cls.tag == SphereClass::NonNegativeNonAdmissible);
  const double res =
      lightlike_suspension_residual(identity, cls.worst_pair, 32);
  CHECK(res < 2.0 * M_PI / 64 + 1e-9);  // mesh tolerance
}
