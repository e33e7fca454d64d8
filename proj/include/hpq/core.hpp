#pragma once

// Indefinite linear algebra over R^{p,q+1}: quadric-model points, geodesics,
// boundary rays, triple classification, Cartan decomposition of O(p,q), and
// the eigenvalue certificates behind the uniqueness argument.

#include <Eigen/Dense>

#include "hpq/errors.hpp"

namespace hpq {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Ambient signature (p, q+1): first p coordinates positive, last q+1 negative.
struct Signature {
  int p = 2;
  int q = 1;

  Signature() = default;
  Signature(int p_, int q_);

  int dim() const { return p + q + 1; }
};

double bilinear_form(const Vec& x, const Vec& y, const Signature& sig);

// A point of the quadric {b(x,x) = -1}, the double cover of H^{p,q}.
struct QuadricPoint {
  Vec coords;
  Signature sig;
};

// An oriented isotropic ray; the representative has Euclidean norm 1.
struct BoundaryPoint {
  Vec coords;
  Signature sig;
};

QuadricPoint normalize_to_quadric(const Vec& x, const Signature& sig);
BoundaryPoint normalize_to_boundary(const Vec& x, const Signature& sig);

// Unit-speed-in-parameter geodesic through x0 with initial velocity v,
// b(x0, v) = 0. Spacelike v gives the cosh/sinh branch, timelike the
// cos/sin branch, lightlike the straight line x0 + t v; all stay on the
// quadric, lightlike rays reaching the boundary only in the t->inf limit.
QuadricPoint geodesic(const QuadricPoint& x0, const Vec& v, double t);

enum class TripleClass { Positive, NonNegativeDegenerate, NotNonNegative };

struct TripleClassification {
  TripleClass tag;
  Eigen::Vector3d gram_eigenvalues;  // ascending
  double gram_det;
};

// Classifies span(x,y,z) by the inertia of the 3x3 Gram matrix of the
// representatives; eigenvalues inside (-tol, tol) count as zero.
TripleClassification classify_triple(const BoundaryPoint& x,
                                     const BoundaryPoint& y,
                                     const BoundaryPoint& z,
                                     double tol = 1e-10);

// g = k * exp(a(lambda)) * k' with k, k' block-diagonal orthogonal and
// lambda the decreasing vector of m0 = min(p,q) boost parameters.
struct CartanFactors {
  Mat k;
  Mat k_prime;
  Vec lambda;
};

// exp(a(lambda)) as a matrix: boosts pairing positive axis i with negative
// axis p+i for each i < m0.
Mat cartan_exp(const Vec& lambda, int p, int q);

// Cartan decomposition of g in O(p,q) acting on R^{p+q} with form
// diag(I_p, -I_q). Computed through the polar factorization with respect
// to the theta-twisted (Euclidean) inner product.
CartanFactors cartan_decompose(const Mat& g, int p, int q, double tol = 1e-10);

struct BlockEigenvalueCertificate {
  bool certified;
  double witness_eigenvalue;
};

// Assembles phi = [[mu I + A, M^T], [M, mu I + B]] and certifies a positive
// eigenvalue. Preconditions: mu > -1, A and B symmetric traceless, all
// singular values of M >= 1.
BlockEigenvalueCertificate block_positive_eigenvalue_check(double mu,
                                                           const Mat& A,
                                                           const Mat& B,
                                                           const Mat& M);

// Hessian of beta(x,y) = b(x^,y^) along geodesics of two submanifolds:
// (|u1|^2 + |u2|^2) b(x1,x2) + 2 b(u1,u2) + b(II1,x2) + b(x1,II2),
// where II1 = II_1(u1,u1) and II2 = II_2(u2,u2) are supplied by the caller.
double hessian_beta(const QuadricPoint& x1, const QuadricPoint& x2,
                    const Vec& u1, const Vec& u2, const Vec& II1,
                    const Vec& II2);

namespace detail {
// b-orthogonal projection of x onto span(columns of basis); the Gram matrix
// of the basis must be invertible.
Vec b_project(const Vec& x, const Mat& basis, const Signature& sig);

// Form matrix diag(+1 x p, -1 x (q+1)).
Vec form_diagonal(const Signature& sig);
}  // namespace detail

}  // namespace hpq
