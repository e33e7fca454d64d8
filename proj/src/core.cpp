#include "hpq/core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace hpq {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonNegativeNorm: return "NonNegativeNorm";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::RepeatedPoint: return "RepeatedPoint";
    case ErrorCode::NotIsometry: return "NotIsometry";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::OutOfBall: return "OutOfBall";
    case ErrorCode::BadDirection: return "BadDirection";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::DegenerateEdge: return "DegenerateEdge";
    case ErrorCode::NotAdmissible: return "NotAdmissible";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::SpacelikeViolation: return "SpacelikeViolation";
    case ErrorCode::NotNormal: return "NotNormal";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::SpacelikeLost: return "SpacelikeLost";
    case ErrorCode::OutsidePolarDomain: return "OutsidePolarDomain";
    case ErrorCode::LinkNotSpacelike: return "LinkNotSpacelike";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::ProjectionFailed: return "ProjectionFailed";
    case ErrorCode::NotRankOne: return "NotRankOne";
    case ErrorCode::NotElliptic: return "NotElliptic";
    case ErrorCode::NotIncreasing: return "NotIncreasing";
    case ErrorCode::NotSupported: return "NotSupported";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

Signature::Signature(int p_, int q_) : p(p_), q(q_) {
  if (p < 2 || q < 1)
    throw_error(ErrorCode::InvalidParameter,
                "signature requires p >= 2 and q >= 1");
}

double bilinear_form(const Vec& x, const Vec& y, const Signature& sig) {
  const int n = sig.dim();
  if (x.size() != n || y.size() != n)
    throw_error(ErrorCode::DimensionMismatch,
                "vectors must have length p+q+1");
  double pos = 0.0, neg = 0.0;
  for (int i = 0; i < sig.p; ++i) pos += x[i] * y[i];
  for (int i = sig.p; i < n; ++i) neg += x[i] * y[i];
  return pos - neg;
}

namespace detail {

Vec form_diagonal(const Signature& sig) {
  Vec d(sig.dim());
  for (int i = 0; i < sig.dim(); ++i) d[i] = i < sig.p ? 1.0 : -1.0;
  return d;
}

Vec b_project(const Vec& x, const Mat& basis, const Signature& sig) {
  const int k = static_cast<int>(basis.cols());
  Mat gram(k, k);
  Vec rhs(k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j <= i; ++j) {
      gram(i, j) = bilinear_form(basis.col(i), basis.col(j), sig);
      gram(j, i) = gram(i, j);
    }
    rhs[i] = bilinear_form(basis.col(i), x, sig);
  }
  Vec coeff = gram.ldlt().solve(rhs);
  return basis * coeff;
}

}  // namespace detail

QuadricPoint normalize_to_quadric(const Vec& x, const Signature& sig) {
  const double bxx = bilinear_form(x, x, sig);
  if (bxx >= -1e-14)
    throw_error(ErrorCode::NonNegativeNorm,
                "b(x,x) must be negative to normalize onto the quadric");
  return QuadricPoint{x / std::sqrt(-bxx), sig};
}

BoundaryPoint normalize_to_boundary(const Vec& x, const Signature& sig) {
  const double nrm = x.norm();
  if (nrm < 1e-300)
    throw_error(ErrorCode::InvalidParameter, "zero vector has no ray");
  const double bxx = bilinear_form(x, x, sig);
  if (std::abs(bxx) > 1e-10 * nrm * nrm)
    throw_error(ErrorCode::InvalidParameter,
                "boundary representative must be isotropic");
  return BoundaryPoint{x / nrm, sig};
}

QuadricPoint geodesic(const QuadricPoint& x0, const Vec& v, double t) {
  const Signature sig = x0.sig;
  const double bx0v = bilinear_form(x0.coords, v, sig);
  if (std::abs(bx0v) > 1e-10)
    throw_error(ErrorCode::NotOrthogonal, "velocity must satisfy b(x0,v)=0");
  const double bvv = bilinear_form(v, v, sig);
  const double tol = 1e-14 * (1.0 + v.squaredNorm());
  Vec out;
  if (bvv > tol) {
    const double s = std::sqrt(bvv);
    out = std::cosh(t * s) * x0.coords + (std::sinh(t * s) / s) * v;
  } else if (bvv < -tol) {
    const double s = std::sqrt(-bvv);
    out = std::cos(t * s) * x0.coords + (std::sin(t * s) / s) * v;
  } else {
    out = x0.coords + t * v;
  }
  return QuadricPoint{out, sig};
}

TripleClassification classify_triple(const BoundaryPoint& x,
                                     const BoundaryPoint& y,
                                     const BoundaryPoint& z, double tol) {
  const Signature sig = x.sig;
  const BoundaryPoint* pts[3] = {&x, &y, &z};
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if ((pts[i]->coords - pts[j]->coords).norm() < 1e-10)
        throw_error(ErrorCode::RepeatedPoint,
                    "triple points must be pairwise distinct rays");

  Eigen::Matrix3d gram;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      gram(i, j) = bilinear_form(pts[i]->coords, pts[j]->coords, sig);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(gram);
  const Eigen::Vector3d ev = es.eigenvalues();
  const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  int npos = 0, nneg = 0;
  for (int i = 0; i < 3; ++i) {
    if (ev[i] > tol * scale)
      ++npos;
    else if (ev[i] < -tol * scale)
      ++nneg;
  }

  TripleClass tag;
  if (npos == 2 && nneg == 1)
    tag = TripleClass::Positive;
  else if (nneg >= 2)
    tag = TripleClass::NotNonNegative;
  else
    tag = TripleClass::NonNegativeDegenerate;
  return TripleClassification{tag, ev, gram.determinant()};
}

Mat cartan_exp(const Vec& lambda, int p, int q) {
  const int n = p + q;
  const int m0 = std::min(p, q);
  if (lambda.size() != m0)
    throw_error(ErrorCode::DimensionMismatch, "lambda must have min(p,q) entries");
  Mat a = Mat::Identity(n, n);
  for (int i = 0; i < m0; ++i) {
    const double c = std::cosh(lambda[i]);
    const double s = std::sinh(lambda[i]);
    a(i, i) = c;
    a(p + i, p + i) = c;
    a(i, p + i) = s;
    a(p + i, i) = s;
  }
  return a;
}

CartanFactors cartan_decompose(const Mat& g, int p, int q, double tol) {
  const int n = p + q;
  if (g.rows() != n || g.cols() != n)
    throw_error(ErrorCode::DimensionMismatch, "g must be (p+q)x(p+q)");
  Vec theta(n);
  for (int i = 0; i < n; ++i) theta[i] = i < p ? 1.0 : -1.0;
  Mat residual = g.transpose() * theta.asDiagonal() * g;
  residual.diagonal() -= theta;
  if (residual.cwiseAbs().maxCoeff() > tol)
    throw_error(ErrorCode::NotIsometry, "g does not preserve diag(I_p,-I_q)");

  // Global polar factorization g = k exp(X), X = log(g^T g)/2 symmetric,
  // lying in the boost part of the Lie algebra (off-diagonal blocks).
  Eigen::SelfAdjointEigenSolver<Mat> es(g.transpose() * g);
  const Vec logev = es.eigenvalues().array().log() * 0.5;
  Mat X = es.eigenvectors() * logev.asDiagonal() * es.eigenvectors().transpose();
  Mat P = es.eigenvectors() *
          logev.array().exp().matrix().asDiagonal() *
          es.eigenvectors().transpose();
  Mat k = g * P.inverse();

  // X = [[0, m^T], [m, 0]]; SVD of the q x p block gives the boosts.
  Mat m = X.block(p, 0, q, p);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const int m0 = std::min(p, q);
  Vec lambda = Vec::Zero(m0);
  lambda.head(svd.singularValues().size()) = svd.singularValues();

  Mat k2 = Mat::Zero(n, n);
  k2.block(0, 0, p, p) = svd.matrixV();
  k2.block(p, p, q, q) = svd.matrixU();

  CartanFactors out;
  out.lambda = lambda;
  out.k = k * k2;
  out.k_prime = k2.transpose();
  return out;
}

BlockEigenvalueCertificate block_positive_eigenvalue_check(double mu,
                                                           const Mat& A,
                                                           const Mat& B,
                                                           const Mat& M) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || B.rows() != n || B.cols() != n || M.rows() != n ||
      M.cols() != n)
    throw_error(ErrorCode::DimensionMismatch, "blocks must be square n x n");
  const double tol = 1e-9;
  if (mu <= -1.0)
    throw_error(ErrorCode::PreconditionViolation, "mu must exceed -1");
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > tol ||
      (B - B.transpose()).cwiseAbs().maxCoeff() > tol)
    throw_error(ErrorCode::PreconditionViolation, "A and B must be symmetric");
  if (std::abs(A.trace()) > tol * n || std::abs(B.trace()) > tol * n)
    throw_error(ErrorCode::PreconditionViolation, "A and B must be traceless");
  Eigen::JacobiSVD<Mat> svd(M);
  if (svd.singularValues().minCoeff() < 1.0 - tol)
    throw_error(ErrorCode::PreconditionViolation,
                "all singular values of M must be >= 1");

  Mat phi(2 * n, 2 * n);
  phi.block(0, 0, n, n) = mu * Mat::Identity(n, n) + A;
  phi.block(0, n, n, n) = M.transpose();
  phi.block(n, 0, n, n) = M;
  phi.block(n, n, n, n) = mu * Mat::Identity(n, n) + B;

  Eigen::SelfAdjointEigenSolver<Mat> es(phi);
  const double witness = es.eigenvalues().maxCoeff();
  return BlockEigenvalueCertificate{witness > 0.0, witness};
}

double hessian_beta(const QuadricPoint& x1, const QuadricPoint& x2,
                    const Vec& u1, const Vec& u2, const Vec& II1,
                    const Vec& II2) {
  const Signature sig = x1.sig;
  const double n1 = bilinear_form(u1, u1, sig);
  const double n2 = bilinear_form(u2, u2, sig);
  return (n1 + n2) * bilinear_form(x1.coords, x2.coords, sig) +
         2.0 * bilinear_form(u1, u2, sig) +
         bilinear_form(II1, x2.coords, sig) +
         bilinear_form(x1.coords, II2, sig);
}

}  // namespace hpq
