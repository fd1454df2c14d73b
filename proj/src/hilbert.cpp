#include "arh/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace arh {

namespace {

void require_same_dim(const HVector& f, const HVector& g, const char* op) {
  if (f.size() != g.size()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(f.size()) + " vs " +
                                std::to_string(g.size()) + ")");
  }
}

void require_square(const HOperator& a, const char* op) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument(std::string(op) + ": operator must be square (" +
                                std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + ")");
  }
  if (a.rows() == 0) {
    throw std::invalid_argument(std::string(op) + ": operator is empty");
  }
}

// Index of the first coordinate of largest magnitude.
Eigen::Index argmax_abs(const Eigen::Ref<const Eigen::VectorXd>& v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  return best;
}

}  // namespace

double inner_product(const HVector& f, const HVector& g) {
  require_same_dim(f, g, "inner_product");
  // Sequential sum so that coordinate expansions reproduce this value exactly.
  double s = 0.0;
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    s += f[k] * g[k];
  }
  return s;
}

HOperator tensor_product(const HVector& f, const HVector& g) {
  require_same_dim(f, g, "tensor_product");
  // (f (x) g) h = <f, h> g  ==>  matrix g f^T.
  return g * f.transpose();
}

HVector apply(const HOperator& a, const HVector& f) {
  if (a.cols() != f.size()) {
    throw std::invalid_argument("apply: operator/vector dimension mismatch (" +
                                std::to_string(a.cols()) + " vs " +
                                std::to_string(f.size()) + ")");
  }
  return a * f;
}

HOperator compose(const HOperator& a, const HOperator& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("compose: inner dimension mismatch (" +
                                std::to_string(a.cols()) + " vs " +
                                std::to_string(b.rows()) + ")");
  }
  return a * b;
}

HOperator adjoint(const HOperator& a) { return a.transpose(); }

double operator_norm(const HOperator& a) {
  require_square(a, "operator_norm");
  Eigen::JacobiSVD<HOperator> dec(a);  // singular values only
  return dec.singularValues()(0);
}

double hs_norm(const HOperator& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

double trace_norm(const HOperator& a) {
  require_square(a, "trace_norm");
  Eigen::JacobiSVD<HOperator> dec(a);
  return dec.singularValues().sum();
}

EigenSystem eigen_sym(const HOperator& a) {
  require_square(a, "eigen_sym");
  const double scale = std::max(hs_norm(a), 1.0);
  if (hs_norm(a - a.transpose()) > kSymTol * scale) {
    throw std::invalid_argument("eigen_sym: operator is not symmetric within tolerance");
  }
  // Symmetrize before factoring so the solver sees an exactly symmetric input.
  Eigen::SelfAdjointEigenSolver<HOperator> solver(0.5 * (a + a.transpose()));
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigen_sym: eigendecomposition failed to converge");
  }
  EigenSystem sys;
  sys.values = solver.eigenvalues().reverse();          // non-increasing
  sys.vectors = solver.eigenvectors().rowwise().reverse();
  for (Eigen::Index j = 0; j < sys.vectors.cols(); ++j) {
    auto col = sys.vectors.col(j);
    if (col[argmax_abs(col)] < 0.0) {
      col = -col;
    }
  }
  return sys;
}

SvdSystem svd(const HOperator& a) {
  require_square(a, "svd");
  Eigen::JacobiSVD<HOperator> dec(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdSystem sys;
  sys.singular_values = dec.singularValues();
  sys.left_vectors = dec.matrixU();
  sys.right_vectors = dec.matrixV();
  for (Eigen::Index j = 0; j < sys.right_vectors.cols(); ++j) {
    auto v = sys.right_vectors.col(j);
    auto u = sys.left_vectors.col(j);
    // Canonicalize the right vector; flip the pair jointly to preserve
    // A v_j = sigma_j u_j.
    if (v[argmax_abs(v)] < 0.0) {
      v = -v;
      u = -u;
    }
    // A zero singular value leaves the left vector's sign unconstrained.
    if (sys.singular_values[j] == 0.0 && u[argmax_abs(u)] < 0.0) {
      u = -u;
    }
  }
  return sys;
}

}  // namespace arh
