#include "arh/hilbert.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace arh;

namespace {

HVector vec3(double a, double b, double c) {
  HVector v(3);
  v << a, b, c;
  return v;
}

// Deterministic dense operator with entries in [-1, 1].
HOperator random_operator(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  HOperator a(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      a(i, j) = u(rng);
    }
  }
  return a;
}

HVector random_vector(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  HVector v(d);
  for (int i = 0; i < d; ++i) {
    v[i] = u(rng);
  }
  return v;
}

}  // namespace

TEST_CASE("inner product matches hand-computed values and rejects mismatches") {
  CHECK(inner_product(vec3(1, 2, 3), vec3(4, 5, 6)) == 32.0);
  CHECK(inner_product(vec3(1, 0, 0), vec3(0, 1, 0)) == 0.0);
  CHECK_THROWS_AS(inner_product(vec3(1, 2, 3), HVector::Zero(2)), std::invalid_argument);
}

TEST_CASE("inner product equals its coordinate expansion exactly") {
  // Parseval-style identity: expanding both vectors against the canonical
  // basis and summing coordinate products must reproduce inner_product with
  // no floating-point slack, because both sides sum the same terms in the
  // same order.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int d = 17;
    const HVector f = random_vector(d, 2 * seed);
    const HVector g = random_vector(d, 2 * seed + 1);
    double expansion = 0.0;
    for (int k = 0; k < d; ++k) {
      HVector e = HVector::Zero(d);
      e[k] = 1.0;
      expansion += inner_product(f, e) * inner_product(g, e);
    }
    CHECK(inner_product(f, g) == expansion);
  }
}

TEST_CASE("tensor product acts as h -> <f, h> g") {
  const HVector f = vec3(1, 2, 0);
  const HVector g = vec3(0, 1, 1);
  const HOperator t = tensor_product(f, g);
  const HVector h = vec3(3, -1, 2);
  const HVector expect = inner_product(f, h) * g;  // <f,h> = 1
  CHECK((apply(t, h) - expect).norm() == 0.0);
  // Rank-one norms: ||f (x) g|| = ||f|| ||g|| in HS and uniform norm.
  const double product = f.norm() * g.norm();
  CHECK(hs_norm(t) == doctest::Approx(product).epsilon(1e-12));
  CHECK(operator_norm(t) == doctest::Approx(product).epsilon(1e-12));
}

TEST_CASE("apply, compose, adjoint obey dimension contracts") {
  const HOperator a = random_operator(4, 7);
  const HOperator b = random_operator(4, 8);
  const HVector x = random_vector(4, 9);
  CHECK((apply(compose(a, b), x) - apply(a, apply(b, x))).norm() < 1e-12);
  CHECK((adjoint(adjoint(a)) - a).norm() == 0.0);
  // <a f, g> = <f, a* g>
  const HVector f = random_vector(4, 10);
  const HVector g = random_vector(4, 11);
  CHECK(inner_product(apply(a, f), g) ==
        doctest::Approx(inner_product(f, apply(adjoint(a), g))).epsilon(1e-12));
  CHECK_THROWS_AS(apply(a, HVector::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(compose(a, HOperator::Zero(3, 3)), std::invalid_argument);
}

TEST_CASE("norms of diag(1, -2, 3) match closed forms") {
  HOperator a = HOperator::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = -2.0;
  a(2, 2) = 3.0;
  CHECK(trace_norm(a) == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(hs_norm(a) == doctest::Approx(std::sqrt(14.0)).epsilon(1e-14));
  CHECK(operator_norm(a) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("norm chain op <= hs <= trace on random operators") {
  std::mt19937_64 seeds(123);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + static_cast<int>(seeds() % 49);
    const HOperator a = random_operator(d, seeds());
    const double op = operator_norm(a);
    const double hs = hs_norm(a);
    const double tr = trace_norm(a);
    CHECK(op <= hs * (1 + 1e-12));
    CHECK(hs <= tr * (1 + 1e-12));
  }
}

TEST_CASE("eigen_sym recovers the spectrum of [[2,1],[1,2]]") {
  HOperator a(2, 2);
  a << 2, 1, 1, 2;
  const EigenSystem sys = eigen_sym(a);
  CHECK(sys.values(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(sys.values(1) == doctest::Approx(1.0).epsilon(1e-14));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  // Canonical signs: first largest-magnitude coordinate positive.
  CHECK(sys.vector(0)(0) == doctest::Approx(inv_sqrt2).epsilon(1e-14));
  CHECK(sys.vector(0)(1) == doctest::Approx(inv_sqrt2).epsilon(1e-14));
  CHECK(sys.vector(1)(0) == doctest::Approx(inv_sqrt2).epsilon(1e-14));
  CHECK(sys.vector(1)(1) == doctest::Approx(-inv_sqrt2).epsilon(1e-14));
}

TEST_CASE("eigen_sym rejects a visibly asymmetric operator") {
  HOperator a(2, 2);
  a << 1, 0.5, 0.1, 1;  // asymmetry far above the relative tolerance
  CHECK_THROWS_AS(eigen_sym(a), std::invalid_argument);
}

TEST_CASE("eigen_sym reconstructs symmetric operators") {
  std::mt19937_64 seeds(321);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + static_cast<int>(seeds() % 20);
    const HOperator raw = random_operator(d, seeds());
    const HOperator a = 0.5 * (raw + raw.transpose());
    const EigenSystem sys = eigen_sym(a);
    // Non-increasing values.
    for (int j = 1; j < d; ++j) {
      CHECK(sys.values(j) <= sys.values(j - 1));
    }
    // Orthonormal vectors.
    CHECK(hs_norm(sys.vectors.transpose() * sys.vectors - HOperator::Identity(d, d)) < 1e-12);
    // Reconstruction within the relative tolerance.
    const HOperator rebuilt =
        sys.vectors * sys.values.asDiagonal() * sys.vectors.transpose();
    CHECK(hs_norm(rebuilt - a) <= kRecTol * std::max(hs_norm(a), 1.0));
  }
}

TEST_CASE("svd of diag(-2, 1) gives singular values (2, 1)") {
  HOperator a(2, 2);
  a << -2, 0, 0, 1;
  const SvdSystem sys = svd(a);
  CHECK(sys.singular_values(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(sys.singular_values(1) == doctest::Approx(1.0).epsilon(1e-14));
  // a e0 = -2 e0: right vector canonicalizes to +e0, left picks up the sign.
  CHECK(sys.right(0)(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sys.left(0)(0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK((apply(a, sys.right(0)) - sys.singular_values(0) * sys.left(0)).norm() < 1e-14);
}

TEST_CASE("svd reconstructs and is consistent with an independent solver") {
  std::mt19937_64 seeds(777);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + static_cast<int>(seeds() % 20);
    const HOperator a = random_operator(d, seeds());
    const SvdSystem sys = svd(a);
    for (int j = 1; j < d; ++j) {
      CHECK(sys.singular_values(j) <= sys.singular_values(j - 1));
      CHECK(sys.singular_values(j) >= 0.0);
    }
    CHECK(hs_norm(sys.right_vectors.transpose() * sys.right_vectors -
                  HOperator::Identity(d, d)) < 1e-12);
    CHECK(hs_norm(sys.left_vectors.transpose() * sys.left_vectors -
                  HOperator::Identity(d, d)) < 1e-12);
    const HOperator rebuilt = sys.left_vectors * sys.singular_values.asDiagonal() *
                              sys.right_vectors.transpose();
    CHECK(hs_norm(rebuilt - a) <= kRecTol * std::max(hs_norm(a), 1.0));
    // Independent oracle: a bidiagonalization-based solver must agree on the
    // singular values.
    const Eigen::BDCSVD<HOperator> oracle(a);
    CHECK((sys.singular_values - oracle.singularValues()).cwiseAbs().maxCoeff() <
          1e-10 * std::max(1.0, sys.singular_values(0)));
  }
}

TEST_CASE("norm identities against singular values") {
  std::mt19937_64 seeds(999);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 3 + static_cast<int>(seeds() % 10);
    const HOperator a = random_operator(d, seeds());
    const Eigen::VectorXd sv = svd(a).singular_values;
    CHECK(operator_norm(a) == doctest::Approx(sv(0)).epsilon(1e-12));
    CHECK(hs_norm(a) == doctest::Approx(sv.norm()).epsilon(1e-12));
    CHECK(trace_norm(a) == doctest::Approx(sv.sum()).epsilon(1e-12));
  }
}
