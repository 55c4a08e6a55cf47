#include <cmath>
#include <optional>

#include "doctest.h"
#include "qgband/fd_oracle.hpp"
#include "qgband/graph.hpp"
#include "qgband/secular.hpp"

using namespace qgband;

namespace {

CompactGraph interval(double len, VertexCondition left, VertexCondition right,
                      std::vector<PotentialSegment> pot = {}) {
  std::vector<Vertex> vs(2);
  vs[0].label = "L";
  vs[0].condition = std::move(left);
  vs[1].label = "R";
  vs[1].condition = std::move(right);
  std::vector<Edge> es(1);
  es[0] = {"e", 0, 1, len, std::move(pot)};
  return CompactGraph(std::move(vs), std::move(es));
}

}  // namespace

TEST_CASE("grid operator rejects too-coarse resolutions") {
  const CompactGraph g = interval(1.0, VertexCondition::dirichlet(),
                                  VertexCondition::dirichlet());
  CHECK_THROWS_AS(discretize(g, 8), Error);
  CHECK_NOTHROW(discretize(g, 16));
}

TEST_CASE("clamped interval converges at second order") {
  const CompactGraph g = interval(1.0, VertexCondition::dirichlet(),
                                  VertexCondition::dirichlet());
  const auto coarse = oracle_eigenvalues(g, 100, 2);
  const auto fine = oracle_eigenvalues(g, 200, 2);
  for (int i = 0; i < 2; ++i) {
    const double exact = (i + 1) * (i + 1) * M_PI * M_PI;
    const double ratio = (coarse[i] - exact) / (fine[i] - exact);
    CHECK(std::abs(fine[i] - exact) < 5e-3);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
  }
}

TEST_CASE("free interval reproduces the flat mode exactly") {
  const CompactGraph g =
      interval(1.0, VertexCondition::delta(0.0), VertexCondition::delta(0.0));
  const auto lam = oracle_eigenvalues(g, 64, 2);
  CHECK(std::abs(lam[0]) < 1e-10);  // constant vector is in the kernel
  CHECK(lam[1] == doctest::Approx(M_PI * M_PI).epsilon(2e-3));
}

TEST_CASE("coupling terms land on the vertex diagonal") {
  // Robin problem beta cos beta + sin beta = 0 has lambda_1 ~ 4.1159
  const CompactGraph g =
      interval(1.0, VertexCondition::dirichlet(), VertexCondition::delta(1.0));
  const auto sec = flatten(eigenvalues_in(g, 1.0, 10.0));
  const auto lam = oracle_eigenvalues(g, 200, 1);
  REQUIRE(!sec.empty());
  CHECK(lam[0] == doctest::Approx(sec[0]).epsilon(2e-3));
}

TEST_CASE("piecewise potentials and the secular solver agree") {
  const CompactGraph g =
      interval(2.0, VertexCondition::delta(0.0), VertexCondition::delta(-1.5),
               {{0.75, 3.0}, {0.5, -2.0}, {0.75, 0.5}});
  const auto sec = flatten(eigenvalues_in(g, default_lambda_lo(g), 30.0));
  const auto lam = oracle_eigenvalues(g, 300, 4);
  REQUIRE(sec.size() >= 4);
  for (int i = 0; i < 4; ++i)
    CHECK(lam[i] == doctest::Approx(sec[i]).epsilon(5e-3));
}

TEST_CASE("star graph spectrum matches the secular solver") {
  const CompactGraph g = build_gamma1({1.0, 1.2, 0.8, 1.1}, 0.0, 1.0);
  const auto sec = flatten(first_eigenvalues(g, 5));
  const auto lam = oracle_eigenvalues(g, 240, 5);
  for (int i = 0; i < 5; ++i)
    CHECK(std::abs(lam[i] - sec[i]) < 5e-3 * std::max(1.0, std::abs(sec[i])));
}

TEST_CASE("complex fiber weights keep the operator hermitian") {
  const CompactGraph g = build_gamma1({1.0, 1.3, 0.9, 1.15}, 0.0, 1.0);
  const CompactGraph fiber = apply_floquet(g, 1, {0.7, -1.3, 2.1}, 1.0);
  const DiscreteOperator op = discretize(fiber, 60);
  REQUIRE(!op.real);
  CHECK((op.h - op.h.adjoint()).norm() == 0.0);

  const auto sec = flatten(eigenvalues_in(fiber, -1.0, 8.0));
  const auto lam = oracle_eigenvalues(fiber, 240, 2);
  REQUIRE(sec.size() >= 2);
  for (int i = 0; i < 2; ++i)
    CHECK(lam[i] == doctest::Approx(sec[i]).epsilon(5e-3));
}

TEST_CASE("tailed graph spectrum matches the secular solver") {
  const CompactGraph g = build_gamma2({0.8, 1.0, 1.1, 0.95, 1.2});
  const auto sec = flatten(first_eigenvalues(g, 4));
  const auto lam = oracle_eigenvalues(g, 200, 4);
  CHECK(std::abs(sec[0]) < 1e-9);  // free graph keeps the constant mode
  CHECK(std::abs(lam[0]) < 1e-9);
  for (int i = 1; i < 4; ++i)
    CHECK(std::abs(lam[i] - sec[i]) < 5e-3 * std::max(1.0, sec[i]));
}
