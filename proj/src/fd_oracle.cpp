#include "qgband/fd_oracle.hpp"

#include <algorithm>
#include <cmath>

namespace qgband {

namespace {

struct EndpointUse {
  int unknown = -1;     // -1: Dirichlet, value pinned to zero
  Complex coeff = 1.0;  // effective trace = coeff * unknown
};

}  // namespace

DiscreteOperator discretize(const CompactGraph& g, int points_per_unit) {
  if (points_per_unit < 16)
    throw Error(ErrorCode::GridTooCoarse,
                "need at least 16 points per unit length, got " +
                    std::to_string(points_per_unit));

  DiscreteOperator op;
  op.real = g.real_conditions();

  // Unknown layout: one slot per non-Dirichlet vertex, then edge interiors.
  std::vector<int> vertex_unknown(g.vertex_count(), -1);
  int next = 0;
  for (int v = 0; v < g.vertex_count(); ++v)
    if (g.vertex(v).condition.kind != ConditionKind::Dirichlet && g.degree(v) > 0)
      vertex_unknown[v] = next++;

  // Effective trace coefficient of each edge end: conj(z_j) times the vertex
  // unknown under QuasiNK weights, 1 otherwise.
  std::vector<std::array<EndpointUse, 2>> ends(g.edge_count());
  for (int v = 0; v < g.vertex_count(); ++v) {
    const Vertex& vx = g.vertex(v);
    for (size_t j = 0; j < vx.ends.size(); ++j) {
      EndpointUse use;
      use.unknown = vertex_unknown[v];
      if (vx.condition.kind == ConditionKind::QuasiNK)
        use.coeff = std::conj(vx.condition.phases[j]);
      ends[vx.ends[j].edge][vx.ends[j].at_start ? 0 : 1] = use;
    }
  }

  // Per-edge nodes; interval list (node pair, spacing, potential value).
  struct Interval {
    int p, r;
    Complex cp, cr;
    double h, q;
  };
  std::vector<Interval> intervals;
  op.nodes.resize(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    std::vector<int> node_ids;
    std::vector<Complex> node_coeff;
    node_ids.push_back(ends[e][0].unknown);
    node_coeff.push_back(ends[e][0].coeff);
    std::vector<std::pair<double, double>> widths;  // (h, q) per interval
    for (const PotentialSegment& seg : ed.potential) {
      const int n = std::max(1, static_cast<int>(std::lround(points_per_unit * seg.length)));
      const double h = seg.length / n;
      for (int i = 0; i < n; ++i) {
        widths.emplace_back(h, seg.value);
        node_ids.push_back(next);  // provisional; endpoint fixed below
        node_coeff.push_back(1.0);
        ++next;
      }
    }
    // Final node is the edge head, not an interior unknown.
    --next;
    node_ids.back() = ends[e][1].unknown;
    node_coeff.back() = ends[e][1].coeff;
    for (size_t i = 0; i < widths.size(); ++i) {
      Interval iv;
      iv.p = node_ids[i];
      iv.r = node_ids[i + 1];
      iv.cp = node_coeff[i];
      iv.cr = node_coeff[i + 1];
      iv.h = widths[i].first;
      iv.q = widths[i].second;
      intervals.push_back(iv);
    }
    op.nodes[e] = std::move(node_ids);
  }

  op.size = next;
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(op.size, op.size);
  op.mass.assign(op.size, 0.0);

  for (const Interval& iv : intervals) {
    if (iv.p >= 0) {
      q(iv.p, iv.p) += 1.0 / iv.h + 0.5 * iv.h * iv.q;
      op.mass[iv.p] += 0.5 * iv.h;
    }
    if (iv.r >= 0) {
      q(iv.r, iv.r) += 1.0 / iv.h + 0.5 * iv.h * iv.q;
      op.mass[iv.r] += 0.5 * iv.h;
    }
    if (iv.p >= 0 && iv.r >= 0) {
      q(iv.p, iv.r) -= std::conj(iv.cp) * iv.cr / iv.h;
      q(iv.r, iv.p) -= std::conj(iv.cr) * iv.cp / iv.h;
    }
  }
  for (int v = 0; v < g.vertex_count(); ++v) {
    const VertexCondition& c = g.vertex(v).condition;
    if (vertex_unknown[v] >= 0 && c.kind != ConditionKind::Dirichlet)
      q(vertex_unknown[v], vertex_unknown[v]) += c.gamma;
  }

  for (int i = 0; i < op.size; ++i)
    for (int j = 0; j < op.size; ++j)
      q(i, j) /= std::sqrt(op.mass[i] * op.mass[j]);
  op.h = std::move(q);
  return op;
}

std::vector<double> oracle_eigenvalues(const CompactGraph& g,
                                       int points_per_unit, int count) {
  const DiscreteOperator op = discretize(g, points_per_unit);
  Eigen::VectorXd ev;
  if (op.real) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.h.real(),
                                                      Eigen::EigenvaluesOnly);
    ev = es.eigenvalues();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.h,
                                                       Eigen::EigenvaluesOnly);
    ev = es.eigenvalues();
  }
  const int take = std::min<int>(count, ev.size());
  return std::vector<double>(ev.data(), ev.data() + take);
}

}  // namespace qgband
