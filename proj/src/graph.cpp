#include "qgband/graph.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace qgband {

namespace {

void check_condition(const Vertex& v) {
  switch (v.condition.kind) {
    case ConditionKind::Dirichlet:
      break;
    case ConditionKind::DeltaType:
      if (!std::isfinite(v.condition.gamma))
        throw Error(ErrorCode::ConfigInvalid,
                    "non-finite coupling at vertex '" + v.label + "'");
      break;
    case ConditionKind::QuasiNK: {
      if (v.condition.phases.size() != v.ends.size())
        throw Error(ErrorCode::WrongDegree,
                    "vertex '" + v.label + "': " +
                        std::to_string(v.condition.phases.size()) +
                        " phase weights for degree " +
                        std::to_string(v.ends.size()));
      for (const Complex& z : v.condition.phases)
        if (std::abs(std::abs(z) - 1.0) > 1e-12)
          throw Error(ErrorCode::ConfigInvalid,
                      "vertex '" + v.label + "': phase weight off the unit circle");
      if (!std::isfinite(v.condition.gamma))
        throw Error(ErrorCode::ConfigInvalid,
                    "non-finite coupling at vertex '" + v.label + "'");
      break;
    }
  }
}

}  // namespace

CompactGraph::CompactGraph(std::vector<Vertex> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
  for (Vertex& v : vertices_) v.ends.clear();

  const int nv = static_cast<int>(vertices_.size());
  for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
    Edge& ed = edges_[e];
    if (ed.from < 0 || ed.from >= nv)
      throw Error(ErrorCode::UnknownVertex,
                  "edge '" + ed.label + "': bad tail vertex id " +
                      std::to_string(ed.from));
    if (ed.to < 0 || ed.to >= nv)
      throw Error(ErrorCode::UnknownVertex,
                  "edge '" + ed.label + "': bad head vertex id " +
                      std::to_string(ed.to));
    if (!(ed.length > 0.0) || !std::isfinite(ed.length))
      throw Error(ErrorCode::NonPositiveLength,
                  "edge '" + ed.label + "': length must be positive");

    if (ed.potential.empty())
      ed.potential = {PotentialSegment{ed.length, 0.0}};
    double covered = 0.0;
    for (const PotentialSegment& seg : ed.potential) {
      if (!(seg.length > 0.0) || !std::isfinite(seg.length))
        throw Error(ErrorCode::NonPositiveLength,
                    "edge '" + ed.label + "': potential segment length must be positive");
      if (!std::isfinite(seg.value))
        throw Error(ErrorCode::ConfigInvalid,
                    "edge '" + ed.label + "': non-finite potential value");
      covered += seg.length;
    }
    if (std::abs(covered - ed.length) > 1e-12 * std::max(1.0, ed.length))
      throw Error(ErrorCode::ConfigInvalid,
                  "edge '" + ed.label + "': potential segments cover " +
                      std::to_string(covered) + " of length " +
                      std::to_string(ed.length));

    vertices_[ed.from].ends.push_back(EdgeEnd{e, true});
    vertices_[ed.to].ends.push_back(EdgeEnd{e, false});
  }

  total_length_ = 0.0;
  min_edge_length_ = edges_.empty() ? 0.0 : edges_.front().length;
  max_abs_potential_ = 0.0;
  for (const Edge& ed : edges_) {
    total_length_ += ed.length;
    min_edge_length_ = std::min(min_edge_length_, ed.length);
    for (const PotentialSegment& seg : ed.potential)
      max_abs_potential_ = std::max(max_abs_potential_, std::abs(seg.value));
  }

  max_abs_coupling_ = 0.0;
  real_conditions_ = true;
  for (const Vertex& v : vertices_) {
    check_condition(v);
    if (v.condition.kind != ConditionKind::Dirichlet)
      max_abs_coupling_ = std::max(max_abs_coupling_, std::abs(v.condition.gamma));
    if (v.condition.kind == ConditionKind::QuasiNK)
      for (const Complex& z : v.condition.phases)
        if (std::abs(z.imag()) > 0.0) real_conditions_ = false;
  }
}

int CompactGraph::find_vertex(std::string_view label) const {
  for (int v = 0; v < vertex_count(); ++v)
    if (vertices_[v].label == label) return v;
  return -1;
}

int CompactGraph::find_edge(std::string_view label) const {
  for (int e = 0; e < edge_count(); ++e)
    if (edges_[e].label == label) return e;
  return -1;
}

CompactGraph build_gamma1(const std::array<double, 4>& lengths, double gamma_a,
                          double gamma_b,
                          const std::array<std::vector<PotentialSegment>, 4>&
                              potentials) {
  if (!(gamma_a < gamma_b))
    throw Error(ErrorCode::CouplingOrderViolated,
                "require gamma_a < gamma_b, got " + std::to_string(gamma_a) +
                    " >= " + std::to_string(gamma_b));
  std::vector<Vertex> vs(2);
  vs[0].label = "A";
  vs[0].condition = VertexCondition::delta(gamma_a);
  vs[1].label = "B";
  vs[1].condition = VertexCondition::delta(gamma_b);
  std::vector<Edge> es(4);
  for (int j = 0; j < 4; ++j) {
    es[j].label = "e" + std::to_string(j + 1);
    es[j].from = 0;
    es[j].to = 1;
    es[j].length = lengths[j];
    es[j].potential = potentials[j];
  }
  return CompactGraph(std::move(vs), std::move(es));
}

CompactGraph build_gamma2(const std::array<double, 5>& lengths,
                          const std::array<std::vector<PotentialSegment>, 5>&
                              potentials) {
  std::vector<Vertex> vs(3);
  vs[0].label = "A";
  vs[0].condition = VertexCondition::delta(0.0);
  vs[1].label = "B";
  vs[1].condition = VertexCondition::delta(0.0);
  vs[2].label = "C";
  vs[2].condition = VertexCondition::delta(0.0);
  std::vector<Edge> es(5);
  for (int j = 1; j <= 4; ++j) {
    es[j - 1].label = "e" + std::to_string(j);
    es[j - 1].from = 0;
    es[j - 1].to = 1;
    es[j - 1].length = lengths[j];
    es[j - 1].potential = potentials[j];
  }
  es[4].label = "e0";
  es[4].from = 2;
  es[4].to = 0;
  es[4].length = lengths[0];
  es[4].potential = potentials[0];
  return CompactGraph(std::move(vs), std::move(es));
}

CompactGraph dirichlet_perturbation(const CompactGraph& g, int v) {
  if (v < 0 || v >= g.vertex_count())
    throw Error(ErrorCode::UnknownVertex,
                "dirichlet_perturbation: no vertex " + std::to_string(v));
  const Vertex& orig = g.vertex(v);
  const int d = static_cast<int>(orig.ends.size());
  if (d == 0)
    throw Error(ErrorCode::WrongDegree,
                "dirichlet_perturbation: vertex '" + orig.label + "' is isolated");

  std::vector<Vertex> vs;
  vs.reserve(g.vertex_count() + d - 1);
  for (int i = 0; i < g.vertex_count(); ++i) {
    Vertex copy;
    copy.label = g.vertex(i).label;
    copy.condition = g.vertex(i).condition;
    vs.push_back(std::move(copy));
  }
  vs[v].label = orig.label + ".1";
  vs[v].condition = VertexCondition::dirichlet();
  for (int j = 1; j < d; ++j) {
    Vertex extra;
    extra.label = orig.label + "." + std::to_string(j + 1);
    extra.condition = VertexCondition::dirichlet();
    vs.push_back(std::move(extra));
  }

  std::vector<Edge> es;
  es.reserve(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) es.push_back(g.edge(e));
  for (int j = 1; j < d; ++j) {
    const EdgeEnd end = orig.ends[j];
    const int copy_id = g.vertex_count() + j - 1;
    if (end.at_start)
      es[end.edge].from = copy_id;
    else
      es[end.edge].to = copy_id;
  }
  return CompactGraph(std::move(vs), std::move(es));
}

std::vector<int> dirichlet_copy_ids(const CompactGraph& original, int v) {
  if (v < 0 || v >= original.vertex_count())
    throw Error(ErrorCode::UnknownVertex,
                "dirichlet_copy_ids: no vertex " + std::to_string(v));
  const int d = original.degree(v);
  std::vector<int> ids(d);
  ids[0] = v;
  for (int j = 1; j < d; ++j) ids[j] = original.vertex_count() + j - 1;
  return ids;
}

CompactGraph apply_floquet(const CompactGraph& g, int b,
                           const std::array<double, 3>& k, double gamma_b) {
  if (b < 0 || b >= g.vertex_count())
    throw Error(ErrorCode::UnknownVertex,
                "apply_floquet: no vertex " + std::to_string(b));
  if (g.degree(b) != 4)
    throw Error(ErrorCode::WrongDegree,
                "apply_floquet: vertex '" + g.vertex(b).label +
                    "' has degree " + std::to_string(g.degree(b)) +
                    ", need 4");
  std::vector<Complex> phases(4);
  for (int j = 0; j < 3; ++j) {
    const double kj = wrap_angle(k[j]);
    phases[j] = Complex(std::cos(kj), std::sin(kj));
  }
  phases[3] = Complex(1.0, 0.0);
  return with_vertex_condition(g, b,
                               VertexCondition::quasi_nk(std::move(phases), gamma_b));
}

CompactGraph with_vertex_condition(const CompactGraph& g, int v,
                                   VertexCondition condition) {
  if (v < 0 || v >= g.vertex_count())
    throw Error(ErrorCode::UnknownVertex,
                "with_vertex_condition: no vertex " + std::to_string(v));
  std::vector<Vertex> vs;
  vs.reserve(g.vertex_count());
  for (int i = 0; i < g.vertex_count(); ++i) {
    Vertex copy;
    copy.label = g.vertex(i).label;
    copy.condition = (i == v) ? condition : g.vertex(i).condition;
    vs.push_back(std::move(copy));
  }
  std::vector<Edge> es;
  es.reserve(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) es.push_back(g.edge(e));
  return CompactGraph(std::move(vs), std::move(es));
}

double wrap_angle(double x) {
  double y = std::remainder(x, 2.0 * M_PI);
  if (y <= -M_PI) y = M_PI;
  return y;
}

}  // namespace qgband
