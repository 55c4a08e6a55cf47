#pragma once

#include <array>
#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "qgband/errors.hpp"

namespace qgband {

using Complex = std::complex<double>;

enum class ConditionKind { Dirichlet, DeltaType, QuasiNK };

/// Matching condition at a vertex.
///  - Dirichlet: u(v) = 0 on every incident end; ends decouple.
///  - DeltaType: u continuous across the vertex, sum of inward derivatives
///    equals gamma * u(v).  gamma = 0 is the Neumann-Kirchhoff condition.
///  - QuasiNK: z_1 u_1(v) = ... = z_d u_d(v) =: U and
///    sum_j z_j u_j'(v) = gamma * U, with unit-modulus weights z_j listed in
///    the vertex's adjacency order.
struct VertexCondition {
  ConditionKind kind = ConditionKind::DeltaType;
  double gamma = 0.0;
  std::vector<Complex> phases;  // QuasiNK only; one per incident end

  static VertexCondition dirichlet() {
    VertexCondition c;
    c.kind = ConditionKind::Dirichlet;
    return c;
  }
  static VertexCondition delta(double gamma) {
    VertexCondition c;
    c.kind = ConditionKind::DeltaType;
    c.gamma = gamma;
    return c;
  }
  static VertexCondition quasi_nk(std::vector<Complex> phases, double gamma) {
    VertexCondition c;
    c.kind = ConditionKind::QuasiNK;
    c.gamma = gamma;
    c.phases = std::move(phases);
    return c;
  }
};

/// One piece of a piecewise-constant potential: `value` on an interval of
/// the given length.
struct PotentialSegment {
  double length = 0.0;
  double value = 0.0;
};

/// Metric edge, parametrised by x in [0, length]; `from` sits at x = 0.
/// `potential` segments tile [0, length] in order; empty means q = 0.
struct Edge {
  std::string label;
  int from = -1;
  int to = -1;
  double length = 0.0;
  std::vector<PotentialSegment> potential;
};

/// One end of an edge: (edge index, whether the x = 0 end).
struct EdgeEnd {
  int edge = -1;
  bool at_start = true;

  friend bool operator==(const EdgeEnd&, const EdgeEnd&) = default;
};

struct Vertex {
  std::string label;
  VertexCondition condition;
  std::vector<EdgeEnd> ends;  // adjacency, in edge-insertion order
};

/// Compact metric graph with vertex conditions.  Immutable once built, so
/// instances can be shared freely across parallel workers.  Adjacency lists
/// are derived from the edge list: each edge appends its x = 0 end to `from`
/// and then its x = length end to `to`; QuasiNK phase vectors follow that
/// order.
class CompactGraph {
public:
  CompactGraph(std::vector<Vertex> vertices, std::vector<Edge> edges);

  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const Vertex& vertex(int v) const { return vertices_.at(v); }
  const Edge& edge(int e) const { return edges_.at(e); }
  int degree(int v) const { return static_cast<int>(vertices_.at(v).ends.size()); }
  const std::vector<EdgeEnd>& ends_at(int v) const { return vertices_.at(v).ends; }

  double total_length() const { return total_length_; }
  double min_edge_length() const { return min_edge_length_; }
  double max_abs_coupling() const { return max_abs_coupling_; }
  double max_abs_potential() const { return max_abs_potential_; }

  /// True when every condition is real (Dirichlet, delta, or QuasiNK with
  /// real phases); the secular matrix can then be assembled over the reals.
  bool real_conditions() const { return real_conditions_; }

  int find_vertex(std::string_view label) const;  // -1 when absent
  int find_edge(std::string_view label) const;

private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  double total_length_ = 0.0;
  double min_edge_length_ = 0.0;
  double max_abs_coupling_ = 0.0;
  double max_abs_potential_ = 0.0;
  bool real_conditions_ = true;
};

/// Star-plus-window family: vertices A, B joined by four parallel edges
/// e1..e4 oriented from A, with delta couplings gamma_a at A and gamma_b at
/// B.  Requires gamma_a < gamma_b.
CompactGraph build_gamma1(const std::array<double, 4>& lengths, double gamma_a,
                          double gamma_b,
                          const std::array<std::vector<PotentialSegment>, 4>&
                              potentials = {});

/// Same four-edge core with Neumann-Kirchhoff couplings and a pendant tail:
/// edge e0 of length `lengths[0]` runs from C (Neumann end) to A; e1..e4 use
/// lengths[1..4].
CompactGraph build_gamma2(const std::array<double, 5>& lengths,
                          const std::array<std::vector<PotentialSegment>, 5>&
                              potentials = {});

/// Replaces vertex v of degree d by d Dirichlet vertices, one per incident
/// end in adjacency order.  Copy j keeps v's slot for j = 0 and is appended
/// at the back otherwise; see dirichlet_copy_ids.
CompactGraph dirichlet_perturbation(const CompactGraph& g, int v);

/// Vertex ids of the Dirichlet copies created by dirichlet_perturbation,
/// indexed by position in v's adjacency list of the original graph.
std::vector<int> dirichlet_copy_ids(const CompactGraph& original, int v);

/// Fiber graph at quasimomentum k: vertex b (degree 4 required) gets the
/// QuasiNK condition with weights (e^{ik1}, e^{ik2}, e^{ik3}, 1) in adjacency
/// order and coupling gamma_b.  Components of k are wrapped to (-pi, pi].
CompactGraph apply_floquet(const CompactGraph& g, int b,
                           const std::array<double, 3>& k, double gamma_b);

/// Copy of g with the condition at v replaced.
CompactGraph with_vertex_condition(const CompactGraph& g, int v,
                                   VertexCondition condition);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double x);

}  // namespace qgband
