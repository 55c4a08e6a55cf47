#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qgband/graph.hpp"
#include "qgband/polygon.hpp"

namespace qgband {

/// Structured-text graph description, schema "qgband-config-1":
///   { "schema": "qgband-config-1",
///     "vertices": [ { "id", "condition": { "kind": "dirichlet" | "delta" |
///                     "quasi_nk", "gamma"?, "phases"?: [[re,im],...] } } ],
///     "edges":    [ { "id", "from", "to", "length",
///                     "potential"?: [[len,q],...] } ] }
/// Vertex adjacency follows edge listing order (from-end before to-end).
/// Parse failures throw ConfigInvalid with a line/field diagnostic.
CompactGraph graph_from_json_text(const std::string& text);
CompactGraph graph_from_json_file(const std::string& path);

/// Canonical serialization: object keys sorted, shortest round-trip numbers.
/// Hash input and cache key.
std::string graph_to_json_text(const CompactGraph& g);

/// FNV-1a (64-bit) digest of the canonical serialization.
uint64_t config_hash(const CompactGraph& g);
std::string hash_hex(uint64_t h);

struct Preset {
  std::string name;
  CompactGraph graph;
  std::string vertex_a;  // decoupling order: lambda_1 rises from b to a
  std::string vertex_b;  // cell-boundary vertex carrying the phases
  double gamma_b = 0.0;
};

/// `gamma1-equilateral` (unit lengths, couplings 0 and 1) or
/// `gamma2-equilateral` (unit lengths, zero couplings, pendant tail).
/// Unknown names throw ConfigInvalid.
Preset load_preset(const std::string& name);

/// `fig5-polygon` = (1.1, 0.95, 0.9, 1).
PolygonSpec preset_polygon(const std::string& name);

std::vector<std::string> preset_names();
std::vector<std::string> polygon_preset_names();

}  // namespace qgband
