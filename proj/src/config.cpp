#include "qgband/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace qgband {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ConfigInvalid, path + ": " + what);
}

const json& member(const json& obj, const std::string& path,
                   const char* key) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

VertexCondition parse_condition(const json& j, const std::string& path) {
  const std::string kind = text(member(j, path, "kind"), path + ".kind");
  if (kind == "dirichlet") {
    return VertexCondition::dirichlet();
  }
  if (kind == "delta") {
    const double gamma =
        j.contains("gamma") ? number(j["gamma"], path + ".gamma") : 0.0;
    return VertexCondition::delta(gamma);
  }
  if (kind == "quasi_nk") {
    const json& ph = member(j, path, "phases");
    if (!ph.is_array()) fail(path + ".phases", "expected an array");
    std::vector<Complex> phases;
    for (size_t i = 0; i < ph.size(); ++i) {
      const std::string p = path + ".phases[" + std::to_string(i) + "]";
      if (!ph[i].is_array() || ph[i].size() != 2) fail(p, "expected [re, im]");
      phases.emplace_back(number(ph[i][0], p + "[0]"),
                          number(ph[i][1], p + "[1]"));
    }
    const double gamma =
        j.contains("gamma") ? number(j["gamma"], path + ".gamma") : 0.0;
    return VertexCondition::quasi_nk(std::move(phases), gamma);
  }
  fail(path + ".kind", "unknown kind '" + kind + "'");
}

CompactGraph parse_graph(const json& root) {
  const std::string schema =
      text(member(root, "$", "schema"), "$.schema");
  if (schema != "qgband-config-1")
    fail("$.schema", "unsupported schema '" + schema + "'");

  const json& jv = member(root, "$", "vertices");
  if (!jv.is_array() || jv.empty()) fail("$.vertices", "expected a non-empty array");
  std::vector<Vertex> vertices;
  for (size_t i = 0; i < jv.size(); ++i) {
    const std::string path = "$.vertices[" + std::to_string(i) + "]";
    Vertex v;
    v.label = text(member(jv[i], path, "id"), path + ".id");
    v.condition = parse_condition(member(jv[i], path, "condition"),
                                  path + ".condition");
    vertices.push_back(std::move(v));
  }

  const auto vertex_index = [&](const std::string& id,
                                const std::string& path) {
    for (size_t v = 0; v < vertices.size(); ++v)
      if (vertices[v].label == id) return static_cast<int>(v);
    fail(path, "unknown vertex id '" + id + "'");
  };

  const json& je = member(root, "$", "edges");
  if (!je.is_array()) fail("$.edges", "expected an array");
  std::vector<Edge> edges;
  for (size_t i = 0; i < je.size(); ++i) {
    const std::string path = "$.edges[" + std::to_string(i) + "]";
    Edge e;
    e.label = text(member(je[i], path, "id"), path + ".id");
    e.from = vertex_index(text(member(je[i], path, "from"), path + ".from"),
                          path + ".from");
    e.to = vertex_index(text(member(je[i], path, "to"), path + ".to"),
                        path + ".to");
    e.length = number(member(je[i], path, "length"), path + ".length");
    if (je[i].contains("potential")) {
      const json& jp = je[i]["potential"];
      if (!jp.is_array()) fail(path + ".potential", "expected an array");
      for (size_t s = 0; s < jp.size(); ++s) {
        const std::string p = path + ".potential[" + std::to_string(s) + "]";
        if (!jp[s].is_array() || jp[s].size() != 2) fail(p, "expected [len, q]");
        e.potential.push_back(PotentialSegment{number(jp[s][0], p + "[0]"),
                                               number(jp[s][1], p + "[1]")});
      }
    }
    edges.push_back(std::move(e));
  }

  try {
    return CompactGraph(std::move(vertices), std::move(edges));
  } catch (const Error& err) {
    fail("$", err.what());
  }
}

json condition_to_json(const VertexCondition& c) {
  json j;
  switch (c.kind) {
    case ConditionKind::Dirichlet:
      j["kind"] = "dirichlet";
      break;
    case ConditionKind::DeltaType:
      j["kind"] = "delta";
      j["gamma"] = c.gamma;
      break;
    case ConditionKind::QuasiNK: {
      j["kind"] = "quasi_nk";
      j["gamma"] = c.gamma;
      json ph = json::array();
      for (const Complex& z : c.phases)
        ph.push_back(json::array({z.real(), z.imag()}));
      j["phases"] = std::move(ph);
      break;
    }
  }
  return j;
}

}  // namespace

CompactGraph graph_from_json_text(const std::string& content) {
  json root;
  try {
    root = json::parse(content);
  } catch (const json::parse_error& err) {
    // byte offset -> line/column, the parser does not track lines itself
    size_t line = 1, col = 1;
    for (size_t i = 0; i < content.size() && i + 1 < err.byte; ++i) {
      if (content[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::ConfigInvalid,
                "line " + std::to_string(line) + ", column " +
                    std::to_string(col) + ": " + err.what());
  }
  return parse_graph(root);
}

CompactGraph graph_from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigInvalid, path + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return graph_from_json_text(buf.str());
}

std::string graph_to_json_text(const CompactGraph& g) {
  json root;
  root["schema"] = "qgband-config-1";
  json jv = json::array();
  for (int v = 0; v < g.vertex_count(); ++v) {
    json item;
    item["id"] = g.vertex(v).label;
    item["condition"] = condition_to_json(g.vertex(v).condition);
    jv.push_back(std::move(item));
  }
  root["vertices"] = std::move(jv);
  json je = json::array();
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    json item;
    item["id"] = ed.label;
    item["from"] = g.vertex(ed.from).label;
    item["to"] = g.vertex(ed.to).label;
    item["length"] = ed.length;
    json jp = json::array();
    for (const PotentialSegment& seg : ed.potential)
      jp.push_back(json::array({seg.length, seg.value}));
    item["potential"] = std::move(jp);
    je.push_back(std::move(item));
  }
  root["edges"] = std::move(je);
  return root.dump(2) + "\n";
}

uint64_t config_hash(const CompactGraph& g) {
  const std::string s = graph_to_json_text(g);
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hash_hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Preset load_preset(const std::string& name) {
  if (name == "gamma1-equilateral") {
    return Preset{name, build_gamma1({1.0, 1.0, 1.0, 1.0}, 0.0, 1.0), "A", "B",
                  1.0};
  }
  if (name == "gamma2-equilateral") {
    return Preset{name, build_gamma2({1.0, 1.0, 1.0, 1.0, 1.0}), "A", "B", 0.0};
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown preset '" + name + "'");
}

PolygonSpec preset_polygon(const std::string& name) {
  if (name == "fig5-polygon") return PolygonSpec{{1.1, 0.95, 0.9, 1.0}};
  throw Error(ErrorCode::ConfigInvalid, "unknown polygon preset '" + name + "'");
}

std::vector<std::string> preset_names() {
  return {"gamma1-equilateral", "gamma2-equilateral"};
}

std::vector<std::string> polygon_preset_names() { return {"fig5-polygon"}; }

}  // namespace qgband
