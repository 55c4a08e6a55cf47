// qgband: band structure of Z^3-periodic quantum graphs.
//
// Subcommands: validate | spectrum | sweep | gap | curve | polygon |
// perturb | oracle.  All outputs use 12 significant digits; identical
// invocations produce byte-identical artifacts.  Exit codes: 0 ok,
// 2 config error, 3 solver error.

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qgband/band_edge.hpp"
#include "qgband/config.hpp"
#include "qgband/dispersion.hpp"
#include "qgband/fd_oracle.hpp"
#include "qgband/format.hpp"
#include "qgband/graph.hpp"
#include "qgband/polygon.hpp"
#include "qgband/secular.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qgband;

namespace {

// Round through the 12-digit text form so JSON artifacts stay short and
// identical across runs.
double json_num(double x) { return std::strtod(format_g12(x).c_str(), nullptr); }

json json_k(const std::array<double, 3>& k) {
  return json::array({json_num(k[0]), json_num(k[1]), json_num(k[2])});
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::ConfigInvalid, "cannot write " + path.string());
  out << content;
}

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::NonPositiveLength:
    case ErrorCode::CouplingOrderViolated:
    case ErrorCode::UnknownVertex:
    case ErrorCode::WrongDegree:
      return 2;
    default:
      return 3;
  }
}

const char* topology_name(CurveTopology t) {
  switch (t) {
    case CurveTopology::OneCircle: return "one-circle";
    case CurveTopology::TwoCircles: return "two-circles";
    case CurveTopology::TwoCirclesOnePoint: return "two-circles-one-point";
    case CurveTopology::TwoCirclesTwoPoints: return "two-circles-two-points";
    case CurveTopology::ThreeCirclesPairwise: return "three-circles-pairwise";
    case CurveTopology::Unclassified: return "unclassified";
  }
  return "unclassified";
}

struct Target {
  CompactGraph g;
  int a = -1;
  int b = -1;
  double gamma_b = 0.0;
  std::string hash;
};

Target resolve_target(const std::string& config_path,
                      const std::string& preset_name,
                      const std::string& vertex_a,
                      const std::string& vertex_b) {
  if (config_path.empty() == preset_name.empty())
    throw Error(ErrorCode::ConfigInvalid,
                "exactly one of --config or --preset is required");
  std::string label_a = vertex_a, label_b = vertex_b;
  std::optional<CompactGraph> g;
  if (!preset_name.empty()) {
    Preset p = load_preset(preset_name);
    if (label_a.empty()) label_a = p.vertex_a;
    if (label_b.empty()) label_b = p.vertex_b;
    g = std::move(p.graph);
  } else {
    g = graph_from_json_file(config_path);
    if (label_a.empty()) label_a = "A";
    if (label_b.empty()) label_b = "B";
  }
  Target t{std::move(*g), -1, -1, 0.0, ""};
  t.a = t.g.find_vertex(label_a);
  t.b = t.g.find_vertex(label_b);
  if (t.b < 0)
    throw Error(ErrorCode::UnknownVertex, "no vertex '" + label_b + "'");
  t.gamma_b = t.g.vertex(t.b).condition.gamma;
  t.hash = hash_hex(config_hash(t.g));
  return t;
}

int require_vertex(const Target& t, int v, const char* which) {
  if (v < 0)
    throw Error(ErrorCode::UnknownVertex,
                std::string("vertex for ") + which + " not found");
  return v;
}

GridSpec grid_from(const std::vector<int>& g) {
  return GridSpec{g.at(0), g.at(1), g.at(2)};
}

// lambda_1 of the Floquet fiber at each k, sharing one transfer-table set.
// `top` must exceed every requested eigenvalue.
std::vector<double> lambda1_batch(const CompactGraph& g, int b, double gamma_b,
                                  const std::vector<std::array<double, 3>>& ks,
                                  double top) {
  const CompactGraph probe = apply_floquet(g, b, {0.0, 0.0, 0.0}, gamma_b);
  const double s_lo = scan_s_of_lambda(default_lambda_lo(probe));
  const double s_hi = scan_s_of_lambda(top);
  const double step = (M_PI / probe.total_length()) / 20.0;
  const int n = std::max(3, static_cast<int>(std::ceil((s_hi - s_lo) / step)) + 1);
  const double h = (s_hi - s_lo) / (n - 1);
  std::vector<TransferTable> tables;
  tables.reserve(n);
  for (int i = 0; i < n; ++i)
    tables.push_back(make_transfer_table(probe, scan_lambda_of_s(s_lo + h * i)));

  std::vector<double> out(ks.size(), std::numeric_limits<double>::quiet_NaN());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < static_cast<int>(ks.size()); ++i) {
    try {
      const CompactGraph fiber = apply_floquet(g, b, ks[i], gamma_b);
      const auto hits = eigenvalues_from_scan(fiber, s_lo, s_hi, tables);
      if (!hits.empty()) out[i] = hits.front().lambda;
    } catch (...) {
#pragma omp critical(qgband_cli_batch)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

json degeneracy_to_json(const DegeneracyReport& rep) {
  json j;
  j["lambda_edge"] = json_num(rep.lambda_edge);
  j["derivatives"] = json::array();
  j["quad"] = json::array();
  j["signs"] = json::array();
  for (int i = 0; i < 4; ++i) {
    j["derivatives"].push_back(json_num(rep.derivatives[i]));
    j["quad"].push_back(json_num(rep.quad.a[i]));
    j["signs"].push_back(rep.signs[i]);
  }
  j["smooth"] = rep.curve.smooth;
  j["topology"] = topology_name(rep.curve.topology);
  j["branches"] = static_cast<int>(rep.curve.branches.size());
  j["on_curve_checked"] = rep.on_curve_checked;
  j["off_curve_checked"] = rep.off_curve_checked;
  j["on_curve_max_dev"] = json_num(rep.on_curve_max_dev);
  j["off_curve_min_margin"] = json_num(rep.off_curve_min_margin);
  j["tol_curve"] = json_num(rep.tol_curve);
  j["curve_on_edge"] = rep.on_curve_max_dev <= rep.tol_curve &&
                       rep.off_curve_min_margin > 0.0;
  return j;
}

json gap_to_json(const GapReport& rep) {
  json j;
  j["lambda_b"] = json_num(rep.lambda_b);
  j["lambda_a"] = json_num(rep.lambda_a);
  j["max_band1"] = json_num(rep.max_band1);
  j["min_band2"] = json_num(rep.min_band2);
  j["gap_open"] = rep.open;
  j["certified_gap"] = json::array(
      {json_num(rep.certified_gap[0]), json_num(rep.certified_gap[1])});
  j["grid"] = json::array({rep.grid.n1, rep.grid.n2, rep.grid.n3});
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---- subcommand bodies ----------------------------------------------------

int cmd_validate(const Target& t) {
  std::cout << "config ok: " << t.g.vertex_count() << " vertices, "
            << t.g.edge_count() << " edges, total length "
            << format_g12(t.g.total_length()) << "\n";
  std::cout << "config hash: " << t.hash << "\n";
  return 0;
}

int cmd_spectrum(const Target& t, const std::string& dirichlet_at,
                 const std::vector<double>& range, int bands,
                 const fs::path& out_dir) {
  const CompactGraph* g = &t.g;
  std::optional<CompactGraph> decoupled;
  if (!dirichlet_at.empty()) {
    const int v = t.g.find_vertex(dirichlet_at);
    if (v < 0)
      throw Error(ErrorCode::UnknownVertex, "no vertex '" + dirichlet_at + "'");
    decoupled = dirichlet_perturbation(t.g, v);
    g = &*decoupled;
  }
  std::vector<EigenvalueHit> hits;
  if (!range.empty())
    hits = eigenvalues_in(*g, range.at(0), range.at(1));
  else
    hits = first_eigenvalues(*g, bands);

  json j;
  j["config_hash"] = t.hash;
  if (!dirichlet_at.empty()) j["dirichlet_at"] = dirichlet_at;
  if (!range.empty())
    j["range"] = json::array({json_num(range[0]), json_num(range[1])});
  j["eigenvalues"] = json::array();
  int index = 1;
  for (const EigenvalueHit& h : hits) {
    j["eigenvalues"].push_back(json{{"lambda", json_num(h.lambda)},
                                    {"multiplicity", h.multiplicity}});
    for (int m = 0; m < h.multiplicity; ++m, ++index)
      std::cout << "lambda_" << index << " = " << format_g12(h.lambda) << "\n";
  }
  if (hits.empty()) std::cout << "no eigenvalues in range\n";
  write_file(out_dir / "spectrum.json", dump(j));
  return 0;
}

int cmd_sweep(const Target& t, const GridSpec& grid, int bands,
              const fs::path& out_dir, const fs::path& cache_dir) {
  // cache key: everything the table depends on
  std::string key_src = graph_to_json_text(t.g);
  key_src += "\nb=" + t.g.vertex(t.b).label + " gamma_b=" + format_g12(t.gamma_b);
  key_src += " grid=" + std::to_string(grid.n1) + "x" + std::to_string(grid.n2) +
             "x" + std::to_string(grid.n3) + " J=" + std::to_string(bands);
  uint64_t kh = 0xcbf29ce484222325ull;
  for (unsigned char c : key_src) {
    kh ^= c;
    kh *= 0x100000001b3ull;
  }
  const std::string key = "sweep-" + hash_hex(kh);
  const fs::path csv_cache = cache_dir / (key + ".csv");
  const fs::path json_cache = cache_dir / (key + ".json");

  std::string csv_text, report_text;
  auto cached_csv = read_file(csv_cache);
  auto cached_json = read_file(json_cache);
  if (cached_csv && cached_json) {
    csv_text = std::move(*cached_csv);
    report_text = std::move(*cached_json);
  } else {
    BandTable table = band_sweep(t.g, t.b, t.gamma_b, grid, bands);
    table.config_hash = t.hash;
    std::ostringstream csv;
    write_band_csv(table, csv);
    csv_text = csv.str();

    const SpectrumReport rep = spectrum_report(table, kDefaultTolEig);
    json j;
    j["config_hash"] = rep.config_hash;
    j["grid"] = json::array({grid.n1, grid.n2, grid.n3});
    j["bands"] = json::array();
    for (const auto& b : rep.bands)
      j["bands"].push_back(json::array({json_num(b[0]), json_num(b[1])}));
    j["gaps"] = json::array();
    for (const auto& g : rep.gaps)
      j["gaps"].push_back(json::array({json_num(g[0]), json_num(g[1])}));
    j["argmax_cells"] = json::array();
    for (const auto& c : rep.argmax_cells)
      j["argmax_cells"].push_back(json::array({c[0], c[1], c[2]}));
    j["gap_open_between_first_two"] = rep.gap_open_between_first_two;
    report_text = dump(j);

    write_file(csv_cache, csv_text);
    write_file(json_cache, report_text);
  }

  write_file(out_dir / "bands.csv", csv_text);
  write_file(out_dir / "sweep.json", report_text);

  const json j = json::parse(report_text);
  for (size_t b = 0; b < j["bands"].size(); ++b)
    std::cout << "band " << b + 1 << ": ["
              << format_g12(j["bands"][b][0].get<double>()) << ", "
              << format_g12(j["bands"][b][1].get<double>()) << "]\n";
  for (const auto& g : j["gaps"])
    std::cout << "gap: (" << format_g12(g[0].get<double>()) << ", "
              << format_g12(g[1].get<double>()) << ")\n";
  std::cout << "gap open between bands 1 and 2: "
            << (j["gap_open_between_first_two"].get<bool>() ? "yes" : "no")
            << "\n";
  return 0;
}

int cmd_gap(const Target& t, const GridSpec& grid, const fs::path& out_dir) {
  const GapReport rep = check_gap(t.g, require_vertex(t, t.a, "--vertex-a"),
                                  t.b, t.gamma_b, grid);
  json j = gap_to_json(rep);
  j["config_hash"] = t.hash;
  write_file(out_dir / "gap.json", dump(j));
  std::cout << "lambda_1 of B-decoupled graph: " << format_g12(rep.lambda_b)
            << "\n";
  std::cout << "lambda_1 of A-decoupled graph: " << format_g12(rep.lambda_a)
            << "\n";
  std::cout << "band 1 max: " << format_g12(rep.max_band1)
            << ", band 2 min: " << format_g12(rep.min_band2) << "\n";
  std::cout << "gap open: " << (rep.open ? "yes" : "no") << ", certified ("
            << format_g12(rep.certified_gap[0]) << ", "
            << format_g12(rep.certified_gap[1]) << ")\n";
  return 0;
}

int cmd_curve(const Target& t, int samples, uint64_t seed,
              const fs::path& out_dir) {
  VerifyOptions opts;
  opts.dense_samples = samples;
  opts.seed = seed;
  const DegeneracyReport rep = degenerate_curve(t.g, t.b, t.gamma_b, opts);

  // one lambda_1 solve per emitted sample
  std::vector<std::array<double, 3>> ks;
  for (const auto& branch : rep.curve.branches)
    for (const CurvePoint& p : branch) ks.push_back(p.k);
  const std::vector<double> lam =
      lambda1_batch(t.g, t.b, t.gamma_b, ks, rep.lambda_edge + 1e-4);

  std::ostringstream csv;
  csv << "branch_id,k1,k2,k3,residual,lambda1_at_k\n";
  size_t row = 0;
  for (size_t b = 0; b < rep.curve.branches.size(); ++b)
    for (const CurvePoint& p : rep.curve.branches[b]) {
      csv << b << "," << format_g12(p.k[0]) << "," << format_g12(p.k[1]) << ","
          << format_g12(p.k[2]) << "," << format_g12(p.residual) << ","
          << format_g12(lam.at(row++)) << "\n";
    }
  write_file(out_dir / "curve.csv", csv.str());

  json j = degeneracy_to_json(rep);
  j["config_hash"] = t.hash;
  write_file(out_dir / "curve.json", dump(j));

  std::cout << "band edge lambda = " << format_g12(rep.lambda_edge) << "\n";
  std::cout << "edge derivative magnitudes: " << format_g12(rep.quad.a[0])
            << " " << format_g12(rep.quad.a[1]) << " "
            << format_g12(rep.quad.a[2]) << " " << format_g12(rep.quad.a[3])
            << "\n";
  std::cout << "curve: " << rep.curve.branches.size() << " branch(es), "
            << (rep.curve.smooth ? "smooth" : "non-smooth") << ", topology "
            << topology_name(rep.curve.topology) << "\n";
  std::cout << "on-curve max |lambda_1 - edge| = "
            << format_g12(rep.on_curve_max_dev) << " over "
            << rep.on_curve_checked << " samples\n";
  std::cout << "off-curve min margin = " << format_g12(rep.off_curve_min_margin)
            << " over " << rep.off_curve_checked << " samples\n";
  return 0;
}

int cmd_polygon(const std::vector<double>& sides, const std::string& preset,
                int samples, const fs::path& out_dir) {
  PolygonSpec spec;
  if (!preset.empty()) {
    spec = preset_polygon(preset);
  } else {
    if (sides.size() != 4)
      throw Error(ErrorCode::ConfigInvalid,
                  "polygon needs four side lengths or --preset");
    for (int i = 0; i < 4; ++i) spec.a[i] = sides[i];
  }
  for (double a : spec.a)
    if (!(a > 0.0))
      throw Error(ErrorCode::NonPositiveLength, "sides must be positive");

  const PolygonClass cls = classify(spec);
  if (cls == PolygonClass::Empty) {
    std::cout << "classification: empty\n";
    return 0;
  }
  if (cls == PolygonClass::Point) {
    const std::array<double, 3> k = point_solution(spec);
    std::cout << "classification: point\n";
    std::cout << "k = (" << format_g12(k[0]) << ", " << format_g12(k[1])
              << ", " << format_g12(k[2]) << ")\n";
    std::cout << "residual = " << format_g12(closure_residual(spec, k)) << "\n";
    return 0;
  }
  const PolygonCurve curve = curve_samples(spec, samples);
  std::cout << "classification: curve\n";
  std::cout << "smooth: " << (curve.smooth ? "yes" : "no") << "\n";
  std::cout << "topology: " << topology_name(curve.topology) << "\n";
  std::cout << "branches: " << curve.branches.size() << "\n";
  double max_residual = 0.0;
  size_t points = 0;
  for (const auto& b : curve.branches)
    for (const CurvePoint& p : b) {
      max_residual = std::max(max_residual, p.residual);
      ++points;
    }
  std::cout << "samples: " << points
            << ", max residual = " << format_g12(max_residual) << "\n";
  std::ostringstream csv;
  write_branch_csv(curve, csv);
  write_file(out_dir / "polygon.csv", csv.str());
  return 0;
}

int cmd_perturb(const Target& t, uint64_t seed, const GridSpec& grid,
                const fs::path& out_dir) {
  PerturbationSpec spec;
  const RobustnessReport rep =
      perturb_and_verify(t.g, require_vertex(t, t.a, "--vertex-a"), t.b,
                         t.gamma_b, spec, seed, grid);

  json j;
  j["seed"] = rep.seed;
  j["spec"] = {{"length_jitter", json_num(spec.length_jitter)},
               {"gamma_jitter", json_num(spec.gamma_jitter)},
               {"potential_amplitude", json_num(spec.potential_amplitude)}};
  j["graph"] = json::parse(graph_to_json_text(rep.graph));
  j["gamma_b"] = json_num(rep.gamma_b);
  j["gap"] = gap_to_json(rep.gap);
  j["curve"] = degeneracy_to_json(rep.curve);
  const bool curve_ok = rep.curve.on_curve_max_dev <= rep.curve.tol_curve &&
                        rep.curve.off_curve_min_margin > 0.0;
  j["verdicts"] = {{"gap_open", rep.gap.open}, {"curve_on_edge", curve_ok}};
  write_file(out_dir / "perturb.json", dump(j));

  std::cout << "seed " << seed << ": gap "
            << (rep.gap.open ? "open" : "NOT OPEN") << ", certified ("
            << format_g12(rep.gap.certified_gap[0]) << ", "
            << format_g12(rep.gap.certified_gap[1]) << ")\n";
  std::cout << "degenerate edge " << (curve_ok ? "verified" : "NOT VERIFIED")
            << ": on-curve max dev " << format_g12(rep.curve.on_curve_max_dev)
            << ", off-curve min margin "
            << format_g12(rep.curve.off_curve_min_margin) << "\n";
  return 0;
}

int cmd_oracle(const Target& t, int points, int bands,
               const fs::path& out_dir) {
  const std::vector<double> sec = flatten(first_eigenvalues(t.g, bands));
  const std::vector<double> fine = oracle_eigenvalues(t.g, points, bands);
  const std::vector<double> coarse = oracle_eigenvalues(t.g, points / 2, bands);

  json j;
  j["config_hash"] = t.hash;
  j["points"] = points;
  j["rows"] = json::array();
  std::cout << "    secular         grid N=" << points << "    grid N="
            << points / 2 << "   richardson\n";
  for (int i = 0; i < bands; ++i) {
    const double err_fine = fine[i] - sec[i];
    const double err_coarse = coarse[i] - sec[i];
    const double ratio = err_coarse / err_fine;
    std::cout << "  " << format_g12(sec[i]) << "  " << format_g12(fine[i])
              << "  " << format_g12(coarse[i]) << "  " << format_g12(ratio)
              << "\n";
    j["rows"].push_back(json{{"secular", json_num(sec[i])},
                             {"fd_fine", json_num(fine[i])},
                             {"fd_coarse", json_num(coarse[i])},
                             {"richardson", json_num(ratio)}});
  }
  write_file(out_dir / "oracle.json", dump(j));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Band structure of Z^3-periodic quantum graphs"};
  app.require_subcommand(1);

  std::string config_path, preset_name, vertex_a, vertex_b, dirichlet_at;
  std::vector<int> grid_v{16, 16, 16};
  std::vector<double> range_v, sides;
  int bands = 2;
  int jobs = 0;
  int points = 400;
  int samples = 1024;
  uint64_t seed = 1;
  std::string out_dir = ".";

  const auto add_common = [&](CLI::App* cmd, bool needs_graph) {
    if (needs_graph) {
      cmd->add_option("--config", config_path, "graph config JSON");
      cmd->add_option("--preset", preset_name, "builtin preset name");
      cmd->add_option("--vertex-a", vertex_a, "decoupling vertex label");
      cmd->add_option("--vertex-b", vertex_b, "cell-boundary vertex label");
    }
    cmd->add_option("--jobs", jobs, "worker thread cap");
    cmd->add_option("--out", out_dir, "output directory");
  };

  CLI::App* validate = app.add_subcommand("validate", "check a graph config");
  add_common(validate, true);

  CLI::App* spectrum =
      app.add_subcommand("spectrum", "eigenvalues of the compact graph");
  add_common(spectrum, true);
  spectrum->add_option("--dirichlet-at", dirichlet_at,
                       "decouple this vertex first");
  spectrum->add_option("--range", range_v, "lambda window LO HI")
      ->expected(2);
  spectrum->add_option("--bands", bands, "eigenvalue count when no --range");

  CLI::App* sweep = app.add_subcommand("sweep", "band table over the torus");
  add_common(sweep, true);
  sweep->add_option("--grid", grid_v, "grid sizes n1 n2 n3")->expected(3);
  sweep->add_option("--bands", bands, "band count J");

  CLI::App* gap = app.add_subcommand("gap", "certify the first spectral gap");
  add_common(gap, true);
  gap->add_option("--grid", grid_v, "grid sizes n1 n2 n3")->expected(3);

  CLI::App* curve =
      app.add_subcommand("curve", "predict and verify the first-band maximum set");
  add_common(curve, true);
  curve->add_option("--samples", samples, "curve sample count");
  curve->add_option("--seed", seed, "off-curve sampling seed");

  CLI::App* polygon =
      app.add_subcommand("polygon", "closure set of a quadrangle");
  polygon->add_option("sides", sides, "side lengths a1 a2 a3 a4")->expected(0, 4);
  polygon->add_option("--preset", preset_name, "builtin polygon preset");
  polygon->add_option("--samples", samples, "curve sample count");
  add_common(polygon, false);

  CLI::App* perturb =
      app.add_subcommand("perturb", "jitter the graph and re-verify gap and curve");
  add_common(perturb, true);
  CLI::Option* perturb_grid =
      perturb->add_option("--grid", grid_v, "sweep grid n1 n2 n3")->expected(3);
  perturb->add_option("--seed", seed, "perturbation seed");

  CLI::App* oracle =
      app.add_subcommand("oracle", "compare against the lattice discretization");
  add_common(oracle, true);
  oracle->add_option("--points", points, "grid points per unit length");
  oracle->add_option("--bands", bands, "eigenvalue count");

  try {
    app.parse(argc, argv);

    if (jobs > 0) omp_set_num_threads(jobs);
    const fs::path out(out_dir);
    const char* cache_env = std::getenv("QGBAND_CACHE_DIR");
    const fs::path cache_dir = cache_env ? fs::path(cache_env) : out / ".cache";

    if (polygon->parsed()) return cmd_polygon(sides, preset_name, samples, out);

    if (spectrum->parsed() && !spectrum->count("--bands")) bands = 6;
    if (oracle->parsed() && !oracle->count("--bands")) bands = 6;
    if (perturb->parsed() && !perturb_grid->count()) grid_v = {8, 8, 8};

    const Target t =
        resolve_target(config_path, preset_name, vertex_a, vertex_b);
    if (validate->parsed()) return cmd_validate(t);
    if (spectrum->parsed())
      return cmd_spectrum(t, dirichlet_at, range_v, bands, out);
    if (sweep->parsed())
      return cmd_sweep(t, grid_from(grid_v), bands, out, cache_dir);
    if (gap->parsed()) return cmd_gap(t, grid_from(grid_v), out);
    if (curve->parsed()) return cmd_curve(t, samples, seed, out);
    if (perturb->parsed()) return cmd_perturb(t, seed, grid_from(grid_v), out);
    if (oracle->parsed()) return cmd_oracle(t, points, bands, out);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const Error& err) {
    std::cerr << "error [" << error_code_name(err.code()) << "]: " << err.what()
              << "\n";
    if (err.has_k)
      std::cerr << "  at k = (" << format_g12(err.k[0]) << ", "
                << format_g12(err.k[1]) << ", " << format_g12(err.k[2])
                << ")\n";
    if (err.index >= 0) std::cerr << "  index: " << err.index << "\n";
    return exit_code_for(err.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
