#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "etcone/edge_triangle.hpp"
#include "etcone/errors.hpp"
#include "etcone/format.hpp"
#include "etcone/perturbation.hpp"
#include "etcone/sampler.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace etcone;

namespace {

constexpr const char* kToolVersion = "0.1.0";

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path out_dir() {
  if (const char* env = std::getenv("ETCONE_OUT_DIR")) return fs::path(env);
  return fs::path(".");
}

// Resolve the primary output path: explicit flag wins, otherwise a default
// name (extension follows the format) inside ETCONE_OUT_DIR.
fs::path resolve_out(const std::string& given, const std::string& stem, bool as_json) {
  if (!given.empty()) return fs::path(given);
  return out_dir() / (stem + (as_json ? ".json" : ".csv"));
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream f(p);
  if (!f) throw io_error("cannot open " + p.string() + " for writing");
  return f;
}

std::string cell_text(const json& v) {
  if (v.is_number_float()) return fmt17(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

// Tabular payload writeable as csv (ordered columns) or json (row objects).
struct OutputTable {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;

  void write(const fs::path& path, bool as_json) const {
    std::ofstream f = open_out(path);
    if (as_json) {
      json arr = json::array();
      for (const auto& row : rows) {
        json obj;
        for (std::size_t c = 0; c < columns.size(); ++c) obj[columns[c]] = row[c];
        arr.push_back(obj);
      }
      f << arr.dump(2) << '\n';
    } else {
      for (std::size_t c = 0; c < columns.size(); ++c)
        f << (c ? "," : "") << columns[c];
      f << '\n';
      for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
          f << (c ? "," : "") << cell_text(row[c]);
        f << '\n';
      }
    }
    if (!f) throw io_error("failed writing " + path.string());
  }
};

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

// One manifest per command run; sufficient to reproduce outputs bit-for-bit
// (the timestamp lives only here, never in the outputs themselves).
void write_manifest(const fs::path& path, const std::string& command, const json& params,
                    const std::vector<fs::path>& outputs) {
  json m;
  m["command"] = command;
  m["version"] = kToolVersion;
  m["generator"] = sampler::kGeneratorId;
  m["created"] = timestamp_utc();
  m["parameters"] = params;
  json outs = json::array();
  for (const fs::path& p : outputs) outs.push_back(p.string());
  m["outputs"] = outs;
  std::ofstream f = open_out(path);
  f << m.dump(2) << '\n';
  if (!f) throw io_error("failed writing " + path.string());
}

bool parse_format(const std::string& format) {
  if (format == "csv") return false;
  if (format == "json") return true;
  throw std::invalid_argument("--format must be csv or json");
}

// ---------------------------------------------------------------------------
// table1

void run_table1(double r, int k, const std::string& out, const std::string& format) {
  const bool as_json = parse_format(format);
  const fs::path path = resolve_out(out, "table1", as_json);

  OutputTable t;
  t.columns = {"classes", "a", "b", "psi", "a_opt", "b_opt", "psi_opt"};
  std::printf("perturbation around the %d-segment vertex, scale r = %s\n", k, fmt17(r).c_str());
  for (perturb::Cone cone : {perturb::Cone::X, perturb::Cone::Y}) {
    const perturb::PerturbationResult res = perturb::optimize_psi(k, r, cone);
    const int classes = cone == perturb::Cone::X ? k + 1 : k + 2;
    t.rows.push_back({classes, res.a_star, res.b_star, res.psi_first, res.a_opt, res.b_opt,
                      res.psi_opt});
    std::printf("  %d classes: a=%.9f  b=%.3g  psi=%.4f  a_opt=%.6g  b_opt=%.2g  psi_opt=%.4f\n",
                classes, res.a_star, res.b_star, res.psi_first, res.a_opt, res.b_opt,
                res.psi_opt);
  }
  t.write(path, as_json);
  std::printf("wrote %s\n", path.string().c_str());

  write_manifest(path.parent_path() / "table1_manifest.json", "table1",
                 {{"r", r}, {"k", k}, {"out", path.string()}, {"format", format}}, {path});
}

// ---------------------------------------------------------------------------
// boundary

void run_boundary(int resolution, const std::string& out, const std::string& format) {
  if (resolution < 2) throw std::invalid_argument("--resolution must be at least 2");
  const bool as_json = parse_format(format);
  const fs::path path = resolve_out(out, "boundary", as_json);

  OutputTable t;
  t.columns = {"e", "t_lower", "t_upper", "k"};
  for (int i = 0; i <= resolution; ++i) {
    const double e = static_cast<double>(i) / resolution;
    t.rows.push_back({e, model::razborov_lower_bound(e), model::kruskal_katona_upper_bound(e),
                      model::lower_boundary_segment(e)});
  }
  t.write(path, as_json);
  std::printf("wrote %d boundary samples to %s\n", resolution + 1, path.string().c_str());

  write_manifest(path.parent_path() / "boundary_manifest.json", "boundary",
                 {{"resolution", resolution}, {"out", path.string()}, {"format", format}},
                 {path});
}

// ---------------------------------------------------------------------------
// compare / sweep

json decision_row(int k, double r, const perturb::GroundStateDecision& d) {
  return json::array({k, r, d.psi_x, d.psi_y, d.margin, d.preferred_classes, d.in_regime,
                      d.indeterminate});
}

const std::vector<std::string> kDecisionColumns = {
    "k", "r", "psi_x", "psi_y", "margin", "preferred_classes", "in_regime", "indeterminate"};

void run_compare(int k, double r, const std::string& out, const std::string& format) {
  const bool as_json = parse_format(format);
  const perturb::GroundStateDecision d = perturb::ground_state_compare(k, r);

  std::printf("psi(%d classes) = %s\n", k + 1, fmt17(d.psi_x).c_str());
  std::printf("psi(%d classes) = %s\n", k + 2, fmt17(d.psi_y).c_str());
  std::printf("margin = %s\n", fmt17(d.margin).c_str());
  if (d.indeterminate) {
    const bool pinned = !(d.cone_x.converged && d.cone_y.converged &&
                          d.cone_x.a_opt > 0.5 && d.cone_x.b_opt < 0.5 &&
                          d.cone_y.a_opt > 0.5 && d.cone_y.b_opt < 0.5);
    std::printf("preferred: indeterminate (%s)\n",
                pinned ? "no corner optimum at this scale" : "margin below threshold");
  } else {
    std::printf("preferred: %d classes\n", d.preferred_classes);
  }
  std::printf("in_regime: %s\n", d.in_regime ? "true" : "false");

  if (!out.empty()) {
    const fs::path path = resolve_out(out, "compare", as_json);
    OutputTable t;
    t.columns = kDecisionColumns;
    const json row = decision_row(k, r, d);
    t.rows.push_back(std::vector<json>(row.begin(), row.end()));
    t.write(path, as_json);
    write_manifest(path.parent_path() / "compare_manifest.json", "compare",
                   {{"k", k}, {"r", r}, {"out", path.string()}, {"format", format}}, {path});
  }
}

// "a..b" or a single value.
template <typename T>
std::pair<T, T> parse_range(const std::string& text, T (*conv)(const std::string&)) {
  const std::size_t dots = text.find("..");
  if (dots == std::string::npos) {
    const T v = conv(text);
    return {v, v};
  }
  const T lo = conv(text.substr(0, dots));
  const T hi = conv(text.substr(dots + 2));
  if (hi < lo) throw std::invalid_argument("range upper end below lower end: " + text);
  return {lo, hi};
}

int conv_int(const std::string& s) { return std::stoi(s); }
double conv_double(const std::string& s) { return std::stod(s); }

void run_sweep(const std::string& kspec, const std::string& rspec, int r_count, int jobs,
               const std::string& out, const std::string& format) {
  const bool as_json = parse_format(format);
  const auto [k_lo, k_hi] = parse_range<int>(kspec, conv_int);
  const auto [r_lo, r_hi] = parse_range<double>(rspec, conv_double);
  if (k_lo < 1) throw std::invalid_argument("--k must start at 1");
  if (r_count < 1) throw std::invalid_argument("--r-count must be positive");
  if (r_lo == r_hi) r_count = 1;

  struct Task {
    int k;
    double r;
  };
  std::vector<Task> tasks;
  for (int k = k_lo; k <= k_hi; ++k)
    for (int i = 0; i < r_count; ++i) {
      const double r =
          r_count == 1 ? r_lo : r_lo + (r_hi - r_lo) * static_cast<double>(i) / (r_count - 1);
      tasks.push_back({k, r});
    }

  // Grid points are independent; results land in slots so row order is
  // deterministic regardless of scheduling.
  std::vector<perturb::GroundStateDecision> decisions(tasks.size());
  std::atomic<std::size_t> cursor{0};
  const unsigned hw = std::thread::hardware_concurrency();
  const std::size_t nthreads =
      std::min<std::size_t>(tasks.size(), jobs > 0 ? jobs : (hw ? hw : 4));
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (std::size_t t = 0; t < nthreads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = cursor.fetch_add(1);
        if (i >= tasks.size() || failed.load()) return;
        try {
          decisions[i] = perturb::ground_state_compare(tasks[i].k, tasks[i].r);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  for (std::thread& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  OutputTable t;
  t.columns = kDecisionColumns;
  int in_regime = 0, expected = 0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const json row = decision_row(tasks[i].k, tasks[i].r, decisions[i]);
    t.rows.push_back(std::vector<json>(row.begin(), row.end()));
    if (decisions[i].in_regime) {
      ++in_regime;
      if (decisions[i].preferred_classes == tasks[i].k + 1) ++expected;
    }
  }
  const fs::path path = resolve_out(out, "sweep", as_json);
  t.write(path, as_json);
  std::printf("wrote %zu grid points to %s\n", tasks.size(), path.string().c_str());
  std::printf("in-regime rows preferring k+1 classes: %d/%d\n", expected, in_regime);

  write_manifest(path.parent_path() / "sweep_manifest.json", "sweep",
                 {{"k", kspec},
                  {"r", rspec},
                  {"r_count", r_count},
                  {"jobs", jobs},
                  {"out", path.string()},
                  {"format", format}},
                 {path});
}

// ---------------------------------------------------------------------------
// sample

const char* init_kind_name(sampler::InitKind kind) {
  switch (kind) {
    case sampler::InitKind::empty: return "empty";
    case sampler::InitKind::complete: return "complete";
    case sampler::InitKind::bipartite_split: return "bipartite_split";
    case sampler::InitKind::random: return "random";
  }
  return "?";
}

// --init grammar: mixed | empty | complete | bipartite | random[:density].
// "mixed" is the multimodality hedge: six chains seeded at the bipartite
// split (stability probes of the candidate ground state) plus a random(0.5)
// and an empty chain (reachability probes), cycled over the chain count.
std::vector<sampler::InitSpec> parse_inits(const std::string& text) {
  if (text == "mixed") {
    std::vector<sampler::InitSpec> mix(6, {sampler::InitKind::bipartite_split, 0.5});
    mix.push_back({sampler::InitKind::random, 0.5});
    mix.push_back({sampler::InitKind::empty, 0.5});
    return mix;
  }
  if (text == "empty") return {{sampler::InitKind::empty, 0.5}};
  if (text == "complete") return {{sampler::InitKind::complete, 0.5}};
  if (text == "bipartite") return {{sampler::InitKind::bipartite_split, 0.5}};
  if (text.rfind("random", 0) == 0) {
    double density = 0.5;
    if (text.size() > 6) {
      if (text[6] != ':') throw std::invalid_argument("bad --init: " + text);
      density = std::stod(text.substr(7));
    }
    return {{sampler::InitKind::random, density}};
  }
  throw std::invalid_argument("bad --init: " + text +
                              " (want mixed|empty|complete|bipartite|random[:density])");
}

void run_sample(const sampler::SamplerConfig& config, const std::string& init_text,
                const std::string& out_dir_text) {
  const std::vector<sampler::InitSpec> inits = parse_inits(init_text);
  const fs::path dir = out_dir_text.empty() ? out_dir() : fs::path(out_dir_text);

  const std::vector<sampler::ChainResult> results = sampler::run_chains(config, inits);

  std::vector<fs::path> outputs;
  json chains = json::array();
  for (std::size_t c = 0; c < results.size(); ++c) {
    const sampler::ChainResult& r = results[c];
    char name[32];
    std::snprintf(name, sizeof(name), "chain_%02zu", c);

    const fs::path traj_path = dir / (std::string(name) + ".csv");
    std::ofstream traj = open_out(traj_path);
    traj << "step,edge_density,triangle_density\n";
    for (const sampler::TrajectoryPoint& p : r.trajectory)
      traj << p.step << ',' << fmt17(p.edge_density) << ',' << fmt17(p.triangle_density)
           << '\n';
    if (!traj) throw io_error("failed writing " + traj_path.string());
    outputs.push_back(traj_path);

    const fs::path edges_path = dir / (std::string(name) + ".edges");
    std::ofstream edges = open_out(edges_path);
    for (const auto& [i, j] : r.final_state.edges_sorted()) edges << i << ' ' << j << '\n';
    if (!edges) throw io_error("failed writing " + edges_path.string());
    outputs.push_back(edges_path);

    const sampler::SampleClassification cls = sampler::classify_sample(r.final_state);
    json entry;
    entry["chain"] = c;
    entry["stream"] = r.stream;
    entry["init"] = init_kind_name(r.init.kind);
    if (r.init.kind == sampler::InitKind::random) entry["init_density"] = r.init.density;
    entry["samples"] = r.summary.samples;
    entry["acceptance_rate"] = r.summary.acceptance_rate;
    entry["mean_edge_density"] = r.summary.mean_edge_density;
    entry["stderr_edge_density"] = r.summary.stderr_edge_density;
    entry["mean_triangle_density"] = r.summary.mean_triangle_density;
    entry["stderr_triangle_density"] = r.summary.stderr_triangle_density;
    entry["final_edge_density"] = r.final_state.edge_density();
    entry["final_triangle_density"] = r.final_state.triangle_density();
    entry["nearest_k"] = cls.nearest_k;
    entry["cone_distance"] = cls.distance;
    entry["at_cap"] = cls.at_cap;
    entry["bipartiteness_score"] = cls.bipartiteness_score;
    entry["trajectory"] = traj_path.string();
    entry["final_edges"] = edges_path.string();
    chains.push_back(entry);

    std::printf(
        "chain %zu: init=%-15s mean_edge=%.4f bipartiteness=%.4f nearest_k=%d%s accept=%.3f\n",
        c, init_kind_name(r.init.kind), r.summary.mean_edge_density, cls.bipartiteness_score,
        cls.nearest_k, cls.at_cap ? " (at cap)" : "", r.summary.acceptance_rate);
  }

  const fs::path cls_path = dir / "classification.json";
  {
    std::ofstream f = open_out(cls_path);
    f << chains.dump(2) << '\n';
    if (!f) throw io_error("failed writing " + cls_path.string());
  }
  outputs.push_back(cls_path);

  write_manifest(dir / "sample_manifest.json", "sample",
                 {{"n", config.n},
                  {"beta1", config.beta1},
                  {"beta2", config.beta2},
                  {"steps", config.steps},
                  {"burn_in", config.burn_in},
                  {"thin", config.thin},
                  {"seed", config.seed},
                  {"chains", config.chains},
                  {"init", init_text},
                  {"out_dir", dir.string()}},
                 outputs);
  std::printf("wrote %zu chains to %s\n", results.size(), dir.string().c_str());
}

// ---------------------------------------------------------------------------
// rerun

void run_rerun(const std::string& manifest_path) {
  std::ifstream f(manifest_path);
  if (!f) throw io_error("cannot read manifest " + manifest_path);
  json m;
  try {
    f >> m;
  } catch (const json::exception& e) {
    throw std::invalid_argument("malformed manifest: " + std::string(e.what()));
  }
  const std::string command = m.at("command").get<std::string>();
  const json& p = m.at("parameters");
  if (command == "table1") {
    run_table1(p.at("r").get<double>(), p.at("k").get<int>(), p.at("out").get<std::string>(),
               p.at("format").get<std::string>());
  } else if (command == "boundary") {
    run_boundary(p.at("resolution").get<int>(), p.at("out").get<std::string>(),
                 p.at("format").get<std::string>());
  } else if (command == "compare") {
    run_compare(p.at("k").get<int>(), p.at("r").get<double>(), p.at("out").get<std::string>(),
                p.at("format").get<std::string>());
  } else if (command == "sweep") {
    run_sweep(p.at("k").get<std::string>(), p.at("r").get<std::string>(),
              p.at("r_count").get<int>(), p.at("jobs").get<int>(),
              p.at("out").get<std::string>(), p.at("format").get<std::string>());
  } else if (command == "sample") {
    sampler::SamplerConfig config;
    config.n = p.at("n").get<int>();
    config.beta1 = p.at("beta1").get<double>();
    config.beta2 = p.at("beta2").get<double>();
    config.steps = p.at("steps").get<std::int64_t>();
    config.burn_in = p.at("burn_in").get<std::int64_t>();
    config.thin = p.at("thin").get<std::int64_t>();
    config.seed = p.at("seed").get<std::uint64_t>();
    config.chains = p.at("chains").get<int>();
    run_sample(config, p.at("init").get<std::string>(), p.at("out_dir").get<std::string>());
  } else {
    throw std::invalid_argument("unknown command in manifest: " + command);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edge-triangle exponential random graph toolkit"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  // table1
  double t1_r = 10.0;
  int t1_k = 1;
  std::string t1_out, t1_format = "csv";
  CLI::App* table1 = app.add_subcommand("table1", "perturbation table around a Turan vertex");
  table1->add_option("--r", t1_r, "parameter scale (> 0)");
  table1->add_option("--k", t1_k, "vertex index");
  table1->add_option("--out", t1_out, "output file (default table1.csv in ETCONE_OUT_DIR)");
  table1->add_option("--format", t1_format, "csv or json");

  // boundary
  int b_resolution = 200;
  std::string b_out, b_format = "csv";
  CLI::App* boundary = app.add_subcommand("boundary", "feasible-region boundary samples");
  boundary->add_option("--resolution", b_resolution, "number of subdivisions of [0,1]");
  boundary->add_option("--out", b_out, "output file");
  boundary->add_option("--format", b_format, "csv or json");

  // compare
  int c_k = 1;
  double c_r = 10.0;
  std::string c_out, c_format = "csv";
  CLI::App* compare = app.add_subcommand("compare", "ground-state comparison at one (k, r)");
  compare->add_option("--k", c_k, "vertex index");
  compare->add_option("--r", c_r, "parameter scale");
  compare->add_option("--out", c_out, "optional output file");
  compare->add_option("--format", c_format, "csv or json");

  // sweep
  std::string s_k = "1..5", s_r = "20..200", s_out, s_format = "csv";
  int s_rcount = 10, s_jobs = 0;
  CLI::App* sweep = app.add_subcommand("sweep", "comparison over a (k, r) grid, in parallel");
  sweep->add_option("--k", s_k, "k range, e.g. 1..5 or 3");
  sweep->add_option("--r", s_r, "r range, e.g. 20..200 or 10");
  sweep->add_option("--r-count", s_rcount, "points along the r range");
  sweep->add_option("--jobs", s_jobs, "worker threads (0 = hardware)");
  sweep->add_option("--out", s_out, "output file");
  sweep->add_option("--format", s_format, "csv or json");

  // sample
  sampler::SamplerConfig sample_cfg;
  sample_cfg.chains = 8;
  std::string sm_init = "mixed", sm_outdir;
  CLI::App* sample = app.add_subcommand("sample", "Metropolis chains with classification");
  sample->add_option("--n", sample_cfg.n, "vertex count");
  sample->add_option("--beta1", sample_cfg.beta1, "edge parameter");
  sample->add_option("--beta2", sample_cfg.beta2, "triangle parameter");
  sample->add_option("--steps", sample_cfg.steps, "Metropolis steps per chain");
  sample->add_option("--burn-in", sample_cfg.burn_in, "steps discarded before sampling");
  sample->add_option("--thin", sample_cfg.thin, "steps between recorded samples");
  sample->add_option("--seed", sample_cfg.seed, "root seed; chain c uses child stream c");
  sample->add_option("--chains", sample_cfg.chains, "number of independent chains");
  sample->add_option("--init", sm_init,
                     "mixed | empty | complete | bipartite | random[:density]");
  sample->add_option("--out-dir", sm_outdir, "output directory (default ETCONE_OUT_DIR)");

  // rerun
  std::string rr_manifest;
  CLI::App* rerun = app.add_subcommand("rerun", "reproduce a previous run from its manifest");
  rerun->add_option("--manifest", rr_manifest, "manifest file to replay")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (table1->parsed()) run_table1(t1_r, t1_k, t1_out, t1_format);
    if (boundary->parsed()) run_boundary(b_resolution, b_out, b_format);
    if (compare->parsed()) run_compare(c_k, c_r, c_out, c_format);
    if (sweep->parsed()) run_sweep(s_k, s_r, s_rcount, s_jobs, s_out, s_format);
    if (sample->parsed()) run_sample(sample_cfg, sm_init, sm_outdir);
    if (rerun->parsed()) run_rerun(rr_manifest);
  } catch (const capacity_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const io_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
