// Acceptance suite: prints one PASS/FAIL line per criterion and exits with
// the number of failures. Criterion 1 drives the CLI binary passed via
// --cli <path>; everything else exercises the library directly.

#include <cfloat>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "etcone/edge_triangle.hpp"
#include "etcone/perturbation.hpp"
#include "etcone/sampler.hpp"
#include "etcone/step_graphon.hpp"

namespace fs = std::filesystem;
using namespace etcone;

namespace {

int failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int index, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", index, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// --------------------------------------------------------------------------
// 1. Table 1 via the CLI, all twelve printed values at printed precision.

void criterion_table1(const std::string& cli) {
  Timer timer;
  if (cli.empty()) {
    report(1, false, "table1: no CLI binary provided (--cli)");
    return;
  }
  const fs::path dir = fs::temp_directory_path() / "etcone_acceptance";
  fs::create_directories(dir);
  const fs::path csv = dir / "table1.csv";
  const std::string command =
      "'" + cli + "' table1 --r 10 --k 1 --out '" + csv.string() + "' > /dev/null";
  if (std::system(command.c_str()) != 0) {
    report(1, false, "table1: CLI invocation failed");
    return;
  }

  std::ifstream in(csv);
  std::string header, line2, line3;
  std::getline(in, header);
  std::getline(in, line2);
  std::getline(in, line3);
  auto parse_row = [](const std::string& line) {
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    return vals;
  };
  const std::vector<double> r2 = parse_row(line2), r3 = parse_row(line3);
  if (r2.size() != 7 || r3.size() != 7 || r2[0] != 2 || r3[0] != 3) {
    report(1, false, "table1: malformed CSV");
    return;
  }

  int bad = 0;
  auto expect = [&bad](double got, double want, double tol) {
    if (!(std::abs(got - want) <= tol)) ++bad;
  };
  // Bipartite row: printed (0.999999998, 0.0759, 5.0197, ~1, 0.069, 5.019).
  expect(r2[1], 0.999999998, 0.5e-9);
  expect(r2[2], 0.0759, 0.5e-4);
  expect(r2[3], 5.0197, 5e-4);
  expect(r2[4], 1.0, 1e-3);
  expect(r2[5], 0.069, 0.5e-3);
  expect(r2[6], 5.019, 1e-3);
  // Tripartite row: printed (0.9933, 0.0000454, 5.0022, 0.9943, 0.000064, 5.0021).
  expect(r3[1], 0.9933, 0.5e-4);
  expect(r3[2], 0.0000454, 0.5e-7);
  expect(r3[3], 5.0022, 5e-4);
  expect(r3[4], 0.9943, 0.5e-4);
  expect(r3[5], 0.000064, 0.5e-6);
  expect(r3[6], 5.0021, 1e-3);

  const double t = timer.seconds();
  report(1, bad == 0 && t < 1.0,
         fmt("table1 --r 10 --k 1: %d/12 printed values matched, %.2fs (limit 1s)", 12 - bad, t));
}

// --------------------------------------------------------------------------
// 2. Theorem 1 ordering on the regime grid.

void criterion_ordering() {
  Timer timer;
  int in_regime = 0, ordered = 0, flagged = 0;
  for (int k = 1; k <= 10; ++k)
    for (double mult : {10.0, 20.0, 50.0, 100.0}) {
      const double r = mult * (3.0 * k + 5.0) / 8.0;
      const perturb::GroundStateDecision d = perturb::ground_state_compare(k, r);
      if (d.in_regime) {
        ++in_regime;
        if (d.psi_x > d.psi_y && d.margin > 0.0 && d.preferred_classes == k + 1) ++ordered;
      } else if (d.indeterminate && d.preferred_classes == 0) {
        // Below the finite-r onset the corner optimum being compared does
        // not exist; the decision must say so rather than pick a winner.
        ++flagged;
      }
    }
  const double t = timer.seconds();
  // Expected landscape: the 3 points (k=8..10, lowest r multiplier) sit
  // below the onset where the corner basin survives; all 37 others are in
  // regime and must order strictly.
  const bool ok = in_regime == 37 && ordered == 37 && flagged == 3 && t < 10.0;
  report(2, ok,
         fmt("psi_opt(k+1) > psi_opt(k+2) strictly on %d/%d in-regime grid points, %d/3 "
             "sub-onset points flagged indeterminate, %.2fs (limit 10s)",
             ordered, in_regime, flagged, t));
}

// --------------------------------------------------------------------------
// 3. Figure 3 reproduction with the 8 default chains.

void criterion_figure3() {
  Timer timer;
  sampler::SamplerConfig config;  // defaults: n=60, beta=(10,-7.5), 5e6 steps
  config.chains = 8;
  // The CLI's default "mixed" hedge: six bipartite-seeded stability chains
  // plus random(0.5) and empty reachability probes.
  std::vector<sampler::InitSpec> inits(6, {sampler::InitKind::bipartite_split, 0.5});
  inits.push_back({sampler::InitKind::random, 0.5});
  inits.push_back({sampler::InitKind::empty, 0.5});

  const std::vector<sampler::ChainResult> results = sampler::run_chains(config, inits);
  int good = 0;
  for (const sampler::ChainResult& r : results) {
    const sampler::SampleClassification c = sampler::classify_sample(r.final_state);
    if (c.bipartiteness_score > 0.95 && c.nearest_k == 1 &&
        std::abs(r.summary.mean_edge_density - 0.557) <= 0.05)
      ++good;
  }
  const double t = timer.seconds();
  report(3, good >= 6 && t < 300.0,
         fmt("n=60 beta=(10,-7.5): %d/8 default chains bipartite-classified "
             "(need >= 6), %.1fs (limit 300s)",
             good, t));
}

// --------------------------------------------------------------------------
// 4. hom_density vs brute force over every graph with n <= 5.

std::int64_t brute_force_assignments(const graphon::SubgraphPattern& pattern,
                                     const std::vector<std::vector<int>>& adj) {
  const int h = pattern.vertices();
  const int n = static_cast<int>(adj.size());
  std::vector<int> map(h, 0);
  std::int64_t hits = 0;
  for (;;) {
    bool ok = true;
    for (const auto& [u, v] : pattern.edges())
      if (!adj[map[u]][map[v]]) {
        ok = false;
        break;
      }
    hits += ok;
    int pos = h - 1;
    while (pos >= 0 && ++map[pos] == n) map[pos--] = 0;
    if (pos < 0) return hits;
  }
}

void criterion_densities() {
  Timer timer;
  const std::vector<graphon::SubgraphPattern> patterns = {
      graphon::SubgraphPattern::single_edge(), graphon::SubgraphPattern::triangle(),
      graphon::SubgraphPattern::two_star(), graphon::SubgraphPattern::path(3),
      graphon::SubgraphPattern::cycle(4)};
  std::int64_t graphs = 0;
  int bad = 0;
  for (int n = 1; n <= 5; ++n) {
    const int pairs = n * (n - 1) / 2;
    for (std::uint32_t mask = 0; mask < (1u << pairs); ++mask) {
      std::vector<std::vector<int>> adj(n, std::vector<int>(n, 0));
      int bit = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j, ++bit)
          if (mask >> bit & 1) adj[i][j] = adj[j][i] = 1;
      const graphon::StepGraphon w = graphon::graph_to_graphon(adj);
      ++graphs;
      for (const graphon::SubgraphPattern& p : patterns) {
        const double direct = graphon::hom_density(p, w);
        const double brute = static_cast<double>(brute_force_assignments(p, adj)) /
                             std::pow(static_cast<double>(n), p.vertices());
        if (direct != brute) ++bad;  // exact agreement required
      }
    }
  }
  const double t = timer.seconds();
  report(4, bad == 0 && t < 30.0,
         fmt("hom_density == brute force on %lld graphs x 5 patterns (%d mismatches), "
             "%.2fs (limit 30s)",
             static_cast<long long>(graphs), bad, t));
}

// --------------------------------------------------------------------------
// 5. Empirical chain law vs exhaustive enumeration at n=4.

void criterion_chain_law() {
  Timer timer;
  const double beta1 = 1.0, beta2 = -1.0;
  const int n = 4;
  // Stationary log-weights over the 64 labeled graphs: 2 b1 E + (6 b2 / n) T.
  const std::uint64_t triple_masks[4] = {0b001011, 0b010101, 0b100110, 0b111000};
  std::vector<double> weight(64);
  double z = 0.0;
  for (std::uint32_t mask = 0; mask < 64; ++mask) {
    const int e = __builtin_popcount(mask);
    int tri = 0;
    for (std::uint64_t tm : triple_masks) tri += (mask & tm) == tm;
    weight[mask] = std::exp(2.0 * beta1 * e + (6.0 * beta2 / n) * tri);
    z += weight[mask];
  }

  sampler::GraphState g(n);
  sampler::SplitMix64 rng = sampler::SplitMix64::child(1, 0);
  const std::int64_t burn = 100'000, steps = 10'000'000;
  for (std::int64_t s = 0; s < burn; ++s) sampler::metropolis_step(g, rng, beta1, beta2);
  std::vector<std::int64_t> visits(64, 0);
  for (std::int64_t s = 0; s < steps; ++s) {
    sampler::metropolis_step(g, rng, beta1, beta2);
    ++visits[g.edge_bitmask()];
  }
  double tv = 0.0;
  for (int mask = 0; mask < 64; ++mask)
    tv += std::abs(static_cast<double>(visits[mask]) / steps - weight[mask] / z);
  tv *= 0.5;
  const double t = timer.seconds();
  report(5, tv <= 0.01 && t < 120.0,
         fmt("n=4 beta=(1,-1) 1e7-step chain vs enumeration: TV = %.5f (limit 0.01), "
             "%.1fs (limit 120s)",
             tv, t));
}

// --------------------------------------------------------------------------
// 6. exact_free_energy closed form at beta2 = 0.

void criterion_free_energy() {
  Timer timer;
  double worst = 0.0;
  for (int n = 3; n <= 7; ++n)
    for (double b1 : {-2.0, 0.0, 1.0, 3.0}) {
      const double analytic = (n * (n - 1) / 2) / (static_cast<double>(n) * n) *
                              std::log1p(std::exp(2.0 * b1));
      worst = std::max(worst, std::abs(sampler::exact_free_energy(n, b1, 0.0) - analytic));
    }
  report(6, worst <= 1e-12,
         fmt("exact_free_energy vs (C(n,2)/n^2) log(1+e^{2b1}), n=3..7: worst |diff| = "
             "%.2e (limit 1e-12), %.2fs",
             worst, timer.seconds()));
}

// --------------------------------------------------------------------------
// 7. Geometry: exact orthogonality, joint continuity, tangent directions.

void criterion_geometry() {
  Timer timer;
  int bad = 0;

  // o_k and the Turan points must be the correctly rounded values of their
  // small-integer ratios; orthogonality then holds as an exact rational
  // identity, checked in 128-bit integers.
  for (int k = 1; k <= 30; ++k) {
    const auto o = model::critical_direction(k);
    const long long p = static_cast<long long>(k + 1) * (k + 2);
    const long long q = static_cast<long long>(k) * (3 * k + 5);
    if (o[0] != 1.0 || o[1] != -static_cast<double>(p) / static_cast<double>(q)) ++bad;
    for (int j : {k, k + 1}) {
      const model::BoundaryPoint v = model::turan_point(j);
      if (v.edge_density != static_cast<double>(j) / (j + 1)) ++bad;
      if (v.triangle_density !=
          static_cast<double>(static_cast<long long>(j) * (j - 1)) /
              static_cast<double>(static_cast<long long>(j + 1) * (j + 1)))
        ++bad;
    }
    // Chord: delta_e = 1/((k+1)(k+2)), delta_t = k(3k+5)/((k+1)^2 (k+2)^2).
    // o . chord = 0  <=>  p * k(3k+5) * (k+1)(k+2) == q * (k+1)^2 (k+2)^2.
    const __int128 lhs = static_cast<__int128>(p) * q * p;
    const __int128 rhs = static_cast<__int128>(q) * p * p;
    if (lhs != rhs) ++bad;
  }

  // Continuity of the lower boundary at joints.
  double worst_jump = 0.0;
  for (int k = 1; k <= 30; ++k) {
    const double ek = static_cast<double>(k) / (k + 1);
    const double jump = std::abs(model::razborov_lower_bound(std::nextafter(ek, 0.0)) -
                                 model::razborov_lower_bound(std::nextafter(ek, 1.0)));
    worst_jump = std::max(worst_jump, jump);
  }
  if (worst_jump > 1e-12) ++bad;

  // Tangent vectors vs one-sided finite differences of the cone densities.
  double worst_fd = 0.0;
  const double h = 1e-6;
  for (int k = 1; k <= 10; ++k) {
    const auto [da, db] = perturb::tangent_vectors(k);
    const double fd[4] = {
        (perturb::cone_edge_density(k, 1.0, 0.0) - perturb::cone_edge_density(k, 1.0 - h, 0.0)) /
            h,
        (perturb::cone_triangle_density(k, 1.0, 0.0) -
         perturb::cone_triangle_density(k, 1.0 - h, 0.0)) /
            h,
        (perturb::cone_edge_density(k, 1.0, h) - perturb::cone_edge_density(k, 1.0, 0.0)) / h,
        (perturb::cone_triangle_density(k, 1.0, h) - perturb::cone_triangle_density(k, 1.0, 0.0)) /
            h};
    worst_fd = std::max({worst_fd, std::abs(fd[0] - da[0]), std::abs(fd[1] - da[1]),
                         std::abs(fd[2] - db[0]), std::abs(fd[3] - db[1])});
  }
  if (worst_fd > 1e-5) ++bad;

  report(7, bad == 0,
         fmt("orthogonality exact k=1..30, joint jump <= %.1e (limit 1e-12), tangent FD "
             "<= %.1e (limit 1e-5), %.2fs",
             worst_jump, worst_fd, timer.seconds()));
}

// --------------------------------------------------------------------------
// 8. Delta-operator decomposition at Turan graphons.

void criterion_delta_identity() {
  Timer timer;
  int bad = 0;
  double worst = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const graphon::StepGraphon base = graphon::turan_graphon(k + 1);
    const graphon::BlockFunction delta =
        graphon::delta_operator(graphon::SubgraphPattern::triangle(), base);
    const graphon::DeltaDecomposition d = graphon::decompose_on_support(delta, base);
    if (d.residual_sup_norm != 0.0) ++bad;
    worst = std::max({worst, std::abs(d.coeff_on_support - 3.0 * (k - 1) / (k + 1)),
                      std::abs(d.coeff_off_support - 3.0 * k / (k + 1))});
  }
  if (worst > 1e-13) ++bad;
  report(8, bad == 0,
         fmt("decompose(Delta_K3 T_k) k=1..10: residual exactly 0, coeff |diff| <= %.1e "
             "(limit 1e-13), %.2fs",
             worst, timer.seconds()));
}

// --------------------------------------------------------------------------
// 9. Lemma tail bound sharpness and the documented psi-variant gap.

void criterion_lemma() {
  Timer timer;
  int bad = 0;
  for (double x : {5.0, 10.0, 20.0}) {
    const double exact = 0.5 * std::log1p(std::exp(-x));
    const double rel = (0.5 * std::exp(-x) - exact) / exact;
    if (!(rel >= 0.0 && rel <= std::exp(-x))) ++bad;
  }
  const double gap =
      perturb::psi_first_order(1, 10.0, perturb::Cone::X, perturb::PsiVariant::lemma_asymptotic) -
      perturb::psi_first_order(1, 10.0, perturb::Cone::X, perturb::PsiVariant::exact_entropy);
  const double printed = 5.0205 - 5.0197;
  if (!(std::abs(gap - printed) <= 2e-4)) ++bad;
  report(9, bad == 0,
         fmt("tail-bound rel err <= e^{-x} at x=5,10,20; psi gap %.6f vs printed %.4f "
             "(limit 2e-4), %.2fs",
             gap, printed, timer.seconds()));
}

// --------------------------------------------------------------------------
// 10. Second-order remainder: fitted exponent >= 1.8.

void criterion_remainder_order() {
  Timer timer;
  std::vector<double> lx, ly;
  for (int r = 10; r <= 80; r += 10) {
    const perturb::PerturbationResult res = perturb::optimize_psi(1, r, perturb::Cone::X);
    double delta = std::abs(res.psi_first_excess - res.psi_opt_excess);
    // Below the rounding noise of the two excesses the difference carries no
    // information; clamp so the log-log fit sees the floor, not log(0).
    const double floor = DBL_EPSILON * std::max(std::abs(res.psi_first_excess),
                                                std::abs(res.psi_opt_excess));
    delta = std::max({delta, floor, DBL_MIN});
    const double size = std::max(res.one_minus_a_star, res.b_star);
    lx.push_back(std::log(size));
    ly.push_back(std::log(delta));
  }
  const std::size_t m = lx.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = sxy / sxx;
  report(10, slope >= 1.8,
         fmt("|psi_first - psi_opt| vs max(1-a*, b*) over r=10..80: fitted exponent = "
             "%.3f (need >= 1.8), %.2fs",
             slope, timer.seconds()));
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--cli") cli = argv[i + 1];

  criterion_table1(cli);
  criterion_ordering();
  criterion_figure3();
  criterion_densities();
  criterion_chain_law();
  criterion_free_energy();
  criterion_geometry();
  criterion_delta_identity();
  criterion_lemma();
  criterion_remainder_order();

  std::printf("%s: %d/10 criteria passed\n", failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              10 - failures);
  return failures;
}
