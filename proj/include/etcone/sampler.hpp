#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace etcone::sampler {

// Splittable counter-based generator (SplitMix64). The algorithm id below is
// pinned in run metadata so trajectories stay reproducible across builds.
inline constexpr const char* kGeneratorId = "splitmix64-v1";

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  // Independent stream derived from a root seed: one mixing step applied to
  // root ^ (stream+1) * golden-ratio increment.
  static SplitMix64 child(std::uint64_t root_seed, std::uint64_t stream);

  std::uint64_t next();
  double uniform();                      // [0, 1), 53-bit mantissa
  std::uint32_t below(std::uint32_t n);  // uniform in [0, n)

 private:
  std::uint64_t state_;
};

// Labeled simple graph with incrementally maintained edge and triangle
// counts; adjacency rows are bitsets so common-neighbor counts are word ops.
class GraphState {
 public:
  explicit GraphState(int n);  // empty graph on n vertices

  static GraphState complete(int n);
  static GraphState bipartite_split(int n);  // complete bipartite, halves
  static GraphState random(int n, double p, SplitMix64& rng);
  static GraphState from_edges(int n, const std::vector<std::pair<int, int>>& edges);

  int size() const { return n_; }
  bool has_edge(int i, int j) const;
  int common_neighbors(int i, int j) const;
  void toggle(int i, int j);

  std::int64_t edge_count() const { return edges_; }
  std::int64_t triangle_count() const { return triangles_; }
  double edge_density() const;      // t(K2) = 2 edges / n^2
  double triangle_density() const;  // t(K3) = 6 triangles / n^3

  // (d_edges, d_triangles) of toggling pair (i,j); pure query.
  std::pair<int, std::int64_t> toggle_delta(int i, int j) const;

  // From-scratch tally, used to validate the incremental counters.
  void recount(std::int64_t& edges, std::int64_t& triangles) const;

  std::vector<std::pair<int, int>> edges_sorted() const;

  // Edge set packed into bits ordered by (i<j) lexicographically; n <= 11.
  std::uint64_t edge_bitmask() const;

 private:
  int n_ = 0;
  int words_ = 0;
  std::vector<std::uint64_t> rows_;
  std::int64_t edges_ = 0;
  std::int64_t triangles_ = 0;
};

// n^2 (T^beta(G') - T^beta(G)) for the toggle of (i,j):
// 2 beta1 d_edges + (6 beta2 / n) d_triangles.
double log_weight_delta(const GraphState& g, int i, int j, double beta1, double beta2);

// One Metropolis update on a uniform unordered pair; returns acceptance.
bool metropolis_step(GraphState& g, SplitMix64& rng, double beta1, double beta2);

enum class InitKind { empty, complete, bipartite_split, random };

struct InitSpec {
  InitKind kind = InitKind::random;
  double density = 0.5;  // only used by InitKind::random
};

struct SamplerConfig {
  int n = 60;
  double beta1 = 10.0;
  double beta2 = -7.5;
  std::int64_t steps = 5'000'000;
  std::int64_t burn_in = 1'000'000;
  std::int64_t thin = 1'000;
  std::uint64_t seed = 1;
  int chains = 1;
  InitSpec init;
};

struct TrajectoryPoint {
  std::int64_t step = 0;
  double edge_density = 0.0;
  double triangle_density = 0.0;
};

struct ChainSummary {
  double mean_edge_density = 0.0;
  double stderr_edge_density = 0.0;
  double mean_triangle_density = 0.0;
  double stderr_triangle_density = 0.0;
  std::int64_t samples = 0;
  double acceptance_rate = 0.0;
};

struct ChainResult {
  std::uint64_t stream = 0;  // child-stream index used for seeding
  InitSpec init;
  std::vector<TrajectoryPoint> trajectory;
  GraphState final_state = GraphState(1);
  ChainSummary summary;
};

// One chain on the child stream `stream` of config.seed.
ChainResult run_chain(const SamplerConfig& config, std::uint64_t stream = 0);

// config.chains chains in parallel; chain c starts from inits[c % inits.size()]
// (config.init when `inits` is empty) and uses stream c.
std::vector<ChainResult> run_chains(const SamplerConfig& config,
                                    const std::vector<InitSpec>& inits = {});

struct SampleClassification {
  int nearest_k = 1;
  double distance = 0.0;  // euclidean, in the (edge, triangle) density plane
  bool at_cap = false;    // nearest_k hit the k <= 20 search cap
  double bipartiteness_score = 0.0;
};

// Nearest cone-density curve over k <= 20 plus a 2-coloring frustration
// score; ties between k resolve to the largest k (flagged at the cap).
SampleClassification classify_sample(const GraphState& g);

// Exhaustive normalization constant (1/n^2) log sum over all labeled graphs;
// n <= 7.
double exact_free_energy(int n, double beta1, double beta2);

}  // namespace etcone::sampler
