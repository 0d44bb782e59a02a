#include "etcone/sampler.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include "etcone/errors.hpp"
#include "etcone/perturbation.hpp"

namespace etcone::sampler {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t SplitMix64::next() {
  state_ += kGolden;
  return mix(state_);
}

SplitMix64 SplitMix64::child(std::uint64_t root_seed, std::uint64_t stream) {
  // One full mixing round keeps sibling streams decorrelated even for
  // consecutive stream indices.
  return SplitMix64(SplitMix64(root_seed ^ (stream + 1) * kGolden).next());
}

double SplitMix64::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint32_t SplitMix64::below(std::uint32_t n) {
  // Multiply-shift map of the full 64-bit output onto [0, n).
  return static_cast<std::uint32_t>(
      (static_cast<unsigned __int128>(next()) * n) >> 64);
}

// ---------------------------------------------------------------------------
// GraphState

namespace {

constexpr int kMaxVertices = 2000;

void check_vertex_count(int n) {
  if (n < 1) throw std::invalid_argument("GraphState: vertex count must be positive");
  if (n > kMaxVertices)
    throw capacity_error("GraphState: adjacency storage handles n <= 2000");
}

}  // namespace

GraphState::GraphState(int n) {
  check_vertex_count(n);
  n_ = n;
  words_ = (n + 63) / 64;
  rows_.assign(static_cast<std::size_t>(n_) * words_, 0ull);
}

bool GraphState::has_edge(int i, int j) const {
  if (i < 0 || i >= n_ || j < 0 || j >= n_)
    throw std::invalid_argument("GraphState: vertex index out of range");
  if (i == j) return false;
  return (rows_[static_cast<std::size_t>(i) * words_ + (j >> 6)] >> (j & 63)) & 1ull;
}

int GraphState::common_neighbors(int i, int j) const {
  if (i < 0 || i >= n_ || j < 0 || j >= n_)
    throw std::invalid_argument("GraphState: vertex index out of range");
  const std::uint64_t* ri = rows_.data() + static_cast<std::size_t>(i) * words_;
  const std::uint64_t* rj = rows_.data() + static_cast<std::size_t>(j) * words_;
  int count = 0;
  // Diagonal bits are never set, so i and j exclude themselves automatically.
  for (int w = 0; w < words_; ++w) count += std::popcount(ri[w] & rj[w]);
  return count;
}

void GraphState::toggle(int i, int j) {
  if (i < 0 || i >= n_ || j < 0 || j >= n_)
    throw std::invalid_argument("GraphState: vertex index out of range");
  if (i == j) throw std::invalid_argument("GraphState: cannot toggle a loop");
  const int common = common_neighbors(i, j);
  const std::uint64_t bi = 1ull << (j & 63);
  const std::uint64_t bj = 1ull << (i & 63);
  std::uint64_t& wi = rows_[static_cast<std::size_t>(i) * words_ + (j >> 6)];
  std::uint64_t& wj = rows_[static_cast<std::size_t>(j) * words_ + (i >> 6)];
  if (wi & bi) {
    wi &= ~bi;
    wj &= ~bj;
    edges_ -= 1;
    triangles_ -= common;
  } else {
    wi |= bi;
    wj |= bj;
    edges_ += 1;
    triangles_ += common;
  }
}

std::pair<int, std::int64_t> GraphState::toggle_delta(int i, int j) const {
  if (i < 0 || i >= n_ || j < 0 || j >= n_)
    throw std::invalid_argument("GraphState: vertex index out of range");
  if (i == j) throw std::invalid_argument("GraphState: cannot toggle a loop");
  const std::int64_t common = common_neighbors(i, j);
  if (has_edge(i, j)) return {-1, -common};
  return {+1, +common};
}

GraphState GraphState::complete(int n) {
  GraphState g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      g.rows_[static_cast<std::size_t>(i) * g.words_ + (j >> 6)] |= 1ull << (j & 63);
      g.rows_[static_cast<std::size_t>(j) * g.words_ + (i >> 6)] |= 1ull << (i & 63);
    }
  g.edges_ = static_cast<std::int64_t>(n) * (n - 1) / 2;
  g.triangles_ = static_cast<std::int64_t>(n) * (n - 1) * (n - 2) / 6;
  return g;
}

GraphState GraphState::bipartite_split(int n) {
  GraphState g(n);
  const int h = n / 2;
  for (int i = 0; i < h; ++i)
    for (int j = h; j < n; ++j) {
      g.rows_[static_cast<std::size_t>(i) * g.words_ + (j >> 6)] |= 1ull << (j & 63);
      g.rows_[static_cast<std::size_t>(j) * g.words_ + (i >> 6)] |= 1ull << (i & 63);
    }
  g.edges_ = static_cast<std::int64_t>(h) * (n - h);
  g.triangles_ = 0;
  return g;
}

GraphState GraphState::random(int n, double p, SplitMix64& rng) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("GraphState::random: density must lie in [0, 1]");
  GraphState g(n);
  // Consumes exactly n(n-1)/2 variates regardless of p, so downstream draws
  // stay aligned across configurations.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < p) g.toggle(i, j);
  return g;
}

GraphState GraphState::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  GraphState g(n);
  for (const auto& [i, j] : edges) {
    if (g.has_edge(i, j)) throw std::invalid_argument("GraphState::from_edges: duplicate edge");
    g.toggle(i, j);
  }
  return g;
}

double GraphState::edge_density() const {
  return 2.0 * static_cast<double>(edges_) / (static_cast<double>(n_) * n_);
}

double GraphState::triangle_density() const {
  return 6.0 * static_cast<double>(triangles_) /
         (static_cast<double>(n_) * n_ * n_);
}

void GraphState::recount(std::int64_t& edges, std::int64_t& triangles) const {
  std::int64_t e = 0;
  for (std::uint64_t w : rows_) e += std::popcount(w);
  edges = e / 2;
  std::int64_t t = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (has_edge(i, j)) t += common_neighbors(i, j);
  triangles = t / 3;  // each triangle tallied once per edge
}

std::vector<std::pair<int, int>> GraphState::edges_sorted() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(edges_));
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (has_edge(i, j)) out.emplace_back(i, j);
  return out;
}

std::uint64_t GraphState::edge_bitmask() const {
  if (n_ > 11)
    throw std::invalid_argument("GraphState::edge_bitmask: needs n <= 11 (64-bit mask)");
  std::uint64_t mask = 0;
  int bit = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j, ++bit)
      if (has_edge(i, j)) mask |= 1ull << bit;
  return mask;
}

// ---------------------------------------------------------------------------
// Metropolis dynamics

double log_weight_delta(const GraphState& g, int i, int j, double beta1, double beta2) {
  const auto [d_edges, d_triangles] = g.toggle_delta(i, j);
  return 2.0 * beta1 * d_edges +
         (6.0 * beta2 / g.size()) * static_cast<double>(d_triangles);
}

bool metropolis_step(GraphState& g, SplitMix64& rng, double beta1, double beta2) {
  const int n = g.size();
  if (n < 2) throw std::invalid_argument("metropolis_step: needs at least two vertices");
  std::uint32_t i = rng.below(n);
  std::uint32_t j = rng.below(n);
  while (i == j) {
    i = rng.below(n);
    j = rng.below(n);
  }
  const double lw = log_weight_delta(g, static_cast<int>(i), static_cast<int>(j), beta1, beta2);
  // The acceptance variate is consumed only on downhill proposals so uphill
  // moves cost one pair draw, matching the documented stream layout.
  bool accept = true;
  if (lw < 0.0) accept = rng.uniform() < std::exp(lw);
  if (accept) g.toggle(static_cast<int>(i), static_cast<int>(j));
  return accept;
}

// ---------------------------------------------------------------------------
// Chains

namespace {

void check_config(const SamplerConfig& config) {
  if (config.n < 2) throw std::invalid_argument("run_chain: n must be at least 2");
  if (config.n > kMaxVertices)
    throw capacity_error("run_chain: adjacency storage handles n <= 2000");
  if (!std::isfinite(config.beta1) || !std::isfinite(config.beta2))
    throw std::invalid_argument("run_chain: parameters must be finite");
  if (config.steps < 1) throw std::invalid_argument("run_chain: steps must be positive");
  if (config.burn_in < 0 || config.burn_in >= config.steps)
    throw std::invalid_argument("run_chain: burn-in must lie in [0, steps)");
  if (config.thin < 1) throw std::invalid_argument("run_chain: thinning must be positive");
  if (config.chains < 1) throw std::invalid_argument("run_chain: chain count must be positive");
  if (!(config.init.density >= 0.0 && config.init.density <= 1.0))
    throw std::invalid_argument("run_chain: initial density must lie in [0, 1]");
}

GraphState make_init(int n, const InitSpec& init, SplitMix64& rng) {
  switch (init.kind) {
    case InitKind::empty: return GraphState(n);
    case InitKind::complete: return GraphState::complete(n);
    case InitKind::bipartite_split: return GraphState::bipartite_split(n);
    case InitKind::random: return GraphState::random(n, init.density, rng);
  }
  throw std::invalid_argument("run_chain: unknown initial state kind");
}

// Mean and standard error; the error uses non-overlapping batch means to
// absorb autocorrelation once enough samples are available.
std::pair<double, double> mean_and_stderr(const std::vector<double>& xs) {
  const std::int64_t m = static_cast<std::int64_t>(xs.size());
  if (m == 0) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(m);
  if (m == 1) return {mean, 0.0};
  const int batches = m >= 64 ? 16 : (m >= 16 ? 4 : 1);
  if (batches == 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(m - 1) / static_cast<double>(m))};
  }
  const std::int64_t len = m / batches;
  std::vector<double> bm(batches, 0.0);
  for (int b = 0; b < batches; ++b) {
    for (std::int64_t s = 0; s < len; ++s) bm[b] += xs[b * len + s];
    bm[b] /= static_cast<double>(len);
  }
  double gb = 0.0;
  for (double v : bm) gb += v;
  gb /= batches;
  double ss = 0.0;
  for (double v : bm) ss += (v - gb) * (v - gb);
  return {mean, std::sqrt(ss / (batches - 1) / batches)};
}

}  // namespace

ChainResult run_chain(const SamplerConfig& config, std::uint64_t stream) {
  check_config(config);
  SplitMix64 rng = SplitMix64::child(config.seed, stream);
  GraphState g = make_init(config.n, config.init, rng);

  ChainResult out;
  out.stream = stream;
  out.init = config.init;
  const std::int64_t expected =
      (config.steps - config.burn_in) / config.thin + 1;
  out.trajectory.reserve(static_cast<std::size_t>(std::max<std::int64_t>(expected, 0)));

  std::vector<double> es, ts;
  std::int64_t accepted = 0;
  for (std::int64_t s = 1; s <= config.steps; ++s) {
    accepted += metropolis_step(g, rng, config.beta1, config.beta2) ? 1 : 0;
    if (s > config.burn_in && (s - config.burn_in) % config.thin == 0) {
      const double e = g.edge_density();
      const double t = g.triangle_density();
      out.trajectory.push_back({s, e, t});
      es.push_back(e);
      ts.push_back(t);
    }
  }

  auto [me, se] = mean_and_stderr(es);
  auto [mt, st] = mean_and_stderr(ts);
  out.summary.mean_edge_density = me;
  out.summary.stderr_edge_density = se;
  out.summary.mean_triangle_density = mt;
  out.summary.stderr_triangle_density = st;
  out.summary.samples = static_cast<std::int64_t>(es.size());
  out.summary.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(config.steps);
  out.final_state = std::move(g);
  return out;
}

std::vector<ChainResult> run_chains(const SamplerConfig& config,
                                    const std::vector<InitSpec>& inits) {
  check_config(config);
  const std::vector<InitSpec> starts = inits.empty() ? std::vector<InitSpec>{config.init} : inits;
  for (const InitSpec& init : starts)
    if (!(init.density >= 0.0 && init.density <= 1.0))
      throw std::invalid_argument("run_chains: initial density must lie in [0, 1]");

  const int chains = config.chains;
  std::vector<std::optional<ChainResult>> slots(chains);
  std::atomic<int> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&]() {
    for (;;) {
      const int idx = cursor.fetch_add(1);
      if (idx >= chains) return;
      try {
        SamplerConfig local = config;
        local.init = starts[idx % starts.size()];
        slots[idx] = run_chain(local, static_cast<std::uint64_t>(idx));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const unsigned hw = std::thread::hardware_concurrency();
  const int pool_size = std::min<int>(chains, hw ? static_cast<int>(hw) : 4);
  std::vector<std::thread> pool;
  pool.reserve(pool_size);
  for (int i = 0; i < pool_size; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<ChainResult> out;
  out.reserve(chains);
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

// ---------------------------------------------------------------------------
// Classification

namespace {

constexpr int kConeCap = 20;

// Minimal euclidean distance from (e, t) to the density image of cone k,
// by coarse scan plus shrinking-window refinement over (a, b) in [0,1]^2.
double cone_curve_distance(int k, double e, double t) {
  const auto dist = [&](double a, double b) {
    const double de = e - perturb::cone_edge_density(k, a, b);
    const double dt = t - perturb::cone_triangle_density(k, a, b);
    return std::hypot(de, dt);
  };
  double best = std::numeric_limits<double>::infinity();
  double ba = 0.0, bb = 0.0;
  for (int ia = 0; ia <= 40; ++ia)
    for (int ib = 0; ib <= 40; ++ib) {
      const double a = ia / 40.0;
      const double b = ib / 40.0;
      const double d = dist(a, b);
      if (d < best) {
        best = d;
        ba = a;
        bb = b;
      }
    }
  double window = 0.05;  // two coarse cells on each side
  for (int round = 0; round < 6; ++round) {
    const double a0 = std::clamp(ba - window, 0.0, 1.0);
    const double a1 = std::clamp(ba + window, 0.0, 1.0);
    const double b0 = std::clamp(bb - window, 0.0, 1.0);
    const double b1 = std::clamp(bb + window, 0.0, 1.0);
    double na = ba, nb = bb;
    for (int ia = 0; ia <= 16; ++ia)
      for (int ib = 0; ib <= 16; ++ib) {
        const double a = a0 + (a1 - a0) * ia / 16.0;
        const double b = b0 + (b1 - b0) * ib / 16.0;
        const double d = dist(a, b);
        if (d < best) {
          best = d;
          na = a;
          nb = b;
        }
      }
    ba = na;
    bb = nb;
    window *= 0.25;
  }
  return best;
}

std::int64_t frustrated_edges(const std::vector<std::vector<int>>& adj,
                              const std::vector<int>& color) {
  std::int64_t bad = 0;
  for (int v = 0; v < static_cast<int>(adj.size()); ++v)
    for (int u : adj[v])
      if (u > v && color[u] == color[v]) ++bad;
  return bad;
}

// Greedy single-flip descent: flip any vertex with more same-colored than
// cross-colored neighbors; each flip strictly lowers the frustration count.
void flip_descent(const std::vector<std::vector<int>>& adj, std::vector<int>& color) {
  const int n = static_cast<int>(adj.size());
  for (int pass = 0; pass < 200; ++pass) {
    bool changed = false;
    for (int v = 0; v < n; ++v) {
      int same = 0;
      for (int u : adj[v]) same += color[u] == color[v];
      if (2 * same > static_cast<int>(adj[v].size())) {
        color[v] ^= 1;
        changed = true;
      }
    }
    if (!changed) return;
  }
}

double bipartiteness_score(const GraphState& g) {
  const int n = g.size();
  if (n < 2) return 1.0;
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (g.has_edge(i, j)) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }

  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  const auto consider = [&](std::vector<int> color) {
    flip_descent(adj, color);
    best = std::min(best, frustrated_edges(adj, color));
  };

  // Parity coloring from a breadth-first sweep; exact on bipartite graphs.
  {
    std::vector<int> color(n, -1);
    std::vector<int> queue;
    for (int root = 0; root < n; ++root) {
      if (color[root] != -1) continue;
      color[root] = 0;
      queue.assign(1, root);
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const int v = queue[head];
        for (int u : adj[v])
          if (color[u] == -1) {
            color[u] = color[v] ^ 1;
            queue.push_back(u);
          }
      }
    }
    consider(std::move(color));
  }
  consider(std::vector<int>(n, 0));
  for (std::uint64_t restart = 0; restart < 4; ++restart) {
    SplitMix64 rng = SplitMix64::child(kGolden, restart);
    std::vector<int> color(n);
    for (int v = 0; v < n; ++v) color[v] = static_cast<int>(rng.next() & 1ull);
    consider(std::move(color));
  }

  const double pairs = 0.5 * static_cast<double>(n) * (n - 1);
  return 1.0 - static_cast<double>(best) / pairs;
}

}  // namespace

SampleClassification classify_sample(const GraphState& g) {
  const double e = g.edge_density();
  const double t = g.triangle_density();

  std::array<double, kConeCap + 1> dists{};
  double dmin = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= kConeCap; ++k) {
    dists[k] = cone_curve_distance(k, e, t);
    dmin = std::min(dmin, dists[k]);
  }
  int nearest = 1;
  for (int k = 1; k <= kConeCap; ++k)
    if (dists[k] <= dmin + 1e-9) nearest = k;  // ties resolve upward

  SampleClassification out;
  out.nearest_k = nearest;
  out.distance = dists[nearest];
  out.at_cap = nearest == kConeCap;
  out.bipartiteness_score = bipartiteness_score(g);
  return out;
}

// ---------------------------------------------------------------------------
// Exhaustive normalization

double exact_free_energy(int n, double beta1, double beta2) {
  if (n < 1) throw std::invalid_argument("exact_free_energy: vertex count must be positive");
  if (n > 7)
    throw capacity_error("exact_free_energy: exhaustive enumeration handles n <= 7");
  if (!std::isfinite(beta1) || !std::isfinite(beta2))
    throw std::invalid_argument("exact_free_energy: parameters must be finite");

  int pair_index[7][7];
  int pairs = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pair_index[i][j] = pairs++;
  std::vector<std::uint32_t> triples;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int l = j + 1; l < n; ++l)
        triples.push_back((1u << pair_index[i][j]) | (1u << pair_index[i][l]) |
                          (1u << pair_index[j][l]));

  const std::uint32_t total = 1u << pairs;
  const double edge_scale = 2.0 * beta1;
  const double triangle_scale = 6.0 * beta2 / n;
  std::vector<double> exponents(total);
  double xmax = -std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < total; ++mask) {
    int t = 0;
    for (std::uint32_t tm : triples) t += (mask & tm) == tm;
    const double x = edge_scale * std::popcount(mask) + triangle_scale * t;
    exponents[mask] = x;
    xmax = std::max(xmax, x);
  }
  double sum = 0.0, comp = 0.0;  // Kahan: 2^21 terms near exp(0)
  for (double x : exponents) {
    const double y = std::exp(x - xmax) - comp;
    const double next = sum + y;
    comp = (next - sum) - y;
    sum = next;
  }
  return (xmax + std::log(sum)) / (static_cast<double>(n) * n);
}

}  // namespace etcone::sampler
