#include "etcone/step_graphon.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>

#include <json.hpp>

#include "etcone/errors.hpp"

namespace etcone::graphon {

namespace {

void check_measures(const std::vector<double>& measures, double sum_tol) {
  if (measures.empty())
    throw std::invalid_argument("block partition must have at least one block");
  double sum = 0.0;
  for (double m : measures) {
    if (!std::isfinite(m) || m <= 0.0)
      throw std::invalid_argument("block measures must be positive and finite");
    sum += m;
  }
  if (std::abs(sum - 1.0) > sum_tol)
    throw std::invalid_argument("block measures must sum to 1");
}

void check_matrix(const std::vector<double>& values, int m) {
  if (values.size() != static_cast<size_t>(m) * m)
    throw std::invalid_argument("value matrix size does not match block count");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("block values must be finite");
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (values[static_cast<size_t>(i) * m + j] != values[static_cast<size_t>(j) * m + i])
        throw std::invalid_argument("value matrix must be symmetric");
}

}  // namespace

BlockFunction::BlockFunction(std::vector<double> measures, std::vector<double> values_row_major)
    : blocks_(static_cast<int>(measures.size())),
      measures_(std::move(measures)),
      values_(std::move(values_row_major)) {
  check_measures(measures_, 1e-9);
  check_matrix(values_, blocks_);
}

void BlockFunction::set_value(int i, int j, double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("block values must be finite");
  values_[static_cast<size_t>(i) * blocks_ + j] = v;
  values_[static_cast<size_t>(j) * blocks_ + i] = v;
}

double BlockFunction::sup_norm() const {
  double best = 0.0;
  for (double v : values_) best = std::max(best, std::abs(v));
  return best;
}

double BlockFunction::integral() const {
  double sum = 0.0;
  for (int i = 0; i < blocks_; ++i)
    for (int j = 0; j < blocks_; ++j)
      sum += value(i, j) * measures_[i] * measures_[j];
  return sum;
}

StepGraphon::StepGraphon(std::vector<double> measures, std::vector<double> values_row_major)
    : StepGraphon(BlockFunction(std::move(measures), std::move(values_row_major))) {}

StepGraphon::StepGraphon(BlockFunction fn) : fn_(std::move(fn)) {
  check_measures(fn_.measures(), 1e-12);
  for (double v : fn_.values())
    if (v < 0.0 || v > 1.0)
      throw std::invalid_argument("graphon values must lie in [0,1]");
}

bool StepGraphon::random_free() const {
  for (double v : fn_.values())
    if (v != 0.0 && v != 1.0) return false;
  return true;
}

std::string StepGraphon::to_json() const {
  nlohmann::json j;
  j["measures"] = measures();
  std::vector<std::vector<double>> rows(blocks());
  for (int i = 0; i < blocks(); ++i) {
    rows[i].resize(blocks());
    for (int k = 0; k < blocks(); ++k) rows[i][k] = value(i, k);
  }
  j["values"] = rows;
  return j.dump();
}

StepGraphon StepGraphon::from_json(const std::string& text) {
  std::vector<double> measures;
  std::vector<std::vector<double>> rows;
  try {
    nlohmann::json j = nlohmann::json::parse(text);
    measures = j.at("measures").get<std::vector<double>>();
    rows = j.at("values").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("invalid graphon json: ") + e.what());
  }
  const size_t m = measures.size();
  if (rows.size() != m)
    throw std::invalid_argument("invalid graphon json: values row count mismatch");
  std::vector<double> values;
  values.reserve(m * m);
  for (const auto& row : rows) {
    if (row.size() != m)
      throw std::invalid_argument("invalid graphon json: values must be square");
    values.insert(values.end(), row.begin(), row.end());
  }
  return StepGraphon(std::move(measures), std::move(values));
}

StepGraphon turan_graphon(int classes) {
  if (classes < 1) throw std::invalid_argument("turan_graphon: classes must be >= 1");
  std::vector<double> measures(classes, 1.0 / classes);
  std::vector<double> values(static_cast<size_t>(classes) * classes, 1.0);
  for (int i = 0; i < classes; ++i) values[static_cast<size_t>(i) * classes + i] = 0.0;
  return StepGraphon(std::move(measures), std::move(values));
}

StepGraphon constant_graphon(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("constant_graphon: value must lie in [0,1]");
  return StepGraphon({1.0}, {p});
}

StepGraphon graph_to_graphon(const std::vector<std::vector<int>>& adjacency) {
  const size_t n = adjacency.size();
  if (n == 0) throw std::invalid_argument("graph_to_graphon: empty graph");
  std::vector<double> values(n * n);
  for (size_t i = 0; i < n; ++i) {
    if (adjacency[i].size() != n)
      throw std::invalid_argument("graph_to_graphon: adjacency matrix must be square");
    for (size_t j = 0; j < n; ++j) {
      int a = adjacency[i][j];
      if (a != 0 && a != 1)
        throw std::invalid_argument("graph_to_graphon: entries must be 0 or 1");
      if (i == j && a != 0)
        throw std::invalid_argument("graph_to_graphon: loops are not allowed");
      if (adjacency[j][i] != a)
        throw std::invalid_argument("graph_to_graphon: adjacency matrix must be symmetric");
      values[i * n + j] = a;
    }
  }
  return StepGraphon(std::vector<double>(n, 1.0 / static_cast<double>(n)), std::move(values));
}

SubgraphPattern::SubgraphPattern(int vertices, std::vector<std::pair<int, int>> edges)
    : vertices_(vertices), edges_(std::move(edges)) {
  if (vertices_ < 1) throw std::invalid_argument("pattern must have at least one vertex");
  std::set<std::pair<int, int>> seen;
  for (auto& [u, v] : edges_) {
    if (u < 0 || v < 0 || u >= vertices_ || v >= vertices_)
      throw std::invalid_argument("pattern edge endpoint out of range");
    if (u == v) throw std::invalid_argument("pattern loops are not allowed");
    if (u > v) std::swap(u, v);
    if (!seen.insert({u, v}).second)
      throw std::invalid_argument("pattern has a duplicate edge");
  }
}

SubgraphPattern SubgraphPattern::single_edge() { return {2, {{0, 1}}}; }

SubgraphPattern SubgraphPattern::triangle() { return complete(3); }

SubgraphPattern SubgraphPattern::two_star() { return {3, {{0, 1}, {0, 2}}}; }

SubgraphPattern SubgraphPattern::path(int edge_count) {
  if (edge_count < 1) throw std::invalid_argument("path needs at least one edge");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < edge_count; ++i) edges.push_back({i, i + 1});
  return {edge_count + 1, std::move(edges)};
}

SubgraphPattern SubgraphPattern::cycle(int length) {
  if (length < 3) throw std::invalid_argument("cycle length must be >= 3");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < length; ++i) edges.push_back({i, (i + 1) % length});
  return {length, std::move(edges)};
}

SubgraphPattern SubgraphPattern::complete(int vertices) {
  if (vertices < 1) throw std::invalid_argument("complete pattern needs >= 1 vertex");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < vertices; ++i)
    for (int j = i + 1; j < vertices; ++j) edges.push_back({i, j});
  return {vertices, std::move(edges)};
}

namespace {

// Sum over all block assignments of the product of values over pattern edges,
// weighted by block measures when requested.
double assignment_sum(const SubgraphPattern& p, const BlockFunction& f, bool weighted) {
  const int h = p.vertices();
  const int n = f.blocks();
  // multiply each edge factor when its later endpoint is placed
  std::vector<std::vector<int>> earlier(h);
  for (const auto& [u, v] : p.edges()) earlier[std::max(u, v)].push_back(std::min(u, v));
  std::vector<int> at(h, 0);
  double total = 0.0;
  auto place = [&](auto&& self, int v, double partial) -> void {
    if (v == h) {
      total += partial;
      return;
    }
    for (int b = 0; b < n; ++b) {
      at[v] = b;
      double next = weighted ? partial * f.measure(b) : partial;
      for (int u : earlier[v]) next *= f.value(at[u], b);
      if (next != 0.0) self(self, v + 1, next);
    }
  };
  place(place, 0, 1.0);
  return total;
}

}  // namespace

double hom_density(const SubgraphPattern& pattern, const BlockFunction& fn) {
  const int n = fn.blocks();
  bool uniform = true;
  for (int i = 1; i < n; ++i) uniform = uniform && (fn.measure(i) == fn.measure(0));
  if (uniform) {
    // with equal blocks the density is (sum of edge products) / n^h, which
    // for 0/1 embeddings reproduces homomorphism-count / n^h bit for bit
    double cells = 1.0;
    bool exact = true;
    for (int v = 0; v < pattern.vertices() && exact; ++v) {
      cells *= n;
      exact = cells < 9007199254740992.0;  // 2^53
    }
    if (exact) return assignment_sum(pattern, fn, false) / cells;
  }
  return assignment_sum(pattern, fn, true);
}

double hom_density(const SubgraphPattern& pattern, const StepGraphon& w) {
  return hom_density(pattern, w.fn());
}

BlockFunction delta_operator(const SubgraphPattern& pattern, const StepGraphon& w) {
  if (pattern.edges().empty())
    throw std::invalid_argument("delta_operator: pattern has no edges");
  const BlockFunction& f = w.fn();
  const int n = f.blocks();
  const int h = pattern.vertices();
  const auto& edges = pattern.edges();
  std::vector<double> acc(static_cast<size_t>(n) * n, 0.0);
  std::vector<double> pinned(static_cast<size_t>(n) * n, 0.0);

  for (size_t drop = 0; drop < edges.size(); ++drop) {
    const auto [r, s] = edges[drop];
    std::vector<int> others;
    for (int v = 0; v < h; ++v)
      if (v != r && v != s) others.push_back(v);
    std::vector<int> pos(h, -1);
    for (size_t i = 0; i < others.size(); ++i) pos[others[i]] = static_cast<int>(i);
    // group remaining edges by the placement step that completes them
    std::vector<std::vector<std::pair<int, int>>> due(others.size());
    std::vector<std::pair<int, int>> pin_pin;
    for (size_t e = 0; e < edges.size(); ++e) {
      if (e == drop) continue;
      const auto [x, y] = edges[e];
      int last = std::max(pos[x], pos[y]);
      if (last < 0)
        pin_pin.push_back({x, y});
      else
        due[last].push_back({x, y});
    }
    std::vector<int> at(h, -1);
    for (int bi = 0; bi < n; ++bi) {
      for (int bj = 0; bj < n; ++bj) {
        at[r] = bi;
        at[s] = bj;
        double base = 1.0;
        for (const auto& [x, y] : pin_pin) base *= f.value(at[x], at[y]);
        double total = 0.0;
        auto place = [&](auto&& self, size_t idx, double partial) -> void {
          if (idx == others.size()) {
            total += partial;
            return;
          }
          for (int b = 0; b < n; ++b) {
            at[others[idx]] = b;
            double next = partial * f.measure(b);
            for (const auto& [x, y] : due[idx]) next *= f.value(at[x], at[y]);
            if (next != 0.0) self(self, idx + 1, next);
          }
        };
        if (base != 0.0) place(place, 0, base);
        pinned[static_cast<size_t>(bi) * n + bj] = total;
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        acc[static_cast<size_t>(i) * n + j] +=
            0.5 * (pinned[static_cast<size_t>(i) * n + j] + pinned[static_cast<size_t>(j) * n + i]);
  }
  return BlockFunction(f.measures(), std::move(acc));
}

DeltaDecomposition decompose_on_support(const BlockFunction& fn, const StepGraphon& support) {
  if (!support.random_free())
    throw std::invalid_argument("decompose_on_support: support graphon must be 0/1 valued");
  if (fn.blocks() != support.blocks() || fn.measures() != support.measures())
    throw std::invalid_argument("decompose_on_support: partitions do not match");
  const int n = fn.blocks();
  double wsum[2] = {0.0, 0.0}, vsum[2] = {0.0, 0.0}, first[2] = {0.0, 0.0};
  bool seen[2] = {false, false}, constant[2] = {true, true};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int part = support.value(i, j) == 1.0 ? 1 : 0;
      const double v = fn.value(i, j);
      if (!seen[part]) {
        seen[part] = true;
        first[part] = v;
      } else {
        constant[part] = constant[part] && (v == first[part]);
      }
      wsum[part] += fn.measure(i) * fn.measure(j);
      vsum[part] += fn.measure(i) * fn.measure(j) * v;
    }
  }
  DeltaDecomposition d;
  // a blockwise-constant fit is reported exactly, with zero residual
  const double on = seen[1] ? (constant[1] ? first[1] : vsum[1] / wsum[1]) : 0.0;
  const double off = seen[0] ? (constant[0] ? first[0] : vsum[0] / wsum[0]) : 0.0;
  d.coeff_on_support = on;
  d.coeff_off_support = off;
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double fit = support.value(i, j) == 1.0 ? on : off;
      worst = std::max(worst, std::abs(fn.value(i, j) - fit));
    }
  d.residual_sup_norm = worst;
  return d;
}

Refinement common_refinement(const std::vector<double>& a, const std::vector<double>& b) {
  constexpr double kSnap = 1e-12;  // boundaries closer than this are merged
  Refinement r;
  size_t ia = 0, ib = 0;
  double ra = a.empty() ? 0.0 : a[0];
  double rb = b.empty() ? 0.0 : b[0];
  while (ia < a.size() && ib < b.size()) {
    const double cell = std::min(ra, rb);
    if (cell > kSnap) {
      r.measures.push_back(cell);
      r.left.push_back(static_cast<int>(ia));
      r.right.push_back(static_cast<int>(ib));
    }
    ra -= cell;
    rb -= cell;
    if (ra <= kSnap) {
      if (++ia < a.size()) ra = a[ia];
    }
    if (rb <= kSnap) {
      if (++ib < b.size()) rb = b[ib];
    }
  }
  return r;
}

BlockFunction difference(const StepGraphon& a, const StepGraphon& b) {
  const Refinement ref = common_refinement(a.measures(), b.measures());
  const int m = static_cast<int>(ref.measures.size());
  std::vector<double> values(static_cast<size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      values[static_cast<size_t>(i) * m + j] =
          a.value(ref.left[i], ref.left[j]) - b.value(ref.right[i], ref.right[j]);
  return BlockFunction(ref.measures, std::move(values));
}

double l1_distance(const StepGraphon& a, const StepGraphon& b) {
  const BlockFunction d = difference(a, b);
  double sum = 0.0;
  for (int i = 0; i < d.blocks(); ++i)
    for (int j = 0; j < d.blocks(); ++j)
      sum += std::abs(d.value(i, j)) * d.measure(i) * d.measure(j);
  return sum;
}

double cut_distance(const StepGraphon& a, const StepGraphon& b) {
  const BlockFunction d = difference(a, b);
  const int m = d.blocks();
  if (m > 20)
    throw capacity_error("cut_distance: common refinement has " + std::to_string(m) +
                         " blocks; the exact search handles at most 20");
  std::vector<double> mass(static_cast<size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      mass[static_cast<size_t>(i) * m + j] = d.value(i, j) * d.measure(i) * d.measure(j);
  // For a fixed row set the best column set keeps one sign of the column
  // sums; walk row sets in Gray order so each step adjusts one row.
  std::vector<double> col(m, 0.0);
  double best = 0.0;
  std::uint32_t prev = 0;
  for (std::uint32_t g = 1; g < (1u << m); ++g) {
    const std::uint32_t code = g ^ (g >> 1);
    const std::uint32_t flip = code ^ prev;
    prev = code;
    const int row = std::countr_zero(flip);
    const double sgn = (code & flip) ? 1.0 : -1.0;
    for (int j = 0; j < m; ++j) col[j] += sgn * mass[static_cast<size_t>(row) * m + j];
    double pos = 0.0, neg = 0.0;
    for (int j = 0; j < m; ++j) {
      if (col[j] > 0.0)
        pos += col[j];
      else
        neg += col[j];
    }
    best = std::max({best, pos, -neg});
  }
  return best;
}

AveragedPerturbation averaged_perturbation(const StepGraphon& w, const StepGraphon& base) {
  if (!base.random_free())
    throw std::invalid_argument("averaged_perturbation: base graphon must be random-free");
  const Refinement ref = common_refinement(w.measures(), base.measures());
  const int m = static_cast<int>(ref.measures.size());
  double wsum[2] = {0.0, 0.0}, vsum[2] = {0.0, 0.0};
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const int part = base.value(ref.right[i], ref.right[j]) == 1.0 ? 1 : 0;
      const double wt = ref.measures[i] * ref.measures[j];
      wsum[part] += wt;
      vsum[part] += wt * w.value(ref.left[i], ref.left[j]);
    }
  }
  if (wsum[1] <= 0.0)
    throw degenerate_support_error("averaged_perturbation: support has measure zero");
  if (wsum[0] <= 0.0)
    throw degenerate_support_error("averaged_perturbation: support complement has measure zero");
  const double on = std::clamp(vsum[1] / wsum[1], 0.0, 1.0);
  const double off = std::clamp(vsum[0] / wsum[0], 0.0, 1.0);
  std::vector<double> values(static_cast<size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      values[static_cast<size_t>(i) * m + j] =
          base.value(ref.right[i], ref.right[j]) == 1.0 ? on : off;
  std::vector<double> measures = ref.measures;
  double total = 0.0;
  for (double mu : measures) total += mu;
  if (std::abs(total - 1.0) > 1e-13)
    for (double& mu : measures) mu /= total;
  return {on, off, StepGraphon(std::move(measures), std::move(values))};
}

double pair_integral(const BlockFunction& a, const BlockFunction& b) {
  if (a.blocks() != b.blocks() || a.measures() != b.measures())
    throw std::invalid_argument("pair_integral: partitions do not match");
  double sum = 0.0;
  for (int i = 0; i < a.blocks(); ++i)
    for (int j = 0; j < a.blocks(); ++j)
      sum += a.value(i, j) * b.value(i, j) * a.measure(i) * a.measure(j);
  return sum;
}

}  // namespace etcone::graphon
