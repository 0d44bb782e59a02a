#pragma once

#include <string>
#include <utility>
#include <vector>

namespace etcone::graphon {

// Symmetric block-constant function on [0,1]^2. The unit interval is split
// into consecutive blocks whose lengths are `measures`; values are
// unconstrained reals, stored as a dense row-major matrix.
class BlockFunction {
 public:
  BlockFunction(std::vector<double> measures, std::vector<double> values_row_major);

  int blocks() const { return blocks_; }
  double measure(int i) const { return measures_[static_cast<size_t>(i)]; }
  const std::vector<double>& measures() const { return measures_; }
  double value(int i, int j) const {
    return values_[static_cast<size_t>(i) * blocks_ + j];
  }
  const std::vector<double>& values() const { return values_; }

  // Sets (i,j) and (j,i) together so the matrix stays symmetric.
  void set_value(int i, int j, double v);

  double sup_norm() const;
  // Integral over [0,1]^2 with respect to the product Lebesgue measure.
  double integral() const;

 private:
  int blocks_ = 0;
  std::vector<double> measures_;
  std::vector<double> values_;
};

// A step graphon: block-constant, symmetric, values in [0,1], block measures
// positive and summing to 1 (within 1e-12).
class StepGraphon {
 public:
  StepGraphon(std::vector<double> measures, std::vector<double> values_row_major);
  explicit StepGraphon(BlockFunction fn);

  const BlockFunction& fn() const { return fn_; }
  int blocks() const { return fn_.blocks(); }
  double measure(int i) const { return fn_.measure(i); }
  const std::vector<double>& measures() const { return fn_.measures(); }
  double value(int i, int j) const { return fn_.value(i, j); }

  // True when every block value is exactly 0 or 1.
  bool random_free() const;

  std::string to_json() const;
  static StepGraphon from_json(const std::string& text);

 private:
  BlockFunction fn_;
};

// The complete multipartite graphon with `classes` equal parts: 0 on the
// diagonal blocks, 1 off the diagonal. classes = 1 gives the zero graphon.
StepGraphon turan_graphon(int classes);

StepGraphon constant_graphon(double p);

// Embeds a finite simple graph as a step graphon with n equal blocks.
// `adjacency` must be a symmetric 0/1 matrix with zero diagonal.
StepGraphon graph_to_graphon(const std::vector<std::vector<int>>& adjacency);

// A finite simple pattern graph for density computations. Vertices are
// 0..vertices-1; edges are unordered pairs without loops or duplicates.
class SubgraphPattern {
 public:
  SubgraphPattern(int vertices, std::vector<std::pair<int, int>> edges);

  int vertices() const { return vertices_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  static SubgraphPattern single_edge();
  static SubgraphPattern triangle();
  static SubgraphPattern two_star();
  static SubgraphPattern path(int edge_count);
  static SubgraphPattern cycle(int length);
  static SubgraphPattern complete(int vertices);

 private:
  int vertices_ = 0;
  std::vector<std::pair<int, int>> edges_;
};

// Homomorphism density t(H, f): the integral over all vertex placements of
// the product of f over the edges of H.
double hom_density(const SubgraphPattern& pattern, const BlockFunction& fn);
double hom_density(const SubgraphPattern& pattern, const StepGraphon& w);

// Sum over the edges of H of the density of H with that edge removed and its
// endpoints pinned at (x,y), symmetrized in (x,y). For the single edge this
// is the constant 1; for the triangle it is 3 * int f(x,z) f(y,z) dz.
BlockFunction delta_operator(const SubgraphPattern& pattern, const StepGraphon& w);

// Least-squares fit of a block function by a function constant on the support
// {w = 1} and on its complement, together with the sup-norm fit error.
struct DeltaDecomposition {
  double coeff_on_support = 0.0;
  double coeff_off_support = 0.0;
  double residual_sup_norm = 0.0;
  bool exact(double tol = 1e-10) const { return residual_sup_norm <= tol; }
};

DeltaDecomposition decompose_on_support(const BlockFunction& fn, const StepGraphon& support);

double l1_distance(const StepGraphon& a, const StepGraphon& b);

// Cut distance without measure rearrangement: sup over measurable S,T of
// |int_{S x T} (a - b)|. Exact optimum over block unions; the common
// refinement may have at most 20 blocks.
double cut_distance(const StepGraphon& a, const StepGraphon& b);

// Averages `w` over the support pattern of the random-free graphon `base`:
// one constant for {base = 1}, one for {base = 0}. Both parts must have
// positive measure.
struct AveragedPerturbation {
  double on_support = 0.0;
  double off_support = 0.0;
  StepGraphon flattened;
};

AveragedPerturbation averaged_perturbation(const StepGraphon& w, const StepGraphon& base);

// Common refinement of two block partitions of [0,1]. `left[c]` / `right[c]`
// give the source block of refined cell c in each input partition.
struct Refinement {
  std::vector<double> measures;
  std::vector<int> left;
  std::vector<int> right;
};

Refinement common_refinement(const std::vector<double>& a, const std::vector<double>& b);

// a - b as a block function on the common refinement.
BlockFunction difference(const StepGraphon& a, const StepGraphon& b);

// Integral of the pointwise product of two block functions sharing one
// partition (same measures, same block count).
double pair_integral(const BlockFunction& a, const BlockFunction& b);

}  // namespace etcone::graphon
