#include "etcone/edge_triangle.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "etcone/format.hpp"

namespace etcone::model {

namespace {

void require_unit_interval(double e, const char* who) {
  if (!(e >= 0.0 && e <= 1.0))
    throw std::invalid_argument(std::string(who) + ": edge density must lie in [0,1]");
}

// Uncapped segment index; valid for e in [0,1).
long long segment_index(double e) {
  const double ratio = e / (1.0 - e);
  // snap so that representable joints land in their lower segment
  long long k = static_cast<long long>(std::ceil(ratio - 1e-12));
  return k < 1 ? 1 : k;
}

}  // namespace

ModelParams ModelParams::from_beta(double beta1, double beta2) {
  if (!std::isfinite(beta1) || !std::isfinite(beta2))
    throw std::invalid_argument("ModelParams: parameters must be finite");
  ModelParams p;
  p.beta1 = beta1;
  p.beta2 = beta2;
  p.r = std::hypot(beta1, beta2);
  if (p.r > 0.0) {
    p.u1 = beta1 / p.r;
    p.u2 = beta2 / p.r;
  }
  return p;
}

ModelParams ModelParams::critical(double r, int segment) {
  if (!(r >= 0.0) || !std::isfinite(r))
    throw std::invalid_argument("ModelParams: scale must be finite and nonnegative");
  const std::array<double, 2> dir = critical_direction(segment);
  ModelParams p;
  p.r = r;
  p.u1 = dir[0];
  p.u2 = dir[1];
  p.beta1 = r * dir[0];
  p.beta2 = r * dir[1];
  return p;
}

int lower_boundary_segment(double edge) {
  require_unit_interval(edge, "lower_boundary_segment");
  if (edge == 1.0) return 0;  // beyond every segment; sentinel
  const long long k = segment_index(edge);
  const long long cap = std::numeric_limits<int>::max();
  return static_cast<int>(k < cap ? k : cap);
}

double razborov_lower_bound(double edge) {
  require_unit_interval(edge, "razborov_lower_bound");
  if (edge <= 0.5) return 0.0;
  if (edge == 1.0) return 1.0;
  const double k = static_cast<double>(segment_index(edge));
  double s2 = k * (k - edge * (k + 1.0));
  if (s2 < 0.0) s2 = 0.0;  // roundoff just past a joint
  const double s = std::sqrt(s2);
  return (k - 1.0) * (k * k * k - 3.0 * k * s2 - 2.0 * s2 * s) /
         (k * k * (k + 1.0) * (k + 1.0));
}

double razborov_lower_slope(double edge) {
  require_unit_interval(edge, "razborov_lower_slope");
  if (edge <= 0.5) return 0.0;
  if (edge == 1.0) return 3.0;
  const double k = static_cast<double>(segment_index(edge));
  double s2 = k * (k - edge * (k + 1.0));
  if (s2 < 0.0) s2 = 0.0;
  return 3.0 * (k - 1.0) * (k + std::sqrt(s2)) / (k * (k + 1.0));
}

double kruskal_katona_upper_bound(double edge) {
  require_unit_interval(edge, "kruskal_katona_upper_bound");
  return std::pow(edge, 1.5);
}

std::array<double, 2> boundary_derivatives(int segment) {
  if (segment < 1) throw std::invalid_argument("boundary_derivatives: segment must be >= 1");
  const double k = segment;
  return {3.0 * (k - 1.0) / (k + 1.0), 3.0 * k / (k + 1.0)};
}

std::array<double, 2> critical_direction(int segment) {
  if (segment < 1) throw std::invalid_argument("critical_direction: segment must be >= 1");
  const double k = segment;
  return {1.0, -((k + 1.0) * (k + 2.0)) / (k * (3.0 * k + 5.0))};
}

BoundaryPoint turan_point(int segment) {
  if (segment < 1) throw std::invalid_argument("turan_point: segment must be >= 1");
  const double k = segment;
  // single divisions of exact integer products, so these agree bit for bit
  // with hom_density on turan_graphon(k+1)
  return {k / (k + 1.0), (k * (k - 1.0)) / ((k + 1.0) * (k + 1.0)), segment};
}

double entropy_rate(double u) {
  if (!(u >= 0.0 && u <= 1.0))
    throw std::invalid_argument("entropy_rate: argument must lie in [0,1]");
  if (u == 0.0 || u == 1.0) return 0.0;
  return 0.5 * (u * std::log(u) + (1.0 - u) * std::log1p(-u));
}

double graphon_entropy(const graphon::StepGraphon& w) {
  double sum = 0.0;
  for (int i = 0; i < w.blocks(); ++i)
    for (int j = 0; j < w.blocks(); ++j)
      sum += entropy_rate(w.value(i, j)) * w.measure(i) * w.measure(j);
  return sum;
}

double energy(const ModelParams& p, const graphon::StepGraphon& w) {
  return p.beta1 * graphon::hom_density(graphon::SubgraphPattern::single_edge(), w) +
         p.beta2 * graphon::hom_density(graphon::SubgraphPattern::triangle(), w);
}

double free_energy(const ModelParams& p, const graphon::StepGraphon& w) {
  return energy(p, w) - graphon_entropy(w);
}

std::vector<BoundaryPoint> boundary_profile(int resolution) {
  if (resolution < 1) throw std::invalid_argument("boundary_profile: resolution must be >= 1");
  std::vector<BoundaryPoint> points;
  points.reserve(resolution + 1);
  for (int i = 0; i <= resolution; ++i) {
    const double e = static_cast<double>(i) / resolution;
    points.push_back({e, razborov_lower_bound(e), lower_boundary_segment(e)});
  }
  return points;
}

void write_boundary_csv(std::ostream& os, const std::vector<BoundaryPoint>& points) {
  os << "e,t,k\n";
  for (const auto& p : points)
    os << fmt17(p.edge_density) << ',' << fmt17(p.triangle_density) << ',' << p.segment_index
       << '\n';
}

}  // namespace etcone::model
