#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "etcone/step_graphon.hpp"

namespace etcone::model {

// Parameters of the edge-triangle model, kept in cartesian form
// (beta1, beta2) together with a scale/direction split beta = r * u.
// from_beta uses the unit direction; critical(r, k) keeps u equal to the
// unnormalized critical direction and r equal to the given scale.
struct ModelParams {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double r = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;

  static ModelParams from_beta(double beta1, double beta2);
  static ModelParams critical(double r, int segment);
};

// A point of the edge/triangle density region boundary.
struct BoundaryPoint {
  double edge_density = 0.0;
  double triangle_density = 0.0;
  int segment_index = 1;
};

// Index k of the scallop segment [(k-1)/k, k/(k+1)] containing the edge
// density; joints report the lower of their two segments.
int lower_boundary_segment(double edge);

// Minimum triangle density among graphons with the given edge density.
double razborov_lower_bound(double edge);

// Derivative of the lower bound; one sided from the left at joints.
double razborov_lower_slope(double edge);

// Maximum triangle density at the given edge density: e^(3/2).
double kruskal_katona_upper_bound(double edge);

// One sided slopes (left, right) of the lower bound at the k-th joint:
// (3(k-1)/(k+1), 3k/(k+1)).
std::array<double, 2> boundary_derivatives(int segment);

// Unnormalized inward normal of the chord between neighboring Turan points:
// o_k = (1, -(k+1)(k+2)/(k(3k+5))).
std::array<double, 2> critical_direction(int segment);

// Densities v_k of the Turan graphon with k+1 classes; agrees exactly with
// hom_density on turan_graphon(k+1).
BoundaryPoint turan_point(int segment);

// (u log u + (1-u) log(1-u)) / 2 with 0 log 0 = 0.
double entropy_rate(double u);

// Blockwise integral of entropy_rate; zero on random-free graphons.
double graphon_entropy(const graphon::StepGraphon& w);

// beta1 * t(edge) + beta2 * t(triangle).
double energy(const ModelParams& p, const graphon::StepGraphon& w);

// energy minus graphon_entropy, the functional maximized by ground states.
double free_energy(const ModelParams& p, const graphon::StepGraphon& w);

// Lower-boundary samples at resolution+1 evenly spaced edge densities.
std::vector<BoundaryPoint> boundary_profile(int resolution);

// CSV with header `e,t,k`, one row per profile point.
void write_boundary_csv(std::ostream& os, const std::vector<BoundaryPoint>& points);

}  // namespace etcone::model
