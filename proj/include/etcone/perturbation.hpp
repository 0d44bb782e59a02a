#pragma once

#include <array>
#include <utility>

#include "etcone/step_graphon.hpp"

namespace etcone::perturb {

// The two cones competing along the critical direction o_k: X sits at the
// Turan graphon with k+1 classes, Y at the one with k+2.
enum class Cone { X, Y };

// Decomposition data of the edge and triangle delta operators at a Turan
// graphon, dotted against the critical direction o_k.
struct ConeCoefficients {
  int direction_k = 1;
  int cone_classes = 2;
  double a_edge = 1.0;
  double b_edge = 1.0;
  double a_triangle = 0.0;
  double b_triangle = 0.0;
  double dot_a = 0.0;
  double dot_b = 0.0;
  double measure_a = 0.0;  // |A|, the support of the base graphon
  double measure_b = 0.0;  // |B| = 1 - |A|
};

ConeCoefficients cone_coefficients(int cone_classes, int direction_k);

// Closed-form maximizers a* = sigma(2 r dot_a), b* = sigma(2 r dot_b) of the
// decoupled first variation.
std::pair<double, double> optimal_ab(double r, const ConeCoefficients& c);

// Densities of the cone graphon a T_k + b D_k (k+1 classes, a off diagonal,
// b on the diagonal blocks).
double cone_edge_density(int k, double a, double b);
double cone_triangle_density(int k, double a, double b);
graphon::StepGraphon cone_graphon(int k, double a, double b);

// Exact free energy of the cone at T_k under beta = r o_k:
// r e - r (k+1)(k+2)/(k(3k+5)) t - I(a) k/(k+1) - I(b)/(k+1).
double psi_exact(int k, double r, double a, double b);

enum class PsiVariant { exact_entropy, lemma_asymptotic };

// First-order free energy estimate at the closed-form optimum. The
// exact-entropy variant evaluates the entropy terms exactly; the asymptotic
// variant substitutes the Lemma-style e^{-x}/2 tail for each bracket.
double psi_first_order(int k, double r, Cone cone, PsiVariant variant);

struct PerturbationResult {
  int k = 1;
  Cone cone = Cone::X;
  double r = 0.0;
  double a_star = 0.0;
  double b_star = 0.0;
  double one_minus_a_star = 0.0;  // complement computed without cancellation
  double psi_first = 0.0;         // exact-entropy first-order value
  double psi_lemma = 0.0;         // lemma-asymptotic first-order value
  double a_opt = 0.0;
  double b_opt = 0.0;
  double one_minus_a_opt = 0.0;
  double psi_opt = 0.0;
  // Values above the shared baseline r T^{o_k}(base Turan graphon); exact at
  // large r where the full psi values agree to all printed digits.
  double psi_first_excess = 0.0;
  double psi_opt_excess = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Maximizes the exact cone free energy over the corner neighborhood
// a in [1/2, 1), b in (0, 1/2] by damped Newton ascent in log-odds
// coordinates, started at the closed form. The box keeps the ascent in the
// perturbative basin: outside it the family collapses onto the constant
// graphon a = b shared by every cone, which is not the object compared here.
// Convergence: projected gradient sup norm <= 1e-10 in log-odds coordinates.
PerturbationResult optimize_psi(int k, double r, Cone cone = Cone::X,
                                int iteration_cap = 200);

struct GroundStateDecision {
  int k = 1;
  double r = 0.0;
  PerturbationResult cone_x;
  PerturbationResult cone_y;
  double psi_x = 0.0;
  double psi_y = 0.0;
  double margin = 0.0;           // psi_x - psi_y via the shared-baseline excess
  int preferred_classes = 0;     // k+1 or k+2; 0 when indeterminate
  // Perturbative regime: every 1-a*, b* below 0.1 at both cones AND both
  // ascents converged to strictly interior corner optima. The star test
  // alone can miss the onset where the constant-graphon phase absorbs the
  // corner basin and the compared optimum ceases to exist.
  bool in_regime = false;
  // True when no preference is readable: |margin| < 1e-13, or either cone
  // optimum is boundary-pinned / unconverged (no corner optimum exists).
  bool indeterminate = false;
};

GroundStateDecision ground_state_compare(int k, double r);

// Smallest r with max(1-a*, b*) < 0.1 for both cones: log(9) (3k+5) / 2,
// driven by the smallest dot product dot_b of cone X.
double regime_threshold(int k);

// Derivatives (d/da, d/db) of (cone_edge_density, cone_triangle_density) at
// (a,b) = (1,0); their slopes reproduce the one-sided boundary derivatives.
std::pair<std::array<double, 2>, std::array<double, 2>> tangent_vectors(int k);

}  // namespace etcone::perturb
