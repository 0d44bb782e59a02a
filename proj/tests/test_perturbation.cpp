#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <utility>

#include "etcone/edge_triangle.hpp"
#include "etcone/perturbation.hpp"
#include "etcone/step_graphon.hpp"

using namespace etcone::perturb;
using etcone::graphon::SubgraphPattern;
using etcone::graphon::hom_density;
using etcone::graphon::turan_graphon;
using etcone::graphon::delta_operator;
using etcone::graphon::decompose_on_support;
using etcone::model::ModelParams;
using etcone::model::critical_direction;
using etcone::model::free_energy;

TEST_CASE("cone coefficient validation") {
  CHECK_THROWS_AS(cone_coefficients(2, 0), std::invalid_argument);
  CHECK_THROWS_AS(cone_coefficients(1, 1), std::invalid_argument);
  CHECK_THROWS_AS(cone_coefficients(4, 1), std::invalid_argument);  // classes must be k+1 or k+2
  CHECK_NOTHROW(cone_coefficients(2, 1));
  CHECK_NOTHROW(cone_coefficients(3, 1));
}

TEST_CASE("cone coefficients at k=1 are dyadic-exact") {
  const ConeCoefficients x = cone_coefficients(2, 1);
  CHECK(x.a_edge == 1.0);
  CHECK(x.b_edge == 1.0);
  CHECK(x.a_triangle == 0.0);
  CHECK(x.b_triangle == 1.5);
  CHECK(x.dot_a == 1.0);
  CHECK(x.dot_b == -0.125);
  CHECK(x.measure_a == 0.5);
  CHECK(x.measure_b == 0.5);

  const ConeCoefficients y = cone_coefficients(3, 1);
  CHECK(y.a_triangle == 1.0);
  CHECK(y.b_triangle == 2.0);
  CHECK(y.dot_a == 0.25);
  CHECK(y.dot_b == -0.5);
  CHECK(y.measure_a == doctest::Approx(2.0 / 3.0).epsilon(1e-16));
  CHECK(y.measure_b == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
}

TEST_CASE("cone dot products match their closed forms") {
  for (int k = 1; k <= 8; ++k) {
    const ConeCoefficients x = cone_coefficients(k + 1, k);
    CHECK(x.dot_a == doctest::Approx(2.0 * (k + 3) / (k * (3.0 * k + 5))).epsilon(1e-14));
    CHECK(x.dot_b == doctest::Approx(-1.0 / (3.0 * k + 5)).epsilon(1e-14));
    const ConeCoefficients y = cone_coefficients(k + 2, k);
    CHECK(y.dot_a == doctest::Approx(2.0 / (3.0 * k + 5)).epsilon(1e-14));
    CHECK(y.dot_b == doctest::Approx(-(k + 3.0) / (k * (3.0 * k + 5))).epsilon(1e-14));
  }
}

TEST_CASE("cone coefficients agree with the delta-operator machinery") {
  for (int k = 1; k <= 6; ++k)
    for (int classes : {k + 1, k + 2}) {
      const ConeCoefficients c = cone_coefficients(classes, k);
      // The triangle coefficients are the decomposition of Delta_{K3} at the
      // Turan graphon the cone is anchored to.
      const auto base = turan_graphon(classes);
      const auto d = decompose_on_support(delta_operator(SubgraphPattern::triangle(), base), base);
      CHECK(d.residual_sup_norm == 0.0);
      CHECK(c.a_triangle == doctest::Approx(d.coeff_on_support).epsilon(1e-14));
      CHECK(c.b_triangle == doctest::Approx(d.coeff_off_support).epsilon(1e-14));
      // dot products recombine the edge/triangle coefficients along o_k.
      const double u2 = critical_direction(k)[1];
      CHECK(c.dot_a == doctest::Approx(c.a_edge + c.a_triangle * u2).epsilon(1e-16));
      CHECK(c.dot_b == doctest::Approx(c.b_edge + c.b_triangle * u2).epsilon(1e-16));
      // |A| is the off-diagonal mass of the base Turan graphon.
      const double m = classes - 1.0;
      CHECK(c.measure_a == doctest::Approx(m / (m + 1.0)).epsilon(1e-16));
    }
}

TEST_CASE("closed-form optimal perturbation") {
  CHECK_THROWS_AS(optimal_ab(0.0, cone_coefficients(2, 1)), std::invalid_argument);
  CHECK_THROWS_AS(optimal_ab(-2.0, cone_coefficients(2, 1)), std::invalid_argument);

  const auto [ax, bx] = optimal_ab(10.0, cone_coefficients(2, 1));
  CHECK(ax == doctest::Approx(0.9999999979388463).epsilon(1e-15));
  CHECK(bx == doctest::Approx(0.07585818002124356).epsilon(1e-14));
  const auto [ay, by] = optimal_ab(10.0, cone_coefficients(3, 1));
  CHECK(ay == doctest::Approx(0.9933071490757153).epsilon(1e-14));
  CHECK(by == doctest::Approx(4.5397868702434395e-05).epsilon(1e-13));

  // Saturation at huge scale.
  const auto [asat, bsat] = optimal_ab(1e6, cone_coefficients(2, 1));
  CHECK(asat == 1.0);
  CHECK(bsat == 0.0);
}

TEST_CASE("cone densities match hom densities on the cone graphon") {
  const SubgraphPattern edge = SubgraphPattern::single_edge();
  const SubgraphPattern triangle = SubgraphPattern::triangle();
  for (int k : {1, 2, 3, 5})
    for (const auto& [a, b] : {std::pair{1.0, 0.0}, std::pair{0.93, 0.07}, std::pair{0.5, 0.5}}) {
      const auto w = cone_graphon(k, a, b);
      CHECK(cone_edge_density(k, a, b) == doctest::Approx(hom_density(edge, w)).epsilon(2e-15));
      CHECK(cone_triangle_density(k, a, b) ==
            doctest::Approx(hom_density(triangle, w)).epsilon(2e-15));
    }
  CHECK(cone_edge_density(1, 1.0, 0.0) == 0.5);
  CHECK(cone_triangle_density(1, 1.0, 0.0) == 0.0);
  CHECK_THROWS_AS(cone_edge_density(0, 0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(cone_triangle_density(1, 1.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(cone_graphon(1, 0.5, -0.1), std::invalid_argument);
}

TEST_CASE("psi_exact equals the generic free energy on cone graphons") {
  for (int k : {1, 2, 4})
    for (double r : {0.5, 10.0})
      for (int ia = 0; ia <= 6; ++ia)
        for (int ib = 0; ib <= 6; ++ib) {
          const double a = 0.01 + 0.98 * ia / 6.0;
          const double b = 0.01 + 0.98 * ib / 6.0;
          const double via_model = free_energy(ModelParams::critical(r, k), cone_graphon(k, a, b));
          CHECK(std::abs(psi_exact(k, r, a, b) - via_model) <= 1e-12);
        }
  CHECK_THROWS_AS(psi_exact(0, 1.0, 0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(psi_exact(1, -1.0, 0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(psi_exact(1, 1.0, 1.5, 0.5), std::invalid_argument);
  // r = 0 degenerates to pure entropy.
  CHECK(psi_exact(1, 0.0, 0.5, 0.5) ==
        doctest::Approx(0.34657359027997264).epsilon(1e-15));
}

TEST_CASE("first-order estimates reproduce the frozen k=1, r=10 values") {
  CHECK(psi_first_order(1, 10.0, Cone::X, PsiVariant::exact_entropy) ==
        doctest::Approx(5.0197224340884254).epsilon(1e-14));
  CHECK(psi_first_order(1, 10.0, Cone::X, PsiVariant::lemma_asymptotic) ==
        doctest::Approx(5.020521250171263).epsilon(1e-14));
  CHECK(psi_first_order(1, 10.0, Cone::Y, PsiVariant::exact_entropy) ==
        doctest::Approx(5.002246015979575).epsilon(1e-14));
  CHECK(psi_first_order(1, 10.0, Cone::Y, PsiVariant::lemma_asymptotic) ==
        doctest::Approx(5.002253548987989).epsilon(1e-14));
  CHECK_THROWS_AS(psi_first_order(0, 10.0, Cone::X, PsiVariant::exact_entropy),
                  std::invalid_argument);
  CHECK_THROWS_AS(psi_first_order(1, 0.0, Cone::X, PsiVariant::exact_entropy),
                  std::invalid_argument);
}

TEST_CASE("lemma tail bound is sharp to its own order") {
  for (double x : {5.0, 10.0, 20.0}) {
    const double exact = 0.5 * std::log1p(std::exp(-x));
    const double lemma = 0.5 * std::exp(-x);
    CHECK(lemma >= exact);
    CHECK((lemma - exact) / exact <= std::exp(-x));
  }
  // Documented gap between the psi variants at (k=1, r=10).
  const double gap = psi_first_order(1, 10.0, Cone::X, PsiVariant::lemma_asymptotic) -
                     psi_first_order(1, 10.0, Cone::X, PsiVariant::exact_entropy);
  CHECK(gap == doctest::Approx(0.0007988160828373836).epsilon(1e-12));
  CHECK(std::abs(gap - (5.0205 - 5.0197)) <= 2e-4);
}

TEST_CASE("optimizer reproduces the frozen k=1, r=10 table values") {
  const PerturbationResult x = optimize_psi(1, 10.0, Cone::X);
  CHECK(x.converged);
  CHECK(x.iterations <= 200);
  CHECK(x.a_star == doctest::Approx(0.9999999979388463).epsilon(1e-15));
  CHECK(x.b_star == doctest::Approx(0.07585818002124356).epsilon(1e-14));
  CHECK(x.one_minus_a_star == doctest::Approx(2.0611536181902033e-09).epsilon(1e-13));
  CHECK(x.psi_first == doctest::Approx(5.0197224340884254).epsilon(1e-14));
  CHECK(x.psi_lemma == doctest::Approx(5.020521250171263).epsilon(1e-14));
  // Independent reference optimum (simplex search at tight tolerances).
  CHECK(std::abs(x.psi_opt - 5.019020357953745) <= 1e-11);
  CHECK(x.psi_opt >= 5.019020357953745 - 1e-12);
  CHECK(std::abs(x.b_opt - 0.06873425818692953) <= 1e-6);
  CHECK(std::abs(x.a_opt - 0.9999999545573685) <= 1e-7);
  CHECK(x.one_minus_a_opt ==
        doctest::Approx(4.544263157875904e-08).epsilon(0.05));

  const PerturbationResult y = optimize_psi(1, 10.0, Cone::Y);
  CHECK(y.converged);
  CHECK(y.a_star == doctest::Approx(0.9933071490757153).epsilon(1e-14));
  CHECK(y.b_star == doctest::Approx(4.5397868702434395e-05).epsilon(1e-13));
  CHECK(std::abs(y.psi_opt - 5.002060963900527) <= 1e-11);
  CHECK(y.psi_opt >= 5.002060963900527 - 1e-12);
  CHECK(std::abs(y.b_opt - 6.371653101749782e-05) <= 1e-8);
  CHECK(y.one_minus_a_opt == doctest::Approx(0.005665962413031472).epsilon(1e-5));

  CHECK_THROWS_AS(optimize_psi(0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(optimize_psi(1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(optimize_psi(1, 10.0, Cone::X, -1), std::invalid_argument);
}

TEST_CASE("optimizer invariants") {
  // Zero iterations: report the closed-form starting point honestly.
  const PerturbationResult frozen = optimize_psi(1, 10.0, Cone::X, 0);
  CHECK_FALSE(frozen.converged);
  CHECK(frozen.iterations == 0);
  CHECK(frozen.a_opt == frozen.a_star);
  CHECK(frozen.b_opt == frozen.b_star);
  CHECK(frozen.psi_opt == doctest::Approx(5.018903954985615).epsilon(1e-13));

  for (int k : {1, 2, 3})
    for (double r : {9.0, 15.0, 40.0})
      for (Cone cone : {Cone::X, Cone::Y}) {
        const PerturbationResult res = optimize_psi(k, r, cone);
        if (k == 3 && r == 9.0) {
          // Far below threshold the corner optimum is gone; the ascent pins
          // on the basin box and must say so instead of claiming a solution.
          CHECK_FALSE(res.converged);
          CHECK(res.b_opt == 0.5);
          continue;
        }
        CHECK(res.converged);
        // The optimum dominates the first-order starting point.
        const double star_excess =
            psi_exact(k, r, res.a_star, res.b_star) - (res.psi_first - res.psi_first_excess);
        CHECK(res.psi_opt_excess >= star_excess - 1e-12);
        // In the strong-coupling regime the first-order estimate overshoots
        // the true optimum (the neglected cubic term is negative there).
        if (r >= regime_threshold(k))
          CHECK(res.psi_first_excess >= res.psi_opt_excess - 1e-12);
        // Total/excess bookkeeping is consistent.
        CHECK(res.psi_opt == doctest::Approx(res.psi_first - res.psi_first_excess +
                                             res.psi_opt_excess)
                                 .epsilon(1e-12));
      }

  // Saturated scale: the closed form is already stationary to tolerance.
  const PerturbationResult sat = optimize_psi(1, 1e6, Cone::X);
  CHECK(sat.converged);
  CHECK(sat.a_opt == 1.0);
  CHECK(sat.b_opt == 0.0);
  CHECK(sat.psi_opt == doctest::Approx(psi_exact(1, 1e6, 1.0, 0.0)).epsilon(1e-15));
}

TEST_CASE("first-order remainder decays at second order") {
  // delta = psi_first - psi_opt collapses like the square of the leading
  // perturbation size; frozen reference deltas from the independent search.
  const double frozen_delta[3] = {7.020761346815674e-04, 1.1208938384872375e-06,
                                  9.500858353360137e-10};
  int i = 0;
  for (double r : {10.0, 20.0, 30.0}) {
    const PerturbationResult res = optimize_psi(1, r, Cone::X);
    const double delta = res.psi_first_excess - res.psi_opt_excess;
    CHECK(delta > 0.0);
    CHECK(std::abs(delta - frozen_delta[i]) <= 1e-13 + 1e-4 * frozen_delta[i]);
    ++i;
  }
}

TEST_CASE("ground state comparison at the Table-1 point") {
  const GroundStateDecision d = ground_state_compare(1, 10.0);
  CHECK(d.margin == doctest::Approx(0.016959394053218446).epsilon(1e-9));
  CHECK(d.preferred_classes == 2);
  CHECK(d.in_regime);
  CHECK_FALSE(d.indeterminate);
  CHECK(d.psi_x == d.cone_x.psi_opt);
  CHECK(d.psi_y == d.cone_y.psi_opt);
  CHECK(d.psi_x > d.psi_y);
}

TEST_CASE("regime threshold") {
  CHECK(regime_threshold(1) == doctest::Approx(8.788898309344878).epsilon(1e-15));
  CHECK_THROWS_AS(regime_threshold(0), std::invalid_argument);
  // Flip around the threshold: b* of cone X crosses 0.1 there.
  CHECK_FALSE(ground_state_compare(1, 8.7).in_regime);
  CHECK(ground_state_compare(1, 8.9).in_regime);
  // For small k the star threshold coincides with the basin onset; from
  // k = 5 on, the corner optimum only appears somewhat above it, so the
  // star test alone would overstate the regime there.
  for (int k = 1; k <= 10; ++k) {
    const double rmin = regime_threshold(k);
    CHECK(ground_state_compare(k, rmin * (k <= 4 ? 1.01 : 1.5)).in_regime);
    CHECK_FALSE(ground_state_compare(k, rmin * 0.99).in_regime);
  }
  // Just above the star threshold at larger k, both ascents pin on the
  // basin box: the decision must refuse to pick a winner.
  const GroundStateDecision sub = ground_state_compare(6, regime_threshold(6) * 1.01);
  CHECK_FALSE(sub.in_regime);
  CHECK(sub.indeterminate);
  CHECK(sub.preferred_classes == 0);
  CHECK_FALSE(sub.cone_x.converged);
  CHECK(sub.cone_x.b_opt == 0.5);
}

TEST_CASE("margin stays positive and decays along r") {
  double last = 1.0;
  for (double r : {100.0, 200.0, 400.0}) {
    const GroundStateDecision d = ground_state_compare(1, r);
    CHECK(d.margin > 0.0);
    CHECK(d.margin < last);
    // Below the 1e-13 margin threshold the comparison declines to pick a
    // winner even though the sign is still right.
    if (d.margin >= 1e-13) {
      CHECK(d.preferred_classes == 2);
      CHECK_FALSE(d.indeterminate);
    } else {
      CHECK(d.preferred_classes == 0);
      CHECK(d.indeterminate);
    }
    last = d.margin;
  }
  CHECK(ground_state_compare(1, 100.0).preferred_classes == 2);
  CHECK(ground_state_compare(1, 400.0).indeterminate);
}

TEST_CASE("theorem-1 ordering on a small slice") {
  for (int k : {1, 2, 3})
    for (double mult : {20.0, 50.0}) {
      const double r = mult * (3.0 * k + 5.0) / 8.0;
      const GroundStateDecision d = ground_state_compare(k, r);
      CHECK(d.in_regime);
      CHECK(d.margin > 0.0);
      CHECK(d.preferred_classes == k + 1);
    }
}

TEST_CASE("tangent vectors") {
  const auto [va, vb] = tangent_vectors(1);
  CHECK(va[0] == 0.5);
  CHECK(va[1] == 0.0);
  CHECK(vb[0] == 0.5);
  CHECK(vb[1] == 0.75);
  CHECK_THROWS_AS(tangent_vectors(0), std::invalid_argument);

  for (int k = 1; k <= 10; ++k) {
    const auto [da, db] = tangent_vectors(k);
    CHECK(da[0] == doctest::Approx(k / (k + 1.0)).epsilon(1e-15));
    CHECK(da[1] == doctest::Approx(3.0 * k * (k - 1.0) / ((k + 1.0) * (k + 1.0))).epsilon(1e-15));
    CHECK(db[0] == doctest::Approx(1.0 / (k + 1.0)).epsilon(1e-15));
    CHECK(db[1] == doctest::Approx(3.0 * k / ((k + 1.0) * (k + 1.0))).epsilon(1e-15));

    // Finite differences of the cone densities at (a,b) = (1,0), one sided
    // into the square.
    const double h = 1e-6;
    const double fd_ea = (cone_edge_density(k, 1.0, 0.0) - cone_edge_density(k, 1.0 - h, 0.0)) / h;
    const double fd_ta =
        (cone_triangle_density(k, 1.0, 0.0) - cone_triangle_density(k, 1.0 - h, 0.0)) / h;
    const double fd_eb = (cone_edge_density(k, 1.0, h) - cone_edge_density(k, 1.0, 0.0)) / h;
    const double fd_tb =
        (cone_triangle_density(k, 1.0, h) - cone_triangle_density(k, 1.0, 0.0)) / h;
    CHECK(std::abs(fd_ea - da[0]) <= 1e-5);
    CHECK(std::abs(fd_ta - da[1]) <= 1e-5);
    CHECK(std::abs(fd_eb - db[0]) <= 1e-5);
    CHECK(std::abs(fd_tb - db[1]) <= 1e-5);

    // Their slopes are the one-sided boundary derivatives at the vertex.
    const auto [left, right] = etcone::model::boundary_derivatives(k);
    CHECK(da[1] / da[0] == doctest::Approx(left).epsilon(1e-13));
    CHECK(db[1] / db[0] == doctest::Approx(right).epsilon(1e-13));
  }
}
