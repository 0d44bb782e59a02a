#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "etcone/edge_triangle.hpp"
#include "etcone/perturbation.hpp"
#include "etcone/sampler.hpp"
#include "etcone/step_graphon.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace etcone;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Edge-triangle ground state toolkit: boundary geometry, cone perturbation, sampling";

  // ---- step graphons and densities -------------------------------------
  py::class_<graphon::BlockFunction>(m, "BlockFunction")
      .def(py::init<std::vector<double>, std::vector<double>>(), "measures"_a, "values"_a)
      .def_property_readonly("blocks", &graphon::BlockFunction::blocks)
      .def_property_readonly("measures",
                             [](const graphon::BlockFunction& f) { return f.measures(); })
      .def_property_readonly("values",
                             [](const graphon::BlockFunction& f) { return f.values(); })
      .def("value", &graphon::BlockFunction::value, "i"_a, "j"_a)
      .def("set_value", &graphon::BlockFunction::set_value, "i"_a, "j"_a, "v"_a)
      .def("sup_norm", &graphon::BlockFunction::sup_norm)
      .def("integral", &graphon::BlockFunction::integral);

  py::class_<graphon::StepGraphon>(m, "StepGraphon")
      .def(py::init<std::vector<double>, std::vector<double>>(), "measures"_a, "values"_a)
      .def_property_readonly("blocks", &graphon::StepGraphon::blocks)
      .def_property_readonly("measures",
                             [](const graphon::StepGraphon& w) { return w.measures(); })
      .def("value", &graphon::StepGraphon::value, "i"_a, "j"_a)
      .def("random_free", &graphon::StepGraphon::random_free)
      .def("to_json", &graphon::StepGraphon::to_json)
      .def_static("from_json", &graphon::StepGraphon::from_json, "text"_a)
      .def("__repr__", [](const graphon::StepGraphon& w) {
        return "<StepGraphon blocks=" + std::to_string(w.blocks()) + ">";
      });

  m.def("turan_graphon", &graphon::turan_graphon, "classes"_a);
  m.def("constant_graphon", &graphon::constant_graphon, "p"_a);
  m.def("graph_to_graphon", &graphon::graph_to_graphon, "adjacency"_a);

  py::class_<graphon::SubgraphPattern>(m, "SubgraphPattern")
      .def(py::init<int, std::vector<std::pair<int, int>>>(), "vertices"_a, "edges"_a)
      .def_property_readonly("vertices", &graphon::SubgraphPattern::vertices)
      .def_property_readonly("edges",
                             [](const graphon::SubgraphPattern& p) { return p.edges(); })
      .def_static("single_edge", &graphon::SubgraphPattern::single_edge)
      .def_static("triangle", &graphon::SubgraphPattern::triangle)
      .def_static("two_star", &graphon::SubgraphPattern::two_star)
      .def_static("path", &graphon::SubgraphPattern::path, "edge_count"_a)
      .def_static("cycle", &graphon::SubgraphPattern::cycle, "length"_a)
      .def_static("complete", &graphon::SubgraphPattern::complete, "vertices"_a);

  m.def("hom_density",
        py::overload_cast<const graphon::SubgraphPattern&, const graphon::StepGraphon&>(
            &graphon::hom_density),
        "pattern"_a, "w"_a);
  m.def("hom_density",
        py::overload_cast<const graphon::SubgraphPattern&, const graphon::BlockFunction&>(
            &graphon::hom_density),
        "pattern"_a, "fn"_a);

  m.def("delta_operator", &graphon::delta_operator, "pattern"_a, "w"_a);

  py::class_<graphon::DeltaDecomposition>(m, "DeltaDecomposition")
      .def_readonly("coeff_on_support", &graphon::DeltaDecomposition::coeff_on_support)
      .def_readonly("coeff_off_support", &graphon::DeltaDecomposition::coeff_off_support)
      .def_readonly("residual_sup_norm", &graphon::DeltaDecomposition::residual_sup_norm)
      .def("exact", &graphon::DeltaDecomposition::exact, "tol"_a = 1e-10);

  m.def("decompose_on_support", &graphon::decompose_on_support, "fn"_a, "support"_a);
  m.def("l1_distance", &graphon::l1_distance, "a"_a, "b"_a);
  m.def("cut_distance", &graphon::cut_distance, "a"_a, "b"_a);

  // ---- model and boundary geometry --------------------------------------
  py::class_<model::ModelParams>(m, "ModelParams")
      .def_readonly("beta1", &model::ModelParams::beta1)
      .def_readonly("beta2", &model::ModelParams::beta2)
      .def_readonly("r", &model::ModelParams::r)
      .def_readonly("u1", &model::ModelParams::u1)
      .def_readonly("u2", &model::ModelParams::u2)
      .def_static("from_beta", &model::ModelParams::from_beta, "beta1"_a, "beta2"_a)
      .def_static("critical", &model::ModelParams::critical, "r"_a, "segment"_a);

  py::class_<model::BoundaryPoint>(m, "BoundaryPoint")
      .def_readonly("edge_density", &model::BoundaryPoint::edge_density)
      .def_readonly("triangle_density", &model::BoundaryPoint::triangle_density)
      .def_readonly("segment_index", &model::BoundaryPoint::segment_index);

  m.def("lower_boundary_segment", &model::lower_boundary_segment, "edge"_a);
  m.def("razborov_lower_bound", &model::razborov_lower_bound, "edge"_a);
  m.def("razborov_lower_slope", &model::razborov_lower_slope, "edge"_a);
  m.def("kruskal_katona_upper_bound", &model::kruskal_katona_upper_bound, "edge"_a);
  m.def("boundary_derivatives", &model::boundary_derivatives, "segment"_a);
  m.def("critical_direction", &model::critical_direction, "segment"_a);
  m.def("turan_point", &model::turan_point, "segment"_a);
  m.def("entropy_rate", &model::entropy_rate, "u"_a);
  m.def("graphon_entropy", &model::graphon_entropy, "w"_a);
  m.def("energy", &model::energy, "params"_a, "w"_a);
  m.def("free_energy", &model::free_energy, "params"_a, "w"_a);
  m.def("boundary_profile", &model::boundary_profile, "resolution"_a);

  // ---- cone perturbation -------------------------------------------------
  py::enum_<perturb::Cone>(m, "Cone").value("X", perturb::Cone::X).value("Y", perturb::Cone::Y);

  py::enum_<perturb::PsiVariant>(m, "PsiVariant")
      .value("exact_entropy", perturb::PsiVariant::exact_entropy)
      .value("lemma_asymptotic", perturb::PsiVariant::lemma_asymptotic);

  py::class_<perturb::ConeCoefficients>(m, "ConeCoefficients")
      .def_readonly("direction_k", &perturb::ConeCoefficients::direction_k)
      .def_readonly("cone_classes", &perturb::ConeCoefficients::cone_classes)
      .def_readonly("a_edge", &perturb::ConeCoefficients::a_edge)
      .def_readonly("b_edge", &perturb::ConeCoefficients::b_edge)
      .def_readonly("a_triangle", &perturb::ConeCoefficients::a_triangle)
      .def_readonly("b_triangle", &perturb::ConeCoefficients::b_triangle)
      .def_readonly("dot_a", &perturb::ConeCoefficients::dot_a)
      .def_readonly("dot_b", &perturb::ConeCoefficients::dot_b)
      .def_readonly("measure_a", &perturb::ConeCoefficients::measure_a)
      .def_readonly("measure_b", &perturb::ConeCoefficients::measure_b);

  m.def("cone_coefficients", &perturb::cone_coefficients, "cone_classes"_a, "direction_k"_a);
  m.def("optimal_ab", &perturb::optimal_ab, "r"_a, "coefficients"_a);
  m.def("cone_edge_density", &perturb::cone_edge_density, "k"_a, "a"_a, "b"_a);
  m.def("cone_triangle_density", &perturb::cone_triangle_density, "k"_a, "a"_a, "b"_a);
  m.def("cone_graphon", &perturb::cone_graphon, "k"_a, "a"_a, "b"_a);
  m.def("psi_exact", &perturb::psi_exact, "k"_a, "r"_a, "a"_a, "b"_a);
  m.def("psi_first_order", &perturb::psi_first_order, "k"_a, "r"_a, "cone"_a, "variant"_a);
  m.def("regime_threshold", &perturb::regime_threshold, "k"_a);
  m.def("tangent_vectors", &perturb::tangent_vectors, "k"_a);

  py::class_<perturb::PerturbationResult>(m, "PerturbationResult")
      .def_readonly("k", &perturb::PerturbationResult::k)
      .def_readonly("cone", &perturb::PerturbationResult::cone)
      .def_readonly("r", &perturb::PerturbationResult::r)
      .def_readonly("a_star", &perturb::PerturbationResult::a_star)
      .def_readonly("b_star", &perturb::PerturbationResult::b_star)
      .def_readonly("one_minus_a_star", &perturb::PerturbationResult::one_minus_a_star)
      .def_readonly("psi_first", &perturb::PerturbationResult::psi_first)
      .def_readonly("psi_lemma", &perturb::PerturbationResult::psi_lemma)
      .def_readonly("a_opt", &perturb::PerturbationResult::a_opt)
      .def_readonly("b_opt", &perturb::PerturbationResult::b_opt)
      .def_readonly("one_minus_a_opt", &perturb::PerturbationResult::one_minus_a_opt)
      .def_readonly("psi_opt", &perturb::PerturbationResult::psi_opt)
      .def_readonly("psi_first_excess", &perturb::PerturbationResult::psi_first_excess)
      .def_readonly("psi_opt_excess", &perturb::PerturbationResult::psi_opt_excess)
      .def_readonly("converged", &perturb::PerturbationResult::converged)
      .def_readonly("iterations", &perturb::PerturbationResult::iterations);

  m.def("optimize_psi", &perturb::optimize_psi, "k"_a, "r"_a, "cone"_a = perturb::Cone::X,
        "iteration_cap"_a = 200);

  py::class_<perturb::GroundStateDecision>(m, "GroundStateDecision")
      .def_readonly("k", &perturb::GroundStateDecision::k)
      .def_readonly("r", &perturb::GroundStateDecision::r)
      .def_readonly("cone_x", &perturb::GroundStateDecision::cone_x)
      .def_readonly("cone_y", &perturb::GroundStateDecision::cone_y)
      .def_readonly("psi_x", &perturb::GroundStateDecision::psi_x)
      .def_readonly("psi_y", &perturb::GroundStateDecision::psi_y)
      .def_readonly("margin", &perturb::GroundStateDecision::margin)
      .def_readonly("preferred_classes", &perturb::GroundStateDecision::preferred_classes)
      .def_readonly("in_regime", &perturb::GroundStateDecision::in_regime)
      .def_readonly("indeterminate", &perturb::GroundStateDecision::indeterminate);

  m.def("ground_state_compare", &perturb::ground_state_compare, "k"_a, "r"_a);

  // ---- finite-n sampler ---------------------------------------------------
  m.attr("generator_id") = sampler::kGeneratorId;

  py::class_<sampler::SplitMix64>(m, "SplitMix64")
      .def(py::init<std::uint64_t>(), "seed"_a)
      .def_static("child", &sampler::SplitMix64::child, "root_seed"_a, "stream"_a)
      .def("next", &sampler::SplitMix64::next)
      .def("uniform", &sampler::SplitMix64::uniform)
      .def("below", &sampler::SplitMix64::below, "n"_a);

  py::class_<sampler::GraphState>(m, "GraphState")
      .def(py::init<int>(), "n"_a)
      .def_static("complete", &sampler::GraphState::complete, "n"_a)
      .def_static("bipartite_split", &sampler::GraphState::bipartite_split, "n"_a)
      .def_static("random", &sampler::GraphState::random, "n"_a, "p"_a, "rng"_a)
      .def_static("from_edges", &sampler::GraphState::from_edges, "n"_a, "edges"_a)
      .def_property_readonly("size", &sampler::GraphState::size)
      .def("has_edge", &sampler::GraphState::has_edge, "i"_a, "j"_a)
      .def("common_neighbors", &sampler::GraphState::common_neighbors, "i"_a, "j"_a)
      .def("toggle", &sampler::GraphState::toggle, "i"_a, "j"_a)
      .def("toggle_delta", &sampler::GraphState::toggle_delta, "i"_a, "j"_a)
      .def("edge_count", &sampler::GraphState::edge_count)
      .def("triangle_count", &sampler::GraphState::triangle_count)
      .def("edge_density", &sampler::GraphState::edge_density)
      .def("triangle_density", &sampler::GraphState::triangle_density)
      .def("edges_sorted", &sampler::GraphState::edges_sorted)
      .def("edge_bitmask", &sampler::GraphState::edge_bitmask)
      .def("__repr__", [](const sampler::GraphState& g) {
        return "<GraphState n=" + std::to_string(g.size()) +
               " edges=" + std::to_string(g.edge_count()) + ">";
      });

  m.def("log_weight_delta", &sampler::log_weight_delta, "g"_a, "i"_a, "j"_a, "beta1"_a,
        "beta2"_a);
  m.def("metropolis_step", &sampler::metropolis_step, "g"_a, "rng"_a, "beta1"_a, "beta2"_a);

  py::enum_<sampler::InitKind>(m, "InitKind")
      .value("empty", sampler::InitKind::empty)
      .value("complete", sampler::InitKind::complete)
      .value("bipartite_split", sampler::InitKind::bipartite_split)
      .value("random", sampler::InitKind::random);

  py::class_<sampler::InitSpec>(m, "InitSpec")
      .def(py::init([](sampler::InitKind kind, double density) {
             return sampler::InitSpec{kind, density};
           }),
           "kind"_a = sampler::InitKind::random, "density"_a = 0.5)
      .def_readwrite("kind", &sampler::InitSpec::kind)
      .def_readwrite("density", &sampler::InitSpec::density);

  py::class_<sampler::SamplerConfig>(m, "SamplerConfig")
      .def(py::init<>())
      .def_readwrite("n", &sampler::SamplerConfig::n)
      .def_readwrite("beta1", &sampler::SamplerConfig::beta1)
      .def_readwrite("beta2", &sampler::SamplerConfig::beta2)
      .def_readwrite("steps", &sampler::SamplerConfig::steps)
      .def_readwrite("burn_in", &sampler::SamplerConfig::burn_in)
      .def_readwrite("thin", &sampler::SamplerConfig::thin)
      .def_readwrite("seed", &sampler::SamplerConfig::seed)
      .def_readwrite("chains", &sampler::SamplerConfig::chains)
      .def_readwrite("init", &sampler::SamplerConfig::init);

  py::class_<sampler::TrajectoryPoint>(m, "TrajectoryPoint")
      .def_readonly("step", &sampler::TrajectoryPoint::step)
      .def_readonly("edge_density", &sampler::TrajectoryPoint::edge_density)
      .def_readonly("triangle_density", &sampler::TrajectoryPoint::triangle_density);

  py::class_<sampler::ChainSummary>(m, "ChainSummary")
      .def_readonly("mean_edge_density", &sampler::ChainSummary::mean_edge_density)
      .def_readonly("stderr_edge_density", &sampler::ChainSummary::stderr_edge_density)
      .def_readonly("mean_triangle_density", &sampler::ChainSummary::mean_triangle_density)
      .def_readonly("stderr_triangle_density", &sampler::ChainSummary::stderr_triangle_density)
      .def_readonly("samples", &sampler::ChainSummary::samples)
      .def_readonly("acceptance_rate", &sampler::ChainSummary::acceptance_rate);

  py::class_<sampler::ChainResult>(m, "ChainResult")
      .def_readonly("stream", &sampler::ChainResult::stream)
      .def_readonly("init", &sampler::ChainResult::init)
      .def_readonly("trajectory", &sampler::ChainResult::trajectory)
      .def_readonly("final_state", &sampler::ChainResult::final_state)
      .def_readonly("summary", &sampler::ChainResult::summary);

  m.def("run_chain", &sampler::run_chain, "config"_a, "stream"_a = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def("run_chains", &sampler::run_chains, "config"_a,
        "inits"_a = std::vector<sampler::InitSpec>{},
        py::call_guard<py::gil_scoped_release>());

  py::class_<sampler::SampleClassification>(m, "SampleClassification")
      .def_readonly("nearest_k", &sampler::SampleClassification::nearest_k)
      .def_readonly("distance", &sampler::SampleClassification::distance)
      .def_readonly("at_cap", &sampler::SampleClassification::at_cap)
      .def_readonly("bipartiteness_score", &sampler::SampleClassification::bipartiteness_score);

  m.def("classify_sample", &sampler::classify_sample, "g"_a);
  m.def("exact_free_energy", &sampler::exact_free_energy, "n"_a, "beta1"_a, "beta2"_a);
}
