#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rblab/errors.hpp"
#include "rblab/feasibility.hpp"
#include "rblab/flip.hpp"
#include "rblab/harness.hpp"
#include "rblab/json_io.hpp"
#include "rblab/moments.hpp"
#include "rblab/satenc.hpp"
#include "rblab/solver.hpp"

namespace py = pybind11;
using namespace rblab;

namespace {

satenc::Cnf cnf_from_dimacs(const std::string& text) {
    std::istringstream in(text);
    return satenc::read_dimacs(in);
}

std::string cnf_to_dimacs(const satenc::Cnf& cnf) {
    std::ostringstream out;
    satenc::write_dimacs(cnf, out);
    return out.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Random binary CSP laboratory: generation, exact solving, "
              "satisfiability flips, moment analytics, CNF log-encoding";

    py::register_exception<DomainError>(m, "DomainError");
    py::register_exception<BudgetExceeded>(m, "BudgetExceeded");
    py::register_exception<FlipPreconditionViolated>(m, "FlipPreconditionViolated");
    py::register_exception<NoFlipPairFound>(m, "NoFlipPairFound");
    py::register_exception<UnsupportedArity>(m, "UnsupportedArity");
    py::register_exception<SizeError>(m, "SizeError");
    py::register_exception<InvalidModel>(m, "InvalidModel");
    py::register_exception<ParseError>(m, "ParseError");
    py::register_exception<SamplingExhausted>(m, "SamplingExhausted");

    py::class_<RBParams>(m, "RBParams")
        .def_readonly("n", &RBParams::n)
        .def_readonly("alpha", &RBParams::alpha)
        .def_readonly("k", &RBParams::k)
        .def_readonly("p", &RBParams::p)
        .def_readonly("r", &RBParams::r)
        .def_readonly("seed", &RBParams::seed)
        .def_readonly("d", &RBParams::d)
        .def_readonly("m", &RBParams::m)
        .def_readonly("t", &RBParams::t)
        .def("tuple_space", &RBParams::tuple_space)
        .def("__repr__", [](const RBParams& p) {
            return "RBParams(n=" + std::to_string(p.n) + ", d=" + std::to_string(p.d) +
                   ", k=" + std::to_string(p.k) + ", p=" + std::to_string(p.p) +
                   ", m=" + std::to_string(p.m) + ", t=" + std::to_string(p.t) + ")";
        });
    m.def("derive_params", &derive_params, py::arg("n"), py::arg("alpha"), py::arg("k"),
          py::arg("p"), py::arg("r"), py::arg("seed") = 0);

    py::enum_<Variant>(m, "Variant")
        .value("Original", Variant::Original)
        .value("Symmetric", Variant::Symmetric);

    py::class_<Constraint>(m, "Constraint")
        .def_property_readonly("scope", [](const Constraint& c) { return c.scope; })
        .def_property_readonly("permitted",
                               [](const Constraint& c) { return c.permitted.tuples(); })
        .def("__len__", [](const Constraint& c) { return c.permitted.size(); });

    py::class_<Instance>(m, "Instance")
        .def_readonly("params", &Instance::params)
        .def_readonly("variant", &Instance::variant)
        .def_readonly("actual_tightness", &Instance::actual_tightness)
        .def_property_readonly("constraints",
                               [](const Instance& inst) { return inst.constraints; })
        .def("to_json", &instance_to_json)
        .def_static("from_json", &instance_from_json)
        .def("__eq__", [](const Instance& a, const Instance& b) { return a == b; });

    py::class_<SymmetricRelation>(m, "SymmetricRelation")
        .def_readonly("k", &SymmetricRelation::k)
        .def_readonly("d", &SymmetricRelation::d)
        .def_readonly("target_size", &SymmetricRelation::target_size)
        .def("__len__", [](const SymmetricRelation& r) { return r.size(); })
        .def_property_readonly("tuples", [](const SymmetricRelation& r) {
            const TupleSet codec(r.k, r.d);
            std::vector<std::vector<Value>> out;
            for (std::uint64_t code : r.codes) out.push_back(codec.decode(code));
            return out;
        });

    m.def("generate_original", &generate_original);
    m.def("generate_symmetric_relation", &generate_symmetric_relation, py::arg("d"), py::arg("k"),
          py::arg("target_size"), py::arg("seed") = 0);
    m.def("closed_under_permutation", &closed_under_permutation);
    m.def("instantiate_symmetric", &instantiate_symmetric);

    py::enum_<SolveMode>(m, "SolveMode")
        .value("Decide", SolveMode::Decide)
        .value("CountAll", SolveMode::CountAll)
        .value("CheckUnique", SolveMode::CheckUnique);

    py::class_<SolveResult>(m, "SolveResult")
        .def_readonly("sat", &SolveResult::sat)
        .def_readonly("count", &SolveResult::count)
        .def_readonly("witness", &SolveResult::witness)
        .def_readonly("nodes_expanded", &SolveResult::nodes_expanded);

    m.def("satisfies", &satisfies);
    m.def("satisfies_all", &satisfies_all);
    m.def("solve", &solve, py::arg("instance"), py::arg("mode") = SolveMode::Decide,
          py::arg("node_budget") = kDefaultNodeBudget,
          py::call_guard<py::gil_scoped_release>());
    m.def("enumerate_oracle", &enumerate_oracle, py::call_guard<py::gil_scoped_release>());
    m.def("find_near_miss", &find_near_miss, py::arg("instance"), py::arg("u"),
          py::arg("node_budget") = kDefaultNodeBudget,
          py::call_guard<py::gil_scoped_release>());

    py::enum_<FlipDirection>(m, "FlipDirection")
        .value("SatToUnsat", FlipDirection::SatToUnsat)
        .value("UnsatToSat", FlipDirection::UnsatToSat);

    py::class_<FlipCertificate>(m, "FlipCertificate")
        .def_readonly("u", &FlipCertificate::u)
        .def_readonly("a", &FlipCertificate::a)
        .def_readonly("b", &FlipCertificate::b)
        .def_readonly("direction", &FlipCertificate::direction)
        .def_readonly("witness", &FlipCertificate::witness)
        .def("to_json", &certificate_to_json)
        .def_static("from_json", &certificate_from_json);

    m.def("flip_sat_to_unsat", &flip_sat_to_unsat);
    m.def("flip_unsat_to_sat", &flip_unsat_to_sat);
    m.def("verify_certificate", &verify_certificate);

    auto mom = m.def_submodule("moments", "closed-form analytics and Monte Carlo estimators");
    mom.def("r_critical", &moments::r_critical);
    mom.def("expected_solutions", &moments::expected_solutions);
    mom.def("log_expected_solutions", &moments::log_expected_solutions);
    mom.def("sat_upper_bound", &moments::sat_upper_bound);
    mom.def("calibrate_r", [](int n, double alpha, double p) {
        const moments::Calibration cal = moments::calibrate_r(n, alpha, p);
        return py::make_tuple(cal.r, cal.epsilon);
    });
    mom.def("binom_ratio", [](int S, int n, int k) {
        const moments::BinomRatio br = moments::binom_ratio(S, n, k);
        return py::make_tuple(br.exact, br.asymptotic);
    });
    mom.def("second_moment_exact", &moments::second_moment_exact);
    mom.def("f_terms", &moments::f_terms);
    mom.def("second_moment_f_approx", &moments::second_moment_f_approx);
    mom.def("sat_lower_bound_asymptotic", [] { return moments::sat_lower_bound_asymptotic(); });
    mom.def("sat_lower_bound_finite", &moments::sat_lower_bound_finite);
    mom.def("unique_solution_lower_bound_asymptotic",
            [] { return moments::unique_solution_lower_bound_asymptotic(); });
    mom.def("expected_near_miss", &moments::expected_near_miss);
    mom.def("log_expected_near_miss", &moments::log_expected_near_miss);
    mom.def("near_miss_second_moment_ratio", &moments::near_miss_second_moment_ratio);
    mom.def("near_miss_lower_bound_asymptotic", &moments::near_miss_lower_bound_asymptotic);
    mom.def("degree_tail_bound", [](const RBParams& params, double delta) {
        const moments::DegreeTail tail = moments::degree_tail_bound(params, delta);
        return py::make_tuple(tail.expected_degree, tail.threshold, tail.prob_bound);
    }, py::arg("params"), py::arg("delta") = 0.5);
    mom.def("coverage_union_bound", &moments::coverage_union_bound);
    mom.def("coverage_union_bound_base_n", &moments::coverage_union_bound_base_n);

    py::class_<moments::McEstimate>(mom, "McEstimate")
        .def_readonly("mean", &moments::McEstimate::mean)
        .def_readonly("standard_error", &moments::McEstimate::standard_error)
        .def_readonly("trials", &moments::McEstimate::trials);
    py::class_<moments::SolutionMoments>(mom, "SolutionMoments")
        .def_readonly("x", &moments::SolutionMoments::x)
        .def_readonly("x2", &moments::SolutionMoments::x2)
        .def_readonly("pr_sat", &moments::SolutionMoments::pr_sat)
        .def_readonly("pr_unique", &moments::SolutionMoments::pr_unique)
        .def_readonly("trials", &moments::SolutionMoments::trials);
    mom.def("mc_solution_moments", &moments::mc_solution_moments, py::arg("params"),
            py::arg("trials"), py::arg("seed"), py::arg("jobs") = 1,
            py::call_guard<py::gil_scoped_release>());
    mom.def("mc_near_miss_count", &moments::mc_near_miss_count, py::arg("params"),
            py::arg("trials"), py::arg("seed"), py::arg("u") = 0, py::arg("jobs") = 1,
            py::call_guard<py::gil_scoped_release>());

    auto fea = m.def_submodule("feasibility", "the five accumulated parameter conditions");
    py::class_<feasibility::SubCondition>(fea, "SubCondition")
        .def_readonly("label", &feasibility::SubCondition::label)
        .def_readonly("value", &feasibility::SubCondition::value)
        .def_readonly("ok", &feasibility::SubCondition::pass);
    py::class_<feasibility::ConditionResult>(fea, "ConditionResult")
        .def_readonly("id", &feasibility::ConditionResult::id)
        .def_readonly("expression", &feasibility::ConditionResult::expression)
        .def_readonly("value", &feasibility::ConditionResult::value)
        .def_readonly("ok", &feasibility::ConditionResult::pass)
        .def_readonly("slack", &feasibility::ConditionResult::slack)
        .def_readonly("parts", &feasibility::ConditionResult::parts);
    py::class_<feasibility::FeasibilityReport>(fea, "FeasibilityReport")
        .def_readonly("n", &feasibility::FeasibilityReport::n)
        .def_readonly("alpha", &feasibility::FeasibilityReport::alpha)
        .def_readonly("k", &feasibility::FeasibilityReport::k)
        .def_readonly("p", &feasibility::FeasibilityReport::p)
        .def_readonly("r_cr", &feasibility::FeasibilityReport::r_cr)
        .def_readonly("epsilon", &feasibility::FeasibilityReport::epsilon)
        .def_readonly("r", &feasibility::FeasibilityReport::r)
        .def_readonly("conditions", &feasibility::FeasibilityReport::conditions)
        .def_readonly("overall", &feasibility::FeasibilityReport::overall);
    fea.def("check", &feasibility::check);
    fea.def("find_feasible", &feasibility::find_feasible, py::arg("n"), py::arg("k"), py::arg("p"),
            py::arg("alpha_grid"));

    auto enc = m.def_submodule("satenc", "CNF log-encoding, DIMACS io, DPLL check");
    py::class_<satenc::Cnf>(enc, "Cnf")
        .def_readonly("num_vars", &satenc::Cnf::num_vars)
        .def_readonly("clauses", &satenc::Cnf::clauses)
        .def_readonly("csp_n", &satenc::Cnf::csp_n)
        .def_readonly("csp_d", &satenc::Cnf::csp_d)
        .def_readonly("bits_per_var", &satenc::Cnf::bits_per_var);
    enc.def("bits_for_domain", &satenc::bits_for_domain);
    enc.def("bool_var", &satenc::bool_var);
    enc.def("encode", &satenc::encode, py::arg("instance"), py::arg("clause_budget") = 5'000'000);
    enc.def("decode", &satenc::decode);
    py::class_<satenc::DpllResult>(enc, "DpllResult")
        .def_readonly("sat", &satenc::DpllResult::sat)
        .def_readonly("model", &satenc::DpllResult::model)
        .def_readonly("nodes", &satenc::DpllResult::nodes);
    enc.def("dpll_sat", &satenc::dpll_sat, py::arg("cnf"), py::arg("node_budget") = 100'000'000,
            py::call_guard<py::gil_scoped_release>());
    enc.def("to_dimacs", &cnf_to_dimacs);
    enc.def("from_dimacs", &cnf_from_dimacs);

    auto har = m.def_submodule("harness", "desk-scale experiments");
    py::class_<harness::SweepRecord>(har, "SweepRecord")
        .def_readonly("r", &harness::SweepRecord::r)
        .def_readonly("n", &harness::SweepRecord::n)
        .def_readonly("d", &harness::SweepRecord::d)
        .def_readonly("trials", &harness::SweepRecord::trials)
        .def_readonly("sat_count", &harness::SweepRecord::sat_count)
        .def_readonly("pr_sat", &harness::SweepRecord::pr_sat)
        .def_readonly("mean_solution_count", &harness::SweepRecord::mean_solution_count)
        .def_readonly("se", &harness::SweepRecord::se)
        .def_readonly("mean_nodes", &harness::SweepRecord::mean_nodes)
        .def_readonly("budget_exceeded", &harness::SweepRecord::budget_exceeded);
    har.def("sweep", &harness::sweep, py::arg("n"), py::arg("alpha"), py::arg("k"), py::arg("p"),
            py::arg("r_values"), py::arg("trials"), py::arg("seed"), py::arg("jobs") = 1,
            py::arg("node_budget") = kDefaultNodeBudget,
            py::call_guard<py::gil_scoped_release>());
    py::class_<harness::FlipReport>(har, "FlipReport")
        .def_readonly("direction", &harness::FlipReport::direction)
        .def_readonly("attempted", &harness::FlipReport::attempted)
        .def_readonly("flip_found", &harness::FlipReport::flip_found)
        .def_readonly("kill_confirmed", &harness::FlipReport::kill_confirmed)
        .def_readonly("unsat_after_flip", &harness::FlipReport::unsat_after_flip)
        .def_readonly("sat_after_flip", &harness::FlipReport::sat_after_flip)
        .def_readonly("residual_new_solution_rate",
                      &harness::FlipReport::residual_new_solution_rate)
        .def_readonly("union_bound_value", &harness::FlipReport::union_bound_value)
        .def_readonly("near_miss_c0_rate", &harness::FlipReport::near_miss_c0_rate)
        .def_readonly("near_miss_asymptote", &harness::FlipReport::near_miss_asymptote);
    har.def("flip_experiment_sat_to_unsat", &harness::flip_experiment_sat_to_unsat, py::arg("n"),
            py::arg("alpha"), py::arg("p"), py::arg("trials"), py::arg("seed"), py::arg("k") = 2,
            py::arg("jobs") = 1, py::arg("node_budget") = kDefaultNodeBudget,
            py::arg("attempt_cap") = 0, py::call_guard<py::gil_scoped_release>());
    har.def("flip_experiment_unsat_to_sat", &harness::flip_experiment_unsat_to_sat, py::arg("n"),
            py::arg("alpha"), py::arg("p"), py::arg("trials"), py::arg("seed"), py::arg("k") = 2,
            py::arg("jobs") = 1, py::arg("node_budget") = kDefaultNodeBudget,
            py::arg("attempt_cap") = 0, py::call_guard<py::gil_scoped_release>());
    py::class_<harness::CoverageReport>(har, "CoverageReport")
        .def_readonly("n", &harness::CoverageReport::n)
        .def_readonly("d", &harness::CoverageReport::d)
        .def_readonly("trials", &harness::CoverageReport::trials)
        .def_readonly("attempted", &harness::CoverageReport::attempted)
        .def_readonly("fully_covered", &harness::CoverageReport::fully_covered)
        .def_readonly("covered_fraction", &harness::CoverageReport::covered_fraction)
        .def_readonly("union_bound", &harness::CoverageReport::union_bound)
        .def_readonly("one_minus_bound", &harness::CoverageReport::one_minus_bound);
    har.def("coverage_experiment", &harness::coverage_experiment, py::arg("n"), py::arg("alpha"),
            py::arg("k"), py::arg("p"), py::arg("trials"), py::arg("seed"), py::arg("jobs") = 1,
            py::arg("node_budget") = kDefaultNodeBudget, py::arg("attempt_cap") = 0,
            py::call_guard<py::gil_scoped_release>());
    py::class_<harness::DegreeReport>(har, "DegreeReport")
        .def_readonly("expected_degree", &harness::DegreeReport::expected_degree)
        .def_readonly("threshold", &harness::DegreeReport::threshold)
        .def_readonly("prob_bound", &harness::DegreeReport::prob_bound)
        .def_readonly("trials", &harness::DegreeReport::trials)
        .def_readonly("below_threshold", &harness::DegreeReport::below_threshold)
        .def_readonly("empirical_rate", &harness::DegreeReport::empirical_rate)
        .def_readonly("se", &harness::DegreeReport::se);
    har.def("degree_experiment", &harness::degree_experiment, py::arg("params"),
            py::arg("trials"), py::arg("seed"), py::arg("jobs") = 1,
            py::call_guard<py::gil_scoped_release>());
}
