#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "croc/cli.hpp"
#include "croc/cohort.hpp"
#include "croc/collapse.hpp"
#include "croc/errors.hpp"
#include "croc/experiment.hpp"
#include "croc/froc.hpp"
#include "croc/roc.hpp"
#include "croc/simulate.hpp"

namespace py = pybind11;
using namespace croc;

namespace {

SimSpec sim_spec_from_json_str(const std::string& text) {
    return SimSpec::from_json(nlohmann::ordered_json::parse(text));
}

PredictionModel model_from_json_str(const std::string& text) {
    return PredictionModel::from_json(nlohmann::ordered_json::parse(text));
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Likelihood-ratio ROC risk prediction on common and rare variants "
              "(FROC forward selection and CROC multistage collapsing)";

    py::register_exception<parse_error>(m, "ParseError");
    py::register_exception<data_error>(m, "DataError");
    py::register_exception<usage_error>(m, "UsageError");
    py::register_exception<locus_mismatch_error>(m, "LocusMismatchError");
    py::register_exception<simulation_error>(m, "SimulationError");

    py::enum_<VariantClass>(m, "VariantClass")
        .value("Rare", VariantClass::Rare)
        .value("Common", VariantClass::Common);

    py::class_<IndividualRecord>(m, "IndividualRecord")
        .def_readonly("id", &IndividualRecord::id)
        .def_readonly("phenotype", &IndividualRecord::phenotype);

    py::class_<VariantMeta>(m, "VariantMeta")
        .def_readonly("id", &VariantMeta::id)
        .def_readonly("maf", &VariantMeta::maf)
        .def_readonly("variant_class", &VariantMeta::vclass);

    py::class_<Cohort>(m, "Cohort")
        .def_property_readonly("n_individuals", &Cohort::n_individuals)
        .def_property_readonly("n_variants", &Cohort::n_variants)
        .def_property_readonly("n_cases", &Cohort::n_cases)
        .def_property_readonly("n_controls", &Cohort::n_controls)
        .def_property_readonly("individuals", &Cohort::individuals)
        .def_property_readonly("variants", &Cohort::variants)
        .def("code", &Cohort::code, py::arg("individual"), py::arg("variant"))
        .def("column", &Cohort::column, py::arg("variant"))
        .def("genotype_rows",
             [](const Cohort& cohort) {
                 std::vector<std::vector<int>> rows(cohort.n_individuals());
                 for (std::size_t i = 0; i < cohort.n_individuals(); ++i) {
                     auto row = cohort.row(i);
                     rows[i].assign(row.begin(), row.end());
                 }
                 return rows;
             })
        .def("__repr__", [](const Cohort& cohort) {
            std::ostringstream os;
            os << "<Cohort " << cohort.n_individuals() << " individuals ("
               << cohort.n_cases() << " cases), " << cohort.n_variants() << " variants>";
            return os.str();
        });

    m.def("load_cohort", &load_cohort, py::arg("path"), py::arg("rare_threshold") = 0.01);
    m.def("save_cohort", &save_cohort, py::arg("cohort"), py::arg("path"));
    m.def(
        "classify_variants",
        [](const Cohort& cohort, double rare_threshold) {
            auto part = classify_variants(cohort, rare_threshold);
            return py::make_tuple(part.rare, part.common);
        },
        py::arg("cohort"), py::arg("rare_threshold") = 0.01,
        "Column indices of (rare, common) variants under a strict MAF threshold");
    m.def("drop_common_variants", &drop_common_variants, py::arg("cohort"),
          py::arg("keep_fraction"), py::arg("seed"));
    m.def("select_variants", &select_variants, py::arg("cohort"), py::arg("ids"));

    py::class_<LocusRef>(m, "LocusRef")
        .def(py::init<std::string, std::vector<std::string>>(), py::arg("id"),
             py::arg("members") = std::vector<std::string>{})
        .def_readonly("id", &LocusRef::id)
        .def_readonly("members", &LocusRef::members)
        .def_property_readonly("is_pseudo", &LocusRef::is_pseudo);

    py::class_<LrEntry>(m, "LrEntry")
        .def_readonly("genotype", &LrEntry::genotype)
        .def_readonly("case_count", &LrEntry::case_count)
        .def_readonly("control_count", &LrEntry::control_count)
        .def_readonly("lr", &LrEntry::lr);

    py::class_<LrTable>(m, "LrTable")
        .def_property_readonly("loci", &LrTable::loci)
        .def_property_readonly("alpha", &LrTable::alpha)
        .def_property_readonly("entries", &LrTable::entries)
        .def_property_readonly("m_k", &LrTable::m_k)
        .def("to_json", [](const LrTable& t) { return t.to_json().dump(2); });

    m.def("estimate_lr_table", &estimate_lr_table, py::arg("cohort"), py::arg("loci"),
          py::arg("alpha") = 0.5);
    m.def("score_individuals", &score_individuals, py::arg("table"), py::arg("cohort"));

    m.def(
        "auc",
        [](const std::vector<double>& cases, const std::vector<double>& controls) {
            return auc(cases, controls);
        },
        py::arg("case_scores"), py::arg("control_scores"),
        "AUC with the 0.5 tie kernel (probability a random case outscores a random control)");
    m.def(
        "auc_oracle",
        [](const std::vector<double>& cases, const std::vector<double>& controls) {
            return auc_oracle(cases, controls);
        },
        py::arg("case_scores"), py::arg("control_scores"));

    py::class_<RocCurve>(m, "RocCurve")
        .def_property_readonly("auc", [](const RocCurve& c) { return c.auc; })
        .def_property_readonly("points", [](const RocCurve& c) {
            std::vector<std::pair<double, double>> pts;
            for (const auto& p : c.points) pts.emplace_back(p.fpr, p.tpr);
            return pts;
        });
    m.def(
        "roc_points",
        [](const std::vector<double>& cases, const std::vector<double>& controls) {
            return roc_points(cases, controls);
        },
        py::arg("case_scores"), py::arg("control_scores"));
    m.def("write_roc_tsv", &write_roc_tsv, py::arg("curve"), py::arg("path"));

    py::class_<PseudoVariant>(m, "PseudoVariant")
        .def_readonly("id", &PseudoVariant::id)
        .def_readonly("members", &PseudoVariant::members)
        .def_readonly("stage_auc_path", &PseudoVariant::stage_auc_path);

    m.def(
        "multistage_collapse",
        [](const Cohort& cohort, const std::vector<std::size_t>& rare, double min_gain) {
            return multistage_collapse(cohort, rare, min_gain);
        },
        py::arg("cohort"), py::arg("rare_variants"), py::arg("min_gain") = 1e-9);

    py::class_<FitConfig>(m, "FitConfig")
        .def(py::init<>())
        .def_readwrite("alpha", &FitConfig::alpha)
        .def_readwrite("rare_threshold", &FitConfig::rare_threshold)
        .def_readwrite("folds", &FitConfig::folds)
        .def_readwrite("min_gain", &FitConfig::min_gain)
        .def_readwrite("max_k", &FitConfig::max_k)
        .def_readwrite("seed", &FitConfig::seed);

    py::class_<CvPoint>(m, "CvPoint")
        .def_readonly("k", &CvPoint::k)
        .def_readonly("mean_auc", &CvPoint::mean_auc);

    py::class_<PredictionModel>(m, "PredictionModel")
        .def_readonly("loci", &PredictionModel::loci)
        .def_readonly("train_auc", &PredictionModel::train_auc)
        .def_readonly("chosen_k", &PredictionModel::chosen_k)
        .def_readonly("cv_auc_by_size", &PredictionModel::cv_auc_by_size)
        .def_readonly("pseudo_variants", &PredictionModel::pseudo_variants)
        .def_property_readonly("lr_table",
                               [](const PredictionModel& m_) { return m_.lr_table; })
        .def("to_json", [](const PredictionModel& m_) { return m_.to_json().dump(2); })
        .def_static("from_json", &model_from_json_str, py::arg("text"));

    m.def("fit_froc",
          py::overload_cast<const Cohort&, const FitConfig&>(&fit_froc), py::arg("cohort"),
          py::arg("config"));
    m.def("fit_froc",
          py::overload_cast<const Cohort&, const std::vector<LocusRef>&, const FitConfig&>(
              &fit_froc),
          py::arg("cohort"), py::arg("candidates"), py::arg("config"));
    m.def("fit_croc", &fit_croc, py::arg("cohort"), py::arg("config"));
    m.def("forward_select", &forward_select, py::arg("cohort"), py::arg("candidates"),
          py::arg("max_k"), py::arg("min_gain") = 1e-9, py::arg("alpha") = 0.5);
    m.def("cross_validate_path", &cross_validate_path, py::arg("cohort"),
          py::arg("candidates"), py::arg("config"));
    m.def("evaluate_model", &evaluate_model, py::arg("model"), py::arg("cohort"),
          "Returns (test_auc, RocCurve)");
    m.def("save_model", &save_model, py::arg("model"), py::arg("path"));
    m.def("load_model", &load_model, py::arg("path"));

    py::class_<SimSpec>(m, "SimSpec")
        .def(py::init<>())
        .def_readwrite("n_cases", &SimSpec::n_cases)
        .def_readwrite("n_controls", &SimSpec::n_controls)
        .def_readwrite("beta0", &SimSpec::beta0)
        .def_readwrite("seed", &SimSpec::seed)
        .def_readwrite("max_attempts", &SimSpec::max_attempts)
        .def_readwrite("rare_threshold", &SimSpec::rare_threshold)
        .def("add_common", [](SimSpec& s, double maf, double beta) {
            s.common_variants.push_back({maf, beta});
        }, py::arg("maf"), py::arg("beta") = 0.0)
        .def("add_rare", [](SimSpec& s, double maf, double beta) {
            s.rare_variants.push_back({maf, beta});
        }, py::arg("maf"), py::arg("beta") = 0.0)
        .def("to_json", [](const SimSpec& s) { return s.to_json().dump(2); })
        .def_static("from_json", &sim_spec_from_json_str, py::arg("text"));

    m.def(
        "simulate_cohort", [](const SimSpec& spec) { return simulate_cohort(spec); },
        py::arg("spec"));
    m.def("simulate_replicates", &simulate_replicates, py::arg("spec"),
          py::arg("n_replicates"));
    m.def("load_sim_spec", &load_sim_spec, py::arg("path"));
    m.def("save_sim_spec", &save_sim_spec, py::arg("spec"), py::arg("path"));

    m.def(
        "run_cli", [](const std::vector<std::string>& args) { return croc::cli::run(args); },
        py::arg("args"), "Invoke the command-line interface in-process; returns the exit code");

    m.attr("__version__") = "0.1.0";
}
