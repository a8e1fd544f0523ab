#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "csmcover/analysis.hpp"
#include "csmcover/detector.hpp"
#include "csmcover/errors.hpp"
#include "csmcover/feature_io.hpp"
#include "csmcover/forest.hpp"
#include "csmcover/grid.hpp"
#include "csmcover/setcover.hpp"
#include "csmcover/simulator.hpp"

namespace py = pybind11;
using namespace csmcover;

namespace {

std::vector<int> label_codes(const Split& s) {
    std::vector<int> out;
    out.reserve(s.labels.size());
    for (auto l : s.labels) out.push_back(l == Label::Stego ? 1 : 0);
    return out;
}

Split make_split(const Eigen::MatrixXd& features, const std::vector<int>& labels) {
    Split s;
    s.features = features;
    for (int l : labels) {
        if (l != 0 && l != 1) throw ValidationError("labels must be 0 (cover) or 1 (stego)");
        s.labels.push_back(l ? Label::Stego : Label::Cover);
    }
    return s;
}

RegretMatrix make_regret(const std::vector<int>& ids, const Eigen::MatrixXd& regret) {
    RegretMatrix m;
    m.source_ids = ids;
    m.regret = regret;
    validate_regret_matrix(m);
    return m;
}

py::dict importance_dict(const ImportanceReport& r) {
    py::dict d;
    for (auto p : kAllParameters) d[py::str(std::string(parameter_key(p)))] = r.of(p);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Cover-source selection by greedy set covering of detector regret";

    static py::exception<ValidationError> validation(m, "ValidationError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ValidationError& e) {
            py::set_error(validation, e.what());
        } catch (const csmcover::RuntimeError& e) {
            PyErr_SetString(PyExc_RuntimeError, e.what());
        }
    });

    m.attr("GRID_SIZE") = kGridSize;
    m.def("parameter_names", [] {
        std::vector<std::string> out;
        for (auto p : kAllParameters) out.emplace_back(parameter_key(p));
        return out;
    });
    m.def("encode", [](const Levels& levels) { return encode(levels); }, py::arg("levels"));
    m.def("decode", &decode, py::arg("index"));

    py::class_<SimulatorConfig>(m, "SimulatorConfig")
        .def(py::init<>())
        .def_readwrite("dimension", &SimulatorConfig::dimension)
        .def_readwrite("samples_per_class", &SimulatorConfig::samples_per_class)
        .def_readwrite("payload_shift", &SimulatorConfig::payload_shift)
        .def_readwrite("base_noise", &SimulatorConfig::base_noise)
        .def_readwrite("sensitivity", &SimulatorConfig::sensitivity)
        .def_readwrite("mean_coupling", &SimulatorConfig::mean_coupling)
        .def_readwrite("seed", &SimulatorConfig::seed);

    py::class_<Split>(m, "Split")
        .def(py::init(&make_split), py::arg("features"), py::arg("labels"))
        .def_readonly("features", &Split::features)
        .def_property_readonly("labels", &label_codes);

    py::class_<SourceDataset>(m, "SourceDataset")
        .def(py::init([](int id, Split train, Split test) {
                 SourceDataset ds{id, std::move(train), std::move(test)};
                 validate_dataset(ds);
                 return ds;
             }),
             py::arg("source_id"), py::arg("train"), py::arg("test"))
        .def_readonly("source_id", &SourceDataset::source_id)
        .def_readonly("train", &SourceDataset::train)
        .def_readonly("test", &SourceDataset::test);

    m.def("simulate_source", [](int index, const SimulatorConfig& cfg) {
        return simulate_source(PipelineDescriptor::from_index(index), cfg);
    }, py::arg("index"), py::arg("config") = SimulatorConfig{});
    m.def("simulate_sources", &simulate_sources, py::arg("indices"), py::arg("config") = SimulatorConfig{});

    py::class_<LinearDetector>(m, "LinearDetector")
        .def_readonly("weights", &LinearDetector::weights)
        .def_readonly("bias", &LinearDetector::bias)
        .def("score", [](const LinearDetector& d, const Eigen::RowVectorXd& x) { return d.score(x); });
    m.def("train_detector", [](const SourceDataset& ds, double ridge) { return train_detector(ds, ridge); },
          py::arg("dataset"), py::arg("ridge") = kDefaultRidge);
    m.def("probability_of_error", &probability_of_error, py::arg("detector"), py::arg("split"));

    py::class_<RegretMatrix>(m, "RegretMatrix")
        .def(py::init(&make_regret), py::arg("source_ids"), py::arg("regret"))
        .def_readonly("source_ids", &RegretMatrix::source_ids)
        .def_readonly("intrinsic", &RegretMatrix::intrinsic)
        .def_readonly("regret", &RegretMatrix::regret)
        .def("__len__", &RegretMatrix::size);
    m.def("regret_matrix", [](const std::vector<SourceDataset>& ds, double ridge) { return regret_matrix(ds, ridge); },
          py::arg("datasets"), py::arg("ridge") = kDefaultRidge);
    m.def("load_regret_matrix", [](const std::string& path) { return load_regret_matrix(path); }, py::arg("path"));

    py::class_<Covering>(m, "Covering")
        .def_readonly("epsilon", &Covering::epsilon)
        .def_readonly("representatives", &Covering::representatives)
        .def_readonly("assignment", &Covering::assignment)
        .def_readonly("residual_order", &Covering::residual_order)
        .def_readonly("uncovered", &Covering::uncovered)
        .def("__len__", &Covering::size);

    py::class_<CoveringBounds>(m, "CoveringBounds")
        .def_readonly("greedy_size", &CoveringBounds::greedy_size)
        .def_readonly("lower_bound", &CoveringBounds::lower_bound)
        .def_readonly("exact_size", &CoveringBounds::exact_size)
        .def_readonly("best_representatives", &CoveringBounds::best_representatives)
        .def_readonly("nodes", &CoveringBounds::nodes)
        .def_property_readonly("complete", &CoveringBounds::complete);

    m.def("greedy_cover", [](const RegretMatrix& r, double eps) { return greedy_cover(build_cover_sets(r, eps)); },
          py::arg("matrix"), py::arg("epsilon"));
    m.def("exact_cover",
          [](const RegretMatrix& r, double eps, std::uint64_t budget, std::size_t limit, bool override_limit) {
              return exact_cover(build_cover_sets(r, eps), {budget, limit, override_limit});
          },
          py::arg("matrix"), py::arg("epsilon"), py::arg("node_budget") = ExactOptions{}.node_budget,
          py::arg("size_limit") = ExactOptions{}.size_limit, py::arg("override_limit") = false);
    m.def("lower_bound", [](const RegretMatrix& r, double eps) {
        const auto cs = build_cover_sets(r, eps);
        return lower_bound(cs, greedy_cover(cs));
    }, py::arg("matrix"), py::arg("epsilon"));
    m.def("filter_representatives", &filter_representatives, py::arg("covering"), py::arg("min_cover"));
    m.def("random_baseline", &random_baseline, py::arg("n"), py::arg("k"), py::arg("seed"), py::arg("variants") = 3);

    m.def("cluster_sources", [](const Covering& c, const RegretMatrix& r, const std::string& mode) {
        return cluster_sources(c, r, parse_assignment_mode(mode)).labels;
    }, py::arg("covering"), py::arg("matrix"), py::arg("mode") = "greedy-order");
    m.def("pareto_shares", [](const std::vector<std::size_t>& sizes) { return pareto_report(sizes).cumulative_shares; },
          py::arg("sizes"));
    m.def("mdi_importance",
          [](const std::map<int, int>& labels, int trees, int features_per_split, int max_depth, int min_leaf,
             std::uint64_t seed) {
              ClusterLabeling l;
              l.labels = labels;
              for (const auto& [s, r] : labels) ++l.cluster_sizes[r];
              return importance_dict(
                  mdi_importance(l, enumerate_grid(), {trees, features_per_split, max_depth, min_leaf, seed}));
          },
          py::arg("labels"), py::arg("trees") = 100, py::arg("features_per_split") = 2, py::arg("max_depth") = 0,
          py::arg("min_leaf") = 1, py::arg("seed") = 0);
}
