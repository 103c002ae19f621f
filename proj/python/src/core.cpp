#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rof/experiments.hpp"

namespace py = pybind11;
using namespace rof;

namespace {

py::dict record_dict(const RunRecord& r) {
    py::dict d;
    d["level"] = r.level;
    d["N_vertices"] = r.N_vertices;
    d["N_cells"] = r.N_cells;
    d["N_sides"] = r.N_sides;
    d["h_min"] = r.h_min;
    d["h_max"] = r.h_max;
    d["h_avg"] = r.h_avg;
    d["epsilon"] = r.epsilon;
    d["eps_stop"] = r.eps_stop;
    d["iterations"] = r.iterations;
    d["converged"] = r.converged;
    d["error_L2"] = r.error_L2;
    d["error_PiL2"] = r.error_PiL2;
    d["error_L2_cr"] = r.error_L2_cr;
    d["error_L2_p1"] = r.error_L2_p1;
    d["eta_total"] = r.eta_total;
    d["osc_total"] = r.osc_total;
    d["E_est"] = r.E_est;
    d["E_est_global"] = r.E_est_global;
    d["E_est_local"] = r.E_est_local;
    d["beta_emergent"] = r.beta_emergent;
    d["beta_slope"] = r.beta_slope;
    d["eoc"] = r.eoc;
    d["max_center_modulus"] = r.max_center_modulus;
    d["max_divergence_defect"] = r.max_divergence_defect;
    d["wall_time"] = r.wall_time;
    return d;
}

ExperimentSpec spec_from(const std::string& example, const std::string& space, const py::kwargs& overrides) {
    ExperimentSpec s = default_spec(example, space_from_string(space));
    if (overrides.empty()) return s;
    std::stringstream cfg;
    write_config(cfg, s);
    std::string text = cfg.str();
    std::stringstream out;
    std::istringstream lines(text);
    std::vector<std::string> given;
    for (auto item : overrides) given.push_back(py::str(item.first));
    for (std::string line; std::getline(lines, line);) {
        const std::string key = line.substr(0, line.find(' '));
        if (std::find(given.begin(), given.end(), key) == given.end()) out << line << '\n';
    }
    for (auto item : overrides) out << std::string(py::str(item.first)) << " = " << std::string(py::str(item.second)) << '\n';
    return parse_config(out);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Finite element solvers for the ROF model";

    py::register_exception<NumericalError>(m, "NumericalError");
    py::register_exception<ParseError>(m, "ParseError");

    py::enum_<Space>(m, "Space")
        .value("P0", Space::P0)
        .value("P0Vector", Space::P0Vector)
        .value("P1", Space::P1)
        .value("CR", Space::CR)
        .value("RT0Cell", Space::RT0Cell);

    py::class_<MeshStats>(m, "MeshStats")
        .def_readonly("num_vertices", &MeshStats::num_vertices)
        .def_readonly("num_cells", &MeshStats::num_cells)
        .def_readonly("num_sides", &MeshStats::num_sides)
        .def_readonly("h_min", &MeshStats::h_min)
        .def_readonly("h_max", &MeshStats::h_max)
        .def_readonly("h_avg", &MeshStats::h_avg);

    py::class_<Mesh, std::shared_ptr<Mesh>>(m, "Mesh")
        .def_property_readonly("dim", &Mesh::dim)
        .def_property_readonly("num_vertices", &Mesh::num_vertices)
        .def_property_readonly("num_cells", &Mesh::num_cells)
        .def_property_readonly("num_sides", &Mesh::num_sides)
        .def("vertices",
             [](const Mesh& mesh) {
                 Eigen::MatrixX2d v(mesh.num_vertices(), 2);
                 for (Index i = 0; i < mesh.num_vertices(); ++i) v.row(i) = mesh.vertex(i).transpose();
                 return v;
             })
        .def("cells",
             [](const Mesh& mesh) {
                 Eigen::Matrix<Index, Eigen::Dynamic, 3, Eigen::RowMajor> c(mesh.num_cells(), 3);
                 for (Index i = 0; i < mesh.num_cells(); ++i)
                     for (int k = 0; k < 3; ++k) c(i, k) = mesh.cell(i)[k];
                 return c;
             })
        .def("stats", [](const Mesh& mesh) { return mesh_stats(mesh); })
        .def("audit", &Mesh::audit)
        .def("to_text", [](const Mesh& mesh) {
            std::stringstream ss;
            write_mesh(ss, mesh);
            return ss.str();
        });

    m.def("square_mesh", [](double half_width, int cells) {
        return std::make_shared<Mesh>(make_square_mesh(half_width, cells == 4 ? SquareLayout::FourCells : SquareLayout::TwoCells));
    }, py::arg("half_width") = 1.0, py::arg("cells") = 2);
    m.def("interval_mesh", [](double half_width, int intervals_per_half, double beta) {
        return std::make_shared<Mesh>(graded_interval_mesh(half_width, intervals_per_half, beta));
    }, py::arg("half_width") = 1.0, py::arg("intervals_per_half") = 8, py::arg("beta") = 1.0);
    m.def("refine_uniform", [](const Mesh& mesh) { return std::make_shared<Mesh>(refine_uniform(mesh).mesh); });
    m.def("refine", [](const Mesh& mesh, std::vector<Index> cells) {
        return std::make_shared<Mesh>(refine(mesh, RefinementMarks(std::move(cells))).mesh);
    });
    m.def("grade_towards_circle", [](const Mesh& mesh, double radius, int levels) {
        JumpSet set;
        set.circles.push_back({Vec2::Zero(), radius});
        std::vector<std::shared_ptr<Mesh>> out;
        for (auto& t : grade_towards_set(mesh, set, levels)) out.push_back(std::make_shared<Mesh>(std::move(t)));
        return out;
    }, py::arg("mesh"), py::arg("radius") = 0.5, py::arg("levels") = 4);
    m.def("grading_strength", [](const std::vector<MeshStats>& s) { return grading_strength(s); });

    m.def("solve_disc", [](const Mesh& mesh, const std::string& space, double alpha, double radius, double epsilon,
                           double eps_stop) {
        RofProblem pb;
        pb.alpha = alpha;
        pb.epsilon = epsilon;
        pb.g = DataFunction::char_ball(Vec2::Zero(), radius);
        const auto shared = std::make_shared<const Mesh>(mesh);
        FlowSystem sys(shared, space_from_string(space), pb);
        FlowConfig cfg;
        cfg.eps_stop = eps_stop;
        const FlowState st = run_flow(sys, sys.initial_iterate(), cfg);
        const ExactSolution ex = exact_single_disc(radius, alpha, 2);
        py::dict d;
        d["dofs"] = st.u.dofs();
        d["iterations"] = st.iterations;
        d["converged"] = st.converged;
        d["energy"] = st.energy;
        d["error_L2"] = l2_error(st.u, ex.u, &ex.jumps).value;
        const DualField z = reconstruct_dual(st.u, pb);
        d["E_est"] = estimate_total(st.u, z, pb, integrate_data(*shared, pb.g, &pb.g.jump_set())).E_est;
        return d;
    }, py::arg("mesh"), py::arg("space") = "CR", py::arg("alpha") = 10.0, py::arg("radius") = 0.5,
       py::arg("epsilon") = 1e-3, py::arg("eps_stop") = 1e-6);

    m.def("coefficient", [](double r, double alpha, int d, const std::string& variant) {
        const ExactVariant v = variant == "two_disc" ? ExactVariant::TwoDisc
                               : variant == "sign_1d" ? ExactVariant::Sign1D
                                                      : ExactVariant::BallD;
        return coefficient(r, alpha, d, v);
    }, py::arg("r"), py::arg("alpha"), py::arg("d") = 2, py::arg("variant") = "ball");
    m.def("holder_quotient", &holder_quotient, py::arg("phi"), py::arg("r"), py::arg("theta"));
    m.def("mark_cells", [](const std::vector<double>& ind, double fraction) { return mark_cells(ind, fraction).cells; });
    m.def("eoc", [](const std::vector<double>& e, const std::vector<double>& h) { return eoc(e, h); });

    m.def("default_config", [](const std::string& example, const std::string& space) {
        std::stringstream ss;
        write_config(ss, default_spec(example, space_from_string(space)));
        return ss.str();
    }, py::arg("example"), py::arg("space") = "CR");
    m.def("run_experiment", [](const std::string& example, const std::string& space, py::kwargs overrides) {
        const ExperimentSpec spec = spec_from(example, space, overrides);
        std::vector<RunRecord> recs;
        {
            py::gil_scoped_release release;
            recs = run_experiment(spec);
        }
        py::list out;
        for (const auto& r : recs) out.append(record_dict(r));
        return out;
    }, py::arg("example"), py::arg("space") = "CR");
}
