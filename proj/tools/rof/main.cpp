#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "rof/experiments.hpp"

using namespace rof;

namespace {

std::string run_name(const ExperimentSpec& s) {
    std::string name = "ex" + s.example;
    if (s.example == "6.2") {
        char buf[32];
        std::snprintf(buf, sizeof buf, "_beta%g", s.beta);
        name += buf;
    }
    if (s.example == "6.1") {
        char buf[32];
        std::snprintf(buf, sizeof buf, "_r%g", s.radius);
        name += buf;
    }
    std::string space = to_string(s.space);
    for (auto& ch : space) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return name + "_" + space;
}

void print_record(const RunRecord& r) {
    std::printf("level %2d  cells %8d  h_avg %.4e  error %.6e  eoc %7.4f  E_est %.4e  iters %6d%s\n", r.level,
                static_cast<int>(r.N_cells), r.h_avg, r.error_L2, r.eoc, r.E_est, r.iterations,
                r.converged ? "" : "  (not converged)");
    std::fflush(stdout);
}

int cmd_run(ExperimentSpec spec, bool check) {
    spec.validate();
    const std::string name = run_name(spec);
    std::vector<RunRecord> done;
    std::string base;
    if (!spec.out.empty()) {
        std::filesystem::create_directories(spec.out);
        base = (std::filesystem::path(spec.out) / name).string();
        std::ofstream cfg(base + ".cfg");
        write_config(cfg, spec);
    }
    const auto flush = [&] {
        if (base.empty() || done.empty()) return;
        emit_csv(done, base + ".csv");
        std::ofstream det(base + "_details.csv");
        emit_details_csv(done, det);
    };
    int status = 0;
    try {
        run_experiment(spec, [&](const RunRecord& r) {
            done.push_back(r);
            print_record(r);
            flush();
        });
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        status = 1;
    }
    if (!base.empty() && !done.empty()) std::printf("wrote %s.csv\n", base.c_str());
    if (spec.example == "6.1" && spec.radius > 1.0)
        std::printf("note: the balls exceed the domain for r = %g; the reference is the free-space formula\n",
                    spec.radius);
    if (check && status == 0) {
        const CheckResult res = check_records(spec, done);
        std::printf("%s %s\n", res.pass ? "PASS" : "FAIL", res.message.c_str());
        if (!res.pass) status = 2;
    }
    return status;
}

int cmd_mesh(const std::string& grade, int levels, const std::string& layout, double radius, double beta,
             int intervals, const std::string& out) {
    const Mesh mesh = [&] {
        if (grade == "interval") return graded_interval_mesh(1.0, intervals, beta);
        const Mesh m0 = make_square_mesh(1.0, layout == "four" ? SquareLayout::FourCells : SquareLayout::TwoCells);
        if (grade == "uniform") {
            Mesh m = m0;
            for (int k = 0; k < levels; ++k) m = refine_uniform(m).mesh;
            return m;
        }
        JumpSet set;
        if (grade == "circle") set.circles.push_back({Vec2::Zero(), radius});
        else if (grade == "segment") set.segments.push_back({Vec2(-1.0, -1.0), Vec2(-1.0, 1.0)});
        else set.segments.push_back({Vec2::Zero(), Vec2::Zero()});
        return grade_towards_set(m0, set, levels).back();
    }();
    const MeshStats st = mesh_stats(mesh);
    std::fprintf(stderr, "vertices %d  cells %d  sides %d  h_min %.4e  h_max %.4e  h_avg %.4e\n",
                 static_cast<int>(st.num_vertices), static_cast<int>(st.num_cells), static_cast<int>(st.num_sides),
                 st.h_min, st.h_max, st.h_avg);
    if (out.empty() || out == "-") {
        write_mesh(std::cout, mesh);
    } else {
        std::ofstream os(out);
        if (!os) throw std::runtime_error("cannot open `" + out + "`");
        write_mesh(os, mesh);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite element experiments for the ROF model"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run one experiment");
    std::string example = "6.3", space = "cr", config, out, refinement;
    int levels = 0, first_level = -1;
    double beta = 0.0, alpha = 0.0, radius = 0.0, fraction = 0.0;
    bool check = false;
    run->add_option("--example", example, "example id")->check(CLI::IsMember({"6.1", "6.2", "6.3", "6.4"}));
    run->add_option("--space", space, "discrete space")->check(CLI::IsMember({"p1", "cr", "P1", "CR"}));
    run->add_option("--levels", levels, "number of levels")->check(CLI::PositiveNumber);
    run->add_option("--first-level", first_level, "index of the first level")->check(CLI::NonNegativeNumber);
    run->add_option("--beta", beta, "grading strength (6.2)")->check(CLI::Range(1.0, 10.0));
    run->add_option("--alpha", alpha, "fidelity weight")->check(CLI::PositiveNumber);
    run->add_option("--radius", radius, "data radius")->check(CLI::PositiveNumber);
    run->add_option("--fraction", fraction, "bulk fraction (6.4)")->check(CLI::Range(0.0, 1.0));
    run->add_option("--refinement", refinement, "uniform, graded, adaptive or graded_1d");
    run->add_option("--out", out, "output directory");
    run->add_option("--config", config, "key = value configuration file")->check(CLI::ExistingFile);
    run->add_flag("--check", check, "compare rates with the reference bands (exit code 2 on failure)");

    auto* all = app.add_subcommand("all", "run every default experiment and print the summary");
    std::string all_out = "results";
    bool all_check = false;
    all->add_option("--out", all_out, "output directory");
    all->add_flag("--check", all_check, "exit code 2 when a rate band fails");

    auto* mesh = app.add_subcommand("mesh", "write a refined mesh");
    std::string grade = "circle", layout = "two", mesh_out;
    int mesh_levels = 6, intervals = 16;
    double mesh_radius = 0.5, mesh_beta = 2.0;
    mesh->add_option("--grade", grade, "circle, segment, point, uniform or interval")
        ->check(CLI::IsMember({"circle", "segment", "point", "uniform", "interval"}));
    mesh->add_option("--levels", mesh_levels, "refinement levels")->check(CLI::NonNegativeNumber);
    mesh->add_option("--layout", layout, "initial square mesh")->check(CLI::IsMember({"two", "four"}));
    mesh->add_option("--radius", mesh_radius, "circle radius")->check(CLI::PositiveNumber);
    mesh->add_option("--beta", mesh_beta, "interval grading strength")->check(CLI::Range(1.0, 10.0));
    mesh->add_option("--intervals", intervals, "intervals per half of (-1, 1)")->check(CLI::PositiveNumber);
    mesh->add_option("--out", mesh_out, "output file (stdout if omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            ExperimentSpec spec;
            if (!config.empty()) {
                spec = parse_config(config);
                if (run->count("--space")) spec.space = space_from_string(space);
            } else {
                spec = default_spec(example, space_from_string(space));
            }
            if (run->count("--example") && !config.empty() && spec.example != example)
                throw std::invalid_argument("--example disagrees with the configuration file");
            if (levels > 0) spec.levels = levels;
            if (first_level >= 0) spec.first_level = first_level;
            if (beta > 0) spec.beta = beta;
            if (alpha > 0) spec.alpha = alpha;
            if (radius > 0) spec.radius = radius;
            if (fraction > 0) spec.fraction = fraction;
            if (!refinement.empty()) spec.refinement = refinement_from_string(refinement);
            if (!out.empty()) spec.out = out;
            return cmd_run(spec, check);
        }
        if (*all) {
            std::filesystem::create_directories(all_out);
            const auto rows = run_all_defaults(all_out, &std::cerr);
            print_summary(std::cout, rows);
            std::ofstream summary(std::filesystem::path(all_out) / "summary.txt");
            print_summary(summary, rows);
            bool ok = true;
            for (const auto& r : rows) ok = ok && r.ok && r.check;
            return all_check && !ok ? 2 : 0;
        }
        if (*mesh) return cmd_mesh(grade, mesh_levels, layout, mesh_radius, mesh_beta, intervals, mesh_out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
