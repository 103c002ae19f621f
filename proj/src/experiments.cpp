#include "rof/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace rof {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double epsilon_for(const ExperimentSpec& spec, double h) {
    if (spec.epsilon_rule == "fixed") return spec.epsilon;
    if (spec.epsilon_rule == "h^1") return h;
    if (spec.epsilon_rule == "h^2") return h * h;
    if (spec.epsilon_rule == "h^beta") return std::pow(h, spec.beta);
    throw std::invalid_argument("unknown epsilon_rule `" + spec.epsilon_rule + "`");
}

double eps_stop_for(const ExperimentSpec& spec, double h) {
    if (spec.eps_stop_rule == "h/20") return h / 20;
    if (spec.eps_stop_rule == "h^2/20") return h * h / 20;
    if (spec.eps_stop_rule == "h^(beta+1)/20") return std::pow(h, spec.beta + 1) / 20;
    if (spec.eps_stop_rule == "graded") return spec.beta == 1.0 ? h / 20 : std::pow(h, spec.beta + 1) / 20;
    throw std::invalid_argument("unknown eps_stop_rule `" + spec.eps_stop_rule + "`");
}

struct Setup {
    RofProblem problem;
    ExactSolution exact;
};

Setup make_setup(const ExperimentSpec& spec) {
    Setup s;
    s.problem.alpha = spec.alpha;
    s.problem.projected_fidelity = spec.projected_fidelity;
    const AffineMap phi = AffineMap::rotation(spec.angle_deg * M_PI / 180.0, spec.shift);
    if (spec.data == "two_balls") {
        s.problem.g = DataFunction::two_balls(spec.radius).transformed(phi);
        s.exact = exact_two_disc(spec.radius, spec.alpha, phi);
    } else if (spec.data == "char_ball") {
        s.problem.g = DataFunction::char_ball(Vec2::Zero(), spec.radius).transformed(phi);
        s.exact = exact_single_disc(spec.radius, spec.alpha, 2);
        if (!phi.is_identity()) {
            const DataFunction g = s.problem.g;
            const double c = s.exact.c;
            s.exact.u = [g, c](const Vec2& x) { return c * g(x); };
            s.exact.z.reset();
            s.exact.div_z.reset();
            s.exact.jumps = g.jump_set();
        }
    } else if (spec.data == "sign_1d") {
        s.problem.g = DataFunction::sign_1d();
        s.exact = exact_sign_1d(spec.radius, spec.alpha);
    } else {
        throw std::invalid_argument("unknown data `" + spec.data + "`");
    }
    const ScalarField u = s.exact.u;
    if (spec.dirichlet == "exact-trace") {
        s.problem.dirichlet = u;
    } else {
        s.problem.dirichlet = [](const Vec2&) { return 0.0; };
    }
    return s;
}

void fill_stats(RunRecord& r, const MeshStats& st) {
    r.N_vertices = st.num_vertices;
    r.N_cells = st.num_cells;
    r.N_sides = st.num_sides;
    r.h_min = st.h_min;
    r.h_max = st.h_max;
    r.h_avg = st.h_avg;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string to_string(RefinementKind k) {
    switch (k) {
        case RefinementKind::Uniform: return "uniform";
        case RefinementKind::Graded: return "graded";
        case RefinementKind::Adaptive: return "adaptive";
        case RefinementKind::Graded1D: return "graded_1d";
    }
    return "uniform";
}

RefinementKind refinement_from_string(std::string_view name) {
    const std::string s = lower(name);
    if (s == "uniform") return RefinementKind::Uniform;
    if (s == "graded") return RefinementKind::Graded;
    if (s == "adaptive") return RefinementKind::Adaptive;
    if (s == "graded_1d") return RefinementKind::Graded1D;
    throw std::invalid_argument("unknown refinement `" + std::string(name) + "`");
}

void ExperimentSpec::validate() const {
    if (space != Space::P1 && space != Space::CR) throw std::invalid_argument("spec: space must be P1 or CR");
    if (levels < 2) throw std::invalid_argument("spec: levels must be at least 2");
    if (first_level < 0) throw std::invalid_argument("spec: first_level must be nonnegative");
    if (!(beta >= 1)) throw std::invalid_argument("spec: beta must be at least 1");
    if (!(alpha > 0)) throw std::invalid_argument("spec: alpha must be positive");
    if (!(radius > 0)) throw std::invalid_argument("spec: radius must be positive");
    if (!(fraction > 0) || fraction > 1) throw std::invalid_argument("spec: fraction must lie in (0, 1]");
    if (max_iterations < 1) throw std::invalid_argument("spec: max_iterations must be at least 1");
    if (dirichlet != "zero" && dirichlet != "exact-trace")
        throw std::invalid_argument("spec: dirichlet must be zero or exact-trace");
    if (epsilon_rule == "fixed" && !(epsilon > 0)) throw std::invalid_argument("spec: fixed epsilon must be positive");
    epsilon_for(*this, 0.5);
    eps_stop_for(*this, 0.5);
    const bool one_d = refinement == RefinementKind::Graded1D;
    if (one_d != (data == "sign_1d")) throw std::invalid_argument("spec: sign_1d data requires graded_1d refinement");
    if (data != "two_balls" && data != "char_ball" && data != "sign_1d")
        throw std::invalid_argument("spec: unknown data `" + data + "`");
}

ExperimentSpec default_spec(const std::string& example, Space space) {
    ExperimentSpec s;
    s.example = example;
    s.space = space;
    if (example == "6.1") {
        s.refinement = RefinementKind::Uniform;
        s.layout = SquareLayout::FourCells;
        s.levels = 6;
        s.first_level = 1;
        s.data = "two_balls";
        s.radius = 0.4;
        s.angle_deg = 70.0;
        s.shift = Vec2(0.1, 0.0);
        s.epsilon_rule = "h^1";
        s.eps_stop_rule = "h/20";
        s.dirichlet = "exact-trace";
    } else if (example == "6.2") {
        s.space = Space::P1;
        s.refinement = RefinementKind::Graded1D;
        s.levels = 8;
        s.first_level = 2;
        s.data = "sign_1d";
        s.radius = 2.0;
        s.epsilon_rule = "h^beta";
        s.eps_stop_rule = "graded";
        s.dirichlet = "exact-trace";
    } else if (example == "6.3") {
        s.refinement = RefinementKind::Graded;
        s.layout = SquareLayout::TwoCells;
        s.levels = 12;
        s.first_level = 2;
    } else if (example == "6.4") {
        s.refinement = RefinementKind::Adaptive;
        s.layout = SquareLayout::TwoCells;
        s.levels = 19;
        s.first_level = 0;
    } else {
        throw std::invalid_argument("unknown example `" + example + "` (expected 6.1, 6.2, 6.3 or 6.4)");
    }
    return s;
}

std::vector<RunRecord> run_experiment(const ExperimentSpec& spec, const ProgressCallback& progress) {
    spec.validate();
    const Setup setup = make_setup(spec);
    const JumpSet& jumps = setup.problem.g.jump_set();
    std::vector<RunRecord> records;
    std::vector<MeshStats> history;
    const QuadratureOptions quad;

    FlowConfig flow;
    flow.max_iterations = spec.max_iterations;
    flow.min_eps_stop = spec.min_eps_stop;

    auto emit = [&](RunRecord& r) {
        if (!records.empty()) {
            const RunRecord& p = records.back();
            r.eoc = std::log(p.error_L2 / r.error_L2) / std::log(p.h_avg / r.h_avg);
        } else {
            r.eoc = kNaN;
        }
        records.push_back(r);
        if (progress) progress(records.back());
    };

    if (spec.refinement == RefinementKind::Adaptive) {
        Mesh m0 = make_square_mesh(1.0, spec.layout);
        for (int k = 0; k < spec.first_level; ++k) m0 = refine_uniform(m0).mesh;
        AdaptiveLoopConfig cfg;
        cfg.fraction = spec.fraction;
        cfg.levels = spec.levels;
        cfg.driver = spec.driver;
        cfg.indicator_space = spec.indicator_space;
        cfg.flow = flow;
        cfg.quadrature = quad;
        const double probe = 0.5;
        cfg.eps_factor = 1.0;
        cfg.eps_power = std::log(epsilon_for(spec, probe)) / std::log(probe);
        cfg.eps_stop_factor = 1.0 / 20.0;
        cfg.eps_stop_power = std::log(eps_stop_for(spec, probe) * 20.0) / std::log(probe);
        if (spec.epsilon_rule == "fixed")
            throw std::invalid_argument("spec: adaptive runs need an h-dependent epsilon_rule");
        auto t_prev = std::chrono::steady_clock::now();
        adaptive_loop(setup.problem, cfg, m0, setup.exact, [&](const AdaptiveLevel& lv) {
            RunRecord r;
            r.level = lv.level + spec.first_level;
            fill_stats(r, lv.stats);
            r.epsilon = lv.epsilon;
            r.eps_stop = lv.eps_stop;
            r.iterations = spec.space == Space::CR ? lv.iterations_cr : lv.iterations_p1;
            r.converged = lv.converged_cr && lv.converged_p1;
            r.error_L2_cr = lv.error_cr;
            r.error_L2_p1 = lv.error_p1;
            r.error_L2 = spec.space == Space::CR ? lv.error_cr : lv.error_p1;
            r.error_PiL2 = spec.space == Space::CR ? lv.error_pi_cr : lv.error_pi_p1;
            r.eta_total = lv.estimator.eta_total;
            r.osc_total = lv.estimator.osc_total;
            r.E_est = lv.estimator.E_est;
            r.E_est_global = lv.E_est_global;
            r.E_est_local = lv.E_est_local;
            r.beta_emergent = lv.beta_emergent;
            r.beta_slope = lv.beta_slope;
            r.max_center_modulus = lv.max_center_modulus;
            r.max_divergence_defect = lv.max_divergence_defect;
            r.marked_near_jump = lv.marked_near_jump;
            r.wall_time = seconds_since(t_prev);
            t_prev = std::chrono::steady_clock::now();
            emit(r);
        });
        return records;
    }

    std::vector<Mesh> graded;
    if (spec.refinement == RefinementKind::Graded)
        graded = grade_towards_set(make_square_mesh(1.0, spec.layout), jumps, spec.first_level + spec.levels - 1);
    Mesh uniform = make_square_mesh(1.0, spec.layout);
    if (spec.refinement == RefinementKind::Uniform)
        for (int k = 0; k < spec.first_level; ++k) uniform = refine_uniform(uniform).mesh;

    for (int i = 0; i < spec.levels; ++i) {
        const int level = spec.first_level + i;
        const auto t0 = std::chrono::steady_clock::now();
        MeshPtr mesh;
        switch (spec.refinement) {
            case RefinementKind::Uniform:
                if (i > 0) uniform = refine_uniform(uniform).mesh;
                mesh = std::make_shared<const Mesh>(uniform);
                break;
            case RefinementKind::Graded: mesh = std::make_shared<const Mesh>(graded[level]); break;
            case RefinementKind::Graded1D:
                mesh = std::make_shared<const Mesh>(graded_interval_mesh(1.0, 1 << level, spec.beta));
                break;
            case RefinementKind::Adaptive: break;
        }
        RunRecord r;
        r.level = level;
        const MeshStats st = mesh_stats(*mesh);
        history.push_back(st);
        fill_stats(r, st);
        r.epsilon = epsilon_for(spec, st.h_avg);
        r.eps_stop = eps_stop_for(spec, st.h_avg);
        RofProblem pb = setup.problem;
        pb.epsilon = r.epsilon;
        flow.eps_stop = r.eps_stop;

        FlowSystem system(mesh, spec.space, pb, quad);
        const FlowState state = run_flow(system, system.initial_iterate(), flow);
        r.iterations = state.iterations;
        r.converged = state.converged;
        r.error_L2 = l2_error(state.u, setup.exact.u, &setup.exact.jumps, quad).value;
        r.error_PiL2 = l2_error(state.u, setup.exact.u, &setup.exact.jumps, quad, ErrorVariant::Projected).value;
        r.error_L2_cr = spec.space == Space::CR ? r.error_L2 : kNaN;
        r.error_L2_p1 = spec.space == Space::P1 ? r.error_L2 : kNaN;

        const CellDataIntegrals data = integrate_data(*mesh, pb.g, &jumps, quad);
        const DualField z = reconstruct_dual(state.u, pb, data);
        const EstimatorBreakdown est = estimate_total(state.u, z, pb, data);
        r.eta_total = est.eta_total;
        r.osc_total = est.osc_total;
        r.E_est = est.E_est;
        r.E_est_global = estimate_total(state.u, scale_dual(z, Scaling::Global), pb, data).E_est;
        r.E_est_local = estimate_total(state.u, scale_dual(z, Scaling::Local), pb, data).E_est;
        for (Index c = 0; c < mesh->num_cells(); ++c) {
            r.max_center_modulus = std::max(r.max_center_modulus, z.z.rt_constant(c).norm());
            r.max_divergence_defect =
                std::max(r.max_divergence_defect,
                         std::abs(rt_divergence(z.z, c) - pb.alpha * (state.u.cell_mean(c) - data.mean[c])));
        }
        r.beta_emergent = grading_ratio(st);
        r.beta_slope = history.size() >= 2 ? grading_strength(history) : kNaN;
        r.marked_near_jump = kNaN;
        r.wall_time = seconds_since(t0);
        emit(r);
    }
    return records;
}

std::vector<double> eoc(std::span<const double> errors, std::span<const double> h) {
    if (errors.size() != h.size() || errors.size() < 2)
        throw std::invalid_argument("eoc: equal lengths of at least two required");
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (!(errors[i] > 0) || !(h[i] > 0)) throw std::invalid_argument("eoc: entries must be positive");
    std::vector<double> rates(errors.size(), kNaN);
    for (std::size_t i = 1; i < errors.size(); ++i)
        rates[i] = std::log(errors[i - 1] / errors[i]) / std::log(h[i - 1] / h[i]);
    return rates;
}

double eoc_fit(std::span<const double> errors, std::span<const double> h, int last) {
    if (errors.size() != h.size() || errors.size() < 2 || last < 2)
        throw std::invalid_argument("eoc_fit: equal lengths of at least two required");
    const std::size_t n = std::min<std::size_t>(last, errors.size());
    const std::size_t start = errors.size() - n;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = start; i < errors.size(); ++i) {
        if (!(errors[i] > 0) || !(h[i] > 0)) throw std::invalid_argument("eoc_fit: entries must be positive");
        const double x = std::log(h[i]), y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("eoc_fit: mesh sizes do not vary");
    return (n * sxy - sx * sy) / denom;
}

void emit_csv(const std::vector<RunRecord>& records, std::ostream& os) {
    write_level_csv_header(os);
    for (const auto& r : records) {
        MeshStats st;
        st.num_cells = r.N_cells;
        st.num_vertices = r.N_vertices;
        st.h_min = r.h_min;
        st.h_avg = r.h_avg;
        write_level_csv_row(os, r.level, st, r.error_L2, r.eta_total, r.osc_total, r.E_est, r.beta_emergent);
    }
}

void emit_csv(const std::vector<RunRecord>& records, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open `" + path + "` for writing");
    emit_csv(records, os);
}

void emit_details_csv(const std::vector<RunRecord>& records, std::ostream& os) {
    os << "level,N_vertices,N_cells,N_sides,h_min,h_max,h_avg,epsilon,eps_stop,iterations,converged,error_L2,"
          "error_PiL2,error_L2_cr,error_L2_p1,eta_total,osc_total,E_est,E_est_global,E_est_local,beta_emergent,beta_slope,eoc,"
          "max_center_modulus,max_divergence_defect,marked_near_jump\n";
    for (const auto& r : records) {
        os << r.level << ',' << r.N_vertices << ',' << r.N_cells << ',' << r.N_sides;
        for (double v : {r.h_min, r.h_max, r.h_avg, r.epsilon, r.eps_stop}) os << ',' << format_double(v);
        os << ',' << r.iterations << ',' << (r.converged ? 1 : 0);
        for (double v : {r.error_L2, r.error_PiL2, r.error_L2_cr, r.error_L2_p1, r.eta_total, r.osc_total, r.E_est,
                         r.E_est_global, r.E_est_local, r.beta_emergent, r.beta_slope, r.eoc, r.max_center_modulus,
                         r.max_divergence_defect, r.marked_near_jump})
            os << ',' << format_double(v);
        os << '\n';
    }
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value, int line) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0')
        throw ParseError("config line " + std::to_string(line) + ": field `" + key + "` expects a number, got `" +
                         value + "`");
    return v;
}

int parse_int(const std::string& key, const std::string& value, int line) {
    const double v = parse_double(key, value, line);
    if (v != std::floor(v))
        throw ParseError("config line " + std::to_string(line) + ": field `" + key + "` expects an integer");
    return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& value, int line) {
    const std::string v = lower(value);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ParseError("config line " + std::to_string(line) + ": field `" + key + "` expects true or false");
}

}  // namespace

ExperimentSpec parse_config(std::istream& is) {
    std::map<std::string, std::pair<std::string, int>> kv;
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line " + std::to_string(line) + ": expected `key = value`");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty()) throw ParseError("config line " + std::to_string(line) + ": empty key");
        if (kv.count(key)) throw ParseError("config line " + std::to_string(line) + ": duplicate field `" + key + "`");
        kv[key] = {value, line};
    }
    for (const char* required : {"example", "alpha"})
        if (!kv.count(required)) throw ParseError(std::string("config: missing required field `") + required + "`");

    const std::string example = kv["example"].first;
    ExperimentSpec s;
    Space space = Space::CR;
    if (kv.count("space")) {
        try {
            space = space_from_string(kv["space"].first);
        } catch (const std::invalid_argument&) {
            throw ParseError("config line " + std::to_string(kv["space"].second) + ": field `space` expects P1 or CR");
        }
    }
    if (example == "custom") {
        s.example = "custom";
        s.space = space;
    } else {
        try {
            s = default_spec(example, space);
        } catch (const std::invalid_argument& e) {
            throw ParseError("config line " + std::to_string(kv["example"].second) + ": " + e.what());
        }
        if (kv.count("space")) s.space = space;
    }

    for (const auto& [key, entry] : kv) {
        const auto& [value, ln] = entry;
        try {
            if (key == "example" || key == "space") continue;
            if (key == "refinement") s.refinement = refinement_from_string(value);
            else if (key == "layout") {
                const std::string v = lower(value);
                if (v == "two") s.layout = SquareLayout::TwoCells;
                else if (v == "four") s.layout = SquareLayout::FourCells;
                else throw ParseError("config line " + std::to_string(ln) + ": field `layout` expects two or four");
            } else if (key == "levels") s.levels = parse_int(key, value, ln);
            else if (key == "first_level") s.first_level = parse_int(key, value, ln);
            else if (key == "beta") s.beta = parse_double(key, value, ln);
            else if (key == "alpha") s.alpha = parse_double(key, value, ln);
            else if (key == "data") s.data = value;
            else if (key == "radius") s.radius = parse_double(key, value, ln);
            else if (key == "angle_deg") s.angle_deg = parse_double(key, value, ln);
            else if (key == "shift") {
                const auto comma = value.find(',');
                if (comma == std::string::npos)
                    throw ParseError("config line " + std::to_string(ln) + ": field `shift` expects `x, y`");
                s.shift = Vec2(parse_double(key, trim(value.substr(0, comma)), ln),
                               parse_double(key, trim(value.substr(comma + 1)), ln));
            } else if (key == "epsilon_rule") s.epsilon_rule = value;
            else if (key == "epsilon") s.epsilon = parse_double(key, value, ln);
            else if (key == "eps_stop_rule") s.eps_stop_rule = value;
            else if (key == "dirichlet") s.dirichlet = value;
            else if (key == "fraction") s.fraction = parse_double(key, value, ln);
            else if (key == "driver") s.driver = scaling_from_string(value);
            else if (key == "indicator_space") s.indicator_space = space_from_string(value);
            else if (key == "projected_fidelity") s.projected_fidelity = parse_bool(key, value, ln);
            else if (key == "max_iterations") s.max_iterations = parse_int(key, value, ln);
            else if (key == "min_eps_stop") s.min_eps_stop = parse_double(key, value, ln);
            else if (key == "out") s.out = value;
            else throw ParseError("config line " + std::to_string(ln) + ": unknown field `" + key + "`");
        } catch (const std::invalid_argument& e) {
            throw ParseError("config line " + std::to_string(ln) + ": field `" + key + "`: " + e.what());
        }
    }
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    return s;
}

ExperimentSpec parse_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("config: cannot open `" + path + "`");
    return parse_config(is);
}

void write_config(std::ostream& os, const ExperimentSpec& s) {
    os << "example = " << s.example << '\n';
    os << "space = " << to_string(s.space) << '\n';
    os << "refinement = " << to_string(s.refinement) << '\n';
    os << "layout = " << (s.layout == SquareLayout::TwoCells ? "two" : "four") << '\n';
    os << "levels = " << s.levels << '\n';
    os << "first_level = " << s.first_level << '\n';
    os << "beta = " << format_double(s.beta) << '\n';
    os << "alpha = " << format_double(s.alpha) << '\n';
    os << "data = " << s.data << '\n';
    os << "radius = " << format_double(s.radius) << '\n';
    os << "angle_deg = " << format_double(s.angle_deg) << '\n';
    os << "shift = " << format_double(s.shift.x()) << ", " << format_double(s.shift.y()) << '\n';
    os << "epsilon_rule = " << s.epsilon_rule << '\n';
    os << "epsilon = " << format_double(s.epsilon) << '\n';
    os << "eps_stop_rule = " << s.eps_stop_rule << '\n';
    os << "dirichlet = " << s.dirichlet << '\n';
    os << "fraction = " << format_double(s.fraction) << '\n';
    os << "driver = " << to_string(s.driver) << '\n';
    os << "indicator_space = " << to_string(s.indicator_space) << '\n';
    os << "projected_fidelity = " << (s.projected_fidelity ? "true" : "false") << '\n';
    os << "max_iterations = " << s.max_iterations << '\n';
    os << "min_eps_stop = " << format_double(s.min_eps_stop) << '\n';
    if (!s.out.empty()) os << "out = " << s.out << '\n';
}

namespace {

std::vector<double> column(const std::vector<RunRecord>& recs, double RunRecord::*field) {
    std::vector<double> out;
    for (const auto& r : recs) out.push_back(r.*field);
    return out;
}

std::string band_message(const char* what, double value, double lo, double hi) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s = %.3f (band [%.2f, %.2f])", what, value, lo, hi);
    return buf;
}

}  // namespace

CheckResult check_records(const ExperimentSpec& spec, const std::vector<RunRecord>& records) {
    CheckResult res;
    if (records.size() < 2) return {false, "fewer than two levels"};
    const auto h = column(records, &RunRecord::h_avg);
    auto within = [&](double v, double lo, double hi, const char* what) {
        const bool ok = std::isfinite(v) && v >= lo && v <= hi;
        if (!res.message.empty()) res.message += "; ";
        res.message += band_message(what, v, lo, hi);
        res.pass = res.pass && ok;
    };
    if (spec.example == "6.1") {
        within(eoc_fit(column(records, &RunRecord::error_L2), h, 3), 0.4, 0.6, "EOC(last 3)");
    } else if (spec.example == "6.2") {
        within(eoc_fit(column(records, &RunRecord::error_L2), h, 3), spec.beta / 2 - 0.15, spec.beta / 2 + 0.15,
               "EOC(last 3)");
    } else if (spec.example == "6.3") {
        if (spec.space == Space::CR) within(records.back().eoc, 0.8, 1.1, "final EOC");
        else within(records.back().eoc, -1e300, 0.9, "final EOC");
    } else if (spec.example == "6.4") {
        if (spec.space == Space::CR) within(eoc_fit(column(records, &RunRecord::error_L2_cr), h, 4), 0.61, 0.91, "CR EOC(last 4)");
        else within(eoc_fit(column(records, &RunRecord::error_L2_p1), h, 4), 0.43, 0.73, "P1 EOC(last 4)");
        within(records.back().beta_emergent, 1.45, 1.95, "beta_emergent");
    } else {
        res.message = "no reference band for custom runs";
    }
    return res;
}

std::vector<SummaryRow> run_all_defaults(const std::string& out_dir, std::ostream* log) {
    struct Job {
        std::string name;
        ExperimentSpec spec;
    };
    std::vector<Job> jobs;
    {
        ExperimentSpec s = default_spec("6.1", Space::CR);
        s.radius = 0.4;
        jobs.push_back({"ex6.1_r0.4_cr", s});
        s.radius = 5.0;
        jobs.push_back({"ex6.1_r5_cr", s});
    }
    for (int b = 1; b <= 4; ++b) {
        ExperimentSpec s = default_spec("6.2", Space::P1);
        s.beta = b;
        if (b == 4) s.levels = 6;
        jobs.push_back({"ex6.2_beta" + std::to_string(b) + "_p1", s});
    }
    jobs.push_back({"ex6.3_p1", default_spec("6.3", Space::P1)});
    jobs.push_back({"ex6.3_cr", default_spec("6.3", Space::CR)});
    jobs.push_back({"ex6.4", default_spec("6.4", Space::P1)});

    std::vector<SummaryRow> rows;
    double cr63_final = kNaN;
    std::size_t p1_63_row = 0;
    for (const auto& job : jobs) {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<RunRecord> recs;
        std::string error;
        try {
            if (log) *log << "running " << job.name << std::endl;
            recs = run_experiment(job.spec);
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double wall = seconds_since(t0);
        if (!out_dir.empty() && !recs.empty()) {
            emit_csv(recs, out_dir + "/" + job.name + ".csv");
            std::ofstream det(out_dir + "/" + job.name + "_details.csv");
            emit_details_csv(recs, det);
            std::ofstream cfg(out_dir + "/" + job.name + ".cfg");
            write_config(cfg, job.spec);
        }
        auto make_row = [&](const std::string& name, Space space, double RunRecord::*err) {
            SummaryRow row;
            row.name = name;
            row.space = to_string(space);
            row.levels = static_cast<int>(recs.size());
            row.wall_time = wall;
            row.ok = error.empty() && recs.size() >= 2;
            row.message = error;
            if (row.ok) {
                const auto e = column(recs, err);
                const auto h = column(recs, &RunRecord::h_avg);
                row.final_eoc = eoc(e, h).back();
                row.fitted_eoc = eoc_fit(e, h, job.spec.refinement == RefinementKind::Adaptive ? 4 : 3);
                row.beta_emergent = recs.back().beta_emergent;
                ExperimentSpec s = job.spec;
                s.space = space;
                const CheckResult chk = check_records(s, recs);
                row.check = chk.pass;
                row.message = chk.message;
            } else {
                row.check = false;
            }
            return row;
        };
        if (job.spec.refinement == RefinementKind::Adaptive) {
            rows.push_back(make_row(job.name + "_p1", Space::P1, &RunRecord::error_L2_p1));
            rows.push_back(make_row(job.name + "_cr", Space::CR, &RunRecord::error_L2_cr));
        } else {
            rows.push_back(make_row(job.name, job.spec.space, &RunRecord::error_L2));
            if (job.name == "ex6.3_p1") p1_63_row = rows.size() - 1;
            if (job.name == "ex6.3_cr" && rows.back().ok) {
                cr63_final = rows.back().final_eoc;
                SummaryRow& p1 = rows[p1_63_row];
                if (p1.ok) {
                    const bool ok = p1.final_eoc <= cr63_final - 0.1;
                    char buf[128];
                    std::snprintf(buf, sizeof buf, "final EOC %.3f <= CR final EOC %.3f - 0.1", p1.final_eoc,
                                  cr63_final);
                    p1.check = ok;
                    p1.message = buf;
                }
            }
        }
        if (log) *log << "finished " << job.name << " in " << std::fixed << std::setprecision(1) << wall << " s"
                      << std::defaultfloat << std::endl;
    }
    return rows;
}

void print_summary(std::ostream& os, const std::vector<SummaryRow>& rows) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%-18s %-5s %6s %10s %10s %8s %9s  %s\n", "experiment", "space", "levels",
                  "final_eoc", "fit_eoc", "beta", "time_s", "status");
    os << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-18s %-5s %6d %10.3f %10.3f %8.3f %9.1f  %s %s\n", r.name.c_str(),
                      r.space.c_str(), r.levels, r.final_eoc, r.fitted_eoc, r.beta_emergent, r.wall_time,
                      !r.ok ? "ERROR" : (r.check ? "PASS" : "FAIL"), r.message.c_str());
        os << buf;
    }
}

}  // namespace rof
