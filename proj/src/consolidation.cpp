#include "sgporo/consolidation.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "sgporo/diff_ops.hpp"

namespace sgporo {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v + 0.0);
    return buf;
}

struct LineError {
    int line;
    std::string key;
    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("line " + std::to_string(line) + " (" + key + "): " + msg);
    }
};

double parse_double(const std::string& s, const LineError& at) {
    if (s.empty()) at.fail("missing value");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) at.fail("not a finite number: '" + s + "'");
    return v;
}

long long parse_int(const std::string& s, const LineError& at) {
    if (s.empty()) at.fail("missing value");
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || errno == ERANGE) at.fail("not an integer: '" + s + "'");
    return v;
}

std::vector<double> parse_list(const std::string& s, const LineError& at) {
    std::vector<double> out;
    if (trim(s).empty()) return out;
    for (const std::string& item : split(s, ',')) out.push_back(parse_double(item, at));
    return out;
}

std::string file_name(const std::string& s, const LineError& at) {
    if (s.empty() || s.find('/') != std::string::npos || s == "." || s == "..")
        at.fail("expected a plain file name, got '" + s + "'");
    return s;
}

using Setter = std::function<void(ScenarioConfig&, const std::string&, const LineError&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"nodes", [](ScenarioConfig& c, const std::string& v, const LineError& e) {
             c.nodes = static_cast<int>(std::clamp<long long>(parse_int(v, e), -1, 1 << 20));
         }},
        {"column_height_m", [](ScenarioConfig& c, const std::string& v, const LineError& e) { c.height = parse_double(v, e); }},
        {"lambda_pa", [](ScenarioConfig& c, const std::string& v, const LineError& e) { c.model.lambda = parse_double(v, e); }},
        {"shear_modulus_pa", [](ScenarioConfig& c, const std::string& v, const LineError& e) { c.model.G = parse_double(v, e); }},
        {"biot_modulus_pa", [](ScenarioConfig& c, const std::string& v, const LineError& e) { c.model.M_b = parse_double(v, e); }},
        {"biot_coefficient", [](ScenarioConfig& c, const std::string& v, const LineError& e) { c.model.b = parse_double(v, e); }},
        {"kappa_s_pa_m2", [](ScenarioConfig& c, const std::string& v, const LineError& e) { c.model.kappa_s = parse_double(v, e); }},
        {"kappa_f_pa_m2", [](ScenarioConfig& c, const std::string& v, const LineError& e) { c.model.kappa_f = parse_double(v, e); }},
        {"fluid_density_kg_m3", [](ScenarioConfig& c, const std::string& v, const LineError& e) { c.model.rho_f0 = parse_double(v, e); }},
        {"darcy_resistivity_pa_s_m2",
         [](ScenarioConfig& c, const std::string& v, const LineError& e) { c.darcy_resistivity = parse_double(v, e); }},
        {"brinkman_viscosity_pa_s",
         [](ScenarioConfig& c, const std::string& v, const LineError& e) { c.brinkman_viscosity = parse_double(v, e); }},
        {"load_history_s_pa",
         [](ScenarioConfig& c, const std::string& v, const LineError& e) {
             c.load_history.clear();
             for (const std::string& item : split(v, ',')) {
                 const auto parts = split(item, ':');
                 if (parts.size() != 2) e.fail("expected time_s:pressure_pa pairs, got '" + item + "'");
                 c.load_history.push_back({parse_double(parts[0], e), parse_double(parts[1], e)});
             }
         }},
        {"drained_chemical_potential_j_kg",
         [](ScenarioConfig& c, const std::string& v, const LineError& e) { c.mu_ext = parse_double(v, e); }},
        {"time_step_s", [](ScenarioConfig& c, const std::string& v, const LineError& e) { c.solver.dt = parse_double(v, e); }},
        {"end_time_s", [](ScenarioConfig& c, const std::string& v, const LineError& e) { c.solver.t_end = parse_double(v, e); }},
        {"newton_tolerance",
         [](ScenarioConfig& c, const std::string& v, const LineError& e) { c.solver.newton_tol = parse_double(v, e); }},
        {"newton_max_iterations",
         [](ScenarioConfig& c, const std::string& v, const LineError& e) {
             c.solver.max_iter = static_cast<int>(std::clamp<long long>(parse_int(v, e), -1, 1 << 20));
         }},
        {"jacobian_step",
         [](ScenarioConfig& c, const std::string& v, const LineError& e) { c.solver.fd_jacobian_step = parse_double(v, e); }},
        {"output_every_steps",
         [](ScenarioConfig& c, const std::string& v, const LineError& e) {
             c.output_every = static_cast<int>(std::clamp<long long>(parse_int(v, e), -1, 1 << 20));
         }},
        {"profile_times_s", [](ScenarioConfig& c, const std::string& v, const LineError& e) { c.profile_times = parse_list(v, e); }},
        {"seed",
         [](ScenarioConfig& c, const std::string& v, const LineError& e) {
             const long long s = parse_int(v, e);
             if (s < 0) e.fail("seed must be non-negative");
             c.seed = static_cast<std::uint64_t>(s);
         }},
        {"verify_cases",
         [](ScenarioConfig& c, const std::string& v, const LineError& e) {
             c.verify_cases = static_cast<int>(std::clamp<long long>(parse_int(v, e), -1, 1 << 20));
         }},
        {"csv_file", [](ScenarioConfig& c, const std::string& v, const LineError& e) { c.csv_file = file_name(v, e); }},
        {"profile_svg_file",
         [](ScenarioConfig& c, const std::string& v, const LineError& e) { c.profile_svg_file = file_name(v, e); }},
        {"curve_svg_file",
         [](ScenarioConfig& c, const std::string& v, const LineError& e) { c.curve_svg_file = file_name(v, e); }},
        {"checkpoint_file",
         [](ScenarioConfig& c, const std::string& v, const LineError& e) { c.checkpoint_file = file_name(v, e); }},
    };
    return table;
}

}  // namespace

double ScenarioConfig::load_at(double t) const {
    double p = 0.0;
    for (const LoadStep& s : load_history)
        if (t >= s.t_start - 1e-12 * std::max(1.0, std::abs(s.t_start))) p = s.p_ext;
    return p;
}

void ScenarioConfig::validate() const {
    auto bad = [](const std::string& m) { throw ConfigError("invalid configuration: " + m); };
    if (nodes < 4 || nodes % 2 != 0) bad("nodes must be an even number ≥ 4");
    if (!(height > 0.0)) bad("column_height_m must be positive");
    try {
        model.validate();
        DissipationModel(darcy_resistivity * Tensor2::identity(), brinkman_viscosity * Tensor2::identity());
        solver.validate();
    } catch (const InvalidArgument& e) {
        bad(e.what());
    }
    if (load_history.empty()) bad("load_history_s_pa needs at least one entry");
    if (load_history.front().t_start != 0.0) bad("load_history_s_pa must start at t = 0");
    for (std::size_t i = 1; i < load_history.size(); ++i) {
        const double t = load_history[i].t_start;
        if (!(t > load_history[i - 1].t_start)) bad("load_history_s_pa times must increase");
        const double k = t / solver.dt;
        if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k)) bad("load changes must fall on the time grid");
    }
    if (output_every < 1) bad("output_every_steps must be at least 1");
    if (verify_cases < 1) bad("verify_cases must be at least 1");
    for (double t : profile_times)
        if (t < 0.0) bad("profile_times_s must be non-negative");
}

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig c;
    std::map<std::string, int> seen;
    std::istringstream is(text);
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const std::string s = trim(raw.substr(0, raw.find('#')));
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        const LineError at{line, key};
        const auto it = setters().find(key);
        if (it == setters().end()) at.fail("unknown key");
        if (seen.count(key)) at.fail("repeated key (first on line " + std::to_string(seen[key]) + ")");
        seen[key] = line;
        it->second(c, value, at);
    }
    c.validate();
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string format_config(const ScenarioConfig& c) {
    std::ostringstream os;
    os << "nodes = " << c.nodes << "\n";
    os << "column_height_m = " << fmt(c.height) << "\n";
    os << "lambda_pa = " << fmt(c.model.lambda) << "\n";
    os << "shear_modulus_pa = " << fmt(c.model.G) << "\n";
    os << "biot_modulus_pa = " << fmt(c.model.M_b) << "\n";
    os << "biot_coefficient = " << fmt(c.model.b) << "\n";
    os << "kappa_s_pa_m2 = " << fmt(c.model.kappa_s) << "\n";
    os << "kappa_f_pa_m2 = " << fmt(c.model.kappa_f) << "\n";
    os << "fluid_density_kg_m3 = " << fmt(c.model.rho_f0) << "\n";
    os << "darcy_resistivity_pa_s_m2 = " << fmt(c.darcy_resistivity) << "\n";
    os << "brinkman_viscosity_pa_s = " << fmt(c.brinkman_viscosity) << "\n";
    os << "load_history_s_pa = ";
    for (std::size_t i = 0; i < c.load_history.size(); ++i)
        os << (i ? ", " : "") << fmt(c.load_history[i].t_start) << ":" << fmt(c.load_history[i].p_ext);
    os << "\n";
    os << "drained_chemical_potential_j_kg = " << fmt(c.mu_ext) << "\n";
    os << "time_step_s = " << fmt(c.solver.dt) << "\n";
    os << "end_time_s = " << fmt(c.solver.t_end) << "\n";
    os << "newton_tolerance = " << fmt(c.solver.newton_tol) << "\n";
    os << "newton_max_iterations = " << c.solver.max_iter << "\n";
    os << "jacobian_step = " << fmt(c.solver.fd_jacobian_step) << "\n";
    os << "output_every_steps = " << c.output_every << "\n";
    os << "profile_times_s = ";
    for (std::size_t i = 0; i < c.profile_times.size(); ++i) os << (i ? ", " : "") << fmt(c.profile_times[i]);
    os << "\n";
    os << "seed = " << c.seed << "\n";
    os << "verify_cases = " << c.verify_cases << "\n";
    os << "csv_file = " << c.csv_file << "\n";
    os << "profile_svg_file = " << c.profile_svg_file << "\n";
    os << "curve_svg_file = " << c.curve_svg_file << "\n";
    os << "checkpoint_file = " << c.checkpoint_file << "\n";
    return os.str();
}

TerzaghiValue terzaghi_reference(double T_v, double z_over_H, int terms) {
    if (!(T_v >= 0.0) || !std::isfinite(T_v)) throw InvalidArgument("terzaghi_reference: T_v must be ≥ 0");
    if (terms < 1) throw InvalidArgument("terzaghi_reference: terms must be ≥ 1");
    if (!(z_over_H >= 0.0 && z_over_H <= 1.0)) throw InvalidArgument("terzaghi_reference: z/H must lie in [0, 1]");
    constexpr double pi = std::numbers::pi;
    if (T_v == 0.0) return {z_over_H > 0.0 ? 1.0 : 0.0, 0.0, 0.0, 0.0};
    const double a = pi * pi * T_v / 4.0;
    TerzaghiValue r;
    double tail = 0.0;
    for (int k = 0; k < terms; ++k) {
        const double n = 2.0 * k + 1.0;
        const double e = std::exp(-n * n * a);
        r.p_ratio += 4.0 / (n * pi) * std::sin(n * pi * z_over_H / 2.0) * e;
        tail += 8.0 / (n * n * pi * pi) * e;
    }
    r.U = 1.0 - tail;
    const double nK = 2.0 * terms + 1.0;
    const double eK = std::exp(-nK * nK * a);
    // Σ_{k≥K} 1/(2k+1)² ≤ 1/(2(2K−1)); later terms decay at least geometrically.
    r.U_remainder_bound = 8.0 / (pi * pi) * eK / (2.0 * (2.0 * terms - 1.0));
    if (z_over_H == 0.0) {
        r.p_remainder_bound = 0.0;
    } else {
        const double q = std::exp(-8.0 * (terms + 1.0) * a);
        r.p_remainder_bound = 4.0 / pi * eK / nK / (1.0 - q);
    }
    return r;
}

BiotConstants biot_constants(const ScenarioConfig& c) {
    const EnergyModel& m = c.model;
    const double K = m.lambda + 2.0 * m.G;
    const double Ku = K + m.b * m.b * m.M_b;
    return {K, m.b * m.M_b / Ku, m.M_b * K / (Ku * c.darcy_resistivity)};
}

PoroProblem column_problem(const ScenarioConfig& c, double p_ext) {
    const Grid g = Grid::column(c.nodes, c.height);
    Constraints con = Constraints::none(g);
    for (std::size_t n = 0; n < g.node_count(); ++n)
        for (int a = 1; a < 3; ++a) {
            con.fix_chi(n, a);
            con.fix_phi(n, a);
        }
    con.fix_chi(0, 0);
    con.fix_phi(0, 0);
    Loads loads;
    loads.p_ext = p_ext;
    loads.mu_ext = c.mu_ext;
    loads.faces = {Face{0, 1}};
    return {c.model,
            DissipationModel(c.darcy_resistivity * Tensor2::identity(), c.brinkman_viscosity * Tensor2::identity()),
            loads, con};
}

namespace {

double settlement(const PlacementState& p) {
    const std::size_t top = p.grid().node_count() - 1;
    return p.chi_s[top][0] - p.grid().position(top)[0];
}

ProfileSnapshot snapshot(double t, const PlacementState& p, const StepRecord& rec) {
    const Grid& g = p.grid();
    const KinematicDerived k = compute_kinematics(p);
    ProfileSnapshot s;
    s.t = t;
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        s.z.push_back(g.position(n)[0]);
        s.p.push_back(rec.pressure[n]);
        s.tr_eps.push_back(trace(k.epsilon[n]));
        s.m_f.push_back(rec.m_f[n]);
    }
    return s;
}

}  // namespace

ConsolidationResult run_consolidation(const ScenarioConfig& c, const ConsolidationHook& hook,
                                      const std::string& failure_checkpoint) {
    c.validate();
    const Grid g = Grid::column(c.nodes, c.height);
    ConsolidationResult res;
    res.biot = biot_constants(c);
    const double inf = std::numeric_limits<double>::infinity();
    const PlacementState ref = PlacementState::identity(g);

    auto fail = [&](const SolverFailure& e, const std::string& where, const TimeState& good) {
        std::string msg = std::string(e.what()) + " " + where;
        if (!failure_checkpoint.empty()) {
            write_checkpoint(failure_checkpoint, good, c.model.rho_f0);
            msg += "; last good state written to " + failure_checkpoint;
        }
        throw SolverFailure(msg);
    };

    PoroProblem undrained = column_problem(c, c.load_at(0.0));
    undrained.constraints.fix_all_phi();
    PlacementState state = ref;
    PlacementState drained = ref;
    try {
        solve_step(undrained, state, ref, inf, c.solver);
    } catch (const SolverFailure& e) {
        fail(e, "in the undrained initial solve", {0.0, ref});
    }
    try {
        solve_step(column_problem(c, c.load_history.back().p_ext), drained, ref, inf, c.solver);
    } catch (const SolverFailure& e) {
        fail(e, "in the drained limit solve", {0.0, state});
    }
    res.settlement_undrained = settlement(state);
    res.settlement_drained = settlement(drained);
    const double span = res.settlement_drained - res.settlement_undrained;
    const double tv_per_t = res.biot.consolidation_coefficient / (c.height * c.height);

    auto output = [&](const PoroProblem& pb, int step, double t, const PlacementState& p, const PlacementState& prev,
                      const SolveReport& rep) {
        const StepRecord rec = make_record(pb, p, prev, c.solver.dt, t, step);
        OutputRecord o;
        o.step = step;
        o.t = t;
        o.T_v = tv_per_t * t;
        o.p_ext = pb.loads.p_ext;
        o.settlement = settlement(p);
        o.U = span != 0.0 ? (o.settlement - res.settlement_undrained) / span : 0.0;
        o.energy = rec.energy;
        o.total_potential = rec.total_potential;
        o.dissipation = rec.dissipation_rate;
        o.fluid_mass = rec.fluid_mass;
        o.newton_iterations = rep.iterations;
        o.residual_norm = rep.final_norm;
        o.tolerance = rep.tolerance;
        o.roundoff_limited = rep.roundoff_limited;
        o.profile = snapshot(t, p, rec);
        return o;
    };

    res.records.push_back(output(undrained, 0, 0.0, state, state, SolveReport{}));
    const auto steps = static_cast<int>(std::llround(c.solver.t_end / c.solver.dt));
    TimeState last{0.0, state};
    for (int n = 1; n <= steps; ++n) {
        const double t = n * c.solver.dt;
        const PoroProblem pb = column_problem(c, c.load_at(t));
        PlacementState next = last.placement;
        SolveReport rep;
        try {
            rep = solve_step(pb, next, last.placement, c.solver.dt, c.solver);
        } catch (const SolverFailure& e) {
            fail(e, "at step " + std::to_string(n), last);
        }
        OutputRecord o = output(pb, n, t, next, last.placement, rep);
        if (hook) hook(pb, o, next, last.placement, rep);
        res.records.push_back(std::move(o));
        last = {t, next};
    }
    res.final_state = last;
    return res;
}

std::string consolidation_csv(const ConsolidationResult& r, int every) {
    std::ostringstream os;
    os << "t,node,z,p,tr_eps,m_f,U,energy,dissipation\n";
    for (const OutputRecord& o : r.records) {
        if (o.step % std::max(1, every) != 0 && &o != &r.records.back()) continue;
        const ProfileSnapshot& s = o.profile;
        for (std::size_t n = 0; n < s.z.size(); ++n)
            os << fmt_short(o.t) << ',' << n << ',' << fmt_short(s.z[n]) << ',' << fmt_short(s.p[n]) << ','
               << fmt_short(s.tr_eps[n]) << ',' << fmt_short(s.m_f[n]) << ',' << fmt_short(o.U) << ','
               << fmt_short(o.energy) << ',' << fmt_short(o.dissipation) << '\n';
    }
    return os.str();
}

namespace {

// Minimal line chart: polylines in data coordinates mapped to a fixed frame.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel, double x0, double x1, double y0, double y1)
        : title_(std::move(title)), xl_(std::move(xlabel)), yl_(std::move(ylabel)), x0_(x0), x1_(x1), y0_(y0), y1_(y1) {
        if (x1_ <= x0_) x1_ = x0_ + 1.0;
        if (y1_ <= y0_) y1_ = y0_ + 1.0;
        xs_ = round_out(x0_, x1_);
        ys_ = round_out(y0_, y1_);
    }

    void line(const std::vector<double>& x, const std::vector<double>& y, const std::string& color,
              const std::string& label, bool dashed = false) {
        std::ostringstream os;
        os << "<polyline clip-path=\"url(#frame)\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
           << (dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
        for (std::size_t i = 0; i < x.size(); ++i) os << fmt_px(px(x[i])) << ',' << fmt_px(py(y[i])) << ' ';
        os << "\"/>\n";
        const double ly = 40.0 + 16.0 * static_cast<double>(legend_.size());
        os << "<line x1=\"" << kW - kR + 15 << "\" y1=\"" << ly << "\" x2=\"" << kW - kR + 35 << "\" y2=\"" << ly
           << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"" << (dashed ? " stroke-dasharray=\"5,3\"" : "")
           << "/>\n<text x=\"" << kW - kR + 40 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">" << label << "</text>\n";
        legend_.push_back(label);
        body_ += os.str();
    }

    std::string str() const {
        std::ostringstream os;
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
           << "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        os << "<defs><clipPath id=\"frame\"><rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kW - kL - kR
           << "\" height=\"" << kH - kT - kB << "\"/></clipPath></defs>\n";
        os << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title_ << "</text>\n";
        os << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kW - kL - kR << "\" height=\"" << kH - kT - kB
           << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (double fx : ticks(x0_, x1_, xs_)) {
            os << "<line x1=\"" << fmt_px(px(fx)) << "\" y1=\"" << kH - kB << "\" x2=\"" << fmt_px(px(fx)) << "\" y2=\""
               << kH - kB + 4 << "\" stroke=\"black\"/>\n";
            os << "<text x=\"" << fmt_px(px(fx)) << "\" y=\"" << kH - kB + 16
               << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt_tick(fx) << "</text>\n";
        }
        for (double fy : ticks(y0_, y1_, ys_)) {
            os << "<line x1=\"" << kL - 4 << "\" y1=\"" << fmt_px(py(fy)) << "\" x2=\"" << kL << "\" y2=\""
               << fmt_px(py(fy)) << "\" stroke=\"black\"/>\n";
            os << "<text x=\"" << kL - 6 << "\" y=\"" << fmt_px(py(fy)) + 3
               << "\" text-anchor=\"end\" font-size=\"10\">" << fmt_tick(fy) << "</text>\n";
        }
        os << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"" << kH - 8 << "\" text-anchor=\"middle\" font-size=\"12\">"
           << xl_ << "</text>\n";
        os << "<text x=\"14\" y=\"" << (kT + kH - kB) / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
           << "transform=\"rotate(-90 14 " << (kT + kH - kB) / 2 << ")\">" << yl_ << "</text>\n";
        os << body_ << "</svg>\n";
        return os.str();
    }

private:
    static constexpr int kW = 760, kH = 420, kL = 70, kR = 250, kT = 30, kB = 45;

    // 1, 2 or 5 times a power of ten, about five intervals; widens [lo, hi]
    // to whole steps.
    static double round_out(double& lo, double& hi) {
        const double raw = (hi - lo) / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = 10.0 * mag;
        for (double m : {1.0, 2.0, 5.0})
            if (m * mag >= raw) {
                step = m * mag;
                break;
            }
        lo = std::floor(lo / step + 1e-9) * step;
        hi = std::ceil(hi / step - 1e-9) * step;
        return step;
    }
    static std::vector<double> ticks(double lo, double hi, double step) {
        std::vector<double> t;
        for (double v = lo; v <= hi + 0.5 * step; v += step) t.push_back(std::abs(v) < 1e-9 * step ? 0.0 : v);
        return t;
    }
    double px(double x) const { return kL + (x - x0_) / (x1_ - x0_) * (kW - kL - kR); }
    double py(double y) const { return kH - kB - (y - y0_) / (y1_ - y0_) * (kH - kT - kB); }
    static double fmt_px(double v) { return std::round(v * 10.0) / 10.0; }
    static std::string fmt_tick(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", v);
        return buf;
    }

    std::string title_, xl_, yl_;
    double x0_, x1_, y0_, y1_, xs_ = 1.0, ys_ = 1.0;
    std::string body_;
    std::vector<std::string> legend_;
};

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

}  // namespace

std::string pressure_profile_svg(const ConsolidationResult& r, const std::vector<double>& times, double height) {
    std::vector<const OutputRecord*> shown;
    for (double t : times) {
        const auto it = std::min_element(r.records.begin(), r.records.end(), [&](const auto& a, const auto& b) {
            return std::abs(a.t - t) < std::abs(b.t - t);
        });
        if (it != r.records.end()) shown.push_back(&*it);
    }
    double pmin = 0.0, pmax = 0.0;
    for (const OutputRecord* o : shown)
        for (double p : o->profile.p) {
            pmin = std::min(pmin, p);
            pmax = std::max(pmax, p);
        }
    SvgPlot plot("Pore pressure profiles", "pressure p [Pa]", "height z [m]", pmin, pmax > pmin ? pmax : pmin + 1.0,
                 0.0, height);
    std::size_t color = 0;
    for (const OutputRecord* o : shown) {
        char label[64];
        std::snprintf(label, sizeof label, "t = %.3g s (T_v = %.3g)", o->t, o->T_v);
        plot.line(o->profile.p, o->profile.z, kColors[color++ % 7], label);
    }
    return plot.str();
}

std::string consolidation_curve_svg(const ConsolidationResult& r) {
    std::vector<double> tv, u, uref;
    for (const OutputRecord& o : r.records) {
        tv.push_back(o.T_v);
        u.push_back(o.U);
        uref.push_back(terzaghi_reference(o.T_v, 0.0, 200).U);
    }
    SvgPlot plot("Degree of consolidation", "time factor T_v", "U", 0.0, tv.empty() ? 1.0 : tv.back(), 0.0, 1.0);
    plot.line(tv, u, kColors[0], "computed");
    plot.line(tv, uref, kColors[1], "classical series", true);
    return plot.str();
}

std::vector<std::string> write_outputs(const ConsolidationResult& r, const ScenarioConfig& c, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<double> times = c.profile_times;
    if (times.empty() && r.biot.consolidation_coefficient > 0.0)
        for (double tv : {0.0, 0.05, 0.1, 0.2, 0.5, 1.0}) {
            const double t = tv * c.height * c.height / r.biot.consolidation_coefficient;
            if (t <= c.solver.t_end * (1.0 + 1e-12)) times.push_back(t);
        }
    const std::string csv = (fs::path(dir) / c.csv_file).string();
    const std::string prof = (fs::path(dir) / c.profile_svg_file).string();
    const std::string curve = (fs::path(dir) / c.curve_svg_file).string();
    atomic_write(csv, consolidation_csv(r, c.output_every));
    atomic_write(prof, pressure_profile_svg(r, times, c.height));
    atomic_write(curve, consolidation_curve_svg(r));
    return {csv, prof, curve};
}

}  // namespace sgporo
