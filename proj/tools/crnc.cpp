// crnc: compile NAND netlists to I/O CRNs, simulate, verify, sweep.

#include <crnc/crnc.hpp>

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace crnc;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { ok = 0, verify_failed = 1, input_error = 2, sim_failed = 3 };

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Opts {
    double tau = 1.0;
    std::string delta = "0.03,0.004,0.004,0.1";
    std::optional<double> eps;
    int trials = 1;
    std::uint64_t seed = 0;
    double rtol = 1e-8;
    double atol = 1e-10;
    std::optional<double> dt;
    std::optional<double> horizon;
    std::string noise = "none";
    std::string out;
    std::string x0;
    std::string svg;
    std::string crn;
    std::string schedule;
    std::string intervals;
    std::string netlist;
    std::string scenario;
    bool grid = false;
    unsigned threads = 0;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read '" + path + "'");
    return {std::istreambuf_iterator<char>(in), {}};
}

Json read_json(const std::string& path)
{
    try {
        return Json::parse(read_file(path));
    } catch (const Json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

void write_file(const std::string& path, const std::string& text)
{
    if (auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
}

DeltaVector parse_delta(const Opts& o)
{
    DeltaVector d = DeltaVector::parse(o.delta);
    if (o.eps) d.eps = *o.eps;
    d.validate();
    return d;
}

GateParams gate_params(const Opts& o)
{
    GateParams p{parse_delta(o), o.tau};
    p.validate();
    return p;
}

SimConfig sim_config(const Opts& o, double horizon)
{
    SimConfig c = SimConfig::for_delay(o.tau, horizon);
    c.rel_tol = o.rtol;
    c.abs_tol = o.atol;
    if (o.dt) c.output_dt = *o.dt;
    c.validate();
    return c;
}

/// --x0 accepts a JSON object literal or a path to one.
std::optional<State> parse_x0(const std::string& arg)
{
    if (arg.empty()) return std::nullopt;
    const std::string text = arg.find('{') != std::string::npos ? arg : read_file(arg);
    try {
        return Json::parse(text).get<State>();
    } catch (const Json::exception& e) {
        throw InputError(std::string("--x0: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Manifest

struct Manifest {
    std::string command;
    std::vector<std::string> argv;
    std::map<std::string, std::string> inputs;
    Json params = Json::object();
    std::vector<std::string> outputs;

    [[nodiscard]] Json to_json() const
    {
        return {{"command", command}, {"argv", argv},       {"inputs", inputs},
                {"params", params},   {"outputs", outputs}, {"version", kVersion}};
    }
};

Json echo_params(const Opts& o, bool with_delta)
{
    Json p = {{"tau", o.tau}, {"seed", o.seed}, {"rtol", o.rtol}, {"atol", o.atol}, {"noise", o.noise}, {"trials", o.trials}};
    if (with_delta) {
        const DeltaVector d = parse_delta(o);
        p["delta"] = {d.d1, d.d2, d.d3, d.d4};
        p["eps"] = d.epsilon();
    }
    if (o.dt) p["dt"] = *o.dt;
    if (o.horizon) p["horizon"] = *o.horizon;
    return p;
}

/// Manifest path: next to a file output, or inside an output directory.
void write_manifest(Manifest m, const std::string& anchor, bool anchor_is_dir)
{
    const std::string path = anchor_is_dir ? (fs::path(anchor) / "manifest.json").string() : anchor + ".manifest.json";
    write_file(path, m.to_json().dump(2) + "\n");
}

void emit(const std::string& path, const std::string& text, Manifest& m)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    write_file(path, text);
    m.outputs.push_back(path);
}

// ---------------------------------------------------------------------------
// Targets

Json instance_json(const GateInstance& g)
{
    Json j = to_json(g.crn);
    j["x0"] = g.canonical_x0;
    return j;
}

Netlist load_netlist(const std::string& path) { return parse_netlist_or_throw(read_file(path)); }

/// A sweep target assembled from --crn/--schedule/--intervals.
SweepTarget target_from_files(const Opts& o)
{
    if (o.crn.empty() || o.schedule.empty() || o.intervals.empty())
        throw InputError("need --netlist, --scenario, or all of --crn, --schedule and --intervals");
    const Json cj = read_json(o.crn);
    SweepTarget t;
    t.gate.kind = GateKind::circuit;
    t.gate.crn = crn_from_json(cj);
    t.schedule = schedule_from_json(read_json(o.schedule));
    t.intervals = intervals_from_json(read_json(o.intervals));
    for (const auto& s : t.gate.crn.inputs)
        if (!is_dual_rail(s)) t.gate.inputs.push_back(wire(s));
    std::set<std::string> outs;
    for (const auto& iv : t.intervals)
        for (const auto& [s, b] : iv.expected) outs.insert(is_dual_rail(s) ? wire_of(s) : s);
    for (const auto& w : outs) t.gate.outputs.push_back(wire(w));
    for (const auto& r : t.gate.crn.reactions) t.gate.k = std::max(t.gate.k, r.k);
    if (auto x = parse_x0(o.x0)) t.gate.canonical_x0 = *x;
    else if (cj.contains("x0")) t.gate.canonical_x0 = cj.at("x0").get<State>();
    return t;
}

Scenario resolve_target(const Opts& o)
{
    const GateParams p = gate_params(o);
    if (!o.scenario.empty()) return make_scenario(o.scenario, p);
    if (!o.netlist.empty()) return circuit_scenario(load_netlist(o.netlist), p, fs::path(o.netlist).stem().string());
    return {"files", target_from_files(o), o.tau, std::nullopt};
}

void print_report(const std::string& label, const VerificationReport& rep, std::ostream& os)
{
    os << label << ": " << (rep.pass ? "PASS" : "FAIL") << "  eps=" << rep.eps;
    if (std::isfinite(rep.worst_margin)) os << "  worst_margin=" << rep.worst_margin;
    os << "  trials=" << rep.trials.size() << "  failed=" << rep.failed_trials;
    if (rep.simulation_failures) os << "  simulation_failures=" << rep.simulation_failures;
    os << '\n';
    for (const auto& r : rep.intervals)
        os << "  [" << r.spec.t1 << ", " << r.spec.t2 << "] " << r.spec.tag << "  distance=" << r.distance
           << "  margin=" << r.margin << (r.pass ? "" : "  FAIL") << '\n';
    if (!rep.preconditions_ok) os << "  note: perturbation outside the guaranteed region\n";
    for (const auto& n : rep.notes) os << "  note: " << n << '\n';
}

int report_exit(const VerificationReport& rep)
{
    if (rep.simulation_failures > 0) return sim_failed;
    return rep.pass ? ok : verify_failed;
}

SweepConfig sweep_config(const Opts& o, const Scenario& sc)
{
    SweepConfig c;
    c.delta = parse_delta(o);
    c.tau = o.tau;
    c.trials = o.trials;
    c.seed = o.seed;
    c.noise = parse_noise_kind(o.noise);
    c.threads = o.threads;
    c.sim = sim_config(o, sc.target.schedule.end());
    return c;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_compile(const Opts& o, Manifest& m)
{
    const auto text = read_file(o.netlist);
    const ParseResult pr = parse_netlist(text);
    if (!pr.ok()) {
        for (const auto& d : pr.diagnostics) std::cerr << o.netlist << ":" << format(d) << '\n';
        return input_error;
    }
    const CompiledCircuit cc = compile(*pr.netlist, gate_params(o));
    m.inputs["netlist"] = o.netlist;
    m.params = echo_params(o, true);
    emit(o.out, instance_json(cc.instance()).dump(2) + "\n", m);
    std::cerr << "compiled " << cc.netlist.gate_count() << " gates, depth " << cc.depth << ", "
              << cc.crn.reactions.size() << " reactions\n";
    if (!o.out.empty() && o.out != "-") write_manifest(m, o.out, false);
    return ok;
}

int cmd_simulate(const Opts& o, Manifest& m)
{
    if (o.crn.empty()) throw InputError("simulate: --crn is required");
    const Json cj = read_json(o.crn);
    const IoCrn crn = crn_from_json(cj);
    m.inputs["crn"] = o.crn;

    Signal input = Signal::empty(0.0);
    double horizon = 0.0;
    if (!o.schedule.empty()) {
        const BitSchedule s = schedule_from_json(read_json(o.schedule));
        m.inputs["schedule"] = o.schedule;
        std::vector<std::string> wires;
        for (const auto& u : crn.inputs)
            if (!is_dual_rail(u)) wires.push_back(u);
        input = schedule_to_signal(s, wires);
        horizon = s.end();
    } else if (!crn.inputs.empty()) {
        throw InputError("simulate: network has inputs, --schedule is required");
    }
    if (o.horizon) horizon = *o.horizon;
    else if (o.schedule.empty()) throw InputError("simulate: --horizon is required without --schedule");
    if (horizon < 0) throw InputError("--horizon must be nonnegative");

    const NoiseKind kind = parse_noise_kind(o.noise);
    if (kind != NoiseKind::none && input.size() > 0) {
        const DeltaVector d = parse_delta(o);
        input = add_noise(input, NoiseSpec::euclidean_ball(d.d1, input.size(), kind, CounterRng(o.seed, 0x696e).next_u64()));
    }

    State x0;
    if (auto x = parse_x0(o.x0)) x0 = *x;
    else if (cj.contains("x0")) x0 = cj.at("x0").get<State>();
    if (!o.x0.empty()) m.inputs["x0"] = o.x0;

    const SimConfig cfg = sim_config(o, horizon);
    m.params = echo_params(o, kind != NoiseKind::none);
    m.params["horizon"] = horizon;
    m.params["output_dt"] = cfg.output_dt;
    m.params["max_step"] = cfg.max_step;

    const Trace tr = simulate(crn, x0, input, cfg);
    emit(o.out, to_csv(tr), m);
    if (!o.svg.empty()) {
        std::ostringstream os;
        write_svg(os, tr, &input);
        write_file(o.svg, os.str());
        m.outputs.push_back(o.svg);
    }
    if (!o.out.empty() && o.out != "-") write_manifest(m, o.out, false);
    return ok;
}

int cmd_verify(const Opts& o, Manifest& m, bool sweep)
{
    const Scenario sc = resolve_target(o);
    for (const auto& [k, v] : std::map<std::string, std::string>{
             {"crn", o.crn}, {"schedule", o.schedule}, {"intervals", o.intervals}, {"netlist", o.netlist}})
        if (!v.empty()) m.inputs[k] = v;
    if (!o.scenario.empty()) m.inputs["scenario"] = o.scenario;
    m.params = echo_params(o, true);

    VerificationReport rep;
    if (sweep) {
        rep = robust_sweep(sc.target, sweep_config(o, sc));
    } else {
        const DeltaVector d = parse_delta(o);
        rep = verify_nominal(sc.target, o.tau, d.epsilon(), sim_config(o, sc.target.schedule.end()));
    }
    print_report(sc.name, rep, std::cout);
    if (!o.out.empty()) {
        emit(o.out, to_json(rep).dump(2) + "\n", m);
        write_manifest(m, o.out, false);
    }
    return report_exit(rep);
}

int cmd_lemmas(const Opts& o, Manifest& m)
{
    std::vector<LemmaParams> points;
    if (o.grid) {
        points = lemma_grid();
    } else {
        const GateParams p = gate_params(o);
        const double k = rate_constant(p);
        points.push_back(LemmaParams::for_gate(k, o.tau, p.delta.d4, p.delta.d1, p.delta.d2, p.delta.d3, 1.0));
    }
    m.params = echo_params(o, !o.grid);
    m.params["grid"] = o.grid;

    Json rows = Json::array();
    int fails = 0;
    std::printf("%-6s %-7s %-7s %-7s %-6s %-10s %-12s %s\n", "p", "d", "d1", "d3", "k*tau", "x(tau/2)", "T", "status");
    for (const auto& lp : points) {
        const double x = linear_closed_form(lp, lp.tau / 2);
        const bool l3 = linear_phase_holds(lp);
        std::string t_text, why;
        bool l4 = false;
        Json row = {{"p", lp.p}, {"d", lp.d}, {"delta1", lp.delta1}, {"delta2", lp.delta2}, {"delta3", lp.delta3},
                    {"k", lp.k}, {"tau", lp.tau}, {"x_half_tau", x}, {"linear_ok", l3}};
        try {
            const double T = restore_convergence_time(lp);
            l4 = T <= lp.tau / 2;
            row["T"] = T;
            t_text = std::to_string(T);
            if (!l4) why = "T > tau/2";
        } catch (const LemmaPreconditionError& e) {
            t_text = "-";
            why = e.what();
            row["precondition"] = why;
        }
        row["restore_ok"] = l4;
        rows.push_back(row);
        if (!(l3 && l4)) ++fails;
        std::printf("%-6g %-7g %-7g %-7g %-6g %-10.6f %-12s %s\n", lp.p, lp.d, lp.delta1, lp.delta3, lp.k * lp.tau, x,
                    t_text.c_str(), l3 && l4 ? "ok" : ("FAIL " + why).c_str());
    }
    std::printf("%zu points, %d failing\n", points.size(), fails);
    if (!o.out.empty()) {
        emit(o.out, Json{{"points", rows}, {"failing", fails}}.dump(2) + "\n", m);
        write_manifest(m, o.out, false);
    }
    return fails ? verify_failed : ok;
}

int cmd_demo(const std::string& name, const Opts& o, Manifest& m)
{
    const GateParams p = gate_params(o);
    const Scenario sc = make_scenario(name, p);
    SweepConfig cfg = sweep_config(o, sc);
    cfg.keep_traces = true;
    m.inputs["scenario"] = name;
    m.params = echo_params(o, true);

    const VerificationReport rep = robust_sweep(sc.target, cfg);
    print_report(name == "dff" ? "dff (edge property)" : name, rep, std::cout);

    if (!o.out.empty()) {
        const fs::path dir = o.out;
        fs::create_directories(dir);
        auto put = [&](const char* file, const std::string& text) { emit((dir / file).string(), text, m); };
        put("crn.json", instance_json(sc.target.gate).dump(2) + "\n");
        put("schedule.json", to_json(sc.target.schedule).dump(2) + "\n");
        put("intervals.json", to_json(sc.target.intervals).dump(2) + "\n");
        if (sc.netlist) put("circuit.net", to_text(*sc.netlist));
        put("report.json", to_json(rep).dump(2) + "\n");
        const auto& first = rep.trials.front();
        if (first.trace) {
            put("trace.csv", to_csv(*first.trace));
            const Signal u = schedule_to_signal(sc.target.schedule, sc.target.gate.input_wires());
            std::ostringstream os;
            write_svg(os, *first.trace, &u);
            put("timing.svg", os.str());
        }
        write_manifest(m, o.out, true);
    }
    return report_exit(rep);
}

void add_common(CLI::App* c, Opts& o)
{
    c->add_option("--tau", o.tau, "propagation delay")->check(CLI::PositiveNumber);
    c->add_option("--delta", o.delta, "perturbation bounds d1,d2,d3,d4");
    c->add_option("--eps", o.eps, "output tolerance (default d1)");
    c->add_option("--seed", o.seed, "root seed");
    c->add_option("--rtol", o.rtol, "relative tolerance");
    c->add_option("--atol", o.atol, "absolute tolerance");
    c->add_option("--dt", o.dt, "output grid spacing (default tau/200)");
    c->add_option("-o,--output", o.out, "output path");
}

void add_target(CLI::App* c, Opts& o)
{
    c->add_option("--crn", o.crn, "network JSON");
    c->add_option("--schedule", o.schedule, "input schedule JSON");
    c->add_option("--intervals", o.intervals, "interval list JSON");
    c->add_option("--x0", o.x0, "initial state (JSON object or file)");
    c->add_option("--netlist", o.netlist, "NAND netlist");
    c->add_option("--scenario", o.scenario, "built-in scenario")->check(CLI::IsMember(scenario_names()));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"NAND netlists and latches as chemical reaction networks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    Opts o;
    std::string demo_name;

    auto* compile_cmd = app.add_subcommand("compile", "netlist -> CRN JSON");
    compile_cmd->add_option("netlist", o.netlist, "netlist file")->required();
    add_common(compile_cmd, o);

    auto* sim = app.add_subcommand("simulate", "integrate a CRN against an input schedule");
    add_common(sim, o);
    sim->add_option("--crn", o.crn, "network JSON")->required();
    sim->add_option("--schedule", o.schedule, "input schedule JSON");
    sim->add_option("--x0", o.x0, "initial state (JSON object or file)");
    sim->add_option("--horizon", o.horizon, "end time (default: schedule end)");
    sim->add_option("--noise", o.noise, "input noise")->check(CLI::IsMember({"none", "sinusoidal", "random"}));
    sim->add_option("--svg", o.svg, "timing diagram path");

    auto* verify = app.add_subcommand("verify", "check the requirement on the unperturbed run");
    add_common(verify, o);
    add_target(verify, o);

    auto* sweep = app.add_subcommand("sweep", "check the requirement under sampled perturbations");
    add_common(sweep, o);
    add_target(sweep, o);
    sweep->add_option("--trials", o.trials, "number of trials")->check(CLI::PositiveNumber);
    sweep->add_option("--noise", o.noise, "noise shape")->check(CLI::IsMember({"none", "sinusoidal", "random"}));
    sweep->add_option("--threads", o.threads, "worker threads (0: all cores)");
    o.noise = "none";

    auto* lemmas = app.add_subcommand("lemmas", "evaluate the settling bounds");
    add_common(lemmas, o);
    lemmas->add_flag("--grid", o.grid, "evaluate the 81-point corner grid");

    auto* demo = app.add_subcommand("demo", "run a built-in scenario");
    demo->add_option("name", demo_name, "nand, xor, sr, dlatch or dff")->required()->check(CLI::IsMember(scenario_names()));
    add_common(demo, o);
    demo->add_option("--trials", o.trials, "number of trials")->check(CLI::PositiveNumber);
    demo->add_option("--noise", o.noise, "noise shape")->check(CLI::IsMember({"none", "sinusoidal", "random"}));
    demo->add_option("--threads", o.threads, "worker threads (0: all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int r = app.exit(e);
        return r == 0 ? ok : input_error;
    }
    if (demo->parsed() && demo->count("--noise") == 0) o.noise = "sinusoidal";

    Manifest m;
    m.argv.assign(argv + 1, argv + argc);
    try {
        if (compile_cmd->parsed()) return m.command = "compile", cmd_compile(o, m);
        if (sim->parsed()) return m.command = "simulate", cmd_simulate(o, m);
        if (verify->parsed()) return m.command = "verify", cmd_verify(o, m, false);
        if (sweep->parsed()) return m.command = "sweep", cmd_verify(o, m, true);
        if (lemmas->parsed()) return m.command = "lemmas", cmd_lemmas(o, m);
        if (demo->parsed()) return m.command = "demo", cmd_demo(demo_name, o, m);
    } catch (const SimulationError& e) {
        std::cerr << "simulation failed at t=" << e.time() << ": " << e.what() << '\n';
        return sim_failed;
    } catch (const NetlistError& e) {
        for (const auto& d : e.diagnostics()) std::cerr << format(d) << '\n';
        return input_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return input_error;
    }
    return input_error;
}
