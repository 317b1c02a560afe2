// spinres: command-line front end for the two-spin master equation, the
// rapid-disentanglement and bosonization mean-field models, and hysteresis sweeps.

#include "spinres/spinres.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace spinres;

namespace {

struct Context {
    Config cfg;
    Format format = Format::csv;
    std::string out = "-";
    std::optional<std::uint64_t> seed;
    std::size_t threads = 1;
};

struct Output {
    Table table;
    PlotSpec plot;
    std::optional<nlohmann::ordered_json> json;  // replaces the table JSON when set
};

std::vector<double> parse_list(const std::string& text, const std::string& key, bool powers) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(powers ? parse_power_mw(item, key) : parse_number(item, key));
    }
    if (out.empty()) throw ArgumentError(key + ": empty list");
    return out;
}

sweep::Axis axis(const Config& c, const std::string& key, double start, double stop, std::size_t count,
                 const std::string& scale = "linear", bool powers = false) {
    sweep::Axis a;
    a.name = key;
    a.start = powers ? c.power_mw(key + "_start", start) : c.number(key + "_start", start);
    a.stop = powers ? c.power_mw(key + "_stop", stop) : c.number(key + "_stop", stop);
    a.count = c.count(key + "_count", count);
    a.scale = sweep::parse_scale(c.text(key + "_scale", scale));
    a.validate();
    return a;
}

std::vector<double> axis_values(const Context& ctx, const sweep::Axis& a) {
    auto v = a.values();
    if (ctx.seed) v = sweep::jitter(std::move(v), *ctx.seed);
    return v;
}

// ----- two-spin master equation -----

MasterEquation master_equation(const Config& c) {
    DrivenSpinParams p;
    p.L = c.count("L", 2);
    p.omega0 = c.number("omega0", 0.1);
    p.omega_K = c.number("omega_K", 0.0);
    p.omega_A = c.number("omega_A", 1.0);
    p.omega_d = c.number("omega_d", 0.0);
    p.omega_f = c.number("omega_f", 0.0);
    p.Omega_L1 = c.number("Omega_L1", 1.5);
    p.Omega_T1_mag = c.number("Omega_T1", 0.0);
    p.phi_T = c.number("phi_T", 0.0);
    const auto d = DissipationParams::from_times(c.number("T1", 0.2), c.number("T2", 0.2), c.number("n0", 0.0));
    DisentanglementConfig cfg;
    cfg.gamma_D = c.number("gamma_D", 100.0);
    cfg.partition = Dims(p.L, 2);
    cfg.eps = c.number("log_floor", cfg.eps);
    const std::string frame = c.text("frame", "rwa");
    if (frame != "rwa" && frame != "full") throw ArgumentError("frame must be rwa or full");
    const Frame fr = frame == "rwa" ? Frame::rwa : Frame::full;
    if (fr == Frame::full) {
        for (const auto& w : rwa_warnings(p)) std::cerr << "note: " << w << '\n';
    }
    return MasterEquation(p, d, cfg, fr);
}

void add_me_meta(Table& t, const MasterEquation& eq) {
    const auto& p = eq.params();
    t.add_meta("L", static_cast<double>(p.L));
    t.add_meta("frame", to_string(eq.frame()));
    t.add_meta("omega0", p.omega0);
    t.add_meta("omega_A", p.omega_A);
    t.add_meta("Omega_L1", p.Omega_L1);
    t.add_meta("T1", eq.dissipation().T1());
    t.add_meta("T2", eq.dissipation().T2());
    t.add_meta("gamma_D", eq.disentanglement().gamma_D);
}

void add_diag_meta(Table& t, const IntegrationDiagnostics& d) {
    t.add_meta("max_trace_drift", d.max_trace_drift);
    t.add_meta("max_hermiticity_error", d.max_hermiticity_error);
    t.add_meta("min_eigenvalue", d.min_eigenvalue);
    t.add_meta("max_disentanglement_trace", d.max_disentanglement_trace);
}

Output two_spin_evolve(const Context& ctx) {
    const auto& c = ctx.cfg;
    const auto eq = master_equation(c);
    const double dt = c.number("dt", default_dt(eq.dissipation(), eq.disentanglement()));
    EvolveOptions opt;
    opt.sample_every = c.count("sample_every", 10);
    const BlochDirection dir{c.number("theta0", 0.5 * M_PI), c.number("phi0", 0.0)};
    const auto tr = evolve(eq, aligned_product_state(dir, eq.params().L), c.number("t_end", 10.0), dt, opt);
    Output o;
    o.table.kind = "two-spin-evolve";
    add_me_meta(o.table, eq);
    o.table.add_meta("dt", dt);
    add_diag_meta(o.table, tr.diagnostics);
    o.table.columns = {"t", "kx", "ky", "kz", "purity"};
    for (std::size_t s = 0; s < tr.times.size(); ++s) {
        const auto& k = tr.magnetization[s];
        o.table.rows.push_back({tr.times[s], k[0], k[1], k[2], tr.purity[s]});
    }
    o.plot = {"t", {"kx", "ky", "kz"}, "two-spin evolution"};
    return o;
}

Output two_spin_basins(const Context& ctx) {
    const auto& c = ctx.cfg;
    const auto eq = master_equation(c);
    const double dt = c.number("dt", 1e-3);
    auto grid = equator_grid(c.count("initial_states", 16));
    if (ctx.seed) {
        std::vector<double> phis;
        for (const auto& g : grid) phis.push_back(g.phi);
        phis = sweep::jitter(std::move(phis), *ctx.seed);
        for (std::size_t i = 0; i < grid.size(); ++i) grid[i].phi = phis[i];
    }
    AttractorOptions opt;
    opt.threads = ctx.threads;
    const auto rep = find_attractors(eq, grid, c.number("t_end", 10.0), dt, opt);
    Output o;
    o.table.kind = "two-spin-basins";
    add_me_meta(o.table, eq);
    o.table.add_meta("dt", dt);
    o.table.add_meta("attractors", static_cast<double>(rep.attractors.size()));
    for (std::size_t a = 0; a < rep.attractors.size(); ++a) {
        o.table.add_meta("attractor_" + std::to_string(a) + "_phase", rep.attractors[a].phase);
        o.table.add_meta("attractor_" + std::to_string(a) + "_basin", static_cast<double>(rep.attractors[a].basin_size));
    }
    add_diag_meta(o.table, rep.diagnostics);
    o.table.columns = {"phi0", "kx", "ky", "kz", "phase", "attractor", "converged"};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& k = rep.endpoints[i];
        o.table.rows.push_back({grid[i].phi, k[0], k[1], k[2], rep.endpoint_phases[i], static_cast<double>(rep.basin_labels[i]),
                                rep.converged[i] ? 1.0 : 0.0});
    }
    o.plot = {"phi0", {"phase"}, "basins of attraction"};
    return o;
}

// ----- rapid disentanglement -----

rd::RdDimensionless rd_dims(const Config& c, double delta) {
    auto d = rd::RdDimensionless::make(c.number("alpha", 1.0), delta, c.number("D", 1.0), c.number("W", 0.5));
    d.t1_over_t2 = c.number("t1_over_t2", 2.1);
    d.phi_T = c.number("phi_T", 0.0);
    return d;
}

Output rd_steady(const Context& ctx) {
    const auto& c = ctx.cfg;
    const double delta0 = c.number("delta", 0.0);
    const auto deltas = axis_values(ctx, axis(c, "delta", delta0, delta0, 1));
    std::vector<std::vector<std::vector<Cell>>> blocks(deltas.size());
    parallel_for(deltas.size(), ctx.threads, [&](std::size_t i) {
        const auto ss = rd::steady_state_z(rd_dims(c, deltas[i]));
        for (std::size_t k = 0; k < ss.roots.size(); ++k) {
            const auto& r = ss.roots[k];
            blocks[i].push_back({deltas[i], static_cast<double>(k), r.z, r.fixed_point[0], r.fixed_point[1],
                                 r.stable ? 1.0 : 0.0, r.max_real_eigenvalue, static_cast<double>(ss.roots.size())});
        }
    });
    Output o;
    o.table.kind = "rd-steady";
    o.table.add_meta("alpha", c.number("alpha", 1.0));
    o.table.add_meta("D", c.number("D", 1.0));
    o.table.add_meta("W", c.number("W", 0.5));
    o.table.columns = {"delta", "root", "z", "px", "py", "stable", "max_re_eig", "root_count"};
    for (auto& b : blocks) {
        for (auto& r : b) o.table.rows.push_back(std::move(r));
    }
    o.plot = {"delta", {"z"}, "steady-state polarization"};
    return o;
}

Output rd_onset(const Context& ctx) {
    const auto& c = ctx.cfg;
    const double alpha = c.number("alpha", 0.8);
    double D = c.number("D", 0.8);
    Output o;
    o.table.kind = "rd-onset";
    if (auto Wc = c.optional_number("onset_W")) {
        D = rd::infer_D_from_onset(c.optional_number("onset_delta"), *Wc, alpha);
        o.table.add_meta("inferred_from_W", *Wc);
    }
    o.table.add_meta("alpha", alpha);
    o.table.add_meta("D", D);
    const auto pts = rd::bistability_onset(alpha, D);
    o.table.add_meta("bistability", pts.empty() ? "excluded" : "possible");
    o.table.columns = {"point", "z", "delta", "W"};
    for (std::size_t k = 0; k < pts.size(); ++k) o.table.rows.push_back({static_cast<double>(k), pts[k].z, pts[k].delta, pts[k].W});
    o.plot = {"delta", {"W"}, "onset points"};
    return o;
}

Output rd_gain(const Context& ctx) {
    const auto& c = ctx.cfg;
    const auto d = rd_dims(c, c.number("delta", 0.0));
    const double z = c.number("z", 1.0);
    const auto gs = rd::gain_structure(d, z);
    Output o;
    o.table.kind = "rd-gain";
    o.table.add_meta("eta", gs.eta);
    o.table.add_meta("phase", gs.phase);
    o.table.add_meta("g_min", gs.min());
    o.table.add_meta("g_max", gs.max());
    o.table.columns = {"phi_T", "g_P"};
    for (double phi : axis_values(ctx, axis(c, "phi", 0.0, M_PI, 181))) o.table.rows.push_back({phi, rd::gain_phase(d, z, phi)});
    o.plot = {"phi_T", {"g_P"}, "parametric gain"};
    return o;
}

// ----- bosonization -----

boson::BosonParams boson_params(const Config& c) {
    boson::BosonParams p;
    p.gamma1 = c.number("gamma1", 0.5);
    p.gamma2 = c.number("gamma2", 0.5);
    p.gamma3 = c.number("gamma3", 0.1);
    p.omega_K = c.number("omega_K", 1.0);
    p.omega_A = c.number("omega_A", 0.0);
    p.Omega_L1 = c.number("Omega_L1", 0.0);
    p.omega0 = c.number("omega0", 0.0);
    p.omega_f = c.number("omega_f", 0.0);
    p.L = c.number("L", 1.0);
    p.omega_T1 = c.number("omega_T1", 1.0);
    p.phi_T = c.number("phi_T", 0.0);
    p.set_detuning(c.number("Omega_d", 0.0));
    p.validate();
    return p;
}

Output boson_steady(const Context& ctx) {
    const auto& c = ctx.cfg;
    const auto base = boson_params(c);
    const double od0 = c.number("Omega_d", 0.0);
    const bool exact = c.flag("self_consistent", false);
    const auto ods = axis_values(ctx, axis(c, "Omega_d", od0, od0, 1));
    std::vector<std::vector<std::vector<Cell>>> blocks(ods.size());
    parallel_for(ods.size(), ctx.threads, [&](std::size_t i) {
        auto p = base;
        p.set_detuning(ods[i]);
        const auto roots = exact ? boson::steady_state_E_self_consistent(p) : boson::steady_state_E(p);
        for (std::size_t k = 0; k < roots.size(); ++k) {
            const auto& r = roots[k];
            blocks[i].push_back({ods[i], static_cast<double>(k), r.E, r.stable ? 1.0 : 0.0, r.dynamically_stable ? 1.0 : 0.0,
                                 r.max_real_eigenvalue, static_cast<double>(roots.size())});
        }
    });
    Output o;
    o.table.kind = "boson-steady";
    o.table.add_meta("omega_T1", base.omega_T1);
    o.table.add_meta("self_consistent", exact ? "true" : "false");
    if (const auto th = boson::bistability_threshold(base)) o.table.add_meta("Omega_1c", th->Omega_1c);
    o.table.columns = {"Omega_d", "root", "E", "stable", "dynamically_stable", "max_re_eig", "root_count"};
    for (auto& b : blocks) {
        for (auto& r : b) o.table.rows.push_back(std::move(r));
    }
    o.plot = {"Omega_d", {"E"}, "magnon number"};
    return o;
}

Output boson_onset(const Context& ctx) {
    const auto& c = ctx.cfg;
    const auto p = boson_params(c);
    Output o;
    o.table.kind = "boson-onset";
    o.table.add_meta("gamma1", p.gamma1);
    o.table.add_meta("gamma", p.gamma());
    o.table.add_meta("gamma3", p.gamma3);
    o.table.add_meta("omega_K", p.omega_K);
    if (c.has("omega_M") || c.has("lambda_ex") || c.has("R_s")) {
        const auto cut = boson::exchange_cutoff(c.require_number("omega_M"), c.require_number("lambda_ex"), c.require_number("R_s"));
        o.table.add_meta("omega_D", cut.omega_D);
    }
    o.table.columns = {"Omega_1c", "E_c", "Omega_d_c"};
    if (const auto th = boson::bistability_threshold(p)) {
        o.table.add_meta("bistability", "possible");
        o.table.rows.push_back({th->Omega_1c, th->E_c, th->Omega_d_c});
    } else {
        o.table.add_meta("bistability", "excluded");
    }
    o.plot = {"Omega_d_c", {"Omega_1c"}, "bosonization onset"};
    return o;
}

Output boson_gain(const Context& ctx) {
    const auto& c = ctx.cfg;
    const auto p = boson_params(c);
    const auto gs = boson::gain_boson(p, c.number("E", 0.0));
    Output o;
    o.table.kind = "boson-gain";
    o.table.add_meta("eta_A", gs.eta);
    o.table.add_meta("phi_A", gs.phase);
    o.table.add_meta("eta_A_small_limit", boson::eta_A_small_limit(p));
    o.table.columns = {"phi_T", "g_M"};
    for (double phi : axis_values(ctx, axis(c, "phi", 0.0, M_PI, 181))) o.table.rows.push_back({phi, gs.at(phi)});
    o.plot = {"phi_T", {"g_M"}, "parametric gain"};
    return o;
}

// ----- sweeps -----

sweep::CalibrationMap calibration(const Config& c) {
    sweep::CalibrationMap cal;
    cal.w_per_mw = 1.0 / c.power_mw("W_unit", 37.0);
    cal.wa2t22_per_mw = 1.0 / c.power_mw("pump_unit", 980.0);
    cal.T2 = c.number("T2_s", sweep::kDefaultT2);
    cal.validate();
    return cal;
}

double rd_D(const Config& c, const sweep::CalibrationMap& cal) {
    if (c.has("D")) return c.number("D", 1.0);
    std::optional<double> f_dc = c.optional_number("onset_detuning_Hz");
    return sweep::infer_D_from_power(c.power_mw("P_c", dbm_to_mw(13.5)), f_dc, c.power_mw("P_L", 0.0), cal);
}

sweep::MapModel rd_model(const Config& c, const sweep::CalibrationMap& cal) {
    sweep::RdMapParams mp;
    mp.cal = cal;
    mp.P_L_mw = c.power_mw("P_L", 0.0);
    mp.D = rd_D(c, cal);
    mp.t1_over_t2 = c.number("t1_over_t2", 2.1);
    mp.phi_T = c.number("phi_T", 0.0);
    return sweep::make_rd_model(mp);
}

sweep::MapModel boson_model(const Config& c, const sweep::CalibrationMap& cal) {
    sweep::BosonMapParams bp;
    bp.T2 = cal.T2;
    bp.gamma1_over_gamma = c.number("gamma1_over_gamma", bp.gamma1_over_gamma);
    bp.gamma3_over_K = c.number("gamma3_over_K", bp.gamma3_over_K);
    bp.K_over_gamma = c.number("K_over_gamma", bp.K_over_gamma);
    bp.P_c_mw = c.power_mw("P_c", bp.P_c_mw);
    return sweep::make_boson_model(bp);
}

struct MapGrid {
    std::vector<double> powers, detunings;
};

MapGrid map_grid(const Context& ctx, const sweep::CalibrationMap& cal) {
    const auto& c = ctx.cfg;
    const double P_c = c.power_mw("P_c", dbm_to_mw(13.5));
    MapGrid g;
    g.powers = axis_values(ctx, axis(c, "P_T", P_c / 2.0, 1000.0 * P_c, 41, "log", true));
    const auto da = axis(c, "delta", -5.0, 150.0, 201);
    for (double d : axis_values(ctx, da)) g.detunings.push_back(sweep::delta_to_detuning(d, cal.T2));
    return g;
}

Output map_bistability(const Context& ctx) {
    const auto& c = ctx.cfg;
    const auto cal = calibration(c);
    const std::string model = c.text("model", "rapid-disent");
    sweep::MapModel m;
    if (model == "rapid-disent") m = rd_model(c, cal);
    else if (model == "bosonization") m = boson_model(c, cal);
    else throw ArgumentError("model must be rapid-disent or bosonization");
    const auto g = map_grid(ctx, cal);
    Output o;
    o.table = sweep::to_table(sweep::map_bistability(m, g.powers, g.detunings, ctx.threads));
    o.plot = {"power_mW", {"up_jump_Hz", "down_jump_Hz", "peak_Hz"}, "bistability map (" + model + ")"};
    return o;
}

Output peak_curves(const Context& ctx) {
    const auto& c = ctx.cfg;
    const auto cal = calibration(c);
    const double D = rd_D(c, cal);
    const auto P_T = axis_values(ctx, axis(c, "P_T", 0.0, 300.0, 61, "linear", true));
    const auto P_L = parse_list(c.text("P_L_list", "0,320,560"), "P_L_list", true);
    Output o;
    o.table = sweep::peak_curves(P_T, P_L, cal, D);
    o.plot = {"P_T_mW", {"f_dPP_Hz"}, "peak-point detuning"};
    return o;
}

Output compare_models(const Context& ctx) {
    const auto& c = ctx.cfg;
    const auto cal = calibration(c);
    const auto g = map_grid(ctx, cal);
    const auto cmp = sweep::compare_models(rd_model(c, cal), boson_model(c, cal), g.powers, g.detunings, ctx.threads);
    Output o;
    o.table = sweep::to_table(cmp);
    auto j = sweep::summary_json(cmp);
    j["table"] = to_json(o.table);
    o.json = std::move(j);
    o.plot = {"power_mW", {"rd_up_jump_Hz", "rd_down_jump_Hz", "boson_up_jump_Hz", "boson_down_jump_Hz"}, "model comparison"};
    return o;
}

void write(const Context& ctx, const Output& o) {
    std::string body;
    if (ctx.format == Format::json && o.json) body = o.json->dump(2) + "\n";
    else body = render(o.table, ctx.format, o.plot);
    if (ctx.out == "-") {
        std::cout << body;
        std::cout.flush();
        if (!std::cout) throw IoError("write to stdout failed");
        return;
    }
    std::ofstream os(ctx.out, std::ios::binary);
    if (!os) throw IoError("cannot open '" + ctx.out + "' for writing");
    os << body;
    os.flush();
    if (!os) throw IoError("write to '" + ctx.out + "' failed");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spinres: driven spin resonator models and bistability sweeps"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::string config_path, format = "csv", out = "-";
    std::vector<std::string> overrides;
    std::int64_t seed = -1;
    std::size_t threads = 1;

    const std::map<std::string, std::pair<std::string, Output (*)(const Context&)>> commands = {
        {"two-spin-evolve", {"integrate the two-spin master equation from an aligned product state", two_spin_evolve}},
        {"two-spin-basins", {"attractors and basins over equator initial states", two_spin_basins}},
        {"rd-steady", {"rapid-disentanglement steady states over detuning", rd_steady}},
        {"rd-onset", {"rapid-disentanglement bistability onset points", rd_onset}},
        {"rd-gain", {"rapid-disentanglement parametric gain g_P(phi_T)", rd_gain}},
        {"boson-steady", {"bosonization magnon-number roots over detuning", boson_steady}},
        {"boson-onset", {"bosonization bistability threshold", boson_onset}},
        {"boson-gain", {"bosonization parametric gain g_M(phi_T)", boson_gain}},
        {"map-bistability", {"hysteresis jump map over power and detuning", map_bistability}},
        {"peak-curves", {"peak-point detuning versus transverse and longitudinal power", peak_curves}},
        {"compare-models", {"both hysteresis maps on a shared grid with region diagnostics", compare_models}},
    };
    for (const auto& [name, entry] : commands) {
        auto* sub = app.add_subcommand(name, entry.first);
        sub->add_option("--config,-c", config_path, "key = value configuration file");
        sub->add_option("--out,-o", out, "output path, - for stdout");
        sub->add_option("--format,-f", format, "csv, json or svg")->check(CLI::IsMember({"csv", "json", "svg"}));
        sub->add_option("--seed", seed, "jitter grid interiors with this seed");
        sub->add_option("--threads,-j", threads, "worker threads");
        sub->add_option("--set", overrides, "key=value override (repeatable)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        Context ctx;
        if (!config_path.empty()) ctx.cfg = Config::load(config_path);
        for (const auto& kv : overrides) ctx.cfg.apply_override(kv);
        ctx.format = parse_format(format);
        ctx.out = out;
        if (seed >= 0) ctx.seed = static_cast<std::uint64_t>(seed);
        ctx.threads = resolve_threads(threads);
        const auto* sub = app.get_subcommands().front();
        write(ctx, commands.at(sub->get_name()).second(ctx));
    } catch (const IoError& e) {
        std::cerr << "spinres: I/O error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "spinres: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
