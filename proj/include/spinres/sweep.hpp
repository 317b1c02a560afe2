// sweep.hpp: parameter grids, calibration, hysteresis (bistability) maps for
// both mean-field models, peak-point curves and model comparison.

#pragma once

#include "spinres/bosonization.hpp"
#include "spinres/errors.hpp"
#include "spinres/parallel.hpp"
#include "spinres/rapid_disent.hpp"
#include "spinres/table/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace spinres::sweep {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ----- calibration -----

// omega_L T1 = 0.6 at omega_L / 2pi = 0.5 MHz and T1 / T2 = 2.1.
inline constexpr double kDefaultT1 = 0.6 / (2.0 * M_PI * 0.5e6);
inline constexpr double kDefaultT2 = kDefaultT1 / 2.1;

struct CalibrationMap {
    double w_per_mw = 1.0 / 37.0;          // W = P_T / 37 mW
    double wa2t22_per_mw = 1.0 / 980.0;    // (W_A T2)^2 = P_L / 980 mW
    double T2 = kDefaultT2;                // seconds; f_d = delta / (2 pi T2)

    void validate() const {
        if (!(w_per_mw > 0.0) || !(wa2t22_per_mw > 0.0) || !(T2 > 0.0)) {
            throw ArgumentError("CalibrationMap: scale factors and T2 must be positive");
        }
    }
};

struct Calibrated {
    double W = 0.0;
    double wa2t22 = 0.0;
    double alpha() const { return 1.0 - wa2t22; }
};

inline Calibrated calibrate(double P_T_mw, double P_L_mw, const CalibrationMap& cal) {
    cal.validate();
    if (!(P_T_mw >= 0.0) || !(P_L_mw >= 0.0)) throw ArgumentError("calibrate: powers must be >= 0");
    return {P_T_mw * cal.w_per_mw, P_L_mw * cal.wa2t22_per_mw};
}

inline double detuning_to_delta(double f_d, double T2) { return 2.0 * M_PI * f_d * T2; }
inline double delta_to_detuning(double delta, double T2) { return delta / (2.0 * M_PI * T2); }

// ----- grids -----

enum class Scale { linear, log };

inline Scale parse_scale(const std::string& s) {
    if (s == "linear" || s == "lin") return Scale::linear;
    if (s == "log") return Scale::log;
    throw ArgumentError("unknown axis scale '" + s + "'");
}

struct Axis {
    std::string name;
    double start = 0.0;
    double stop = 0.0;
    std::size_t count = 1;
    Scale scale = Scale::linear;

    void validate() const {
        if (count < 1) throw ArgumentError("axis '" + name + "': count must be >= 1");
        if (!(start <= stop)) throw ArgumentError("axis '" + name + "': start must be <= stop");
        if (scale == Scale::log && !(start > 0.0)) throw ArgumentError("axis '" + name + "': log scale needs start > 0");
        if (count == 1 && start != stop) throw ArgumentError("axis '" + name + "': a single point needs start == stop");
    }

    std::vector<double> values() const {
        validate();
        std::vector<double> v(count);
        for (std::size_t k = 0; k < count; ++k) {
            const double u = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
            v[k] = scale == Scale::linear ? start + u * (stop - start)
                                          : std::exp(std::log(start) + u * (std::log(stop) - std::log(start)));
        }
        if (count > 1) v.back() = stop;
        return v;
    }
};

// Moves interior points by up to a quarter of the local spacing; endpoints
// and ordering are preserved.
inline std::vector<double> jitter(std::vector<double> v, std::uint64_t seed) {
    if (v.size() < 3) return v;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.25, 0.25);
    const std::vector<double> base = v;
    for (std::size_t k = 1; k + 1 < v.size(); ++k) {
        const double h = std::min(base[k] - base[k - 1], base[k + 1] - base[k]);
        v[k] = base[k] + u(rng) * h;
    }
    return v;
}

struct SweepSpec {
    std::string kind = "sweep";
    std::vector<Axis> axes;
    std::vector<std::string> outputs;
    std::size_t threads = 1;
    std::optional<std::uint64_t> jitter_seed;
};

// Evaluates fn(point) over the row-major grid of spec.axes (first axis
// slowest). fn returns one value per output column; failures are recorded in
// the status column and leave NaN outputs.
template <class Fn>
Table run_sweep(const SweepSpec& spec, Fn&& fn) {
    if (spec.axes.empty()) throw ArgumentError("run_sweep: no axes");
    std::vector<std::vector<double>> axis_values;
    std::size_t total = 1;
    for (std::size_t a = 0; a < spec.axes.size(); ++a) {
        auto v = spec.axes[a].values();
        if (spec.jitter_seed) v = jitter(std::move(v), *spec.jitter_seed + a);
        total *= v.size();
        axis_values.push_back(std::move(v));
    }

    Table t;
    t.kind = spec.kind;
    for (const auto& a : spec.axes) t.columns.push_back(a.name);
    for (const auto& o : spec.outputs) t.columns.push_back(o);
    t.columns.push_back("status");
    t.rows.resize(total);

    parallel_for(total, spec.threads, [&](std::size_t idx) {
        std::vector<double> point(spec.axes.size());
        std::size_t rem = idx;
        for (std::size_t a = spec.axes.size(); a-- > 0;) {
            point[a] = axis_values[a][rem % axis_values[a].size()];
            rem /= axis_values[a].size();
        }
        std::vector<Cell> row(point.begin(), point.end());
        std::string status = "ok";
        std::vector<double> out(spec.outputs.size(), kNaN);
        try {
            auto r = fn(point);
            if (r.size() != spec.outputs.size()) throw ArgumentError("run_sweep: output width mismatch");
            out = std::move(r);
        } catch (const AboveThresholdError& e) {
            status = std::string("above-threshold: ") + e.what();
        } catch (const FitError& e) {
            status = std::string("fit-error: ") + e.what();
        } catch (const std::exception& e) {
            status = std::string("error: ") + e.what();
        }
        for (double v : out) row.emplace_back(v);
        row.emplace_back(status);
        t.rows[idx] = std::move(row);
    });
    return t;
}

// ----- model adapters for hysteresis maps -----

enum class Model { rapid_disent, bosonization };

inline const char* to_string(Model m) { return m == Model::rapid_disent ? "rapid-disent" : "bosonization"; }

// Stable steady states at (power, detuning) as an excitation measure, ascending
// (rapid-disent: 1 - z; bosonization: magnon number E).
struct MapModel {
    Model tag = Model::rapid_disent;
    std::function<std::vector<double>(double power_mw, double f_d)> stable_states;
    std::function<double(double power_mw)> peak_detuning;  // NaN when undefined
    std::function<std::vector<double>(double power_mw)> folds;  // saddle-node detunings, optional
};

struct RdMapParams {
    CalibrationMap cal;
    double P_L_mw = 0.0;
    double D = 1.0;
    double t1_over_t2 = 2.1;
    double phi_T = 0.0;
};

inline MapModel make_rd_model(const RdMapParams& mp) {
    mp.cal.validate();
    if (!(mp.D > 0.0)) throw ArgumentError("make_rd_model: D must be positive");
    MapModel m;
    m.tag = Model::rapid_disent;
    m.stable_states = [mp](double P, double f) {
        const auto c = calibrate(P, mp.P_L_mw, mp.cal);
        auto d = rd::RdDimensionless::make(c.alpha(), detuning_to_delta(f, mp.cal.T2), mp.D, c.W);
        d.t1_over_t2 = mp.t1_over_t2;
        d.phi_T = mp.phi_T;
        std::vector<double> out;
        for (const auto& r : rd::steady_state_z(d).roots) {
            if (r.stable) out.push_back(1.0 - r.z);
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    m.peak_detuning = [mp](double P) {
        const auto c = calibrate(P, mp.P_L_mw, mp.cal);
        const auto pp = rd::peak_point(c.alpha(), mp.D, c.W);
        return pp ? delta_to_detuning(pp->delta, mp.cal.T2) : kNaN;
    };
    m.folds = [mp](double P) {
        const auto c = calibrate(P, mp.P_L_mw, mp.cal);
        std::vector<double> out;
        for (double d : rd::fold_deltas(c.alpha(), mp.D, c.W)) out.push_back(delta_to_detuning(d, mp.cal.T2));
        return out;
    };
    return m;
}

struct BosonMapParams {
    double T2 = kDefaultT2;            // gamma = 1 / T2
    double gamma1_over_gamma = 0.4;
    double gamma3_over_K = 5.8e-2;
    double K_over_gamma = 1.0;
    double P_c_mw = 22.387211385683397;  // 13.5 dBm

    double gamma() const { return 1.0 / T2; }
    double K() const { return K_over_gamma * gamma(); }
    double gamma1() const { return gamma1_over_gamma * gamma(); }
    double gamma3() const { return gamma3_over_K * std::abs(K()); }
};

inline MapModel make_boson_model(const BosonMapParams& bp) {
    if (!(bp.T2 > 0.0) || !(bp.P_c_mw > 0.0)) throw ArgumentError("make_boson_model: T2 and P_c must be positive");
    const auto thr = boson::bistability_threshold(bp.gamma1(), bp.gamma(), bp.gamma3(), bp.K());
    if (!thr) throw ArgumentError("make_boson_model: parameters admit no bistability (|omega_K| <= sqrt3 gamma3)");
    const double omega1c = thr->Omega_1c;
    MapModel m;
    m.tag = Model::bosonization;
    m.stable_states = [bp, omega1c](double P, double f) {
        const double omega1 = omega1c * P / bp.P_c_mw;
        auto roots = boson::magnon_roots(2.0 * M_PI * f, omega1, bp.gamma1(), bp.gamma(), bp.gamma3(), bp.K());
        if (roots.size() == 3) roots.erase(roots.begin() + 1);
        return roots;
    };
    // Peak of E over Omega_d: Omega_d = K E with E (gamma + gamma3 E)^2 = 2 gamma1 Omega1.
    m.peak_detuning = [bp, omega1c](double P) {
        const double omega1 = omega1c * P / bp.P_c_mw;
        const double g = bp.gamma(), g3 = bp.gamma3();
        const auto roots = solve_cubic(g3 * g3, 2.0 * g * g3, g * g, -2.0 * bp.gamma1() * omega1);
        for (double E : roots) {
            if (E >= 0.0) return bp.K() * E / (2.0 * M_PI);
        }
        return kNaN;
    };
    m.folds = [bp, omega1c](double P) {
        std::vector<double> out;
        for (double od : boson::fold_detunings(omega1c * P / bp.P_c_mw, bp.gamma1(), bp.gamma(), bp.gamma3(), bp.K())) {
            out.push_back(od / (2.0 * M_PI));
        }
        return out;
    };
    return m;
}

// ----- hysteresis sweeps -----

struct SweepTrace {
    std::vector<double> response;  // followed excitation per detuning point
    double jump = kNaN;            // detuning where the followed branch vanished
};

namespace detail {

// Edge between a ≥2-stable point and a 1-stable point, by bisection.
inline double refine_edge(const MapModel& m, double P, double f_two, double f_one) {
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (f_two + f_one);
        if (mid == f_two || mid == f_one) break;
        if (m.stable_states(P, mid).size() >= 2) f_two = mid;
        else f_one = mid;
    }
    return 0.5 * (f_two + f_one);
}

inline std::size_t nearest(const std::vector<double>& v, double x) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (std::abs(v[k] - x) < std::abs(v[best] - x)) best = k;
    }
    return best;
}

} // namespace detail

// Follows the least-excited stable branch from the first detuning in `order`
// and stays on the current branch (nearest stable state) until it vanishes.
inline SweepTrace follow_branch(const MapModel& m, double P, const std::vector<double>& f) {
    SweepTrace tr;
    if (f.empty()) return tr;
    std::vector<double> prev = m.stable_states(P, f.front());
    double cur = prev.empty() ? kNaN : prev.front();
    tr.response.push_back(cur);
    for (std::size_t j = 1; j < f.size(); ++j) {
        const std::vector<double> s = m.stable_states(P, f[j]);
        if (s.empty()) {
            tr.response.push_back(cur);
            prev = s;
            continue;
        }
        if (std::isnan(cur)) {
            cur = s.front();
        } else if (s.size() == 1 && prev.size() >= 2) {
            const double other = prev[prev.size() - 1 - detail::nearest(prev, cur)];
            const bool vanished = std::abs(s.front() - other) < std::abs(s.front() - cur);
            if (vanished && std::isnan(tr.jump)) tr.jump = detail::refine_edge(m, P, f[j - 1], f[j]);
            cur = s.front();
        } else {
            cur = s[detail::nearest(s, cur)];
        }
        tr.response.push_back(cur);
        prev = s;
    }
    return tr;
}

struct BistabilityRow {
    double power = 0.0;
    double up_jump = kNaN;
    double down_jump = kNaN;
    double peak = kNaN;
    bool bistable() const { return std::isfinite(up_jump) && std::isfinite(down_jump); }
};

struct BistabilityMap {
    Model model = Model::rapid_disent;
    std::vector<double> powers;
    std::vector<double> detunings;
    std::vector<BistabilityRow> rows;
    std::optional<double> onset_power;
    std::optional<double> onset_detuning;
    bool onset_below_grid = false;
    bool closed = false;  // bistable rows followed by a mono-stable row at higher power
    bool open = false;    // top power row still bistable

    bool any_bistable() const {
        return std::any_of(rows.begin(), rows.end(), [](const BistabilityRow& r) { return r.bistable(); });
    }
};

// Detuning grid plus points bracketing each fold inside it, so windows
// narrower than the grid spacing are still traversed.
inline std::vector<double> augmented_grid(const MapModel& m, double P, const std::vector<double>& grid) {
    if (!m.folds || grid.size() < 2) return grid;
    std::vector<double> f = grid;
    const double h = 1e-9 * (grid.back() - grid.front());
    for (double x : m.folds(P)) {
        for (double y : {x - h, x + h}) {
            if (y > grid.front() && y < grid.back()) f.push_back(y);
        }
    }
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
    return f;
}

inline BistabilityRow map_row(const MapModel& m, double P, const std::vector<double>& grid) {
    BistabilityRow row;
    row.power = P;
    const std::vector<double> f = augmented_grid(m, P, grid);
    const SweepTrace up = follow_branch(m, P, f);
    std::vector<double> rev(f.rbegin(), f.rend());
    const SweepTrace down = follow_branch(m, P, rev);
    if (std::isfinite(up.jump) && std::isfinite(down.jump)) {
        row.up_jump = up.jump;
        row.down_jump = down.jump;
    }
    row.peak = m.peak_detuning(P);
    return row;
}

inline void check_monotone(const std::vector<double>& v, const char* what) {
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (!(v[k] > v[k - 1])) throw ArgumentError(std::string("map_bistability: ") + what + " grid must increase");
    }
}

inline BistabilityMap map_bistability(const MapModel& m, const std::vector<double>& powers,
                                      const std::vector<double>& detunings, std::size_t threads = 1) {
    check_monotone(powers, "power");
    check_monotone(detunings, "detuning");
    BistabilityMap map;
    map.model = m.tag;
    map.powers = powers;
    map.detunings = detunings;
    map.rows = parallel_map<BistabilityRow>(powers.size(), threads,
                                            [&](std::size_t i) { return map_row(m, powers[i], detunings); });

    std::optional<std::size_t> first;
    for (std::size_t i = 0; i < map.rows.size(); ++i) {
        if (map.rows[i].bistable()) {
            first = i;
            break;
        }
    }
    if (!first) return map;

    // one bisection pass on power between the last mono-stable and first bistable row
    BistabilityRow onset_row = map.rows[*first];
    if (*first == 0) {
        map.onset_below_grid = true;
    } else {
        double lo = powers[*first - 1], hi = powers[*first];
        for (int it = 0; it < 40; ++it) {
            const double mid = 0.5 * (lo + hi);
            const BistabilityRow r = map_row(m, mid, detunings);
            if (r.bistable()) {
                hi = mid;
                onset_row = r;
            } else {
                lo = mid;
            }
        }
    }
    map.onset_power = onset_row.power;
    map.onset_detuning = 0.5 * (onset_row.up_jump + onset_row.down_jump);

    map.open = map.rows.back().bistable();
    for (std::size_t i = *first + 1; i < map.rows.size(); ++i) {
        if (!map.rows[i].bistable()) {
            map.closed = true;
            break;
        }
    }
    return map;
}

inline Table to_table(const BistabilityMap& map) {
    Table t;
    t.kind = "bistability-map";
    t.add_meta("model", to_string(map.model));
    t.add_meta("onset_power_mW", map.onset_power.value_or(kNaN));
    t.add_meta("onset_detuning_Hz", map.onset_detuning.value_or(kNaN));
    t.add_meta("onset_below_grid", map.onset_below_grid ? "true" : "false");
    t.add_meta("region", map.closed ? "closed" : (map.open ? "open" : "none"));
    t.columns = {"power_mW", "up_jump_Hz", "down_jump_Hz", "peak_Hz", "bistable"};
    for (const auto& r : map.rows) {
        t.rows.push_back({r.power, r.up_jump, r.down_jump, r.peak, r.bistable() ? 1.0 : 0.0});
    }
    return t;
}

// ----- peak curves -----

// f_dPP = delta_pp / (2 pi T2) with delta_pp = 4 sqrt(D) / (1 + 2W/alpha).
inline Table peak_curves(const std::vector<double>& P_T, const std::vector<double>& P_L, const CalibrationMap& cal,
                         double D) {
    if (!(D > 0.0)) throw ArgumentError("peak_curves: D must be positive");
    cal.validate();
    Table t;
    t.kind = "peak-curves";
    t.add_meta("D", D);
    t.add_meta("T2_s", cal.T2);
    t.add_meta("w_per_mW", cal.w_per_mw);
    t.add_meta("wa2t22_per_mW", cal.wa2t22_per_mw);
    t.columns = {"P_L_mW", "P_T_mW", "W", "alpha", "delta_pp", "f_dPP_Hz", "status"};
    for (double pl : P_L) {
        for (double pt : P_T) {
            const auto c = calibrate(pt, pl, cal);
            const auto pp = rd::peak_point(c.alpha(), D, c.W);
            if (pp) {
                t.rows.push_back({pl, pt, c.W, c.alpha(), pp->delta, delta_to_detuning(pp->delta, cal.T2), std::string("ok")});
            } else {
                t.rows.push_back({pl, pt, c.W, c.alpha(), kNaN, kNaN, std::string("alpha<=0")});
            }
        }
    }
    return t;
}

// D reproducing a measured onset power (and optionally detuning) at the given
// longitudinal power.
inline double infer_D_from_power(double P_c_mw, std::optional<double> f_dc, double P_L_mw, const CalibrationMap& cal) {
    const auto c = calibrate(P_c_mw, P_L_mw, cal);
    std::optional<double> delta_c;
    if (f_dc) delta_c = detuning_to_delta(*f_dc, cal.T2);
    return rd::infer_D_from_onset(delta_c, c.W, c.alpha());
}

// ----- model comparison -----

struct Comparison {
    BistabilityMap rd;
    BistabilityMap boson;
    std::vector<double> up_jump_difference;    // rd - boson, per power
    std::vector<double> down_jump_difference;
};

inline Comparison compare_models(const MapModel& rd_model, const MapModel& boson_model, const std::vector<double>& powers,
                                 const std::vector<double>& detunings, std::size_t threads = 1) {
    Comparison c;
    c.rd = map_bistability(rd_model, powers, detunings, threads);
    c.boson = map_bistability(boson_model, powers, detunings, threads);
    for (std::size_t i = 0; i < powers.size(); ++i) {
        c.up_jump_difference.push_back(c.rd.rows[i].up_jump - c.boson.rows[i].up_jump);
        c.down_jump_difference.push_back(c.rd.rows[i].down_jump - c.boson.rows[i].down_jump);
    }
    return c;
}

inline Table to_table(const Comparison& c) {
    Table t;
    t.kind = "compare-models";
    t.add_meta("rd_region", c.rd.closed ? "closed" : (c.rd.open ? "open" : "none"));
    t.add_meta("boson_region", c.boson.closed ? "closed" : (c.boson.open ? "open" : "none"));
    t.add_meta("rd_onset_power_mW", c.rd.onset_power.value_or(kNaN));
    t.add_meta("boson_onset_power_mW", c.boson.onset_power.value_or(kNaN));
    t.columns = {"power_mW",        "rd_up_jump_Hz",   "rd_down_jump_Hz", "boson_up_jump_Hz", "boson_down_jump_Hz",
                 "up_jump_diff_Hz", "down_jump_diff_Hz"};
    for (std::size_t i = 0; i < c.rd.rows.size(); ++i) {
        t.rows.push_back({c.rd.rows[i].power, c.rd.rows[i].up_jump, c.rd.rows[i].down_jump, c.boson.rows[i].up_jump,
                          c.boson.rows[i].down_jump, c.up_jump_difference[i], c.down_jump_difference[i]});
    }
    return t;
}

inline nlohmann::ordered_json summary_json(const Comparison& c) {
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr); };
    auto region = [&](const BistabilityMap& m) {
        nlohmann::ordered_json j;
        j["model"] = to_string(m.model);
        j["region"] = m.closed ? "closed" : (m.open ? "open" : "none");
        j["bounded"] = m.closed;
        j["onset_power_mW"] = num(m.onset_power.value_or(kNaN));
        j["onset_detuning_Hz"] = num(m.onset_detuning.value_or(kNaN));
        return j;
    };
    nlohmann::ordered_json j;
    j["schema"] = "spinres.compare-summary/1";
    j["version"] = kVersion;
    j["rapid_disent"] = region(c.rd);
    j["bosonization"] = region(c.boson);
    nlohmann::ordered_json diffs = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < c.rd.rows.size(); ++i) {
        diffs.push_back({{"power_mW", c.rd.rows[i].power},
                         {"up_jump_diff_Hz", num(c.up_jump_difference[i])},
                         {"down_jump_diff_Hz", num(c.down_jump_difference[i])}});
    }
    j["jump_differences"] = std::move(diffs);
    return j;
}

} // namespace spinres::sweep
