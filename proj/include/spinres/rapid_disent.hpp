// rapid_disent.hpp: mean-field limit of the disentangling master equation:
// Bloch-type ODEs for (P+, P-, Pz), the steady-state cubic F(z, delta) = 0,
// linear stability, peak points, bistability onset, and phase-dependent gain.
//
// Dimensionless steady-state variables (time in units of T2):
//   alpha = 1 - (W_A T2)^2, delta = W_d T2, sqrt_D = W_K T2 Pz0 / 4,
//   W = (rho/2) |W_T1|^2 T1 T2 [1 + W_A T2 sin(2 phi_T)],  z = Pz / Pz0.

#pragma once

#include "spinres/cubic.hpp"
#include "spinres/errors.hpp"
#include "spinres/gain.hpp"
#include "spinres/ode.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

namespace spinres::rd {

using cplx = std::complex<double>;

// ----- parameters -----

// Ratio omega_A / omega_K, with 0/0 read as 0 (no anisotropy).
inline double anisotropy_ratio(double omega_A, double omega_K) {
    if (omega_A == 0.0) return 0.0;
    if (!(std::abs(omega_A) < std::abs(omega_K))) {
        throw ArgumentError("rapid-disent: requires |omega_A| < |omega_K|");
    }
    return omega_A / omega_K;
}

// rho = 1 / sqrt(1 - (omega_A/omega_K)^2)
inline double rho_factor(double omega_A, double omega_K) {
    const double r = anisotropy_ratio(omega_A, omega_K);
    return 1.0 / std::sqrt(1.0 - r * r);
}

// X = (sqrt(1+r) + sqrt(1-r)) / 2
inline double x_factor(double omega_A, double omega_K) {
    const double r = anisotropy_ratio(omega_A, omega_K);
    return 0.5 * (std::sqrt(1.0 + r) + std::sqrt(1.0 - r));
}

struct RdRaw {
    double omega0 = 0.0;
    double omega_K = 0.0;
    double omega_A = 0.0;
    double omega_d = 0.0;
    double omega_f = 0.0;
    double Omega_L1 = 0.0;
    double W_T1_mag = 0.0;  // X |Omega_T1|
    double phi_T = 0.0;
    double T1 = 1.0;
    double T2 = 1.0;
    double P_z0 = 1.0;

    // W_T1 magnitude for a bare transverse amplitude |Omega_T1|.
    static double transverse_amplitude(double omega_A, double omega_K, double Omega_T1_mag) {
        return x_factor(omega_A, omega_K) * Omega_T1_mag;
    }

    double rho() const { return rho_factor(omega_A, omega_K); }
    double omega_T() const { return omega0 + omega_d; }
    double W_d() const { return omega_T() - rho() * omega0; }
    double W_A() const { return 0.5 * rho() * anisotropy_ratio(omega_A, omega_K) * Omega_L1; }
    double W_K() const { return omega_K / rho(); }
    cplx W_T1() const { return std::polar(W_T1_mag, phi_T); }

    void validate() const {
        for (double v : {omega0, omega_K, omega_A, omega_d, omega_f, Omega_L1, W_T1_mag, phi_T, T1, T2, P_z0}) {
            if (!std::isfinite(v)) throw ArgumentError("RdRaw: non-finite parameter");
        }
        if (!(T1 > 0.0) || !(T2 > 0.0)) throw ArgumentError("RdRaw: T1 and T2 must be positive");
        if (W_T1_mag < 0.0) throw ArgumentError("RdRaw: W_T1_mag must be >= 0");
        anisotropy_ratio(omega_A, omega_K);
    }
};

struct RdDimensionless {
    double alpha = 1.0;
    double delta = 0.0;
    double D = 0.0;
    double W = 0.0;
    double rho_factor = 1.0;
    // Signed square roots kept from the raw parameters: sqrt_D = W_K T2 Pz0/4
    // and pump = W_A T2 (so 1 - alpha = pump^2).
    double sqrt_D = 0.0;
    double pump = 0.0;
    double t1_over_t2 = 1.0;
    double phi_T = 0.0;

    // From (alpha, delta, D, W) alone, taking the non-negative roots.
    static RdDimensionless make(double alpha, double delta, double D, double W) {
        if (!(D >= 0.0)) throw ArgumentError("RdDimensionless: D must be >= 0");
        if (!(alpha <= 1.0)) throw ArgumentError("RdDimensionless: alpha must be <= 1");
        RdDimensionless d;
        d.alpha = alpha;
        d.delta = delta;
        d.D = D;
        d.W = W;
        d.sqrt_D = std::sqrt(D);
        d.pump = std::sqrt(1.0 - alpha);
        return d;
    }

    // delta - 4 sqrt_D z
    double effective_detuning(double z) const { return delta - 4.0 * sqrt_D * z; }

    bool above_threshold() const { return alpha <= 0.0; }
};

inline RdDimensionless derive_dimensionless(const RdRaw& raw) {
    raw.validate();
    RdDimensionless d;
    d.rho_factor = raw.rho();
    d.pump = raw.W_A() * raw.T2;
    d.alpha = 1.0 - d.pump * d.pump;
    d.delta = raw.W_d() * raw.T2;
    d.sqrt_D = raw.W_K() * raw.T2 * raw.P_z0 / 4.0;
    d.D = d.sqrt_D * d.sqrt_D;
    d.W = 0.5 * d.rho_factor * raw.W_T1_mag * raw.W_T1_mag * raw.T1 * raw.T2 *
          (1.0 + d.pump * std::sin(2.0 * raw.phi_T));
    d.t1_over_t2 = raw.T1 / raw.T2;
    d.phi_T = raw.phi_T;
    return d;
}

// A raw parameter set realizing (alpha, delta, D, W, phi_T, T1/T2) with
// omega_A/omega_K = anisotropy, omega0 = 0 and P_z0 = 1.
inline RdRaw raw_from_dimensionless(const RdDimensionless& d, double anisotropy = 0.3, double T2 = 1.0) {
    if (!(anisotropy > 0.0) || !(anisotropy < 1.0)) throw ArgumentError("raw_from_dimensionless: anisotropy must be in (0, 1)");
    if (!(T2 > 0.0) || !(d.t1_over_t2 > 0.0)) throw ArgumentError("raw_from_dimensionless: T2 and T1/T2 must be positive");
    if (!(d.alpha <= 1.0) || !(d.D >= 0.0) || !(d.W >= 0.0)) throw ArgumentError("raw_from_dimensionless: invalid set");
    if (d.D == 0.0 && d.alpha < 1.0) throw ArgumentError("raw_from_dimensionless: pumping needs D > 0");
    const double rho = 1.0 / std::sqrt(1.0 - anisotropy * anisotropy);
    const double pump = std::sqrt(1.0 - d.alpha);
    const double phase = 1.0 + pump * std::sin(2.0 * d.phi_T);
    if (d.W > 0.0 && !(phase > 0.0)) throw ArgumentError("raw_from_dimensionless: drive phase gives W <= 0");
    RdRaw raw;
    raw.T2 = T2;
    raw.T1 = d.t1_over_t2 * T2;
    raw.P_z0 = 1.0;
    raw.omega_K = 4.0 * std::sqrt(d.D) * rho / T2;
    raw.omega_A = anisotropy * raw.omega_K;
    raw.Omega_L1 = raw.omega_K == 0.0 ? 0.0 : 2.0 * pump / (rho * anisotropy * T2);
    raw.omega_d = d.delta / T2;
    raw.phi_T = d.phi_T;
    raw.W_T1_mag = d.W > 0.0 ? std::sqrt(2.0 * d.W / (rho * raw.T1 * T2 * phase)) : 0.0;
    return raw;
}

// W without the rho factor (first order in omega_A/omega_K).
inline double W_first_order(const RdRaw& raw) {
    const double a = raw.W_A() * raw.T2;
    return 0.5 * raw.W_T1_mag * raw.W_T1_mag * raw.T1 * raw.T2 * (1.0 + a * std::sin(2.0 * raw.phi_T));
}

// ----- equations of motion -----

// State (P+, P-, Pz); Pz is stored as a complex number with zero imaginary part.
using RdState = Eigen::Vector3cd;

inline RdState rd_rhs(const RdState& P, double t, const RdRaw& raw) {
    const cplx i(0.0, 1.0);
    const double wd = raw.W_d(), wa = raw.W_A(), wk = raw.W_K(), rho = raw.rho();
    const cplx w = raw.W_T1();
    const cplx pz = P(2);
    const cplx detune = wd - wk * pz;
    const cplx pump_p = i * wa * std::polar(1.0, -2.0 * raw.omega_f * t);
    const cplx pump_m = -i * wa * std::polar(1.0, 2.0 * raw.omega_f * t);
    RdState out;
    out(0) = (i * detune - 1.0 / raw.T2) * P(0) + pump_p * P(1) - i * pz * std::conj(w);
    out(1) = pump_m * P(0) + (-i * detune - 1.0 / raw.T2) * P(1) + i * pz * w;
    out(2) = 0.5 * i * rho * (std::conj(w) * P(1) - w * P(0)) - (pz - raw.P_z0) / raw.T1;
    return out;
}

struct RdTrajectory {
    std::vector<double> times;
    std::vector<RdState> states;
    RdState final_state;
    bool diverged = false;
    double diverged_at = 0.0;
};

inline double rd_norm(const RdState& P) {
    return std::sqrt(0.5 * (std::norm(P(0)) + std::norm(P(1))) + std::norm(P(2)));
}

inline RdTrajectory integrate_rd(const RdState& P0, const RdRaw& raw, double t_end, double dt,
                                 std::size_t sample_every = 1) {
    raw.validate();
    if (!(dt > 0.0)) throw ArgumentError("integrate_rd: dt must be positive");
    if (sample_every == 0) throw ArgumentError("integrate_rd: sample_every must be >= 1");
    const double bound = 10.0 * std::abs(raw.P_z0) * std::max(1.0, std::abs(raw.W_A() * raw.T2));
    RdTrajectory tr;
    auto f = [&raw](double t, const RdState& P) { return rd_rhs(P, t, raw); };
    tr.final_state = integrate_rk4(f, P0, t_end, dt, [&](std::size_t step, double t, const RdState& P) {
        if (step % sample_every == 0) {
            tr.times.push_back(t);
            tr.states.push_back(P);
        }
        if (!P.allFinite() || rd_norm(P) > bound) {
            tr.diverged = true;
            tr.diverged_at = t;
            return false;
        }
        return true;
    });
    if (tr.times.empty() || tr.times.back() != t_end) {
        tr.times.push_back(t_end);
        tr.states.push_back(tr.final_state);
    }
    return tr;
}

// ----- steady state -----

// F(z, delta) = z (alpha + (delta - 4 sqrt_D z)^2 + 2W) - alpha - (delta - 4 sqrt_D z)^2
inline double F(const RdDimensionless& d, double z) {
    const double e = d.effective_detuning(z);
    return z * (d.alpha + e * e + 2.0 * d.W) - d.alpha - e * e;
}

inline double F_z(const RdDimensionless& d, double z) {
    const double e = d.effective_detuning(z);
    return d.alpha + e * e + 2.0 * d.W - 8.0 * d.sqrt_D * (z - 1.0) * e;
}

inline double F_delta(const RdDimensionless& d, double z) { return 2.0 * (z - 1.0) * d.effective_detuning(z); }

// Monomial coefficients of F in z, highest degree first.
inline std::array<double, 4> cubic_coefficients(const RdDimensionless& d) {
    const double s = d.sqrt_D, D = s * s;
    const double c0 = d.alpha + d.delta * d.delta;
    return {16.0 * D, -8.0 * s * d.delta - 16.0 * D, c0 + 2.0 * d.W + 8.0 * s * d.delta, -c0};
}

// Transverse drive w = W_T1 T2 / Pz0 consistent with d.W, d.rho_factor,
// d.t1_over_t2 and d.phi_T.
inline cplx reduced_drive(const RdDimensionless& d) {
    if (d.W == 0.0) return {0.0, 0.0};
    const double phase_gain = 1.0 + d.pump * std::sin(2.0 * d.phi_T);
    if (!(phase_gain > 0.0) || !(d.W > 0.0)) {
        throw ArgumentError("rapid-disent: W inconsistent with pump and phi_T");
    }
    const double mag2 = 2.0 * d.W / (d.rho_factor * d.t1_over_t2 * phase_gain);
    return std::polar(std::sqrt(mag2), d.phi_T);
}

// M_T = [[mu1, i pump], [-i pump, conj(mu1)]], mu1 = i(delta - 4 sqrt_D z) - 1
inline Eigen::Matrix2cd m_t_matrix(const RdDimensionless& d, double z) {
    const cplx i(0.0, 1.0);
    const cplx mu1 = i * d.effective_detuning(z) - 1.0;
    Eigen::Matrix2cd m;
    m << mu1, i * d.pump, -i * d.pump, std::conj(mu1);
    return m;
}

// Reduced fixed point (px, py, pz) of the real flow for polarization z.
inline std::array<double, 3> fixed_point(const RdDimensionless& d, double z) {
    const cplx w = reduced_drive(d);
    const Eigen::Matrix2cd mt = m_t_matrix(d, z);
    const cplx det = mt.determinant();
    if (std::abs(det) < 1e-300) throw AboveThresholdError("rapid-disent: singular M_T at fixed point");
    Eigen::Vector2cd rhs(std::conj(w), -w);
    const Eigen::Vector2cd p = cplx(0.0, z) * mt.inverse() * rhs;
    const cplx px = 0.5 * (p(0) + p(1));
    const cplx py = (p(0) - p(1)) / cplx(0.0, 2.0);
    return {px.real(), py.real(), z};
}

// Jacobian of the reduced real flow (time in units of T2, P in units of Pz0).
inline Eigen::Matrix3d reduced_jacobian(const RdDimensionless& d, const std::array<double, 3>& p) {
    const cplx w = reduced_drive(d);
    const double s = d.sqrt_D, a = d.pump;
    const double delta_eff = d.effective_detuning(p[2]);
    Eigen::Matrix3d j;
    j << -1.0, -delta_eff + a, -w.imag() + 4.0 * s * p[1],
         delta_eff + a, -1.0, -w.real() - 4.0 * s * p[0],
         d.rho_factor * w.imag(), d.rho_factor * w.real(), -1.0 / d.t1_over_t2;
    return j;
}

struct RdRoot {
    double z = 0.0;
    bool stable = false;
    bool above_threshold = false;  // alpha + (delta - 4 sqrt_D z)^2 <= 0
    double max_real_eigenvalue = 0.0;
    std::array<double, 3> fixed_point{};
};

struct RdSteadyState {
    std::vector<RdRoot> roots;       // 0 < z <= 1, ascending
    std::vector<double> unphysical;  // other real roots

    std::size_t stable_count() const {
        return static_cast<std::size_t>(std::count_if(roots.begin(), roots.end(), [](const RdRoot& r) { return r.stable; }));
    }
};

inline constexpr double kRootEdgeTol = 1e-12;

inline RdSteadyState steady_state_z(const RdDimensionless& d) {
    const auto k = cubic_coefficients(d);
    if (k[0] == 0.0 && k[1] == 0.0 && k[2] == 0.0) {
        throw ArgumentError("steady_state_z: degenerate cubic (alpha + 2W = 0 and D = 0)");
    }
    RdSteadyState out;
    for (double z : solve_cubic(k)) {
        if (!(z > 0.0) || z > 1.0 + kRootEdgeTol) {
            out.unphysical.push_back(z);
            continue;
        }
        RdRoot r;
        r.z = std::min(z, 1.0);
        const double e = d.effective_detuning(r.z);
        r.above_threshold = d.alpha + e * e <= 0.0;
        if (r.above_threshold) {
            r.stable = false;
            r.max_real_eigenvalue = std::numeric_limits<double>::infinity();
        } else {
            r.fixed_point = fixed_point(d, r.z);
            const Eigen::Vector3cd ev = reduced_jacobian(d, r.fixed_point).eigenvalues();
            r.max_real_eigenvalue = ev.real().maxCoeff();
            r.stable = r.max_real_eigenvalue < 0.0;
        }
        out.roots.push_back(r);
    }
    return out;
}

// ----- peak points -----

struct PeakPoint {
    double z = 0.0;
    double delta = 0.0;
};

// z = 1/(1 + 2W/alpha), delta = 4 sqrt_D z; empty for alpha <= 0.
inline std::optional<PeakPoint> peak_point(double alpha, double D, double W, double sqrt_D_sign = 1.0) {
    if (!(alpha > 0.0)) return std::nullopt;
    if (!(D >= 0.0)) throw ArgumentError("peak_point: D must be >= 0");
    const double z = 1.0 / (1.0 + 2.0 * W / alpha);
    return PeakPoint{z, 4.0 * std::copysign(std::sqrt(D), sqrt_D_sign) * z};
}

inline std::optional<PeakPoint> peak_point(const RdDimensionless& d) {
    return peak_point(d.alpha, d.D, d.W, d.sqrt_D < 0.0 ? -1.0 : 1.0);
}

// ----- bistability onset -----

struct OnsetPoint {
    double z = 0.0;
    double delta = 0.0;
    double W = 0.0;
};

// Onset points (triple roots of F in z), sorted by W. For 0 <= alpha < D the
// two entries are the lower (W-) and upper (W+) onsets; alpha = D gives the
// single merged point; alpha < 0 gives at most one point.
inline std::vector<OnsetPoint> bistability_onset(double alpha, double D, double sqrt_D_sign = 1.0) {
    if (!(D > 0.0)) throw ArgumentError("bistability_onset: D must be positive");
    const double ratio = alpha / D;
    std::vector<OnsetPoint> out;
    const double s = std::copysign(std::sqrt(D), sqrt_D_sign);
    auto push = [&](double z) {
        out.push_back({z, 2.0 * s * (3.0 * z - 1.0), 6.0 * D * (1.0 - z) * (1.0 - z) - 0.5 * alpha});
    };
    if (ratio > 1.0 + 1e-12) return out;
    if (ratio >= 1.0) {
        push(0.5);
        return out;
    }
    const cplx i(0.0, 1.0);
    const cplx q = std::exp(i * (2.0 / 3.0) * std::acos(std::sqrt(cplx(ratio, 0.0))));
    auto Z = [](cplx x) { return (x + 1.0 / x + 3.0) / 4.0; };
    const cplx rot = std::polar(1.0, 2.0 * M_PI / 3.0);
    for (const cplx x : {q * rot, q * std::conj(rot)}) {
        const cplx z = Z(x);
        if (std::abs(z.imag()) > 1e-10) continue;
        if (!(z.real() > 0.0) || !(z.real() < 1.0)) continue;
        push(z.real());
    }
    std::sort(out.begin(), out.end(), [](const OnsetPoint& a, const OnsetPoint& b) { return a.W < b.W; });
    return out;
}

// Lower onset point (smallest W) for alpha <= D.
inline std::optional<OnsetPoint> lower_onset(double alpha, double D) {
    auto pts = bistability_onset(alpha, D);
    if (pts.empty()) return std::nullopt;
    return pts.front();
}

// Fold (saddle-node) detunings at fixed W: points of the solution branch with
// d delta / dz = 0. On the branch delta = 4 s z +/- sqrt(g), g = (2Wz - alpha(1-z))/(1-z),
// which reduces to 4|s| (1-z)^{3/2} sqrt(2Wz - alpha(1-z)) = W. Ascending in delta.
inline std::vector<double> fold_deltas(double alpha, double D, double W, double sqrt_D_sign = 1.0) {
    std::vector<double> out;
    if (!(D > 0.0) || !(W > 0.0)) return out;
    const double s = std::copysign(std::sqrt(D), sqrt_D_sign);
    auto inner = [&](double z) { return 2.0 * W * z - alpha * (1.0 - z); };
    auto h = [&](double z) { return 4.0 * std::abs(s) * std::pow(1.0 - z, 1.5) * std::sqrt(std::max(0.0, inner(z))) - W; };
    const double z0 = std::max(0.0, alpha / (alpha + 2.0 * W));
    const int n = 4000;
    double prev_z = z0, prev_h = h(z0);
    for (int k = 1; k <= n; ++k) {
        const double z = z0 + (1.0 - z0) * k / n;
        const double hz = h(z);
        if ((prev_h < 0.0) != (hz < 0.0)) {
            double a = prev_z, b = z, ha = prev_h;
            for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
                const double m = 0.5 * (a + b);
                const double hm = h(m);
                if ((hm < 0.0) == (ha < 0.0)) {
                    a = m;
                    ha = hm;
                } else {
                    b = m;
                }
            }
            const double zf = 0.5 * (a + b);
            out.push_back(4.0 * s * zf - std::copysign(std::sqrt(std::max(0.0, inner(zf) / (1.0 - zf))), s));
        }
        prev_z = z;
        prev_h = hz;
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Inverts the lower onset: finds D in [alpha, 1e6 alpha] whose W- equals W_c.
// When delta_c is given the matching onset detuning must agree too.
inline double infer_D_from_onset(std::optional<double> delta_c, double W_c, double alpha) {
    if (!(alpha > 0.0)) throw FitError("infer_D_from_onset: requires alpha > 0");
    auto g = [&](double D) {
        const auto p = lower_onset(alpha, D);
        return p ? p->W - W_c : std::numeric_limits<double>::quiet_NaN();
    };
    const double lo_log = std::log(alpha), hi_log = std::log(1e6 * alpha);
    const int n = 4000;
    std::vector<double> candidates;
    if (std::abs(g(alpha)) <= 1e-12 * std::max(1.0, std::abs(W_c))) candidates.push_back(alpha);
    double prev_D = alpha, prev_g = g(alpha);
    for (int k = 1; k <= n; ++k) {
        const double D = std::exp(lo_log + (hi_log - lo_log) * k / n);
        const double gd = g(D);
        if (std::isfinite(prev_g) && std::isfinite(gd) && ((prev_g < 0.0) != (gd < 0.0))) {
            double a = prev_D, b = D, ga = prev_g;
            for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
                const double m = 0.5 * (a + b);
                const double gm = g(m);
                if ((gm < 0.0) == (ga < 0.0)) {
                    a = m;
                    ga = gm;
                } else {
                    b = m;
                }
            }
            candidates.push_back(0.5 * (a + b));
        }
        prev_D = D;
        prev_g = gd;
    }
    if (candidates.empty()) throw FitError("infer_D_from_onset: no D reproduces the onset drive");
    if (!delta_c) return candidates.front();
    double best = candidates.front(), best_err = std::numeric_limits<double>::infinity();
    for (double D : candidates) {
        const double err = std::abs(lower_onset(alpha, D)->delta - *delta_c);
        if (err < best_err) {
            best_err = err;
            best = D;
        }
    }
    if (best_err > 1e-6 * std::max(1.0, std::abs(*delta_c))) {
        throw FitError("infer_D_from_onset: onset detuning inconsistent with onset drive");
    }
    return best;
}

// ----- linear structure -----

// M_d of the real flow for omega_f = 0, in physical units.
inline Eigen::Matrix3d m_d_matrix(const RdRaw& raw) {
    const double wa = raw.W_A(), rho = raw.rho();
    const cplx w = raw.W_T1();
    Eigen::Matrix3d m;
    m << -1.0 / raw.T2, wa, 0.0,
         wa, -1.0 / raw.T2, 0.0,
         (rho - 1.0) * w.imag(), (rho - 1.0) * w.real(), -1.0 / raw.T1;
    return m;
}

// {-(1 + W_A T2)/T2, -(1 - W_A T2)/T2, -1/T1}
inline std::array<double, 3> effective_damping_eigenvalues(const RdRaw& raw) {
    if (raw.omega_f != 0.0) throw ArgumentError("effective_damping_eigenvalues: requires omega_f = 0");
    const double a = raw.W_A() * raw.T2;
    return {-(1.0 + a) / raw.T2, -(1.0 - a) / raw.T2, -1.0 / raw.T1};
}

// -1 +/- sqrt(1 - alpha - (delta - 4 sqrt_D z)^2)
inline std::array<cplx, 2> m_t_eigenvalues(const RdDimensionless& d, double z) {
    const double e = d.effective_detuning(z);
    const cplx r = std::sqrt(cplx(1.0 - d.alpha - e * e, 0.0));
    return {-1.0 + r, -1.0 - r};
}

// ----- gain -----

inline GainStructure gain_structure(const RdDimensionless& d, double z) {
    const cplx mu1(-1.0, d.effective_detuning(z));
    const cplx mu2(0.0, d.pump);
    if (!(std::abs(mu1) > std::abs(mu2))) {
        throw AboveThresholdError("gain_phase: |mu1| <= |mu2|, operating point above pump threshold");
    }
    return {std::abs(mu2) / std::abs(mu1), std::arg(mu1) + (d.pump == 0.0 ? 0.0 : std::arg(mu2))};
}

// g_P = 1 + 2 eta cos(2 phi_T + phi1 + phi2) + eta^2
inline double gain_phase(const RdDimensionless& d, double z, double phi_T) { return gain_structure(d, z).at(phi_T); }

} // namespace spinres::rd
