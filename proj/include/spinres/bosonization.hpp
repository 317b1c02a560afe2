// bosonization.hpp: Holstein-Primakoff mean-field model of the driven spin
// ensemble: HP operators, mean-field ODEs for beta+-, magnon-number cubic,
// bistability threshold, parametric gain g_M and the exchange cutoff.
//
//   E [(Omega_d - omega_K E)^2 + (gamma + gamma3 E)^2] = 2 gamma1 Omega1,
//   Omega1 = omega_T1 g_M,  Omega_d = omega_T - omega0 + L omega_K.

#pragma once

#include "spinres/cubic.hpp"
#include "spinres/errors.hpp"
#include "spinres/gain.hpp"
#include "spinres/hilbert.hpp"
#include "spinres/ode.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

namespace spinres::boson {

using cplx = std::complex<double>;

// ----- HP operators -----

struct HpOperators {
    std::size_t L = 0;
    std::size_t n_max = 0;
    ComplexMatrix B, B_dag, number;
    ComplexMatrix s_plus, s_minus, s_z;
};

// S+ = 2 B^dag sqrt(L - N), S- = 2 sqrt(L - N) B, S_z = -L + 2N on Fock levels 0..n_max.
inline HpOperators hp_map(std::size_t L, std::size_t n_max) {
    if (L < 1) throw ArgumentError("hp_map: L must be >= 1");
    if (n_max > L) throw ArgumentError("hp_map: n_max must not exceed L");
    const auto dim = static_cast<Eigen::Index>(n_max + 1);
    HpOperators h;
    h.L = L;
    h.n_max = n_max;
    h.B = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index n = 1; n < dim; ++n) h.B(n - 1, n) = std::sqrt(static_cast<double>(n));
    h.B_dag = h.B.adjoint();
    // the number operator is diagonal, so its spectral functions act on the integer levels
    h.number = ComplexMatrix::Zero(dim, dim);
    ComplexMatrix root = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index n = 0; n < dim; ++n) {
        h.number(n, n) = static_cast<double>(n);
        root(n, n) = std::sqrt(static_cast<double>(L) - static_cast<double>(n));
    }
    h.s_plus = 2.0 * h.B_dag * root;
    h.s_minus = 2.0 * root * h.B;
    h.s_z = 2.0 * h.number - static_cast<double>(L) * ComplexMatrix::Identity(dim, dim);
    return h;
}

// ----- parameters -----

struct BosonParams {
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double gamma3 = 0.0;
    double omega_K = 0.0;
    double omega_A = 0.0;
    double Omega_L1 = 0.0;
    double omega_T = 0.0;
    double omega0 = 0.0;
    double omega_f = 0.0;
    double L = 0.0;  // spin count; only L omega_K enters
    double omega_T1 = 0.0;
    double phi_T = 0.0;

    double gamma() const { return gamma1 + gamma2; }
    double ratio() const {
        if (omega_A == 0.0) return 0.0;
        if (!(std::abs(omega_A) < std::abs(omega_K))) throw ArgumentError("BosonParams: requires |omega_A| < |omega_K|");
        return omega_A / omega_K;
    }
    double rho() const { return 1.0 / std::sqrt(1.0 - ratio() * ratio()); }
    double W_A() const { return 0.5 * rho() * ratio() * Omega_L1; }
    double Omega_d() const { return omega_T - omega0 + L * omega_K; }

    // Sets omega_T so that Omega_d takes the given value.
    void set_detuning(double Omega_d) { omega_T = Omega_d + omega0 - L * omega_K; }

    // Kerr coefficient of W_b: rho^3 omega_K (1 + (omega_A/omega_K)^2 / 2)
    double kerr() const {
        const double r = ratio(), p = rho();
        return p * p * p * omega_K * (1.0 + 0.5 * r * r);
    }

    // W_b(E) = i(omega_T - rho omega0 + L omega_K / rho - kerr E) - gamma - gamma3 E
    cplx W_b(double E) const {
        const double p = rho();
        return {-gamma() - gamma3 * E, omega_T - p * omega0 + L * omega_K / p - kerr() * E};
    }

    cplx drive_scale() const { return std::sqrt(2.0 * gamma1 * omega_T1); }

    void validate() const {
        for (double v : {gamma1, gamma2, gamma3, omega_K, omega_A, Omega_L1, omega_T, omega0, omega_f, L, omega_T1, phi_T}) {
            if (!std::isfinite(v)) throw ArgumentError("BosonParams: non-finite parameter");
        }
        if (gamma1 < 0.0 || gamma2 < 0.0 || gamma3 < 0.0) throw ArgumentError("BosonParams: damping rates must be >= 0");
        if (omega_T1 < 0.0) throw ArgumentError("BosonParams: omega_T1 must be >= 0");
        ratio();
    }
};

// ----- mean-field dynamics -----

using BetaState = Eigen::Vector2cd;  // (beta+, beta-)

// W_b uses the product beta+ beta- directly, so the pair is not forced to be
// complex conjugates.
inline BetaState mean_field_rhs(const BetaState& beta, double t, const BosonParams& p) {
    const cplx i(0.0, 1.0);
    const cplx prod = beta(0) * beta(1);
    const double rp = p.rho();
    const cplx detune = p.omega_T - rp * p.omega0 + p.L * p.omega_K / rp - p.kerr() * prod;
    const cplx damp = -p.gamma() - p.gamma3 * prod;
    const double wa = p.W_A();
    const cplx s = p.drive_scale();
    BetaState out;
    out(0) = (damp + i * detune) * beta(0) + i * wa * std::polar(1.0, -2.0 * p.omega_f * t) * beta(1) +
             s * i * std::polar(1.0, -p.phi_T);
    out(1) = -i * wa * std::polar(1.0, 2.0 * p.omega_f * t) * beta(0) + (damp - i * detune) * beta(1) -
             s * i * std::polar(1.0, p.phi_T);
    return out;
}

struct BetaTrajectory {
    std::vector<double> times;
    std::vector<BetaState> states;
    BetaState final_state;
};

inline BetaTrajectory integrate_mean_field(const BetaState& beta0, const BosonParams& p, double t_end, double dt,
                                           std::size_t sample_every = 1) {
    p.validate();
    if (sample_every == 0) throw ArgumentError("integrate_mean_field: sample_every must be >= 1");
    BetaTrajectory tr;
    auto f = [&p](double t, const BetaState& b) { return mean_field_rhs(b, t, p); };
    tr.final_state = integrate_rk4(f, beta0, t_end, dt, [&](std::size_t step, double t, const BetaState& b) {
        if (step % sample_every == 0) {
            tr.times.push_back(t);
            tr.states.push_back(b);
        }
        return b.allFinite();
    });
    if (tr.times.empty() || tr.times.back() != t_end) {
        tr.times.push_back(t_end);
        tr.states.push_back(tr.final_state);
    }
    return tr;
}

// ----- gain -----

// eta_A e^{i phi_A} = i W_A / conj(W_b(E)); g_M = 1 + 2 eta_A cos(2 phi_T + phi_A) + eta_A^2.
inline GainStructure gain_boson(const BosonParams& p, double E_context = 0.0) {
    const cplx wb = p.W_b(E_context);
    const double wa = p.W_A();
    if (!(std::abs(wa) < std::abs(wb))) throw AboveThresholdError("gain_boson: |W_A| >= |W_b|, above pump threshold");
    const cplx x = cplx(0.0, wa) / std::conj(wb);
    return {std::abs(x), wa == 0.0 ? 0.0 : std::arg(x)};
}

// eta_A = omega_A Omega_L1 / (2 omega_K sqrt(Omega_d^2 + gamma^2)), first order in omega_A.
inline double eta_A_small_limit(const BosonParams& p) {
    const double od = p.Omega_d(), g = p.gamma();
    return std::abs(p.omega_A * p.Omega_L1 / (2.0 * p.omega_K * std::sqrt(od * od + g * g)));
}

// Omega1 = omega_T1 g_M(phi_T) with g_M evaluated at E -> 0.
inline double effective_drive(const BosonParams& p) { return p.omega_T1 * gain_boson(p, 0.0).at(p.phi_T); }

// ----- steady state -----

// Coefficients of E[(Od - K E)^2 + (g + g3 E)^2] - 2 g1 Omega1, highest first.
inline std::array<double, 4> cubic_coefficients(double Omega_d, double Omega1, double gamma1, double gamma,
                                                double gamma3, double omega_K) {
    return {omega_K * omega_K + gamma3 * gamma3, 2.0 * (gamma * gamma3 - Omega_d * omega_K),
            Omega_d * Omega_d + gamma * gamma, -2.0 * gamma1 * Omega1};
}

inline double cubic_residual(double E, double Omega_d, double Omega1, double gamma1, double gamma, double gamma3,
                             double omega_K) {
    const double a = Omega_d - omega_K * E, b = gamma + gamma3 * E;
    return E * (a * a + b * b) - 2.0 * gamma1 * Omega1;
}

// Non-negative real roots, ascending.
inline std::vector<double> magnon_roots(double Omega_d, double Omega1, double gamma1, double gamma, double gamma3,
                                        double omega_K) {
    std::vector<double> out;
    if (Omega1 == 0.0) return {0.0};
    for (double E : solve_cubic(cubic_coefficients(Omega_d, Omega1, gamma1, gamma, gamma3, omega_K))) {
        if (E >= 0.0) out.push_back(E);
    }
    return out;
}

// Fold detunings of the E-cubic at fixed Omega1: on the branch
// Omega_d = K E + sgn(K) sqrt(g), g = 2 g1 Omega1 / E - (g + g3 E)^2, folds
// satisfy 2|K| sqrt(g) + g' = 0. Ascending.
inline std::vector<double> fold_detunings(double Omega1, double gamma1, double gamma, double gamma3, double omega_K) {
    std::vector<double> out;
    if (!(Omega1 > 0.0) || !(gamma1 > 0.0) || omega_K == 0.0) return out;
    const double c = 2.0 * gamma1 * Omega1;
    double E_max = -1.0;
    for (double E : solve_cubic(gamma3 * gamma3, 2.0 * gamma * gamma3, gamma * gamma, -c)) {
        if (E > 0.0) E_max = E;
    }
    if (!(E_max > 0.0)) return out;
    auto g = [&](double E) { return std::max(0.0, c / E - (gamma + gamma3 * E) * (gamma + gamma3 * E)); };
    auto h = [&](double E) { return 2.0 * std::abs(omega_K) * std::sqrt(g(E)) - c / (E * E) - 2.0 * gamma3 * (gamma + gamma3 * E); };
    const int n = 4000;
    const double lo = std::log(E_max * 1e-9), hi = std::log(E_max);
    double prev_E = E_max * 1e-9, prev_h = h(prev_E);
    for (int k = 1; k <= n; ++k) {
        const double E = k == n ? E_max : std::exp(lo + (hi - lo) * k / n);
        const double hE = h(E);
        if ((prev_h < 0.0) != (hE < 0.0)) {
            double a = prev_E, b = E, ha = prev_h;
            for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
                const double m = 0.5 * (a + b);
                const double hm = h(m);
                if ((hm < 0.0) == (ha < 0.0)) {
                    a = m;
                    ha = hm;
                } else {
                    b = m;
                }
            }
            const double Ef = 0.5 * (a + b);
            out.push_back(omega_K * Ef + std::copysign(std::sqrt(g(Ef)), omega_K));
        }
        prev_E = E;
        prev_h = hE;
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct BosonRoot {
    double E = 0.0;
    bool stable = false;               // middle-of-three rule
    bool dynamically_stable = false;   // linearized mean-field flow
    double max_real_eigenvalue = 0.0;
    cplx beta_plus{0.0, 0.0};
};

// Steady beta for a given magnon number E, from M_beta(E) beta = -drive.
inline BetaState steady_beta(const BosonParams& p, double E) {
    const cplx i(0.0, 1.0);
    const cplx wb = p.W_b(E);
    const double wa = p.W_A();
    Eigen::Matrix2cd m;
    m << wb, i * wa, -i * wa, std::conj(wb);
    const cplx s = p.drive_scale();
    const Eigen::Vector2cd d(s * i * std::polar(1.0, -p.phi_T), -s * i * std::polar(1.0, p.phi_T));
    return -m.fullPivLu().solve(d);
}

// Real 2x2 Jacobian of d beta/dt = W_b(|beta|^2) beta + i W_A conj(beta) + d at beta.
inline Eigen::Matrix2d mean_field_jacobian(const BosonParams& p, cplx beta) {
    const double E = std::norm(beta);
    const cplx dwb(-p.gamma3, -p.kerr());
    const cplx A = p.W_b(E) + dwb * E;
    const cplx B = cplx(0.0, p.W_A()) + dwb * beta * beta;
    Eigen::Matrix2d j;
    j << (A + B).real(), -(A - B).imag(), (A + B).imag(), (A - B).real();
    return j;
}

inline std::vector<BosonRoot> classify_roots(const BosonParams& p, const std::vector<double>& Es) {
    std::vector<BosonRoot> out;
    for (std::size_t k = 0; k < Es.size(); ++k) {
        BosonRoot r;
        r.E = Es[k];
        r.stable = !(Es.size() == 3 && k == 1);
        r.beta_plus = steady_beta(p, r.E)(0);
        const Eigen::Vector2cd ev = mean_field_jacobian(p, r.beta_plus).eigenvalues();
        r.max_real_eigenvalue = ev.real().maxCoeff();
        r.dynamically_stable = r.max_real_eigenvalue < 0.0;
        out.push_back(r);
    }
    return out;
}

// Roots of the cubic with W_b's first-order terms taken at E -> 0.
inline std::vector<BosonRoot> steady_state_E(const BosonParams& p) {
    p.validate();
    if (p.omega_f != 0.0) throw ArgumentError("steady_state_E: requires omega_f = 0");
    const double omega1 = effective_drive(p);
    return classify_roots(p, magnon_roots(p.Omega_d(), omega1, p.gamma1, p.gamma(), p.gamma3, p.omega_K));
}

// h(E) = E (|W_b|^2 - W_A^2)^2 - 2 gamma1 omega_T1 g_M(E) |W_b|^2, zero at exact steady states.
inline double self_consistent_residual(const BosonParams& p, double E) {
    const cplx wb = p.W_b(E);
    const double wa = p.W_A();
    const double n2 = std::norm(wb);
    const double g = std::norm(1.0 + cplx(0.0, wa) * std::polar(1.0, 2.0 * p.phi_T) / std::conj(wb));
    return E * (n2 - wa * wa) * (n2 - wa * wa) - 2.0 * p.gamma1 * p.omega_T1 * g * n2;
}

// Exact E_beta fixed points, Newton-refined from the cubic roots.
inline std::vector<BosonRoot> steady_state_E_self_consistent(const BosonParams& p, int max_iter = 60) {
    p.validate();
    if (p.omega_f != 0.0) throw ArgumentError("steady_state_E_self_consistent: requires omega_f = 0");
    const double omega1 = effective_drive(p);
    std::vector<double> seeds = magnon_roots(p.Omega_d(), omega1, p.gamma1, p.gamma(), p.gamma3, p.omega_K);
    std::vector<double> found;
    for (double E : seeds) {
        for (int it = 0; it < max_iter; ++it) {
            const double h = 1e-7 * std::max(1.0, E);
            const double f = self_consistent_residual(p, E);
            const double df = (self_consistent_residual(p, E + h) - self_consistent_residual(p, E - h)) / (2.0 * h);
            if (df == 0.0 || !std::isfinite(df)) break;
            const double step = f / df;
            E = std::max(0.0, E - step);
            if (std::abs(step) <= 1e-14 * std::max(1.0, E)) break;
        }
        const bool dup = std::any_of(found.begin(), found.end(),
                                     [&](double x) { return std::abs(x - E) <= 1e-9 * std::max(1.0, E); });
        if (!dup) found.push_back(E);
    }
    std::sort(found.begin(), found.end());
    return classify_roots(p, found);
}

// ----- threshold -----

struct BosonThreshold {
    double Omega_1c = 0.0;
    double E_c = 0.0;
    double Omega_d_c = 0.0;  // detuning of the onset point
};

// E_c = (2 gamma/sqrt3) / (|omega_K| - sqrt3 gamma3), Omega_1c = E_c^3 (omega_K^2 + gamma3^2) / (2 gamma1).
// None when |omega_K| <= sqrt3 gamma3.
inline std::optional<BosonThreshold> bistability_threshold(double gamma1, double gamma, double gamma3, double omega_K) {
    const double s3 = std::sqrt(3.0);
    const double margin = std::abs(omega_K) - s3 * gamma3;
    if (!(margin > 0.0) || !(gamma1 > 0.0)) return std::nullopt;
    BosonThreshold t;
    const double k2 = omega_K * omega_K + gamma3 * gamma3;
    t.E_c = (2.0 * gamma / s3) / margin;
    t.Omega_1c = t.E_c * t.E_c * t.E_c * k2 / (2.0 * gamma1);
    t.Omega_d_c = std::copysign((1.5 * k2 * t.E_c + gamma * gamma3) / std::abs(omega_K), omega_K);
    return t;
}

inline std::optional<BosonThreshold> bistability_threshold(const BosonParams& p) {
    return bistability_threshold(p.gamma1, p.gamma(), p.gamma3, p.omega_K);
}

// ----- exchange cutoff -----

struct ExchangeCutoff {
    double omega_D = 0.0;
    bool valid(double omega_d, double omega_f) const { return std::max(std::abs(omega_d), std::abs(omega_f)) <= omega_D; }
};

// epsilon_ex = omega_M lambda_ex k^2 / omega0
inline double exchange_parameter(double omega_M, double lambda_ex, double k, double omega0) {
    return omega_M * lambda_ex * k * k / omega0;
}

// omega_D = omega_M lambda_ex (2 pi / R_s)^2
inline ExchangeCutoff exchange_cutoff(double omega_M, double lambda_ex, double R_s) {
    if (!(omega_M > 0.0) || !(lambda_ex > 0.0) || !(R_s > 0.0)) {
        throw ArgumentError("exchange_cutoff: inputs must be positive");
    }
    const double k = 2.0 * M_PI / R_s;
    return {omega_M * lambda_ex * k * k};
}

} // namespace spinres::boson
