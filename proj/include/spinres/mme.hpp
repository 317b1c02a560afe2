// mme.hpp: nonlinear (disentangling) master equation for L driven spins:
// Hamiltonians, thermal Lindbladian, disentanglement term, RK4 evolution and
// attractor search.
//
//   d rho/dt = i[rho, H(t)] + L(rho) - Theta rho - rho Theta + 2 <Theta> rho
//
// Theta is supplied by a pluggable strategy. The built-in one is
//   Theta = (gamma_D/2) (ln rho - ln(rho_1 (x) ... (x) rho_N)),
// which vanishes on product states, is covariant under local unitaries, and
// makes the mutual information decay.

#pragma once

#include "spinres/errors.hpp"
#include "spinres/hilbert.hpp"
#include "spinres/ode.hpp"
#include "spinres/parallel.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace spinres {

// ----- parameters -----

struct DrivenSpinParams {
    double omega0 = 0.0;
    double omega_K = 0.0;
    double omega_A = 0.0;
    double omega_d = 0.0;       // omega_T = omega0 + omega_d
    double omega_f = 0.0;       // longitudinal detuning
    double Omega_L1 = 0.0;      // longitudinal (parallel pumping) amplitude
    double Omega_T1_mag = 0.0;  // transverse drive |Omega_T1|
    double phi_T = 0.0;
    std::size_t L = 2;

    double omega_T() const { return omega0 + omega_d; }
    cplx Omega_T1() const { return std::polar(Omega_T1_mag, phi_T); }
    double omega_z(double t) const { return omega0 + Omega_L1 * std::cos(2.0 * (omega_T() + omega_f) * t); }

    void validate() const {
        if (L < 1) throw ArgumentError("DrivenSpinParams: L must be >= 1");
        for (double v : {omega0, omega_K, omega_A, omega_d, omega_f, Omega_L1, Omega_T1_mag, phi_T}) {
            if (!std::isfinite(v)) throw ArgumentError("DrivenSpinParams: non-finite rate");
        }
        if (Omega_T1_mag < 0.0) throw ArgumentError("DrivenSpinParams: Omega_T1_mag must be >= 0");
    }
};

struct DissipationParams {
    double Gamma1 = 0.0;
    double Gamma_phi = 0.0;
    double n0 = 0.0;

    // 1/T1 = Gamma1 (2 n0 + 1); 1/T2 = 1/(2 T1) + Gamma_phi. Requires T2 <= 2 T1.
    static DissipationParams from_times(double T1, double T2, double n0 = 0.0) {
        if (!(T1 > 0.0) || !(T2 > 0.0)) throw ArgumentError("DissipationParams: T1, T2 must be positive");
        if (!(n0 >= 0.0)) throw ArgumentError("DissipationParams: n0 must be >= 0");
        const double gphi = 1.0 / T2 - 0.5 / T1;
        if (gphi < -1e-12 / T2) throw ArgumentError("DissipationParams: T2 > 2 T1 needs negative dephasing");
        return {1.0 / (T1 * (2.0 * n0 + 1.0)), std::max(gphi, 0.0), n0};
    }

    double rate1() const { return Gamma1 * (2.0 * n0 + 1.0); }
    double rate2() const { return 0.5 * rate1() + Gamma_phi; }
    double T1() const { return 1.0 / rate1(); }
    double T2() const { return 1.0 / rate2(); }

    void validate() const {
        if (!(Gamma1 >= 0.0) || !(Gamma_phi >= 0.0) || !(n0 >= 0.0)) {
            throw ArgumentError("DissipationParams: Gamma1, Gamma_phi, n0 must be >= 0");
        }
    }
};

using ThetaStrategy = std::function<ComplexMatrix(const ComplexMatrix& rho, const Dims& partition, double gamma_D, double eps)>;

// Theta = (gamma_D/2) (ln rho - ln(rho_1 (x) ... (x) rho_N))
inline ComplexMatrix theta_log_ratio(const ComplexMatrix& rho, const Dims& partition, double gamma_D, double eps) {
    if (gamma_D == 0.0) return ComplexMatrix::Zero(rho.rows(), rho.cols());
    ComplexMatrix prod = ComplexMatrix::Identity(1, 1);
    for (std::size_t s = 0; s < partition.size(); ++s) {
        prod = tensor_product(prod, detail::partial_trace(rho, partition, {s}));
    }
    return (0.5 * gamma_D) * (detail::log_floor(rho, eps) - detail::log_floor(prod, eps));
}

struct DisentanglementConfig {
    double gamma_D = 0.0;
    Dims partition{2, 2};
    double eps = kDefaultLogFloor;
    ThetaStrategy theta = theta_log_ratio;

    void validate() const {
        if (!(gamma_D >= 0.0)) throw ArgumentError("DisentanglementConfig: gamma_D must be >= 0");
        if (!(eps > 0.0)) throw ArgumentError("DisentanglementConfig: eps must be positive");
        if (partition.empty()) throw ArgumentError("DisentanglementConfig: empty partition");
        if (!theta) throw ArgumentError("DisentanglementConfig: no Theta strategy");
    }
};

// ----- Hamiltonians -----

// H = -omega_z S_z/2 + (omega_K (S+S- + S-S+) + omega_A (S+^2 + S-^2))/8
//     + (S+ Omega_T1 e^{i omega_T t} + h.c.)/4
inline ComplexMatrix build_hamiltonian(const DrivenSpinParams& p, double t, const SpinOperatorSet& ops) {
    if (ops.L != p.L) throw ArgumentError("build_hamiltonian: operator set does not match L");
    const ComplexMatrix& sp = ops.s_plus;
    const ComplexMatrix& sm = ops.s_minus;
    ComplexMatrix h = (-0.5 * p.omega_z(t)) * ops.s_z;
    h += (p.omega_K / 8.0) * (sp * sm + sm * sp);
    h += (p.omega_A / 8.0) * (sp * sp + sm * sm);
    const ComplexMatrix drive = (0.25 * p.Omega_T1() * std::polar(1.0, p.omega_T() * t)) * sp;
    h += drive + drive.adjoint();
    return h;
}

inline ComplexMatrix build_hamiltonian(const DrivenSpinParams& p, double t) {
    return build_hamiltonian(p, t, collective_spin_ops(p.L));
}

// Explicit 4x4 form in the basis (uu, ud, du, dd).
inline ComplexMatrix build_two_spin_hamiltonian(const DrivenSpinParams& p, double t) {
    if (p.L != 2) throw ArgumentError("build_two_spin_hamiltonian: requires L = 2");
    const double wz = p.omega_z(t);
    const double wk = p.omega_K;
    const double wa = p.omega_A;
    const cplx wt = 0.5 * p.Omega_T1() * std::polar(1.0, p.omega_T() * t);
    const cplx wtc = std::conj(wt);
    ComplexMatrix h(4, 4);
    h << -wz + wk, wt, wt, wa,
         wtc, wk, wk, wt,
         wtc, wk, wk, wt,
         wa, wtc, wtc, wz + wk;
    return h;
}

inline constexpr double kRwaMargin = 100.0;

// Conditions under which the rotating-frame two-spin form is derived but
// which are only asserted as warnings.
inline std::vector<std::string> rwa_warnings(const DrivenSpinParams& p) {
    std::vector<std::string> w;
    if (std::abs(p.Omega_L1) * kRwaMargin > std::abs(p.omega0)) w.push_back("Omega_L1 is not << omega0");
    if (std::abs(p.omega_A) * kRwaMargin > std::abs(p.omega0)) w.push_back("omega_A is not << omega0");
    return w;
}

// -(omega_A / 2 omega0) [[omega_A,0,0,Omega_L1],[0..],[0..],[Omega_L1,0,0,-omega_A]]
inline ComplexMatrix build_two_spin_rwa(const DrivenSpinParams& p) {
    if (p.L != 2) throw ArgumentError("build_two_spin_rwa: requires L = 2");
    if (p.omega_K != 0.0 || p.Omega_T1_mag != 0.0 || p.omega_d != 0.0 || p.omega_f != 0.0) {
        throw ArgumentError("build_two_spin_rwa: requires omega_K = Omega_T1 = omega_d = omega_f = 0");
    }
    if (p.omega0 == 0.0) throw ArgumentError("build_two_spin_rwa: omega0 must be nonzero");
    const double s = -p.omega_A / (2.0 * p.omega0);
    ComplexMatrix h = ComplexMatrix::Zero(4, 4);
    h(0, 0) = s * p.omega_A;
    h(3, 3) = -s * p.omega_A;
    h(0, 3) = h(3, 0) = s * p.Omega_L1;
    return h;
}

// ----- dissipation -----

struct CollapseOperator {
    ComplexMatrix op;
    ComplexMatrix op_dag;
    ComplexMatrix op_dag_op;
};

// Per spin: |u><d| with rate Gamma1 (n0+1), |d><u| with rate Gamma1 n0,
// dephasing sqrt(Gamma_phi/2) sigma_z.
inline std::vector<CollapseOperator> collapse_operators(const DissipationParams& d, std::size_t L) {
    std::vector<CollapseOperator> out;
    auto add = [&](double rate, const ComplexMatrix& single, std::size_t site) {
        if (rate <= 0.0) return;
        const ComplexMatrix c = std::sqrt(rate) * embed(single, site, L);
        out.push_back({c, c.adjoint(), c.adjoint() * c});
    };
    for (std::size_t l = 0; l < L; ++l) {
        add(d.Gamma1 * (d.n0 + 1.0), pauli::up_from_down(), l);
        add(d.Gamma1 * d.n0, pauli::down_from_up(), l);
        add(0.5 * d.Gamma_phi, pauli::z(), l);
    }
    return out;
}

inline ComplexMatrix apply_dissipator(const ComplexMatrix& rho, const std::vector<CollapseOperator>& cs) {
    ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
    for (const auto& c : cs) {
        out += c.op * rho * c.op_dag;
        out -= 0.5 * (c.op_dag_op * rho + rho * c.op_dag_op);
    }
    return out;
}

inline ComplexMatrix lindblad_dissipator(const DensityMatrix& rho, const DissipationParams& d, const SpinOperatorSet& ops) {
    if (rho.dim() != ops.dim()) throw ArgumentError("lindblad_dissipator: dimension mismatch");
    return apply_dissipator(rho.matrix(), collapse_operators(d, ops.L));
}

// ----- disentanglement -----

inline void check_partition(const ComplexMatrix& rho, const Dims& partition) {
    if (product(partition) != static_cast<std::size_t>(rho.rows())) {
        throw ArgumentError("disentanglement_term: partition does not match state dimension");
    }
}

// -Theta rho - rho Theta + 2 <Theta> rho
inline ComplexMatrix disentanglement_from_theta(const ComplexMatrix& rho, const ComplexMatrix& theta) {
    const double mean = (theta * rho).trace().real();
    return -(theta * rho) - rho * theta + (2.0 * mean) * rho;
}

inline ComplexMatrix disentanglement_term(const ComplexMatrix& rho, const DisentanglementConfig& cfg) {
    check_partition(rho, cfg.partition);
    if (cfg.gamma_D == 0.0) return ComplexMatrix::Zero(rho.rows(), rho.cols());
    return disentanglement_from_theta(rho, cfg.theta(rho, cfg.partition, cfg.gamma_D, cfg.eps));
}

inline ComplexMatrix disentanglement_term(const DensityMatrix& rho, const DisentanglementConfig& cfg) {
    if (rho.dims() != cfg.partition) throw ArgumentError("disentanglement_term: partition mismatch");
    return disentanglement_term(rho.matrix(), cfg);
}

// ----- master equation -----

enum class Frame { full, rwa };

inline const char* to_string(Frame f) { return f == Frame::full ? "full" : "rwa"; }

class MasterEquation {
public:
    MasterEquation(DrivenSpinParams p, DissipationParams d, DisentanglementConfig cfg, Frame frame = Frame::full)
        : p_(std::move(p)), d_(d), cfg_(std::move(cfg)), frame_(frame), ops_(collective_spin_ops(p_.L)) {
        p_.validate();
        d_.validate();
        cfg_.validate();
        if (product(cfg_.partition) != ops_.dim()) {
            throw ArgumentError("MasterEquation: partition does not match 2^L");
        }
        collapse_ = collapse_operators(d_, p_.L);
        if (frame_ == Frame::rwa) rwa_h_ = build_two_spin_rwa(p_);
    }

    ComplexMatrix hamiltonian(double t) const {
        if (frame_ == Frame::rwa) return rwa_h_;
        if (p_.L == 2) return build_two_spin_hamiltonian(p_, t);
        return build_hamiltonian(p_, t, ops_);
    }

    ComplexMatrix unitary_part(const ComplexMatrix& rho, double t) const {
        const ComplexMatrix h = hamiltonian(t);
        return cplx(0.0, 1.0) * (rho * h - h * rho);
    }

    ComplexMatrix dissipative_part(const ComplexMatrix& rho) const { return apply_dissipator(rho, collapse_); }

    ComplexMatrix disentangling_part(const ComplexMatrix& rho) const { return disentanglement_term(rho, cfg_); }

    ComplexMatrix operator()(double t, const ComplexMatrix& rho) const {
        return unitary_part(rho, t) + dissipative_part(rho) + disentangling_part(rho);
    }

    const DrivenSpinParams& params() const { return p_; }
    const DissipationParams& dissipation() const { return d_; }
    const DisentanglementConfig& disentanglement() const { return cfg_; }
    const SpinOperatorSet& ops() const { return ops_; }
    Frame frame() const { return frame_; }

private:
    DrivenSpinParams p_;
    DissipationParams d_;
    DisentanglementConfig cfg_;
    Frame frame_;
    SpinOperatorSet ops_;
    std::vector<CollapseOperator> collapse_;
    ComplexMatrix rwa_h_;
};

inline ComplexMatrix mme_rhs(const DensityMatrix& rho, double t, const DrivenSpinParams& p, const DissipationParams& d,
                             const DisentanglementConfig& cfg, Frame frame = Frame::full) {
    if (rho.dims() != cfg.partition) throw ArgumentError("mme_rhs: state dims do not match partition");
    return MasterEquation(p, d, cfg, frame)(t, rho.matrix());
}

// ----- evolution -----

using Magnetization = std::array<double, 3>;

struct EvolveOptions {
    std::size_t sample_every = 10;  // steps between stored samples
    bool store_states = false;
    double negativity_limit = -1e-6;
};

struct IntegrationDiagnostics {
    double max_trace_drift = 0.0;       // |Tr rho - 1| after a step, before renormalization
    double max_hermiticity_error = 0.0; // before re-Hermitization
    double min_eigenvalue = 1.0;
    double max_disentanglement_trace = 0.0;  // at samples
    std::size_t steps = 0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Magnetization> magnetization;
    std::vector<double> purity;
    std::vector<ComplexMatrix> states;  // only when requested
    std::optional<DensityMatrix> final_state;
    cplx final_s_plus{0.0, 0.0};        // <S+> in the frame rotating at omega_T
    IntegrationDiagnostics diagnostics;
};

inline double default_dt(const DissipationParams& d, const DisentanglementConfig& cfg) {
    double m = std::min(d.T1(), d.T2());
    if (cfg.gamma_D > 0.0) m = std::min(m, 1.0 / cfg.gamma_D);
    if (!std::isfinite(m)) throw ArgumentError("default_dt: no finite time scale");
    return m / 200.0;
}

inline Magnetization magnetization(const ComplexMatrix& rho, const SpinOperatorSet& ops) {
    return {(rho * ops.s_x).trace().real(), (rho * ops.s_y).trace().real(), (rho * ops.s_z).trace().real()};
}

inline Trajectory evolve(const MasterEquation& eq, const DensityMatrix& rho0, double t_end, double dt,
                         const EvolveOptions& opt = {}) {
    if (!(dt > 0.0)) throw ArgumentError("evolve: dt must be positive");
    if (rho0.dim() != eq.ops().dim()) throw ArgumentError("evolve: initial state dimension mismatch");
    if (opt.sample_every == 0) throw ArgumentError("evolve: sample_every must be >= 1");

    Trajectory tr;
    auto& diag = tr.diagnostics;
    const std::size_t n = step_count(t_end, dt);
    auto record = [&](double t, const ComplexMatrix& rho) {
        tr.times.push_back(t);
        tr.magnetization.push_back(magnetization(rho, eq.ops()));
        tr.purity.push_back((rho * rho).trace().real());
        if (opt.store_states) tr.states.push_back(rho);
        const double dtr = std::abs(eq.disentangling_part(rho).trace());
        diag.max_disentanglement_trace = std::max(diag.max_disentanglement_trace, dtr);
    };

    ComplexMatrix rho = rho0.matrix();
    record(0.0, rho);
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double h = std::min(dt, t_end - t);
        rho = rk4_step(eq, t, rho, h);
        t = (i + 1 == n) ? t_end : t + h;

        diag.max_hermiticity_error = std::max(diag.max_hermiticity_error, hermiticity_residual(rho));
        rho = 0.5 * (rho + rho.adjoint()).eval();
        const double tr_val = rho.trace().real();
        diag.max_trace_drift = std::max(diag.max_trace_drift, std::abs(tr_val - 1.0));
        if (!std::isfinite(tr_val) || !rho.allFinite()) {
            throw IntegrationError("evolve: state became non-finite at t=" + std::to_string(t) + "; reduce dt");
        }
        rho /= tr_val;
        const double lmin = detail::eig_unchecked(rho).values.minCoeff();
        diag.min_eigenvalue = std::min(diag.min_eigenvalue, lmin);
        if (lmin < opt.negativity_limit) {
            throw IntegrationError("evolve: density matrix lost positivity (min eigenvalue " + std::to_string(lmin) +
                                   ") at t=" + std::to_string(t) + "; reduce dt");
        }
        ++diag.steps;
        if ((i + 1) % opt.sample_every == 0 || i + 1 == n) record(t, rho);
    }
    const Dims dims = eq.disentanglement().partition;
    tr.final_state.emplace(rho, dims, DensityMatrix::Unchecked{});
    cplx sp = (rho * eq.ops().s_plus).trace();
    if (eq.frame() == Frame::full) sp *= std::polar(1.0, eq.params().omega_T() * t);
    tr.final_s_plus = sp;
    return tr;
}

inline Trajectory evolve(const DensityMatrix& rho0, const DrivenSpinParams& p, const DissipationParams& d,
                         const DisentanglementConfig& cfg, double t_end, double dt, Frame frame = Frame::full,
                         const EvolveOptions& opt = {}) {
    return evolve(MasterEquation(p, d, cfg, frame), rho0, t_end, dt, opt);
}

// ----- attractors -----

struct BlochDirection {
    double theta = 0.5 * M_PI;  // polar angle from +z
    double phi = 0.0;           // azimuth; arg <S+> of the resulting state
};

inline std::vector<BlochDirection> equator_grid(std::size_t n) {
    std::vector<BlochDirection> g;
    for (std::size_t k = 0; k < n; ++k) g.push_back({0.5 * M_PI, 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n)});
    return g;
}

// All L spins pointing along `dir`.
inline DensityMatrix aligned_product_state(const BlochDirection& dir, std::size_t L) {
    ComplexVector single(2);
    single << std::cos(0.5 * dir.theta), std::polar(std::sin(0.5 * dir.theta), dir.phi);
    ComplexVector psi = ComplexVector::Ones(1);
    for (std::size_t l = 0; l < L; ++l) {
        ComplexVector next(psi.size() * 2);
        for (Eigen::Index i = 0; i < psi.size(); ++i) next.segment(2 * i, 2) = psi(i) * single;
        psi = next;
    }
    return DensityMatrix::pure(psi, Dims(L, 2));
}

struct Attractor {
    Magnetization k{};
    double phase = 0.0;  // arg <S+> in the rotating frame
    double purity = 0.0;
    std::size_t basin_size = 0;
    DensityMatrix state = DensityMatrix::maximally_mixed({2});
};

struct AttractorReport {
    std::vector<Attractor> attractors;
    std::vector<int> basin_labels;        // per initial state
    std::vector<bool> converged;          // per initial state
    std::vector<Magnetization> endpoints; // per initial state
    std::vector<double> endpoint_phases;
    IntegrationDiagnostics diagnostics;   // worst case over all runs
};

struct AttractorOptions {
    double cluster_threshold_per_spin = 0.05;
    double convergence_tol = 1e-3;  // max drift of <S> over the last 10% of the run
    std::size_t threads = 1;
};

inline double distance(const Magnetization& a, const Magnetization& b) {
    return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

inline void merge_diagnostics(IntegrationDiagnostics& into, const IntegrationDiagnostics& d) {
    into.max_trace_drift = std::max(into.max_trace_drift, d.max_trace_drift);
    into.max_hermiticity_error = std::max(into.max_hermiticity_error, d.max_hermiticity_error);
    into.min_eigenvalue = std::min(into.min_eigenvalue, d.min_eigenvalue);
    into.max_disentanglement_trace = std::max(into.max_disentanglement_trace, d.max_disentanglement_trace);
    into.steps += d.steps;
}

inline AttractorReport find_attractors(const MasterEquation& eq, const std::vector<BlochDirection>& grid, double t_end,
                                       double dt, const AttractorOptions& opt = {}) {
    if (grid.empty()) throw ArgumentError("find_attractors: empty initial grid");
    const std::size_t L = eq.params().L;
    EvolveOptions eopt;
    eopt.sample_every = std::max<std::size_t>(1, step_count(t_end, dt) / 200);

    std::vector<Trajectory> runs(grid.size());
    parallel_for(grid.size(), opt.threads, [&](std::size_t i) {
        runs[i] = evolve(eq, aligned_product_state(grid[i], L), t_end, dt, eopt);
    });

    AttractorReport rep;
    const double threshold = opt.cluster_threshold_per_spin * static_cast<double>(L);
    for (const auto& tr : runs) {
        merge_diagnostics(rep.diagnostics, tr.diagnostics);
        const Magnetization& end = tr.magnetization.back();
        const double t_tail = tr.times.back() * 0.9;
        double drift = 0.0;
        for (std::size_t s = 0; s < tr.times.size(); ++s) {
            if (tr.times[s] >= t_tail) drift = std::max(drift, distance(tr.magnetization[s], end));
        }
        rep.converged.push_back(drift <= opt.convergence_tol);
        rep.endpoints.push_back(end);
        rep.endpoint_phases.push_back(std::arg(tr.final_s_plus));

        int label = -1;
        for (std::size_t a = 0; a < rep.attractors.size(); ++a) {
            if (distance(rep.attractors[a].k, end) < threshold) {
                label = static_cast<int>(a);
                break;
            }
        }
        if (label < 0) {
            Attractor at;
            at.k = end;
            at.phase = std::arg(tr.final_s_plus);
            at.purity = tr.purity.back();
            at.state = *tr.final_state;
            rep.attractors.push_back(std::move(at));
            label = static_cast<int>(rep.attractors.size() - 1);
        }
        ++rep.attractors[static_cast<std::size_t>(label)].basin_size;
        rep.basin_labels.push_back(label);
    }
    return rep;
}

// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * M_PI);
    return a <= -M_PI ? a + 2.0 * M_PI : a;
}

} // namespace spinres
