#include "oracles.hpp"
#include "spinres/rapid_disent.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace spinres;
using namespace spinres::rd;

namespace {

RdDimensionless dims(double alpha, double delta, double D, double W, double phi_T = 0.0, double t1_over_t2 = 1.0) {
    auto d = RdDimensionless::make(alpha, delta, D, W);
    d.phi_T = phi_T;
    d.t1_over_t2 = t1_over_t2;
    return d;
}

// F(z) written directly from the steady-state relation.
double F_direct(double alpha, double delta, double D, double W, double z) {
    const double e = delta - 4.0 * std::sqrt(D) * z;
    return z * (alpha + e * e + 2.0 * W) - alpha - e * e;
}

std::size_t scan_root_count(double alpha, double delta, double D, double W) {
    return oracle::sign_scan([&](double z) { return F_direct(alpha, delta, D, W, z); }, 1e-9, 1.0, 20000).size();
}

RdState state_at_root(const RdRoot& r, double scale = 1.0) {
    RdState P;
    P << cplx(r.fixed_point[0], r.fixed_point[1]) * scale, cplx(r.fixed_point[0], -r.fixed_point[1]) * scale,
        cplx(r.z, 0.0);
    return P;
}

// Reduced real flow (px, py, z) with time in units of T2 and P_z0 = 1.
Eigen::Vector3d reduced_flow(const RdRaw& raw, const Eigen::Vector3d& x) {
    RdState P;
    P << cplx(x(0), x(1)), cplx(x(0), -x(1)), cplx(x(2), 0.0);
    const RdState dP = rd_rhs(P, 0.0, raw) * raw.T2;
    return {dP(0).real(), dP(0).imag(), dP(2).real()};
}

} // namespace

// ----- parameters -----

TEST(Dimensionless, NoLongitudinalPumpGivesUnitAlpha) {
    RdRaw raw;
    raw.omega_K = 2.0;
    raw.omega_A = 0.5;
    raw.W_T1_mag = 0.3;
    EXPECT_DOUBLE_EQ(derive_dimensionless(raw).alpha, 1.0);
}

TEST(Dimensionless, NoTransverseDriveGivesZeroW) {
    RdRaw raw;
    raw.omega_K = 2.0;
    raw.omega_A = 0.5;
    raw.Omega_L1 = 0.7;
    EXPECT_DOUBLE_EQ(derive_dimensionless(raw).W, 0.0);
}

TEST(Dimensionless, RhoFactorClosedForm) {
    EXPECT_NEAR(rho_factor(0.6, 1.0), 1.0 / std::sqrt(1.0 - 0.36), 1e-15);
    EXPECT_NEAR(rho_factor(0.6, 1.0), 1.25, 1e-14);
    EXPECT_DOUBLE_EQ(rho_factor(0.0, 0.0), 1.0);
}

TEST(Dimensionless, DefinitionsFromRawRates) {
    RdRaw raw;
    raw.omega0 = 3.0;
    raw.omega_K = 2.0;
    raw.omega_A = 0.8;
    raw.omega_d = 0.25;
    raw.Omega_L1 = 0.9;
    raw.W_T1_mag = 0.4;
    raw.phi_T = 0.3;
    raw.T1 = 1.7;
    raw.T2 = 1.1;
    raw.P_z0 = 0.9;
    const double r = 0.4, rho = 1.0 / std::sqrt(1.0 - r * r);
    const double WA = 0.5 * rho * r * 0.9, WK = 2.0 / rho, Wd = 3.25 - rho * 3.0;
    const auto d = derive_dimensionless(raw);
    EXPECT_NEAR(d.alpha, 1.0 - WA * WA * 1.21, 1e-14);
    EXPECT_NEAR(d.delta, Wd * 1.1, 1e-14);
    EXPECT_NEAR(d.D, std::pow(WK * 1.1 * 0.9 / 4.0, 2), 1e-14);
    EXPECT_NEAR(d.W, 0.5 * rho * 0.16 * 1.7 * 1.1 * (1.0 + WA * 1.1 * std::sin(0.6)), 1e-14);
    EXPECT_NEAR(W_first_order(raw), d.W / rho, 1e-14);
}

TEST(Dimensionless, RejectsStrongAnisotropy) {
    RdRaw raw;
    raw.omega_K = 1.0;
    raw.omega_A = 1.0;
    EXPECT_THROW(derive_dimensionless(raw), ArgumentError);
}

TEST(Dimensionless, RawRoundTrip) {
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const auto d = dims(0.2 + 0.8 * u(g), 4.0 * u(g) - 2.0, 0.1 + 2.0 * u(g), 2.0 * u(g), 6.0 * u(g), 0.5 + 2.0 * u(g));
        const auto back = derive_dimensionless(raw_from_dimensionless(d, 0.2 + 0.6 * u(g), 0.5 + u(g)));
        EXPECT_NEAR(back.alpha, d.alpha, 1e-12);
        EXPECT_NEAR(back.delta, d.delta, 1e-12);
        EXPECT_NEAR(back.D, d.D, 1e-12);
        EXPECT_NEAR(back.W, d.W, 1e-12);
        EXPECT_NEAR(back.t1_over_t2, d.t1_over_t2, 1e-12);
    }
}

// ----- equations of motion -----

TEST(RdRhs, EquilibriumWithoutDrive) {
    RdRaw raw;
    raw.omega_K = 1.0;
    raw.omega_A = 0.3;
    raw.Omega_L1 = 0.5;
    raw.P_z0 = 0.8;
    RdState P;
    P << 0.0, 0.0, 0.8;
    EXPECT_LT(rd_rhs(P, 0.7, raw).norm(), 1e-15);
}

TEST(RdRhs, PiShiftEquivariance) {
    std::mt19937_64 g(6);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        RdRaw raw;
        raw.omega0 = u(g);
        raw.omega_K = 2.0 + u(g);
        raw.omega_A = u(g);
        raw.omega_d = u(g);
        raw.omega_f = u(g);
        raw.Omega_L1 = u(g);
        raw.W_T1_mag = std::abs(u(g));
        raw.phi_T = 3.0 * u(g);
        RdState P;
        P << cplx(u(g), u(g)), cplx(u(g), u(g)), u(g);
        const double t = 5.0 * u(g);
        RdRaw shifted = raw;
        shifted.phi_T += M_PI;
        RdState Q = P;
        Q(0) = -P(0);
        Q(1) = -P(1);
        const RdState a = rd_rhs(P, t, raw), b = rd_rhs(Q, t, shifted);
        EXPECT_LT(std::abs(a(0) + b(0)) + std::abs(a(1) + b(1)) + std::abs(a(2) - b(2)), 1e-12);
    }
}

TEST(RdRhs, MagnonCreationRate) {
    std::mt19937_64 g(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        RdRaw raw;
        raw.omega0 = u(g);
        raw.omega_K = 2.0;
        raw.omega_A = u(g);
        raw.omega_d = u(g);
        raw.Omega_L1 = 2.0 * u(g);
        raw.T2 = 1.0 + u(g) * 0.5;
        const cplx pp(u(g), u(g));
        RdState P;
        P << pp, std::conj(pp), u(g);
        const RdState dP = rd_rhs(P, 0.0, raw);
        const double N = std::norm(pp);
        const double dN = (dP(0) * P(1) + P(0) * dP(1)).real();
        EXPECT_NEAR(dN, 2.0 * (raw.W_A() * std::sin(2.0 * std::arg(pp)) - 1.0 / raw.T2) * N, 1e-12);
    }
}

TEST(RdRhs, JacobianMatchesFiniteDifference) {
    std::mt19937_64 g(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const auto d = dims(0.3 + 0.7 * u(g), 4.0 * u(g) - 2.0, 0.1 + 2.0 * u(g), 0.1 + 2.0 * u(g), 6.0 * u(g), 0.5 + 2.0 * u(g));
        const RdRaw raw = raw_from_dimensionless(d, 0.4);
        const auto dd = derive_dimensionless(raw);
        const Eigen::Vector3d x(0.3 * u(g), 0.3 * u(g), u(g));
        Eigen::Matrix3d fd;
        for (int c = 0; c < 3; ++c) {
            Eigen::Vector3d h = Eigen::Vector3d::Zero();
            h(c) = 1e-6;
            fd.col(c) = (reduced_flow(raw, x + h) - reduced_flow(raw, x - h)) / 2e-6;
        }
        EXPECT_LT((fd - reduced_jacobian(dd, {x(0), x(1), x(2)})).cwiseAbs().maxCoeff(), 1e-7);
    }
}

TEST(IntegrateRd, RelaxesToEquilibriumBelowPumpThreshold) {
    RdRaw raw;
    raw.omega_K = 1.0;
    raw.omega_A = 0.3;
    raw.Omega_L1 = 2.0;
    raw.omega_d = 0.4;
    ASSERT_LT(raw.W_A() * raw.T2, 1.0);
    RdState P;
    P << cplx(0.2, 0.1), cplx(0.2, -0.1), 0.5;
    const auto tr = integrate_rd(P, raw, 60.0, 0.01, 100);
    EXPECT_FALSE(tr.diverged);
    EXPECT_LT(std::abs(tr.final_state(0)) + std::abs(tr.final_state(1)) + std::abs(tr.final_state(2) - 1.0), 1e-10);
}

TEST(IntegrateRd, MonostableEndpointMatchesUniqueRoot) {
    const auto d = dims(0.8, 0.0, 0.4, 1.0);
    const auto ss = steady_state_z(d);
    ASSERT_EQ(ss.roots.size(), 1u);
    const RdRaw raw = raw_from_dimensionless(d);
    RdState P;
    P << 0.0, 0.0, 1.0;
    const auto tr = integrate_rd(P, raw, 200.0, 0.01, 1000);
    EXPECT_NEAR(tr.final_state(2).real(), ss.roots[0].z, 1e-4);
}

TEST(IntegrateRd, BistableInitialConditionsReachBothStableRoots) {
    const auto folds = fold_deltas(1.0, 1.6, 2.0);
    ASSERT_EQ(folds.size(), 2u);
    const auto d = dims(1.0, 0.5 * (folds[0] + folds[1]), 1.6, 2.0);
    const auto ss = steady_state_z(d);
    ASSERT_EQ(ss.roots.size(), 3u);
    ASSERT_EQ(ss.stable_count(), 2u);
    const RdRaw raw = raw_from_dimensionless(d);
    for (std::size_t k : {0u, 2u}) {
        const auto tr = integrate_rd(state_at_root(ss.roots[k], 1.05), raw, 300.0, 0.01, 1000);
        EXPECT_NEAR(tr.final_state(2).real(), ss.roots[k].z, 1e-4);
    }
}

TEST(IntegrateRd, DivergenceAboveThresholdIsReportedNotThrown) {
    RdRaw raw;
    raw.omega_K = 1.0;
    raw.omega_A = 0.5;
    raw.Omega_L1 = 10.0;
    ASSERT_GT(raw.W_A() * raw.T2, 1.0);
    RdState P;
    P << cplx(1e-3, 0.0), cplx(1e-3, 0.0), 1.0;
    RdTrajectory tr;
    ASSERT_NO_THROW(tr = integrate_rd(P, raw, 100.0, 0.01));
    EXPECT_TRUE(tr.diverged);
    EXPECT_GT(tr.diverged_at, 0.0);
}

// ----- steady state -----

TEST(SteadyState, NoDriveGivesFullPolarization) {
    const auto ss = steady_state_z(dims(0.7, 1.3, 0.5, 0.0));
    ASSERT_EQ(ss.roots.size(), 1u);
    EXPECT_NEAR(ss.roots[0].z, 1.0, 1e-12);
    EXPECT_TRUE(ss.roots[0].stable);
}

TEST(SteadyState, OnsetIsTripleRoot) {
    const auto ss = steady_state_z(dims(0.8, std::sqrt(0.8), 0.8, 0.8));
    ASSERT_FALSE(ss.roots.empty());
    for (const auto& r : ss.roots) EXPECT_NEAR(r.z, 0.5, 1e-4);
    const auto k = cubic_coefficients(dims(0.8, std::sqrt(0.8), 0.8, 0.8));
    EXPECT_NEAR(poly3(k, 0.5), 0.0, 1e-12);
    EXPECT_NEAR(3 * k[0] * 0.25 + 2 * k[1] * 0.5 + k[2], 0.0, 1e-12);
}

TEST(SteadyState, DetuningSweepRootCountMatchesSignScan) {
    const double alpha = 0.8, D = 1.6, W = 2.0;
    std::vector<std::size_t> counts;
    for (double delta = -2.0; delta <= 6.0; delta += 0.01) {
        const auto ss = steady_state_z(dims(alpha, delta, D, W));
        EXPECT_EQ(ss.roots.size(), scan_root_count(alpha, delta, D, W)) << "delta=" << delta;
        if (counts.empty() || counts.back() != ss.roots.size()) counts.push_back(ss.roots.size());
    }
    EXPECT_EQ(counts, (std::vector<std::size_t>{1, 3, 1}));
}

TEST(SteadyState, RootsSatisfyCubic) {
    std::mt19937_64 g(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 500; ++rep) {
        const double alpha = 2.0 * u(g) - 1.0, delta = 8.0 * u(g) - 3.0, D = 3.0 * u(g), W = 3.0 * u(g);
        for (const auto& r : steady_state_z(dims(alpha, delta, D, W)).roots) {
            EXPECT_LT(std::abs(F_direct(alpha, delta, D, W, r.z)), 1e-9);
            EXPECT_GT(r.z, 0.0);
            EXPECT_LE(r.z, 1.0);
        }
    }
}

TEST(SteadyState, MiddleRootAlwaysUnstable) {
    std::mt19937_64 g(10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int three = 0;
    for (int rep = 0; rep < 20000 && three < 300; ++rep) {
        const auto d = dims(0.05 + 0.95 * u(g), 8.0 * u(g) - 2.0, 4.0 * u(g), 3.0 * u(g), 6.3 * u(g), 0.5 + 2.0 * u(g));
        const auto ss = steady_state_z(d);
        if (ss.roots.size() != 3) continue;
        ++three;
        EXPECT_FALSE(ss.roots[1].stable);
        EXPECT_GT(ss.roots[1].max_real_eigenvalue, 0.0);
    }
    EXPECT_GT(three, 100);
}

TEST(SteadyState, OuterRootsStableWithoutPump) {
    std::mt19937_64 g(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int three = 0;
    for (int rep = 0; rep < 20000 && three < 300; ++rep) {
        const auto d = dims(1.0, 8.0 * u(g) - 2.0, 4.0 * u(g), 3.0 * u(g), 6.3 * u(g), 0.5 + 2.0 * u(g));
        const auto ss = steady_state_z(d);
        EXPECT_GE(ss.stable_count(), 1u);
        EXPECT_LE(ss.stable_count(), 2u);
        if (ss.roots.size() != 3) continue;
        ++three;
        EXPECT_TRUE(ss.roots[0].stable);
        EXPECT_TRUE(ss.roots[2].stable);
        EXPECT_EQ(ss.stable_count(), 2u);
    }
    EXPECT_GT(three, 100);
}

TEST(SteadyState, PiShiftFlipsTransverseComponents) {
    const auto a = steady_state_z(dims(0.7, 1.0, 1.6, 0.9, 0.4, 1.5));
    const auto b = steady_state_z(dims(0.7, 1.0, 1.6, 0.9, 0.4 + M_PI, 1.5));
    ASSERT_EQ(a.roots.size(), b.roots.size());
    for (std::size_t k = 0; k < a.roots.size(); ++k) {
        EXPECT_NEAR(a.roots[k].z, b.roots[k].z, 1e-14);
        EXPECT_EQ(a.roots[k].stable, b.roots[k].stable);
        EXPECT_NEAR(a.roots[k].fixed_point[0], -b.roots[k].fixed_point[0], 1e-12);
        EXPECT_NEAR(a.roots[k].fixed_point[1], -b.roots[k].fixed_point[1], 1e-12);
    }
}

TEST(SteadyState, FixedPointIsStationary) {
    std::mt19937_64 g(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const auto d = dims(0.3 + 0.7 * u(g), 4.0 * u(g) - 1.0, 0.2 + 2.0 * u(g), 0.1 + 2.0 * u(g), 6.3 * u(g), 0.5 + 2.0 * u(g));
        const RdRaw raw = raw_from_dimensionless(d, 0.35);
        for (const auto& r : steady_state_z(derive_dimensionless(raw)).roots) {
            EXPECT_LT(rd_rhs(state_at_root(r), 0.0, raw).norm(), 1e-10);
        }
    }
}

// ----- peak points -----

TEST(PeakPoint, NoDrive) {
    const auto pp = peak_point(0.6, 0.9, 0.0);
    ASSERT_TRUE(pp);
    EXPECT_DOUBLE_EQ(pp->z, 1.0);
    EXPECT_NEAR(pp->delta, 4.0 * std::sqrt(0.9), 1e-15);
}

TEST(PeakPoint, HalfAlphaDrive) {
    const auto pp = peak_point(0.6, 0.9, 0.3);
    ASSERT_TRUE(pp);
    EXPECT_NEAR(pp->z, 0.5, 1e-15);
    EXPECT_NEAR(pp->delta, 2.0 * std::sqrt(0.9), 1e-15);
}

TEST(PeakPoint, NoPeakAboveThreshold) {
    EXPECT_FALSE(peak_point(0.0, 1.0, 1.0));
    EXPECT_FALSE(peak_point(-0.2, 1.0, 1.0));
}

TEST(PeakPoint, ExtremumOfTheResponse) {
    const double alpha = 0.9, D = 0.05, W = 0.4;
    const auto pp = peak_point(alpha, D, W);
    ASSERT_TRUE(pp);
    EXPECT_LT(std::abs(F_direct(alpha, pp->delta, D, W, pp->z)), 1e-9);
    auto z_of = [&](double delta) {
        const auto ss = steady_state_z(dims(alpha, delta, D, W));
        EXPECT_EQ(ss.roots.size(), 1u);
        return ss.roots.front().z;
    };
    const double h = 1e-4;
    EXPECT_NEAR(z_of(pp->delta), pp->z, 1e-12);
    EXPECT_LT(std::abs(z_of(pp->delta + h) - z_of(pp->delta - h)) / (2.0 * h), 1e-6);
}

// ----- onset -----

TEST(Onset, MergedPointAtAlphaEqualsD) {
    const auto pts = bistability_onset(0.8, 0.8);
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_NEAR(pts[0].z, 0.5, 1e-9);
    EXPECT_NEAR(pts[0].delta, std::sqrt(0.8), 1e-9);
    EXPECT_NEAR(pts[0].W, 0.8, 1e-9);
}

TEST(Onset, ExcludedAboveUnitRatio) {
    EXPECT_TRUE(bistability_onset(1.2, 0.8).empty());
    EXPECT_TRUE(bistability_onset(1.5, 1.0).empty());
}

TEST(Onset, TwoPointsAreTripleRoots) {
    const auto pts = bistability_onset(0.8, 1.6);
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_LT(pts[0].W, pts[1].W);
    for (const auto& p : pts) {
        const auto k = cubic_coefficients(dims(0.8, p.delta, 1.6, p.W));
        const double f = poly3(k, p.z), f1 = 3 * k[0] * p.z * p.z + 2 * k[1] * p.z + k[2], f2 = 6 * k[0] * p.z + 2 * k[1];
        EXPECT_LT(std::abs(f), 1e-8);
        EXPECT_LT(std::abs(f1), 1e-8);
        EXPECT_LT(std::abs(f2), 1e-8);
        EXPECT_GT(p.z, 0.0);
        EXPECT_LE(p.z, 1.0);
    }
}

TEST(Onset, DriveWindowBracketsThreeRootRegion) {
    const double alpha = 0.8, D = 1.6;
    const auto pts = bistability_onset(alpha, D);
    ASSERT_EQ(pts.size(), 2u);
    auto has_three = [&](double W) {
        for (double delta = -3.0; delta <= 8.0; delta += 2e-4) {
            if (steady_state_z(dims(alpha, delta, D, W)).roots.size() == 3) return true;
        }
        return false;
    };
    for (double f : {0.5, 0.9}) EXPECT_FALSE(has_three(pts[0].W * f));
    for (double f : {1.1, 1.3}) EXPECT_FALSE(has_three(pts[1].W * f));
    for (double t : {0.1, 0.5, 0.9}) EXPECT_TRUE(has_three(pts[0].W + t * (pts[1].W - pts[0].W)));
}

TEST(Onset, NegativeAlphaSinglePoint) {
    const auto pts = bistability_onset(-0.5, 1.0);
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_GT(pts[0].z, 0.0);
    EXPECT_LT(pts[0].z, 1.0);
}

TEST(Onset, FoldsBracketThreeRootWindow) {
    const double alpha = 0.8, D = 1.6, W = 2.0;
    const auto folds = fold_deltas(alpha, D, W);
    ASSERT_EQ(folds.size(), 2u);
    for (double x : folds) {
        EXPECT_EQ(steady_state_z(dims(alpha, x - 1e-6, D, W)).roots.size() +
                      steady_state_z(dims(alpha, x + 1e-6, D, W)).roots.size(),
                  4u);
    }
    EXPECT_EQ(steady_state_z(dims(alpha, 0.5 * (folds[0] + folds[1]), D, W)).roots.size(), 3u);
    EXPECT_TRUE(fold_deltas(alpha, D, 0.1).empty());
}

TEST(InferD, RecoversMergedOnset) {
    EXPECT_NEAR(infer_D_from_onset(std::sqrt(0.8), 0.8, 0.8), 0.8, 1e-8);
    EXPECT_NEAR(infer_D_from_onset(std::nullopt, 0.8, 0.8), 0.8, 1e-8);
}

TEST(InferD, RandomRoundTrip) {
    std::mt19937_64 g(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const double alpha = 0.1 + 0.9 * u(g), D = alpha * (1.0 + 20.0 * u(g));
        const auto p = lower_onset(alpha, D);
        ASSERT_TRUE(p);
        const double back = infer_D_from_onset(p->delta, p->W, alpha);
        EXPECT_NEAR(back, D, 1e-8 * std::max(1.0, D));
        EXPECT_NEAR(lower_onset(alpha, back)->W, p->W, 1e-8);
    }
}

TEST(InferD, InconsistentOnsetIsFitError) {
    EXPECT_THROW(infer_D_from_onset(0.3, 1.5, 0.8), FitError);
    EXPECT_THROW(infer_D_from_onset(std::nullopt, 2.0, 0.8), FitError);
    EXPECT_THROW(infer_D_from_onset(std::nullopt, 0.5, -0.1), FitError);
}

// ----- linear structure and gain -----

TEST(DampingEigenvalues, NoPump) {
    RdRaw raw;
    raw.omega_K = 1.0;
    raw.T1 = 2.0;
    raw.T2 = 0.5;
    const auto ev = effective_damping_eigenvalues(raw);
    EXPECT_DOUBLE_EQ(ev[0], -2.0);
    EXPECT_DOUBLE_EQ(ev[1], -2.0);
    EXPECT_DOUBLE_EQ(ev[2], -0.5);
}

TEST(DampingEigenvalues, MatchNumericEigenvalues) {
    std::mt19937_64 g(14);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        RdRaw raw;
        raw.omega_K = 1.0 + u(g);
        raw.omega_A = 0.9 * u(g) * raw.omega_K;
        raw.Omega_L1 = 3.0 * u(g);
        raw.W_T1_mag = u(g);
        raw.phi_T = 6.0 * u(g);
        raw.T1 = 0.2 + u(g);
        raw.T2 = 0.2 + u(g);
        auto want = effective_damping_eigenvalues(raw);
        Eigen::Vector3d got = m_d_matrix(raw).eigenvalues().real();
        std::sort(want.begin(), want.end());
        std::sort(got.data(), got.data() + 3);
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(got(k), want[k], 1e-10);
    }
}

TEST(DampingEigenvalues, SignChangeAtParametricThreshold) {
    RdRaw raw;
    raw.omega_K = 1.0;
    raw.omega_A = 0.5;
    const double unit = 1.0 / (0.5 * rho_factor(0.5, 1.0) * 0.5);
    raw.Omega_L1 = 0.99 * unit;
    EXPECT_LT(effective_damping_eigenvalues(raw)[1], 0.0);
    raw.Omega_L1 = 1.01 * unit;
    EXPECT_GT(effective_damping_eigenvalues(raw)[1], 0.0);
    raw.omega_f = 0.1;
    EXPECT_THROW(effective_damping_eigenvalues(raw), ArgumentError);
}

TEST(MtEigenvalues, ClosedFormCases) {
    const double D = 0.7, z = 0.4;
    const double delta = 4.0 * std::sqrt(D) * z;
    auto a = m_t_eigenvalues(dims(1.0, delta, D, 0.0), z);
    EXPECT_NEAR(std::abs(a[0] + 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(a[1] + 1.0), 0.0, 1e-15);
    auto b = m_t_eigenvalues(dims(0.0, delta, D, 0.0), z);
    EXPECT_NEAR(std::abs(b[0]), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(b[1] + 2.0), 0.0, 1e-15);
}

TEST(MtEigenvalues, MatchNumericEigenvalues) {
    std::mt19937_64 g(15);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const auto d = dims(1.5 * u(g) - 0.5, 4.0 * u(g) - 2.0, 2.0 * u(g), 0.0);
        const double z = u(g);
        auto want = m_t_eigenvalues(d, z);
        const Eigen::Vector2cd got = m_t_matrix(d, z).eigenvalues();
        const double direct = std::abs(got(0) - want[0]) + std::abs(got(1) - want[1]);
        const double swapped = std::abs(got(0) - want[1]) + std::abs(got(1) - want[0]);
        EXPECT_LT(std::min(direct, swapped), 1e-10);
    }
}

TEST(Gain, NoPumpIsFlat) {
    const auto d = dims(1.0, 0.4, 0.5, 0.3);
    for (double phi = 0.0; phi < 6.3; phi += 0.1) EXPECT_DOUBLE_EQ(gain_phase(d, 0.6, phi), 1.0);
}

TEST(Gain, ExtremaAndPeriodicity) {
    std::mt19937_64 g(16);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const auto d = dims(0.2 + 0.8 * u(g), 4.0 * u(g) - 2.0, 2.0 * u(g), 0.0);
        const double z = u(g);
        const auto gs = gain_structure(d, z);
        const double mu1 = std::hypot(1.0, d.effective_detuning(z)), eta = d.pump / mu1;
        EXPECT_NEAR(gs.eta, eta, 1e-15);
        double lo = 1e9, hi = -1e9;
        for (int k = 0; k <= 20000; ++k) {
            const double phi = M_PI * k / 20000.0;
            const double v = gain_phase(d, z, phi);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            EXPECT_NEAR(gain_phase(d, z, phi + M_PI), v, 1e-12);
        }
        EXPECT_NEAR(lo, (1.0 - eta) * (1.0 - eta), 1e-6);
        EXPECT_NEAR(hi, (1.0 + eta) * (1.0 + eta), 1e-6);
    }
}

TEST(Gain, EqualsDirectLinearSolveRatio) {
    std::mt19937_64 g(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const cplx I(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const auto d = dims(0.2 + 0.8 * u(g), 4.0 * u(g) - 2.0, 2.0 * u(g), 0.0);
        const double z = 0.1 + 0.9 * u(g), phi = 6.3 * u(g);
        const cplx w = std::polar(0.7, phi);
        const cplx mu1 = I * (d.delta - 4.0 * std::sqrt(d.D) * z) - 1.0;
        Eigen::Matrix2cd m;
        m << mu1, I * d.pump, -I * d.pump, std::conj(mu1);
        const Eigen::Vector2cd p = (m.fullPivLu().solve(Eigen::Vector2cd(std::conj(w), -w)) * (I * z)).eval();
        const double det = std::norm(mu1) - d.pump * d.pump;
        const double ratio = std::abs(p(0) * p(1)) * det * det / (z * z * std::norm(w) * std::norm(mu1));
        EXPECT_NEAR(gain_phase(d, z, phi), ratio, 1e-9);
    }
}

TEST(Gain, AboveThresholdThrows) {
    const double D = 0.5, z = 0.5;
    const auto d = dims(-0.2, 4.0 * std::sqrt(D) * z, D, 0.0);
    EXPECT_THROW(gain_phase(d, z, 0.0), AboveThresholdError);
}
