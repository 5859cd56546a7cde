#include "oracles.hpp"
#include "pcgrid/galerkin.hpp"
#include "pcgrid/netlist.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <string>
#include <vector>

using namespace pcgrid;

namespace {

const char* kEq20 =
    "Ga Gg 0 0 0 0\n"
    "Gg Ga 0 2Gg 0 0\n"
    "0 0 Ga 0 Gg 0\n"
    "0 2Gg 0 2Ga 0 0\n"
    "0 0 Gg 0 Ga 0\n"
    "0 0 0 0 0 2Ga\n";

const char* kEq21Corrected =
    "Ca 0 Cc 0 0 0\n"
    "0 Ca 0 0 Cc 0\n"
    "Cc 0 Ca 0 0 2Cc\n"
    "0 0 0 2Ca 0 0\n"
    "0 Cc 0 0 Ca 0\n"
    "0 0 2Cc 0 0 2Ca\n";

Grid mesh(double sw3, double sl3, std::size_t n = 6) {
    MeshSpec s;
    s.rows = s.cols = n;
    s.pin_spacing = 3;
    s.rpkg = 0.05;
    s.r_seg = 0.3;
    s.c_node = 2e-13;
    s.loads = LoadSpec{Waveform({{0, 1e-3}, {1e-10, 1e-3}, {2e-10, 6e-3}, {4e-10, 1e-3}}), 0.4, 0.5, 1.5, 1e-10, 9};
    s.variation.sigma_w = sigma_from_pct3(sw3);
    s.variation.sigma_t = sigma_from_pct3(sw3 * 0.75);
    s.variation.sigma_l = sigma_from_pct3(sl3);
    return generate_mesh(s);
}

// 1-node g (1 + s xi) x = I with one variable; I is a load so it does not scale with g.
PerturbedSystem scalar_system(double g, double s, double I) {
    PerturbedSystem sys;
    sys.M = 1;
    sys.node_names = {"n"};
    sys.vdd = 0.0;
    sys.variables = 1;
    sys.g_variable = 0;
    sys.sigma_g = s;
    sys.Ga = SparseTriplets(1);
    sys.Ga.add(0, 0, g);
    sys.Gg = SparseTriplets(1);
    sys.Gg.add(0, 0, g * s);
    sys.Ca = SparseTriplets(1);
    sys.Cc = SparseTriplets(1);
    sys.ga = compress(sys.Ga);
    sys.gg = compress(sys.Gg);
    sys.ca = compress(sys.Ca);
    sys.cc = compress(sys.Cc);
    sys.injections = {0.0};
    sys.waveforms = std::make_shared<std::vector<Waveform>>(1, Waveform({{0.0, I}}));
    sys.loads = {{0, 0, +1.0, 0.0, 0.0, -1}};
    return sys;
}

std::vector<double> dc_coefficients(const AugmentedSystem& aug) {
    std::vector<double> rhs(aug.dimension());
    aug.rhs(0.0, rhs);
    return factor(aug.g_tilde()).solve(rhs);
}

std::string load_only_grid() {
    return ".VARIATION SW3=0 ST3=0 SL3=20\n"
           ".RHSONLY LEAKFRAC=0.3 LEAKSIG=0.4\n"
           "V1 a1 0 1.0 RPKG=0.2\nV2 a6 0 1.0 RPKG=0.2\n"
           "R1 a1 a2 1\nR2 a2 a3 1\nR3 a3 a4 1\nR4 a4 a5 1\nR5 a5 a6 1\n"
           "R6 a6 a7 1\nR7 a7 a8 1\nR8 a8 a9 1\nR9 a9 a10 1\nR10 a2 a9 2\n"
           "C1 a2 0 1p\nC2 a3 0 1p\nC3 a4 0 1p\nC4 a5 0 2p\nC5 a7 0 1p\nC6 a8 0 1p\nC7 a9 0 1p\nC8 a10 0 3p\n"
           "I1 a3 0 PWL(0 10m 100p 30m 300p 10m)\n"
           "I2 a5 0 PWL(0 5m 150p 25m 250p 5m)\n"
           "I3 a8 0 PWL(0 8m 50p 20m 400p 8m)\n"
           "I4 a10 0 PWL(0 3m 200p 15m 350p 3m)\n"
           ".REGION a3 0\n.REGION a5 0\n.REGION a8 1\n.REGION a10 1\n";
}

}  // namespace

TEST(Augmented, GoldenConductancePattern) {
    const PerturbedSystem sys = assemble(mesh(20, 20));
    const AugmentedSystem aug = assemble_augmented(sys, ChaosBasis(2, 2));
    EXPECT_EQ(aug.pattern(aug.blocks_g), kEq20);
}

TEST(Augmented, GoldenCapacitancePatternWithCorrection) {
    const PerturbedSystem sys = assemble(mesh(20, 20));
    const ChaosBasis b(2, 2);
    const AugmentedSystem aug = assemble_augmented(sys, b);
    EXPECT_EQ(aug.pattern(aug.blocks_c), kEq21Corrected);
    // (1, 3) stays empty: the xi_L triple product of psi_1 and psi_3 is zero.
    EXPECT_TRUE(aug.blocks_c[1][3].empty());
    EXPECT_TRUE(aug.blocks_c[3][1].empty());
    EXPECT_NEAR(oracle::triple(1, b.index(1).exponents, b.index(3).exponents), 0.0, 1e-12);
    EXPECT_NEAR(oracle::triple(1, b.index(2).exponents, b.index(5).exponents), 2.0, 1e-10);
}

TEST(Augmented, BlockValuesMatchTripleOracle) {
    const ChaosBasis b(2, 3);
    const AugmentedSystem aug = assemble_augmented(assemble(mesh(20, 20)), b);
    for (std::size_t j = 0; j < b.size(); ++j) {
        for (std::size_t k = 0; k < b.size(); ++k) {
            double ga = 0, gg = 0, ca = 0, cc = 0;
            for (const auto& t : aug.blocks_g[j][k]) (t.source == BlockSource::Ga ? ga : gg) += t.scale;
            for (const auto& t : aug.blocks_c[j][k]) (t.source == BlockSource::Ca ? ca : cc) += t.scale;
            const auto& a = b.index(j).exponents;
            const auto& c = b.index(k).exponents;
            EXPECT_NEAR(ga, oracle::inner(a, c), 1e-10);
            EXPECT_NEAR(ca, oracle::inner(a, c), 1e-10);
            EXPECT_NEAR(gg, oracle::triple(0, a, c), 1e-10);
            EXPECT_NEAR(cc, oracle::triple(1, a, c), 1e-10);
        }
    }
}

TEST(Augmented, BlockSymmetry) {
    for (unsigned p = 1; p <= 4; ++p) {
        const AugmentedSystem aug = assemble_augmented(assemble(mesh(20, 20, 4)), ChaosBasis(2, p));
        for (std::size_t j = 0; j < aug.terms(); ++j) {
            EXPECT_FALSE(aug.blocks_g[j][j].empty());
            EXPECT_FALSE(aug.blocks_c[j][j].empty());
            for (std::size_t k = 0; k < aug.terms(); ++k) {
                EXPECT_EQ(AugmentedSystem::block_label(aug.blocks_g[j][k]),
                          AugmentedSystem::block_label(aug.blocks_g[k][j]));
                EXPECT_EQ(AugmentedSystem::block_label(aug.blocks_c[j][k]),
                          AugmentedSystem::block_label(aug.blocks_c[k][j]));
            }
        }
        EXPECT_TRUE(aug.g_tilde().is_symmetric());
        EXPECT_TRUE(aug.c_tilde().is_symmetric());
    }
}

TEST(Augmented, DensityDecreasesWithOrder) {
    const PerturbedSystem sys = assemble(mesh(20, 20, 4));
    double prev = 2.0;
    for (unsigned p = 2; p <= 4; ++p) {
        const double d = assemble_augmented(sys, ChaosBasis(2, p)).block_density();
        EXPECT_LT(d, prev) << p;
        prev = d;
    }
}

TEST(Augmented, DimensionMismatch) {
    const PerturbedSystem sys = assemble(mesh(20, 20, 3));
    EXPECT_THROW(assemble_augmented(sys, ChaosBasis(3, 2)), std::invalid_argument);
}

TEST(Augmented, ScalarOracle) {
    const AugmentedSystem aug = assemble_augmented(scalar_system(1.0, 0.1, 0.1), ChaosBasis(1, 2));
    const auto a = dc_coefficients(aug);
    const auto ref = oracle::scalar_galerkin(1.0, 0.1, 0.1);
    ASSERT_EQ(a.size(), 3u);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(a[j], ref[j], 1e-14);
    EXPECT_NEAR(a[0], 0.101031, 1e-6);
    EXPECT_NEAR(a[1], -0.010309, 1e-6);
    EXPECT_NEAR(a[2], 0.0010309, 1e-6);
}

TEST(Augmented, ZeroPerturbationIsBlockDiagonal) {
    const PerturbedSystem sys = assemble(mesh(0, 0));
    const AugmentedSystem aug = assemble_augmented(sys, ChaosBasis(2, 2));
    for (std::size_t j = 0; j < aug.terms(); ++j) {
        for (std::size_t k = 0; k < aug.terms(); ++k) {
            if (j != k) {
                EXPECT_TRUE(aug.blocks_g[j][k].empty());
                EXPECT_TRUE(aug.blocks_c[j][k].empty());
            }
        }
    }
    const double h = 1e-11, T = 5e-10;
    const auto stacked0 = dc_coefficients(aug);
    const auto stacked = transient(aug.g_tilde(), aug.c_tilde(), aug.excitation(), h, T, stacked0);
    const DeterministicSystem d = nominal(sys);
    const auto x0 = dc_solve(d.g, d.excitation());
    const auto ref = transient(d.g, d.c, d.excitation(), h, T, x0);
    ASSERT_EQ(stacked.size(), ref.size());
    for (std::size_t k = 0; k < ref.size(); ++k) {
        for (std::size_t i = 0; i < sys.M; ++i) {
            EXPECT_NEAR(stacked[k][i], ref[k][i], 1e-12);
            for (std::size_t j = 1; j < aug.terms(); ++j) EXPECT_EQ(stacked[k][j * sys.M + i], 0.0);
        }
    }
}

TEST(Decoupled, MatchesFullGalerkin) {
    const PerturbedSystem sys = assemble(parse_netlist(load_only_grid()));
    ASSERT_EQ(sys.M, 10u);  // both pins have package resistance, so no node is eliminated
    const ChaosBasis b(2, 2);
    const AugmentedSystem aug = assemble_augmented(sys, b);
    const DecoupledSystems dec = assemble_rhs_only(sys, rhs_terms(sys, b));
    ASSERT_EQ(dec.terms.size(), 6u);

    const double h = 1e-11, T = 5e-10;
    const auto full = transient(aug.g_tilde(), aug.c_tilde(), aug.excitation(), h, T, dc_coefficients(aug));

    const auto u = dec.excitations();
    std::vector<std::vector<double>> x0;
    for (const auto& f : u) x0.push_back(dc_solve(dec.g, f));
    SolverStats st;
    double worst = 0.0;
    integrate_many(
        dec.g, dec.c, u, h, T, x0,
        [&](std::size_t j, std::size_t k, double, std::span<const double> x) {
            for (std::size_t i = 0; i < sys.M; ++i) worst = std::max(worst, std::abs(x[i] - full[k][j * sys.M + i]));
        },
        &st);
    EXPECT_LE(worst, 1e-12);
    EXPECT_EQ(st.factorizations.load(), 1u);
}

TEST(Decoupled, DeterministicInputGivesZeroHigherTerms) {
    std::string t = load_only_grid();
    t.replace(t.find("SL3=20"), 6, "SL3=0");
    t.replace(t.find("LEAKSIG=0.4"), 11, "LEAKSIG=0");
    const PerturbedSystem sys = assemble(parse_netlist(t));
    const DecoupledSystems dec = assemble_rhs_only(sys, rhs_terms(sys, ChaosBasis(2, 2)));
    const auto u = dec.excitations();
    std::vector<std::vector<double>> x0;
    for (const auto& f : u) x0.push_back(dc_solve(dec.g, f));
    integrate_many(dec.g, dec.c, u, 1e-11, 2e-10, x0,
                   [&](std::size_t j, std::size_t, double, std::span<const double> x) {
                       if (j == 0) return;
                       for (double v : x) EXPECT_EQ(v, 0.0);
                   });
}

TEST(Decoupled, RejectsStochasticMatrices) {
    const PerturbedSystem sys = assemble(mesh(20, 20, 3));
    EXPECT_THROW(assemble_rhs_only(sys, rhs_terms(sys, ChaosBasis(2, 2))), std::invalid_argument);
}

TEST(Residual, ScalarSweep) {
    const PerturbedSystem sys = scalar_system(1.0, 0.1, 0.1);
    const AugmentedSystem a2 = assemble_augmented(sys, ChaosBasis(1, 2));
    const AugmentedSystem a3 = assemble_augmented(sys, ChaosBasis(1, 3));
    const auto c2 = dc_coefficients(a2), c3 = dc_coefficients(a3);
    auto r = [](const AugmentedSystem& a, const std::vector<double>& c, double xi) {
        return residual_check(a, c, {}, 1.0, std::vector<double>{xi}, 0.0);
    };
    // The projection removes He0..He2, so the cubic residual is a multiple of He3.
    EXPECT_LE(r(a2, c2, 0.0), 1e-10 * 0.1);
    const double k = r(a2, c2, 1.0) / 2.0;
    for (double xi : {-4.0, -2.5, -1.0, 0.5, 2.0, 3.0, 4.0}) {
        EXPECT_NEAR(r(a2, c2, xi), k * std::abs(oracle::he(3, xi)), 1e-12) << xi;
    }
    EXPECT_LT(r(a2, c2, 2.0), r(a2, c2, 3.0));
    EXPECT_LT(r(a2, c2, 3.0), r(a2, c2, 4.0));
    EXPECT_LT(r(a2, c2, -2.0), r(a2, c2, -3.0));
    EXPECT_LE(r(a3, c3, 1.0), r(a2, c2, 1.0));
}

TEST(Residual, GalerkinOrthogonality) {
    const PerturbedSystem sys = assemble(mesh(20, 20, 5));
    const ChaosBasis b(2, 2);
    const AugmentedSystem aug = assemble_augmented(sys, b);
    const auto a = dc_coefficients(aug);
    std::vector<double> u(aug.dimension());
    aug.rhs(0.0, u);
    double unorm = 0.0;
    for (double v : u) unorm += v * v;
    unorm = std::sqrt(unorm);
    for (std::size_t j = 0; j < b.size(); ++j) {
        std::vector<double> proj(sys.M, 0.0);
        for_each_tensor_node(2, 6, [&](std::span<const double> xi, double w) {
            const auto r = residual_vector(aug, a, {}, 1.0, xi, 0.0);
            const double psi = b.evaluate(j, xi);
            for (std::size_t i = 0; i < sys.M; ++i) proj[i] += w * psi * r[i];
        });
        double n = 0.0;
        for (double v : proj) n += v * v;
        EXPECT_LE(std::sqrt(n) / unorm, 1e-8) << j;
    }
}
