#include "pcgrid/mna.hpp"
#include "pcgrid/netlist.hpp"
#include "pcgrid/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <string>

using namespace pcgrid;

namespace {

const char* kLadder =
    "V1 n1 0 1.2 RPKG=1\n"
    "R12 n1 n2 2\n"
    "I1 n2 0 PWL(0 0.1)\n";

Grid mesh(std::size_t n, double sw3, double st3, double sl3, double gcf) {
    MeshSpec s;
    s.rows = s.cols = n;
    s.pin_spacing = 3;
    s.rpkg = 0.05;
    s.r_seg = 0.2;
    s.c_node = 1e-13;
    s.loads = LoadSpec{Waveform({{0, 1e-3}, {1e-10, 4e-3}}), 0.4, 0.5, 1.5, 0.0, 3};
    s.variation.sigma_w = sigma_from_pct3(sw3);
    s.variation.sigma_t = sigma_from_pct3(st3);
    s.variation.sigma_l = sigma_from_pct3(sl3);
    s.variation.gate_cap_fraction = gcf;
    return generate_mesh(s);
}

std::string load_only(double leakfrac, double leaksig, double sl3, int regions) {
    std::string t = ".VARIATION SW3=0 ST3=0 SL3=" + std::to_string(sl3) + "\n";
    t += ".RHSONLY LEAKFRAC=" + std::to_string(leakfrac) + " LEAKSIG=" + std::to_string(leaksig) + "\n";
    t += "V1 a 0 1.0 RPKG=0.5\nR1 a b 1\nR2 b c 1\nC1 b 0 1p\nC2 c 0 1p\n";
    t += "I1 b 0 PWL(0 1m 1n 2m)\nI2 c 0 PWL(0 2m 1n 1m)\n";
    t += ".REGION b 0\n.REGION c " + std::to_string(regions - 1) + "\n";
    return t;
}

}  // namespace

TEST(CombineWidthThickness, Examples) {
    EXPECT_NEAR(combine_width_thickness(0.20, 0.15), 0.25, 1e-15);
    EXPECT_EQ(combine_width_thickness(0.07, 0.0), 0.07);
    EXPECT_NEAR(combine_width_thickness(0.3, 0.4), 0.5, 1e-15);
}

TEST(Assemble, LadderHandStamp) {
    const PerturbedSystem sys = assemble(parse_netlist(kLadder));
    ASSERT_EQ(sys.M, 2u);
    const auto g = sys.ga.to_dense();
    EXPECT_DOUBLE_EQ(g[0][0], 1.5);
    EXPECT_DOUBLE_EQ(g[0][1], -0.5);
    EXPECT_DOUBLE_EQ(g[1][0], -0.5);
    EXPECT_DOUBLE_EQ(g[1][1], 0.5);
    EXPECT_EQ(sys.injections, (std::vector<double>{1.2, 0.0}));
    ASSERT_EQ(sys.loads.size(), 1u);
    EXPECT_EQ(sys.loads[0].node, 1u);
    EXPECT_EQ(sys.loads[0].sign, -1.0);
    EXPECT_EQ(sys.gg.nonzeros(), 0u);
    EXPECT_DOUBLE_EQ(sys.vdd, 1.2);
}

TEST(Assemble, NoVariationMeansNoSensitivity) {
    const PerturbedSystem a = assemble(mesh(6, 0, 0, 20, 0.4));
    EXPECT_EQ(a.gg.nonzeros(), 0u);
    EXPECT_GT(a.cc.nonzeros(), 0u);
    const PerturbedSystem b = assemble(mesh(6, 20, 15, 20, 0.0));
    EXPECT_EQ(b.cc.nonzeros(), 0u);
    EXPECT_GT(b.gg.nonzeros(), 0u);
}

TEST(Assemble, Proportionality) {
    const PerturbedSystem s = assemble(mesh(7, 20, 15, 20, 0.4));
    EXPECT_NEAR(s.sigma_g, 0.25 / 3.0, 1e-15);
    const auto ga = s.ga.to_dense(), gg = s.gg.to_dense(), ca = s.ca.to_dense(), cc = s.cc.to_dense();
    for (std::size_t i = 0; i < s.M; ++i) {
        for (std::size_t j = 0; j < s.M; ++j) {
            EXPECT_NEAR(gg[i][j], s.sigma_g * ga[i][j], 1e-15 * std::abs(ga[i][j]));
            if (i != j) EXPECT_EQ(ca[i][j], 0.0);
            if (ca[i][j] != 0.0) EXPECT_NEAR(cc[i][j] / ca[i][j], 0.4 * 0.2 / 3.0, 1e-14);
        }
        EXPECT_GE(ca[i][i], 0.0);
    }
}

TEST(Assemble, SymmetricDiagonallyDominant) {
    const PerturbedSystem s = assemble(mesh(9, 20, 15, 20, 0.4));
    EXPECT_TRUE(s.ga.is_symmetric());
    EXPECT_TRUE(s.ca.is_symmetric());
    const auto g = s.ga.to_dense();
    for (std::size_t i = 0; i < s.M; ++i) {
        double off = 0.0;
        for (std::size_t j = 0; j < s.M; ++j) {
            if (j != i) off += std::abs(g[i][j]);
        }
        EXPECT_GT(g[i][i], 0.0);
        EXPECT_GE(g[i][i], off * (1 - 1e-14));
    }
}

TEST(Assemble, DcWithoutLoadsIsVddEverywhere) {
    MeshSpec s;
    s.rows = s.cols = 10;
    s.pin_spacing = 4;
    s.rpkg = 0.1;
    s.r_seg = 0.3;
    const PerturbedSystem sys = assemble(generate_mesh(s));
    const auto x = factor(sys.ga).solve(sys.injections);
    for (double v : x) EXPECT_NEAR(v, 1.2, 1e-12);
}

TEST(Assemble, PerturbedConductanceStaysDefinite) {
    const PerturbedSystem s = assemble(mesh(6, 20, 15, 20, 0.4));
    for (double xi : {-1.0 / s.sigma_g * 0.999, -4.0, 0.0, 4.0, 50.0}) {
        const Factorization f = factor(s.ga + xi * s.gg);
        EXPECT_TRUE(f.positive_definite()) << xi;
    }
}

TEST(Assemble, IdealPinsEliminated) {
    const Grid g = parse_netlist("V1 a 0 1.0\nR1 a b 2\nR2 b c 2\nI1 c 0 PWL(0 0.1)\n");
    const PerturbedSystem s = assemble(g);
    ASSERT_EQ(s.M, 2u);
    EXPECT_EQ(s.node_names, (std::vector<std::string>{"b", "c"}));
    EXPECT_DOUBLE_EQ(s.injections[0], 0.5);
    RhsTerm u{s.injections, {{1, 0, -1.0}}};
    std::vector<double> rhs(2);
    u.evaluate(*s.waveforms, 0.0, rhs);
    const auto x = factor(s.ga).solve(rhs);
    EXPECT_NEAR(x[0], 0.8, 1e-12);
    EXPECT_NEAR(x[1], 0.6, 1e-12);
    EXPECT_THROW(assemble(parse_netlist("V1 a 0 1.0\nV2 a 0 1.1\nR1 a b 2\n")), AssemblyError);
}

TEST(RhsExpansion, TwoRegionsSixTerms) {
    const RhsExpansion e = rhs_expansion(parse_netlist(load_only(0.3, 0.5, 20, 2)), 2);
    ASSERT_EQ(e.terms.size(), 6u);
    EXPECT_EQ(e.basis.variables(), 2u);
    // each load sees one region, so only the xi_1 xi_2 cross term vanishes
    for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(e.terms[j].is_zero(), j == 4) << j;
}

TEST(RhsExpansion, ZeroLeakageSigma) {
    const RhsExpansion e = rhs_expansion(parse_netlist(load_only(0.3, 0.0, 0, 2)), 2);
    EXPECT_FALSE(e.terms[0].is_zero());
    for (std::size_t j = 1; j < e.terms.size(); ++j) EXPECT_TRUE(e.terms[j].is_zero()) << j;
}

TEST(RhsExpansion, SingleRegionLognormal) {
    const RhsExpansion e = rhs_expansion(parse_netlist(load_only(1.0, 0.5, 0, 1)), 2);
    ASSERT_EQ(e.terms.size(), 3u);
    std::vector<double> u0(3), u(3);
    e.terms[0].evaluate(*e.waveforms, 0.3e-9, u0);
    const double k = std::exp(0.125);
    const std::vector<double> want{k, 0.5 * k, 0.125 * k};
    for (std::size_t j = 0; j < 3; ++j) {
        e.terms[j].evaluate(*e.waveforms, 0.3e-9, u);
        // node 0 also carries the pin injection in U_0
        for (std::size_t i = 1; i < 3; ++i) {
            const double base = u0[i] / want[0];
            EXPECT_NEAR(u[i], base * want[j], 1e-15) << j << "," << i;
        }
    }
}

TEST(RhsExpansion, Errors) {
    std::string t = load_only(0.3, 0.5, 20, 2);
    t.erase(t.find(".REGION c"));
    EXPECT_THROW(assemble(parse_netlist(t)), AssemblyError);
    EXPECT_THROW(rhs_expansion(parse_netlist(kLadder), 2), std::invalid_argument);
}

TEST(Realize, ScalesEveryPart) {
    const PerturbedSystem s = assemble(mesh(5, 20, 15, 20, 0.4));
    const std::vector<double> xi{1.5, -2.0};
    const DeterministicSystem d = realize(s, xi);
    const double gs = 1 + s.sigma_g * 1.5, cs = 1 + s.cap_scale * -2.0;
    EXPECT_NEAR(d.g.at(0, 0), gs * s.ga.at(0, 0), 1e-12);
    EXPECT_NEAR(d.c.at(3, 3), cs * s.ca.at(3, 3), 1e-25);
    std::vector<double> u(s.M), u0(s.M);
    d.excitation()(1e-10, u);
    nominal(s).excitation()(1e-10, u0);
    const LoadStamp& l = s.loads.front();
    const double loadm = 1 + s.drain_sens * -2.0;
    const double w = (*s.waveforms)[l.waveform](1e-10);
    // node without an injection: the load alone scales
    if (s.injections[l.node] == 0.0) EXPECT_NEAR(u[l.node], -loadm * w, 1e-15);
    EXPECT_THROW(realize(s, std::vector<double>{-1.0 / s.sigma_g - 1.0, 0.0}), NonPhysicalSample);
}
