#include "pcgrid/netlist.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>

using namespace pcgrid;

namespace {

const char* kExample =
    "R1 n1 n2 1.0\n"
    "C1 n2 0 1e-12\n"
    "I1 n2 0 PWL(0 0 1n 1e-3)\n"
    "V1 n1 0 1.2 RPKG=0.5\n";

std::size_t error_line(const std::string& text) {
    try {
        parse_netlist(text);
    } catch (const NetlistError& e) {
        return e.line();
    }
    return static_cast<std::size_t>(-1);
}

Waveform pwl(std::initializer_list<WaveformPoint> pts) { return Waveform(std::vector<WaveformPoint>(pts)); }

}  // namespace

TEST(Parse, Example) {
    const Grid g = parse_netlist(kExample);
    EXPECT_EQ(g.node_count(), 2u);
    EXPECT_EQ(g.elements.size(), 4u);
    EXPECT_FALSE(g.node_index("0").has_value());
    EXPECT_EQ(*g.node_index("n1"), 0u);
    EXPECT_EQ(*g.node_index("n2"), 1u);
    const Element& i1 = g.elements[2];
    EXPECT_EQ(i1.kind, ElementKind::current_load);
    ASSERT_EQ(i1.waveform.points().size(), 2u);
    EXPECT_DOUBLE_EQ(i1.waveform.points()[1].time, 1e-9);
    EXPECT_DOUBLE_EQ(g.elements[3].rpkg, 0.5);
    EXPECT_DOUBLE_EQ(g.vdd(), 1.2);
}

TEST(Parse, Errors) {
    try {
        parse_netlist("");
        FAIL() << "expected an error";
    } catch (const NetlistError& e) {
        EXPECT_NE(std::string(e.what()).find("no Vdd pin"), std::string::npos);
    }
    try {
        parse_netlist("R1 n1 n2 -1.0\nV1 n1 0 1\n");
        FAIL() << "expected an error";
    } catch (const NetlistError& e) {
        EXPECT_NE(std::string(e.what()).find("nonpositive"), std::string::npos);
        EXPECT_EQ(e.line(), 1u);
    }
    EXPECT_EQ(error_line("V1 a 0 1\nR1 a b 1\nr1 b c 1\n"), 3u);            // duplicate, case-insensitive
    EXPECT_EQ(error_line("V1 a 0 1\nR1 a b 1\nC1 c 0 1p\n"), 0u);           // c has no resistive path
    EXPECT_EQ(error_line("V1 a 0 1\nR1 a b 1\nX1 a b 1\n"), 3u);
    EXPECT_EQ(error_line("V1 a 0 1\nR1 a b 1k\nI1 b 0 PWL(0 1 0 2)\n"), 3u);  // times not increasing
    EXPECT_EQ(error_line("V1 a 0 1\nR1 a b 1\nI1 b 0 junk PWL(0 1)\n"), 3u);
    EXPECT_EQ(error_line("V1 a 0 1\nR1 a b 1\n.VARIATION SW3=120\n"), 3u);
    EXPECT_EQ(error_line("V1 a 0 1\nR1 a b zz\n"), 2u);
}

TEST(Parse, SuffixesCommentsAndCase) {
    const Grid g = parse_netlist(
        "# header\n"
        ".variation sw3=20 st3=15 sl3=20 gcf=0.3 isens=-0.5\n"
        "v1 a 0 1.2 rpkg=50m  # pin\n"
        "r1 a b 2k\n"
        "c1 b 0 3f\n");
    EXPECT_DOUBLE_EQ(g.elements[1].value, 2000.0);
    EXPECT_DOUBLE_EQ(g.elements[2].value, 3e-15);
    EXPECT_DOUBLE_EQ(g.elements[0].rpkg, 0.05);
    EXPECT_DOUBLE_EQ(g.variation.sigma_w, 0.2 / 3.0);
    EXPECT_DOUBLE_EQ(g.variation.gate_cap_fraction, 0.3);
    EXPECT_DOUBLE_EQ(g.variation.current_sensitivity, -0.5);
}

TEST(Parse, LoadOnlyDirectives) {
    const Grid g = parse_netlist(
        ".RHSONLY LEAKFRAC=0.3 LEAKSIG=0.5\n"
        "V1 a 0 1 RPKG=0.1\nR1 a b 1\nI1 b 0 PWL(0 1m)\n.REGION b 1\n.REGION a 0\n");
    EXPECT_TRUE(g.variation.rhs_only);
    EXPECT_DOUBLE_EQ(g.variation.leakage_fraction, 0.3);
    EXPECT_EQ(g.variation.regions.at("b"), 1);
    EXPECT_EQ(g.variation.region_count(), 2u);
    EXPECT_THROW(parse_netlist("V1 a 0 1\nR1 a b 1\n.REGION q 0\n"), NetlistError);
}

TEST(Waveform, Examples) {
    const Waveform w = pwl({{0, 0}, {1, 2}});
    EXPECT_DOUBLE_EQ(eval_waveform(w, 0.5), 1.0);
    EXPECT_DOUBLE_EQ(eval_waveform(w, 5.0), 2.0);
    EXPECT_DOUBLE_EQ(eval_waveform(pwl({{1, 3}}), 0.0), 3.0);
}

TEST(Waveform, ExactAtBreakpointsAndContinuous) {
    const Waveform w = pwl({{0.0, 1.0}, {1e-10, 1.0}, {2e-10, 7.5}, {4e-10, -2.0}, {9e-10, 0.25}});
    for (const auto& p : w.points()) EXPECT_EQ(w(p.time), p.value);
    const double eps = 1e-22;
    for (const auto& p : w.points()) {
        EXPECT_NEAR(w(p.time - eps), p.value, 1e-9);
        EXPECT_NEAR(w(p.time + eps), p.value, 1e-9);
    }
    EXPECT_THROW(pwl({}), std::invalid_argument);
    EXPECT_THROW(pwl({{1, 0}, {1, 1}}), std::invalid_argument);
}

TEST(Mesh, TwoByTwo) {
    MeshSpec s;
    s.rows = s.cols = 2;
    s.r_seg = 1.0;
    s.c_node = 1e-12;
    s.pin_spacing = 1;
    const Grid g = generate_mesh(s);
    EXPECT_EQ(g.node_count(), 4u);
    EXPECT_EQ(g.count(ElementKind::resistor), 4u);
    for (const Element& e : g.elements) {
        if (e.kind == ElementKind::resistor) EXPECT_EQ(e.value, 1.0);
    }
}

TEST(Mesh, ThirtyTwo) {
    MeshSpec s;
    s.rows = s.cols = 32;
    s.pin_spacing = 8;
    s.rpkg = 0.05;
    const Grid g = generate_mesh(s);
    EXPECT_EQ(g.node_count(), 1024u);
    EXPECT_EQ(g.count(ElementKind::resistor), 2u * 32u * 31u);
    EXPECT_EQ(g.count(ElementKind::vdd_pin), 16u);
}

TEST(Mesh, Errors) {
    MeshSpec s;
    s.rows = 1;
    s.cols = 5;
    EXPECT_THROW(generate_mesh(s), std::invalid_argument);
    s.rows = 4;
    s.pin_spacing = 6;
    EXPECT_THROW(generate_mesh(s), std::invalid_argument);
}

TEST(Mesh, SeedReproducible) {
    MeshSpec s;
    s.rows = s.cols = 12;
    s.pin_spacing = 4;
    s.rpkg = 0.05;
    s.loads = LoadSpec{Waveform({{0, 1e-3}, {1e-10, 1e-3}, {2e-10, 6e-3}, {4e-10, 1e-3}}), 0.3, 0.5, 1.5, 3e-10, 7};
    const std::string a = write_netlist(generate_mesh(s));
    const std::string b = write_netlist(generate_mesh(s));
    EXPECT_EQ(a, b);
    s.loads->seed = 8;
    EXPECT_NE(a, write_netlist(generate_mesh(s)));
}

TEST(RoundTrip, RandomGrids) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        MeshSpec s;
        s.rows = 2 + rng() % 7;
        s.cols = 2 + rng() % 7;
        s.pin_spacing = 1 + rng() % std::max(s.rows, s.cols);
        s.r_seg = 1e-3 + u(rng);
        s.c_node = trial % 3 == 0 ? 0.0 : u(rng) * 1e-12;
        s.rpkg = trial % 4 == 0 ? 0.0 : u(rng);
        s.vdd = 0.5 + u(rng);
        s.variation.sigma_w = u(rng) * 0.3;
        s.variation.sigma_t = u(rng) * 0.3;
        s.variation.sigma_l = u(rng) * 0.3;
        s.variation.gate_cap_fraction = u(rng);
        s.variation.current_sensitivity = -2.0 * u(rng);
        s.loads = LoadSpec{Waveform({{0, u(rng) * 1e-3}, {1e-10 * (1 + u(rng)), u(rng) * 1e-2}}),
                           u(rng), 0.5, 1.5, u(rng) * 1e-9, rng()};
        Grid g = generate_mesh(s);
        if (trial % 2 == 0) {
            g.variation.rhs_only = true;
            g.variation.leakage_fraction = u(rng);
            g.variation.leakage_sigma = u(rng);
            for (std::size_t i = 0; i < g.node_count(); ++i) {
                g.variation.regions[g.node_names[i]] = static_cast<int>(rng() % 3);
            }
        }
        // Arbitrary sigmas need not be reachable from a 3-sigma percentage,
        // so the property is checked from the first parse onward.
        const Grid parsed = parse_netlist(write_netlist(g));
        EXPECT_EQ(parsed.elements, g.elements);
        EXPECT_EQ(parsed.node_names, g.node_names);
        EXPECT_EQ(parsed.variation.regions, g.variation.regions);
        EXPECT_NEAR(parsed.variation.sigma_t, g.variation.sigma_t, 1e-15);
        const Grid back = parse_netlist(write_netlist(parsed));
        EXPECT_TRUE(back == parsed) << "trial " << trial;
        EXPECT_EQ(write_netlist(back), write_netlist(parsed));
    }
}
