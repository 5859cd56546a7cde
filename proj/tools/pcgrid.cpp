// pcgrid: stochastic transient IR-drop analysis of power grids.
//
//   pcgrid generate --rows 32 --cols 32 --seed 7 --output grid.net
//   pcgrid run --input grid.net --engine pc --p 2 --output out/pc
//   pcgrid run --input grid.net --engine mc --samples 1000 --seed 1 --output out/mc
//   pcgrid compare out/pc out/mc --output out/cmp
//   pcgrid hist --input grid.net --engine pc --node n5_5 --time 3e-10 --bins 40
//   pcgrid pattern --p 2

#include "pcgrid/analysis.hpp"
#include "pcgrid/galerkin.hpp"
#include "pcgrid/mna.hpp"
#include "pcgrid/netlist.hpp"
#include "pcgrid/report_io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using pcgrid::io::json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSampleFailures = 3;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Accepts netlist-style suffixes on numeric flags ("10p", "0.8n").
const CLI::Validator kSi(
    [](std::string& s) -> std::string {
        const auto v = pcgrid::parse_value(s);
        if (!v) return "not a number: " + s;
        s = pcgrid::format_value(*v);
        return {};
    },
    "VALUE", "si");

struct GenerateArgs {
    std::size_t rows = 32;
    std::size_t cols = 32;
    std::uint64_t seed = 1;
    std::string output;
    double r_seg = 0.5;
    double c_node = 0.5e-12;
    std::size_t pin_spacing = 8;
    double vdd = 1.2;
    double rpkg = 0.05;
    double load_density = 0.2;
    double load_base = 1e-3;
    double load_peak = 6e-3;
    double load_delay = 300e-12;
    double sw3 = 20.0, st3 = 15.0, sl3 = 20.0;
    double gcf = 0.4;
    double isens = -1.0;
};

struct RunArgs {
    std::string input;
    std::string output;
    std::string engine = "pc";
    unsigned p = 2;
    std::optional<double> h;
    std::optional<double> t_end;
    std::size_t samples = 1000;
    std::uint64_t seed = 1;
    unsigned level = 12;
    unsigned threads = 1;
    std::string format = "csv";
};

struct CompareArgs {
    std::string pc_dir;
    std::string ref_dir;
    std::string output;
};

struct HistArgs {
    std::string input;
    std::string output;
    std::string engine = "pc";
    std::string node;
    double time = 0.0;
    unsigned p = 2;
    std::optional<double> h;
    std::optional<double> t_end;
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
    std::size_t bins = 40;
    std::optional<double> range_lo, range_hi;
    std::string format = "csv";
};

pcgrid::Grid load_grid(const std::string& path) {
    return pcgrid::parse_netlist(pcgrid::io::read_text(path));
}

pcgrid::Grid make_mesh(const GenerateArgs& a) {
    pcgrid::MeshSpec spec;
    spec.rows = a.rows;
    spec.cols = a.cols;
    spec.r_seg = a.r_seg;
    spec.c_node = a.c_node;
    spec.pin_spacing = a.pin_spacing;
    spec.vdd = a.vdd;
    spec.rpkg = a.rpkg;
    spec.variation.sigma_w = pcgrid::sigma_from_pct3(a.sw3);
    spec.variation.sigma_t = pcgrid::sigma_from_pct3(a.st3);
    spec.variation.sigma_l = pcgrid::sigma_from_pct3(a.sl3);
    spec.variation.gate_cap_fraction = a.gcf;
    spec.variation.current_sensitivity = a.isens;
    for (double s : {spec.variation.sigma_w, spec.variation.sigma_t, spec.variation.sigma_l}) {
        if (s < 0.0 || s >= 1.0 / 3.0) throw UsageError("3-sigma variations must lie in [0, 100) percent");
    }
    if (a.load_density > 0.0) {
        pcgrid::LoadSpec ls;
        ls.shape = pcgrid::Waveform({{0.0, a.load_base},
                                     {100e-12, a.load_base},
                                     {200e-12, a.load_peak},
                                     {400e-12, a.load_base}});
        ls.density = a.load_density;
        ls.max_delay = a.load_delay;
        ls.seed = a.seed;
        spec.loads = ls;
    }
    return pcgrid::generate_mesh(spec);
}

int cmd_generate(const GenerateArgs& a) {
    if (a.rows < 2 || a.cols < 2) throw UsageError("--rows and --cols must be at least 2");
    const std::string text = pcgrid::write_netlist(make_mesh(a));
    if (a.output.empty()) {
        std::cout << text;
    } else {
        pcgrid::io::write_text(a.output, text);
    }
    return 0;
}

int cmd_run(const RunArgs& a, const CLI::App& sub) {
    auto given = [&sub](const char* flag) { return sub.count(flag) > 0; };
    if (a.engine != "pc" && given("--p")) throw UsageError("--p only applies to --engine pc");
    if (a.engine != "mc" && (given("--samples") || given("--threads"))) {
        throw UsageError("--samples/--threads only apply to --engine mc");
    }
    if (a.engine != "quad" && given("--level")) throw UsageError("--level only applies to --engine quad");
    if (a.engine == "pc" && given("--seed")) throw UsageError("--seed does not apply to --engine pc");

    const pcgrid::Grid grid = load_grid(a.input);
    const pcgrid::PerturbedSystem sys = pcgrid::assemble(grid);
    const double t_end = a.t_end.value_or(pcgrid::default_horizon(sys));
    const double h = a.h.value_or(pcgrid::default_step(sys, t_end));

    json meta;
    meta["engine"] = a.engine;
    meta["input"] = a.input;
    meta["nodes"] = sys.M;
    meta["variables"] = sys.variables;
    meta["load_only"] = sys.rhs_only;
    meta["h_s"] = h;
    meta["t_end_s"] = t_end;
    meta["steps"] = pcgrid::step_count(h, t_end);
    meta["vdd_v"] = sys.vdd;

    fs::create_directories(a.output);
    const fs::path out(a.output);
    pcgrid::MomentField stats;
    int rc = 0;
    if (a.engine == "pc") {
        const pcgrid::PcResult r = pcgrid::run_pc(grid, {a.p, h, t_end, false});
        stats = pcgrid::pc_moments(r);
        meta["p"] = a.p;
        meta["basis_terms"] = r.terms();
        meta["decoupled"] = r.decoupled;
        meta["factorizations"] = r.dc_factorizations + r.transient_factorizations;
        pcgrid::io::write_text(out / "coeffs.csv", pcgrid::io::coeffs_csv(r));
    } else if (a.engine == "mc") {
        pcgrid::McOptions o;
        o.samples = a.samples;
        o.h = h;
        o.t_end = t_end;
        o.seed = a.seed;
        o.threads = a.threads;
        const pcgrid::McResult r = pcgrid::run_mc(grid, o);
        stats = r.stats;
        meta["samples"] = a.samples;
        meta["seed"] = a.seed;
        meta["threads"] = a.threads;
        meta["failed_samples"] = r.failed;
        if (r.failed > 0) {
            std::cerr << "pcgrid: " << r.failed << " of " << a.samples << " samples failed\n";
            rc = kExitSampleFailures;
        }
    } else {
        pcgrid::QuadOptions o;
        o.level = a.level;
        o.h = h;
        o.t_end = t_end;
        try {
            stats = pcgrid::run_quadrature(grid, o);
        } catch (const pcgrid::QuadratureTooLarge& e) {
            throw UsageError(e.what());
        }
        meta["level"] = a.level;
        meta["evaluations"] = std::pow(static_cast<double>(a.level), static_cast<double>(sys.variables));
    }
    meta["wall_clock_s"] = stats.wall_clock_s;
    meta["format"] = a.format;

    const pcgrid::MomentField nominal = pcgrid::run_nominal(grid, {h, t_end});
    if (a.format == "json") {
        pcgrid::io::write_text(out / "stats.json", pcgrid::io::stats_json(stats).dump(1) + "\n");
    } else {
        pcgrid::io::write_text(out / "stats.csv", pcgrid::io::stats_csv(stats));
    }
    pcgrid::io::write_text(out / "nominal.csv", pcgrid::io::nominal_csv(nominal));
    pcgrid::io::write_text(out / "meta.json", meta.dump(2) + "\n");
    return rc;
}

int cmd_compare(const CompareArgs& a) {
    const auto pc = pcgrid::io::read_result_dir(a.pc_dir);
    const auto ref = pcgrid::io::read_result_dir(a.ref_dir);
    const auto& nominal = pc.nominal ? pc.nominal : ref.nominal;
    if (!nominal) throw std::runtime_error("neither result directory has nominal.csv");
    const pcgrid::ComparisonReport rep = pcgrid::compare(pc.stats, ref.stats, *nominal);
    const json j = pcgrid::io::report_json(rep);
    if (!a.output.empty()) {
        fs::create_directories(a.output);
        pcgrid::io::write_text(fs::path(a.output) / "report.json", j.dump(2) + "\n");
        pcgrid::io::write_text(fs::path(a.output) / "report.csv", pcgrid::io::report_csv(rep));
    }
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_hist(const HistArgs& a) {
    const pcgrid::Grid grid = load_grid(a.input);
    const pcgrid::PerturbedSystem sys = pcgrid::assemble(grid);
    const double t_end = a.t_end.value_or(pcgrid::default_horizon(sys));
    const double h = a.h.value_or(pcgrid::default_step(sys, t_end));
    const auto times = pcgrid::time_grid(h, t_end);
    if (a.time < 0.0 || a.time > times.back() * (1.0 + 1e-12)) {
        throw UsageError("--time lies outside [0, " + pcgrid::format_value(times.back()) + "]");
    }
    const auto step = static_cast<std::size_t>(std::lround(a.time / h));
    auto it = std::find(sys.node_names.begin(), sys.node_names.end(), a.node);
    if (it == sys.node_names.end()) throw UsageError("unknown node '" + a.node + "'");
    const auto node = static_cast<std::size_t>(it - sys.node_names.begin());

    std::optional<std::pair<double, double>> range;
    if (a.range_lo || a.range_hi) {
        if (!a.range_lo || !a.range_hi || !(*a.range_hi > *a.range_lo)) {
            throw UsageError("--range-lo and --range-hi must be given together with lo < hi");
        }
        range = std::pair{*a.range_lo, *a.range_hi};
    }

    std::vector<double> values;
    if (a.engine == "pc") {
        const pcgrid::PcResult r = pcgrid::run_pc(grid, {a.p, h, t_end, false});
        values = pcgrid::sample_expansion(r, node, step, a.samples, a.seed);
    } else {
        pcgrid::McOptions o;
        o.samples = a.samples;
        o.h = h;
        o.t_end = t_end;
        o.seed = a.seed;
        o.probe = std::pair{node, step};
        const pcgrid::McResult r = pcgrid::run_mc(grid, o);
        values = r.probe_values;
    }
    const pcgrid::Histogram hist = pcgrid::make_histogram(values, a.bins, range);
    const std::string text = a.format == "json" ? pcgrid::io::histogram_json(hist).dump(1) + "\n"
                                                : pcgrid::io::histogram_csv(hist);
    if (a.output.empty()) {
        std::cout << text;
    } else {
        pcgrid::io::write_text(a.output, text);
    }
    return 0;
}

int cmd_pattern(unsigned p, const std::string& input) {
    pcgrid::Grid grid;
    if (input.empty()) {
        grid = pcgrid::parse_netlist(".VARIATION SW3=20 ST3=15 SL3=20\nV1 a 0 1 RPKG=1\nR1 a b 1\nC1 b 0 1p\n");
    } else {
        grid = load_grid(input);
    }
    const pcgrid::PerturbedSystem sys = pcgrid::assemble(grid);
    const pcgrid::AugmentedSystem aug = pcgrid::assemble_augmented(sys, pcgrid::ChaosBasis(sys.variables, p));
    std::cout << "# basis";
    for (std::size_t j = 0; j < aug.terms(); ++j) std::cout << ' ' << aug.basis.label(j);
    std::cout << "\n# G\n" << aug.pattern(aug.blocks_g) << "# C\n" << aug.pattern(aug.blocks_c);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic transient IR-drop analysis with Hermite polynomial chaos"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Write a synthetic mesh grid netlist");
    g->add_option("--rows", gen.rows, "Mesh rows")->check(CLI::Range(2, 100000));
    g->add_option("--cols", gen.cols, "Mesh columns")->check(CLI::Range(2, 100000));
    g->add_option("--seed", gen.seed, "Load placement seed");
    g->add_option("--output", gen.output, "Netlist file (default: stdout)");
    g->add_option("--r-seg", gen.r_seg, "Segment resistance [ohm]")->transform(kSi)->check(CLI::PositiveNumber);
    g->add_option("--c-node", gen.c_node, "Node capacitance [F]")->transform(kSi)->check(CLI::NonNegativeNumber);
    g->add_option("--pin-spacing", gen.pin_spacing, "Vdd pin pitch in nodes")->check(CLI::PositiveNumber);
    g->add_option("--vdd", gen.vdd, "Supply voltage [V]")->transform(kSi)->check(CLI::PositiveNumber);
    g->add_option("--rpkg", gen.rpkg, "Package resistance per pin [ohm]")->transform(kSi)->check(CLI::NonNegativeNumber);
    g->add_option("--load-density", gen.load_density, "Fraction of nodes with a load")->check(CLI::Range(0.0, 1.0));
    g->add_option("--load-base", gen.load_base, "Load base current [A]")->transform(kSi);
    g->add_option("--load-peak", gen.load_peak, "Load peak current [A]")->transform(kSi);
    g->add_option("--load-delay", gen.load_delay, "Max random load delay [s]")->transform(kSi)->check(CLI::NonNegativeNumber);
    g->add_option("--sw3", gen.sw3, "3-sigma width variation [%]");
    g->add_option("--st3", gen.st3, "3-sigma thickness variation [%]");
    g->add_option("--sl3", gen.sl3, "3-sigma channel-length variation [%]");
    g->add_option("--gcf", gen.gcf, "Varying (gate) share of node capacitance")->check(CLI::Range(0.0, 1.0));
    g->add_option("--isens", gen.isens, "Load current sensitivity to xi_L");

    RunArgs run;
    auto* r = app.add_subcommand("run", "Run an analysis engine on a netlist");
    r->add_option("--input", run.input, "Netlist file")->required()->check(CLI::ExistingFile);
    r->add_option("--output", run.output, "Result directory")->required();
    r->add_option("--engine", run.engine, "pc | mc | quad")->check(CLI::IsMember({"pc", "mc", "quad"}));
    r->add_option("--p", run.p, "Expansion order")->check(CLI::Range(1u, 10u));
    r->add_option("--h", run.h, "Time step [s]")->transform(kSi)->check(CLI::PositiveNumber);
    r->add_option("--t-end", run.t_end, "Horizon [s]")->transform(kSi)->check(CLI::PositiveNumber);
    r->add_option("--samples", run.samples, "Monte Carlo samples")->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
    r->add_option("--seed", run.seed, "Monte Carlo seed");
    r->add_option("--level", run.level, "Gauss-Hermite points per variable")->check(CLI::Range(2u, 200u));
    r->add_option("--threads", run.threads, "Monte Carlo worker threads")->check(CLI::Range(1u, 1024u));
    r->add_option("--format", run.format, "Stats format: csv | json")->check(CLI::IsMember({"csv", "json"}));

    CompareArgs cmp;
    auto* c = app.add_subcommand("compare", "Compare a pc result directory against a reference");
    c->add_option("pc_dir", cmp.pc_dir, "Result directory of the pc run")->required()->check(CLI::ExistingDirectory);
    c->add_option("ref_dir", cmp.ref_dir, "Reference (mc or quad) result directory")->required()->check(CLI::ExistingDirectory);
    c->add_option("--output", cmp.output, "Directory for report.json and report.csv");

    HistArgs hist;
    auto* hs = app.add_subcommand("hist", "Histogram of the drop at one node and time");
    hs->add_option("--input", hist.input, "Netlist file")->required()->check(CLI::ExistingFile);
    hs->add_option("--engine", hist.engine, "pc | mc")->check(CLI::IsMember({"pc", "mc"}));
    hs->add_option("--node", hist.node, "Node name")->required();
    hs->add_option("--time", hist.time, "Time [s], rounded to the nearest step")->transform(kSi)->required();
    hs->add_option("--p", hist.p, "Expansion order")->check(CLI::Range(1u, 10u));
    hs->add_option("--h", hist.h, "Time step [s]")->transform(kSi)->check(CLI::PositiveNumber);
    hs->add_option("--t-end", hist.t_end, "Horizon [s]")->transform(kSi)->check(CLI::PositiveNumber);
    hs->add_option("--samples", hist.samples, "Samples")->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
    hs->add_option("--seed", hist.seed, "Seed");
    hs->add_option("--bins", hist.bins, "Bin count")->check(CLI::Range(std::size_t{1}, std::size_t{100000}));
    hs->add_option("--range-lo", hist.range_lo, "Lower histogram edge [V]")->transform(kSi);
    hs->add_option("--range-hi", hist.range_hi, "Upper histogram edge [V]")->transform(kSi);
    hs->add_option("--output", hist.output, "Output file (default: stdout)");
    hs->add_option("--format", hist.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

    unsigned pattern_p = 2;
    std::string pattern_input;
    auto* pt = app.add_subcommand("pattern", "Print the Galerkin block pattern");
    pt->add_option("--p", pattern_p, "Expansion order")->check(CLI::Range(1u, 6u));
    pt->add_option("--input", pattern_input, "Netlist (default: two-variable toy grid)")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*g) return cmd_generate(gen);
        if (*r) return cmd_run(run, *r);
        if (*c) return cmd_compare(cmp);
        if (*hs) return cmd_hist(hist);
        if (*pt) return cmd_pattern(pattern_p, pattern_input);
    } catch (const UsageError& e) {
        std::cerr << "pcgrid: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "pcgrid: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}
