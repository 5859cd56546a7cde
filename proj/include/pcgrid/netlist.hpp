#pragma once

// =============================================================================
// Power-grid netlist: parsing, writing, synthetic mesh generation and
// piecewise-linear load waveforms.
// =============================================================================
//
// Grammar (one element per line, '#' starts a comment, keywords are
// case-insensitive, ground is node "0"):
//
//   R<name> <a> <b> <ohms>
//   C<name> <a> <b> <farads>
//   I<name> <a> <b> PWL(<t1> <i1> <t2> <i2> ...)     current flows a -> b
//   V<name> <node> 0 <volts> [RPKG=<ohms>]
//   .VARIATION SW3=<pct> ST3=<pct> SL3=<pct> [GCF=<frac>] [ISENS=<coef>]
//   .RHSONLY [LEAKFRAC=<frac>] [LEAKSIG=<sigma>]
//   .REGION <node> <region-index>
//
// Numbers accept the suffixes f p n u m k.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace pcgrid {

inline constexpr std::string_view kGround = "0";

class NetlistError : public std::runtime_error {
public:
    NetlistError(std::size_t line, const std::string& what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    /// 1-based source line, 0 when the error is not tied to a line.
    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// -----------------------------------------------------------------------------
// Waveform
// -----------------------------------------------------------------------------

struct WaveformPoint {
    double time;   // s
    double value;  // A
    bool operator==(const WaveformPoint&) const = default;
};

/// Piecewise-linear waveform; holds its boundary values outside the range.
class Waveform {
public:
    Waveform() = default;

    explicit Waveform(std::vector<WaveformPoint> points) : points_(std::move(points)) {
        if (points_.empty()) throw std::invalid_argument("waveform needs at least one point");
        for (std::size_t i = 1; i < points_.size(); ++i) {
            if (!(points_[i].time > points_[i - 1].time)) {
                throw std::invalid_argument("waveform times must be strictly increasing");
            }
        }
    }

    [[nodiscard]] const std::vector<WaveformPoint>& points() const { return points_; }
    [[nodiscard]] bool empty() const { return points_.empty(); }

    [[nodiscard]] double operator()(double t) const {
        if (points_.empty()) return 0.0;
        if (t <= points_.front().time) return points_.front().value;
        if (t >= points_.back().time) return points_.back().value;
        auto it = std::upper_bound(points_.begin(), points_.end(), t,
                                   [](double v, const WaveformPoint& p) { return v < p.time; });
        const WaveformPoint& b = *it;
        const WaveformPoint& a = *(it - 1);
        const double f = (t - a.time) / (b.time - a.time);
        return a.value + f * (b.value - a.value);
    }

    bool operator==(const Waveform&) const = default;

private:
    std::vector<WaveformPoint> points_;
};

inline double eval_waveform(const Waveform& w, double t) { return w(t); }

// -----------------------------------------------------------------------------
// Grid
// -----------------------------------------------------------------------------

enum class ElementKind { resistor, capacitor, current_load, vdd_pin };

struct Element {
    ElementKind kind = ElementKind::resistor;
    std::string name;    // including the type letter, e.g. "R12"
    std::string node_a;
    std::string node_b;
    double value = 0.0;  // ohms, farads or volts; unused for loads
    double rpkg = 0.0;   // package resistance of a Vdd pin; 0 = ideal
    Waveform waveform;   // current loads only

    bool operator==(const Element&) const = default;
};

/// Process-variation description. Sigmas are 1-sigma fractional deviations;
/// the netlist and CLI carry 3-sigma percentages.
struct VariationSpec {
    double sigma_w = 0.0;
    double sigma_t = 0.0;
    double sigma_l = 0.0;
    double gate_cap_fraction = 0.4;
    double current_sensitivity = -1.0;

    // Load-only (deterministic G, C) mode with per-region variables.
    bool rhs_only = false;
    double leakage_fraction = 0.0;
    double leakage_sigma = 0.0;
    std::map<std::string, int> regions;

    bool operator==(const VariationSpec&) const = default;

    [[nodiscard]] std::size_t region_count() const {
        int m = -1;
        for (const auto& [node, r] : regions) m = std::max(m, r);
        return static_cast<std::size_t>(m + 1);
    }
};

inline double sigma_from_pct3(double pct) { return pct / 300.0; }

/// 3-sigma percentage that maps back onto `sigma` exactly via sigma_from_pct3
/// whenever such a percentage exists (always true for parsed values).
inline double pct3_from_sigma(double sigma) {
    double pct = sigma * 300.0;
    for (int i = 0; i < 16 && sigma_from_pct3(pct) != sigma; ++i) {
        pct = std::nextafter(pct, sigma_from_pct3(pct) < sigma ? HUGE_VAL : -HUGE_VAL);
    }
    return pct;
}

struct Grid {
    std::vector<Element> elements;
    std::vector<std::string> node_names;                  // index -> name, ground excluded
    std::unordered_map<std::string, std::size_t> nodes;   // name -> index
    VariationSpec variation;

    [[nodiscard]] std::size_t node_count() const { return node_names.size(); }

    [[nodiscard]] std::optional<std::size_t> node_index(std::string_view name) const {
        auto it = nodes.find(std::string(name));
        if (it == nodes.end()) return std::nullopt;
        return it->second;
    }

    /// Registers `name` if new; ground is never indexed.
    std::optional<std::size_t> intern(const std::string& name) {
        if (name == kGround) return std::nullopt;
        auto [it, inserted] = nodes.emplace(name, node_names.size());
        if (inserted) node_names.push_back(name);
        return it->second;
    }

    [[nodiscard]] std::size_t count(ElementKind kind) const {
        return static_cast<std::size_t>(std::count_if(elements.begin(), elements.end(),
                                                      [kind](const Element& e) { return e.kind == kind; }));
    }

    /// Largest pin voltage; drops are reported against this value.
    [[nodiscard]] double vdd() const {
        double v = 0.0;
        for (const Element& e : elements) {
            if (e.kind == ElementKind::vdd_pin) v = std::max(v, e.value);
        }
        return v;
    }

    bool operator==(const Grid& o) const {
        return elements == o.elements && node_names == o.node_names && variation == o.variation;
    }
};

// -----------------------------------------------------------------------------
// Number formatting / parsing
// -----------------------------------------------------------------------------

namespace detail {

inline std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

inline std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace detail

/// Parses a real number with an optional f/p/n/u/m/k suffix.
inline std::optional<double> parse_value(std::string_view token) {
    if (token.empty()) return std::nullopt;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (*first == '+') ++first;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{}) return std::nullopt;
    if (ptr == last) return v;
    if (last - ptr != 1) return std::nullopt;
    switch (std::tolower(static_cast<unsigned char>(*ptr))) {
        case 'f': return v * 1e-15;
        case 'p': return v * 1e-12;
        case 'n': return v * 1e-9;
        case 'u': return v * 1e-6;
        case 'm': return v * 1e-3;
        case 'k': return v * 1e3;
        default: return std::nullopt;
    }
}

/// Shortest decimal text that round-trips to exactly `v`.
inline std::string format_value(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

// -----------------------------------------------------------------------------
// Parser
// -----------------------------------------------------------------------------

namespace detail {

inline double require_value(std::size_t line, std::string_view token, std::string_view what) {
    auto v = parse_value(token);
    if (!v || !std::isfinite(*v)) {
        throw NetlistError(line, "malformed " + std::string(what) + " '" + std::string(token) + "'");
    }
    return *v;
}

/// KEY=value options, keys upper-cased.
inline std::map<std::string, double> parse_options(std::size_t line,
                                                   const std::vector<std::string>& tokens,
                                                   std::size_t first,
                                                   const std::unordered_set<std::string>& allowed) {
    std::map<std::string, double> out;
    for (std::size_t i = first; i < tokens.size(); ++i) {
        const auto eq = tokens[i].find('=');
        if (eq == std::string::npos || eq == 0) {
            throw NetlistError(line, "expected KEY=value, got '" + tokens[i] + "'");
        }
        std::string key = upper(std::string_view(tokens[i]).substr(0, eq));
        if (!allowed.contains(key)) throw NetlistError(line, "unknown option '" + key + "'");
        out[key] = require_value(line, std::string_view(tokens[i]).substr(eq + 1), key);
    }
    return out;
}

inline Waveform parse_pwl(std::size_t line, std::string_view rest) {
    const std::string low = lower(rest);
    const auto open = low.find("pwl");
    if (open == std::string::npos || low.find_first_not_of(" \t") != open) {
        throw NetlistError(line, "current load needs PWL(...)");
    }
    const auto lpar = low.find('(', open);
    const auto rpar = low.find(')', open);
    if (lpar == std::string::npos || rpar == std::string::npos || rpar < lpar ||
        low.find_first_not_of(" \t", open + 3) != lpar) {
        throw NetlistError(line, "malformed PWL(...)");
    }
    if (low.find_first_not_of(" \t\r", rpar + 1) != std::string::npos) {
        throw NetlistError(line, "trailing text after PWL(...)");
    }
    auto tokens = split_ws(rest.substr(lpar + 1, rpar - lpar - 1));
    if (tokens.empty() || tokens.size() % 2 != 0) {
        throw NetlistError(line, "PWL needs an even, nonzero number of values");
    }
    std::vector<WaveformPoint> pts;
    for (std::size_t i = 0; i < tokens.size(); i += 2) {
        pts.push_back({require_value(line, tokens[i], "PWL time"),
                       require_value(line, tokens[i + 1], "PWL value")});
    }
    try {
        return Waveform(std::move(pts));
    } catch (const std::invalid_argument& e) {
        throw NetlistError(line, e.what());
    }
}

}  // namespace detail

/// Checks that every node reaches a Vdd pin through resistors.
inline void check_connectivity(const Grid& grid) {
    const std::size_t n = grid.node_count();
    std::vector<std::vector<std::size_t>> adj(n);
    std::vector<std::size_t> frontier;
    std::vector<bool> seen(n, false);
    for (const Element& e : grid.elements) {
        auto a = grid.node_index(e.node_a);
        auto b = grid.node_index(e.node_b);
        if (e.kind == ElementKind::resistor && a && b) {
            adj[*a].push_back(*b);
            adj[*b].push_back(*a);
        } else if (e.kind == ElementKind::vdd_pin && a && !seen[*a]) {
            seen[*a] = true;
            frontier.push_back(*a);
        }
    }
    while (!frontier.empty()) {
        const std::size_t v = frontier.back();
        frontier.pop_back();
        for (std::size_t w : adj[v]) {
            if (!seen[w]) {
                seen[w] = true;
                frontier.push_back(w);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!seen[i]) {
            throw NetlistError(0, "dangling node '" + grid.node_names[i] +
                                      "' has no resistive path to a Vdd pin");
        }
    }
}

inline Grid parse_netlist(std::string_view text) {
    Grid grid;
    std::unordered_set<std::string> names;
    std::vector<std::pair<std::size_t, std::string>> region_nodes;  // line, node
    bool saw_variation = false;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        auto tokens = detail::split_ws(line);
        if (tokens.empty()) {
            if (eol == text.size()) break;
            continue;
        }

        const std::string head = detail::upper(tokens[0]);
        if (head[0] == '.') {
            if (head == ".VARIATION") {
                if (saw_variation) throw NetlistError(line_no, "duplicate .VARIATION");
                saw_variation = true;
                auto opts = detail::parse_options(line_no, tokens, 1,
                                                  {"SW3", "ST3", "SL3", "GCF", "ISENS"});
                VariationSpec& v = grid.variation;
                if (opts.contains("SW3")) v.sigma_w = sigma_from_pct3(opts["SW3"]);
                if (opts.contains("ST3")) v.sigma_t = sigma_from_pct3(opts["ST3"]);
                if (opts.contains("SL3")) v.sigma_l = sigma_from_pct3(opts["SL3"]);
                if (opts.contains("GCF")) v.gate_cap_fraction = opts["GCF"];
                if (opts.contains("ISENS")) v.current_sensitivity = opts["ISENS"];
                for (double s : {v.sigma_w, v.sigma_t, v.sigma_l}) {
                    if (s < 0.0 || s >= 1.0 / 3.0) {
                        throw NetlistError(line_no, "3-sigma variation must lie in [0, 100) percent");
                    }
                }
                if (v.gate_cap_fraction < 0.0 || v.gate_cap_fraction > 1.0) {
                    throw NetlistError(line_no, "GCF must lie in [0, 1]");
                }
            } else if (head == ".RHSONLY") {
                auto opts = detail::parse_options(line_no, tokens, 1, {"LEAKFRAC", "LEAKSIG"});
                VariationSpec& v = grid.variation;
                v.rhs_only = true;
                if (opts.contains("LEAKFRAC")) v.leakage_fraction = opts["LEAKFRAC"];
                if (opts.contains("LEAKSIG")) v.leakage_sigma = opts["LEAKSIG"];
                if (v.leakage_fraction < 0.0 || v.leakage_fraction > 1.0) {
                    throw NetlistError(line_no, "LEAKFRAC must lie in [0, 1]");
                }
                if (v.leakage_sigma < 0.0) throw NetlistError(line_no, "LEAKSIG must be nonnegative");
            } else if (head == ".REGION") {
                if (tokens.size() != 3) throw NetlistError(line_no, ".REGION <node> <index>");
                if (tokens[1] == kGround) throw NetlistError(line_no, "ground has no region");
                int r = 0;
                auto [p, ec] = std::from_chars(tokens[2].data(), tokens[2].data() + tokens[2].size(), r);
                if (ec != std::errc{} || p != tokens[2].data() + tokens[2].size() || r < 0) {
                    throw NetlistError(line_no, "region index must be a nonnegative integer");
                }
                if (!grid.variation.regions.emplace(tokens[1], r).second) {
                    throw NetlistError(line_no, "node '" + tokens[1] + "' already has a region");
                }
                region_nodes.emplace_back(line_no, tokens[1]);
            } else {
                throw NetlistError(line_no, "unknown directive '" + tokens[0] + "'");
            }
            continue;
        }

        Element e;
        e.name = tokens[0];
        if (!names.insert(detail::upper(e.name)).second) {
            throw NetlistError(line_no, "duplicate element name '" + e.name + "'");
        }
        if (tokens.size() < 3) throw NetlistError(line_no, "element needs two nodes");
        e.node_a = tokens[1];
        e.node_b = tokens[2];

        switch (head[0]) {
            case 'R':
            case 'C': {
                if (tokens.size() != 4) throw NetlistError(line_no, "expected <name> <a> <b> <value>");
                e.kind = head[0] == 'R' ? ElementKind::resistor : ElementKind::capacitor;
                e.value = detail::require_value(line_no, tokens[3], "value");
                if (!(e.value > 0.0)) {
                    throw NetlistError(line_no, "nonpositive value for '" + e.name + "'");
                }
                break;
            }
            case 'I': {
                e.kind = ElementKind::current_load;
                // everything after the second node
                std::string_view rest = line;
                for (int skip = 0; skip < 3; ++skip) {
                    auto start = rest.find_first_not_of(" \t");
                    rest = rest.substr(start);
                    rest = rest.substr(std::min(rest.find_first_of(" \t"), rest.size()));
                }
                e.waveform = detail::parse_pwl(line_no, rest);
                break;
            }
            case 'V': {
                e.kind = ElementKind::vdd_pin;
                if (e.node_b != kGround) throw NetlistError(line_no, "Vdd pin must connect to ground");
                if (e.node_a == kGround) throw NetlistError(line_no, "Vdd pin shorts ground");
                if (tokens.size() < 4) throw NetlistError(line_no, "Vdd pin needs a voltage");
                e.value = detail::require_value(line_no, tokens[3], "voltage");
                if (!(e.value > 0.0)) throw NetlistError(line_no, "Vdd voltage must be positive");
                auto opts = detail::parse_options(line_no, tokens, 4, {"RPKG"});
                e.rpkg = opts.contains("RPKG") ? opts["RPKG"] : 0.0;
                if (e.rpkg < 0.0) throw NetlistError(line_no, "RPKG must be nonnegative");
                break;
            }
            default:
                throw NetlistError(line_no, "unknown element type '" + tokens[0] + "'");
        }
        if (e.node_a == e.node_b) throw NetlistError(line_no, "element '" + e.name + "' is shorted");
        grid.intern(e.node_a);
        grid.intern(e.node_b);
        grid.elements.push_back(std::move(e));
        if (eol == text.size()) break;
    }

    if (grid.count(ElementKind::vdd_pin) == 0) throw NetlistError(0, "no Vdd pin");
    for (const auto& [line, node] : region_nodes) {
        if (!grid.node_index(node)) throw NetlistError(line, "region for unknown node '" + node + "'");
    }
    check_connectivity(grid);
    return grid;
}

/// Writes `grid` in the grammar accepted by parse_netlist; parsing the result
/// gives back an identical Grid.
inline std::string write_netlist(const Grid& grid) {
    std::ostringstream os;
    const VariationSpec& v = grid.variation;
    os << ".VARIATION SW3=" << format_value(pct3_from_sigma(v.sigma_w))
       << " ST3=" << format_value(pct3_from_sigma(v.sigma_t))
       << " SL3=" << format_value(pct3_from_sigma(v.sigma_l))
       << " GCF=" << format_value(v.gate_cap_fraction)
       << " ISENS=" << format_value(v.current_sensitivity) << '\n';
    if (v.rhs_only) {
        os << ".RHSONLY LEAKFRAC=" << format_value(v.leakage_fraction)
           << " LEAKSIG=" << format_value(v.leakage_sigma) << '\n';
    }
    for (const Element& e : grid.elements) {
        os << e.name << ' ' << e.node_a << ' ' << e.node_b << ' ';
        switch (e.kind) {
            case ElementKind::resistor:
            case ElementKind::capacitor:
                os << format_value(e.value);
                break;
            case ElementKind::current_load: {
                os << "PWL(";
                bool first = true;
                for (const auto& p : e.waveform.points()) {
                    if (!first) os << ' ';
                    first = false;
                    os << format_value(p.time) << ' ' << format_value(p.value);
                }
                os << ')';
                break;
            }
            case ElementKind::vdd_pin:
                os << format_value(e.value) << " RPKG=" << format_value(e.rpkg);
                break;
        }
        os << '\n';
    }
    // Regions are written in node-index order so re-parsing keeps the map.
    for (const std::string& name : grid.node_names) {
        if (auto it = v.regions.find(name); it != v.regions.end()) {
            os << ".REGION " << name << ' ' << it->second << '\n';
        }
    }
    return os.str();
}

// -----------------------------------------------------------------------------
// Synthetic mesh generator
// -----------------------------------------------------------------------------

struct LoadSpec {
    Waveform shape;                 // template, scaled per load
    double density = 0.0;           // fraction of nodes carrying a load
    double min_scale = 0.5;         // per-load amplitude multiplier range
    double max_scale = 1.5;
    double max_delay = 0.0;         // per-load random time shift in [0, max_delay]
    std::uint64_t seed = 1;
};

struct MeshSpec {
    std::size_t rows = 2;
    std::size_t cols = 2;
    double r_seg = 1.0;        // ohms per mesh segment
    double c_node = 1e-12;     // farads from every node to ground
    std::size_t pin_spacing = 1;
    double vdd = 1.2;
    double rpkg = 0.0;
    std::optional<LoadSpec> loads;
    VariationSpec variation;
};

inline std::string mesh_node_name(std::size_t r, std::size_t c) {
    return "n" + std::to_string(r) + "_" + std::to_string(c);
}

/// rows x cols resistive mesh with a capacitor at every node, Vdd pins on the
/// subgrid of multiples of pin_spacing, and seeded random PWL loads.
inline Grid generate_mesh(const MeshSpec& spec) {
    if (spec.rows < 2 || spec.cols < 2) throw std::invalid_argument("mesh needs rows, cols >= 2");
    if (spec.pin_spacing < 1 || spec.pin_spacing > std::max(spec.rows, spec.cols)) {
        throw std::invalid_argument("pin spacing larger than the grid");
    }
    if (!(spec.r_seg > 0.0) || !(spec.vdd > 0.0) || spec.c_node < 0.0 || spec.rpkg < 0.0) {
        throw std::invalid_argument("mesh element values out of range");
    }

    Grid g;
    g.variation = spec.variation;
    auto add = [&g](Element e) {
        g.intern(e.node_a);
        g.intern(e.node_b);
        g.elements.push_back(std::move(e));
    };
    for (std::size_t r = 0; r < spec.rows; ++r) {
        for (std::size_t c = 0; c < spec.cols; ++c) g.intern(mesh_node_name(r, c));
    }

    std::size_t k = 0;
    for (std::size_t r = 0; r < spec.rows; ++r) {
        for (std::size_t c = 0; c + 1 < spec.cols; ++c) {
            add({ElementKind::resistor, "Rh" + std::to_string(k++), mesh_node_name(r, c),
                 mesh_node_name(r, c + 1), spec.r_seg, 0.0, {}});
        }
    }
    k = 0;
    for (std::size_t r = 0; r + 1 < spec.rows; ++r) {
        for (std::size_t c = 0; c < spec.cols; ++c) {
            add({ElementKind::resistor, "Rv" + std::to_string(k++), mesh_node_name(r, c),
                 mesh_node_name(r + 1, c), spec.r_seg, 0.0, {}});
        }
    }
    if (spec.c_node > 0.0) {
        for (std::size_t r = 0; r < spec.rows; ++r) {
            for (std::size_t c = 0; c < spec.cols; ++c) {
                add({ElementKind::capacitor, "C" + std::to_string(r * spec.cols + c),
                     mesh_node_name(r, c), std::string(kGround), spec.c_node, 0.0, {}});
            }
        }
    }
    k = 0;
    for (std::size_t r = 0; r < spec.rows; r += spec.pin_spacing) {
        for (std::size_t c = 0; c < spec.cols; c += spec.pin_spacing) {
            add({ElementKind::vdd_pin, "V" + std::to_string(k++), mesh_node_name(r, c),
                 std::string(kGround), spec.vdd, spec.rpkg, {}});
        }
    }
    if (spec.loads && spec.loads->density > 0.0) {
        const LoadSpec& ls = *spec.loads;
        std::mt19937_64 rng(ls.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        k = 0;
        for (std::size_t r = 0; r < spec.rows; ++r) {
            for (std::size_t c = 0; c < spec.cols; ++c) {
                const double pick = unit(rng);
                const double scale = ls.min_scale + (ls.max_scale - ls.min_scale) * unit(rng);
                const double delay = ls.max_delay * unit(rng);
                if (pick >= ls.density) continue;
                std::vector<WaveformPoint> pts;
                for (const auto& p : ls.shape.points()) pts.push_back({p.time + delay, p.value * scale});
                add({ElementKind::current_load, "I" + std::to_string(k++), mesh_node_name(r, c),
                     std::string(kGround), 0.0, 0.0, Waveform(std::move(pts))});
            }
        }
    }
    check_connectivity(g);
    return g;
}

}  // namespace pcgrid
