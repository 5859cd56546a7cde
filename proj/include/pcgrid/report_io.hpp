#pragma once

// Result directories written by the command-line tool:
//
//   stats.csv    node,time_s,mean_drop_v,std_drop_v      (or stats.json)
//   nominal.csv  node,time_s,nominal_drop_v
//   coeffs.csv   node,time_s,term,value                  (pc only)
//   meta.json    engine, timings, configuration, basis size

#include "pcgrid/analysis.hpp"
#include "pcgrid/netlist.hpp"

#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcgrid::io {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

inline constexpr const char* kStatsHeader = "node,time_s,mean_drop_v,std_drop_v";

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    os << text;
    if (!os.flush()) throw std::runtime_error("failed writing '" + path.string() + "'");
}

inline std::string read_text(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

inline std::string stats_csv(const MomentField& f) {
    std::ostringstream os;
    os << kStatsHeader << '\n';
    for (std::size_t s = 0; s < f.steps(); ++s) {
        for (std::size_t i = 0; i < f.M(); ++i) {
            os << f.nodes[i] << ',' << format_value(f.times[s]) << ',' << format_value(f.mean_at(s, i)) << ','
               << format_value(f.std_at(s, i)) << '\n';
        }
    }
    return os.str();
}

inline json stats_json(const MomentField& f) {
    json j;
    j["nodes"] = f.nodes;
    j["time_s"] = f.times;
    json rows = json::array();
    for (std::size_t s = 0; s < f.steps(); ++s) {
        for (std::size_t i = 0; i < f.M(); ++i) {
            rows.push_back({{"node", f.nodes[i]},
                            {"time_s", f.times[s]},
                            {"mean_drop_v", f.mean_at(s, i)},
                            {"std_drop_v", f.std_at(s, i)}});
        }
    }
    j["rows"] = std::move(rows);
    return j;
}

inline std::string nominal_csv(const MomentField& f) {
    std::ostringstream os;
    os << "node,time_s,nominal_drop_v\n";
    for (std::size_t s = 0; s < f.steps(); ++s) {
        for (std::size_t i = 0; i < f.M(); ++i) {
            os << f.nodes[i] << ',' << format_value(f.times[s]) << ',' << format_value(f.mean_at(s, i)) << '\n';
        }
    }
    return os.str();
}

inline std::string coeffs_csv(const PcResult& r) {
    std::ostringstream os;
    os << "node,time_s,term,value\n";
    for (std::size_t s = 0; s < r.steps(); ++s) {
        for (std::size_t i = 0; i < r.M(); ++i) {
            for (std::size_t j = 0; j < r.terms(); ++j) {
                os << r.nodes[i] << ',' << format_value(r.times[s]) << ',' << j << ','
                   << format_value(r.coeff(s, j, i)) << '\n';
            }
        }
    }
    return os.str();
}

namespace detail {

inline double to_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw FormatError(where + ": bad number '" + s + "'");
    return v;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

/// Builds a field from (node, time, value[, value2]) rows in step-major order.
inline MomentField field_from_rows(const std::vector<std::vector<std::string>>& rows, bool has_std,
                                   const std::string& where) {
    MomentField f;
    std::map<std::string, std::size_t> node_pos;
    for (const auto& r : rows) {
        if (node_pos.emplace(r[0], f.nodes.size()).second) f.nodes.push_back(r[0]);
    }
    const std::size_t M = f.nodes.size();
    if (M == 0 || rows.size() % M != 0) throw FormatError(where + ": ragged node/time table");
    const std::size_t steps = rows.size() / M;
    f.resize(steps, M);
    f.times.resize(steps);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const std::size_t s = k / M;
        const std::size_t i = node_pos.at(rows[k][0]);
        if (i != k % M) throw FormatError(where + ": rows are not in step-major node order");
        const double t = to_double(rows[k][1], where);
        if (i == 0) {
            f.times[s] = t;
        } else if (t != f.times[s]) {
            throw FormatError(where + ": inconsistent time within a step");
        }
        f.mean[k] = to_double(rows[k][2], where);
        if (has_std) {
            const double sd = to_double(rows[k][3], where);
            f.var[k] = sd * sd;
        }
    }
    return f;
}

inline std::vector<std::vector<std::string>> read_csv(const fs::path& path, const std::string& header) {
    std::istringstream is(read_text(path));
    std::string line;
    if (!std::getline(is, line)) throw FormatError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) throw FormatError(path.string() + ": expected header '" + header + "'");
    const std::size_t cols = split_csv(header).size();
    std::vector<std::vector<std::string>> rows;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        auto r = split_csv(line);
        if (r.size() != cols) throw FormatError(path.string() + ": wrong column count in '" + line + "'");
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace detail

inline MomentField read_stats_csv(const fs::path& path) {
    return detail::field_from_rows(detail::read_csv(path, kStatsHeader), true, path.string());
}

inline MomentField read_stats_json(const fs::path& path) {
    const json j = json::parse(read_text(path));
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : j.at("rows")) {
        rows.push_back({r.at("node").get<std::string>(), format_value(r.at("time_s").get<double>()),
                        format_value(r.at("mean_drop_v").get<double>()),
                        format_value(r.at("std_drop_v").get<double>())});
    }
    return detail::field_from_rows(rows, true, path.string());
}

inline MomentField read_nominal_csv(const fs::path& path) {
    return detail::field_from_rows(detail::read_csv(path, "node,time_s,nominal_drop_v"), false, path.string());
}

/// Everything compare needs from one result directory.
struct ResultDir {
    MomentField stats;
    std::optional<MomentField> nominal;
    json meta;
};

inline ResultDir read_result_dir(const fs::path& dir) {
    ResultDir r;
    r.meta = json::parse(read_text(dir / "meta.json"));
    if (fs::exists(dir / "stats.csv")) {
        r.stats = read_stats_csv(dir / "stats.csv");
    } else if (fs::exists(dir / "stats.json")) {
        r.stats = read_stats_json(dir / "stats.json");
    } else {
        throw std::runtime_error("'" + dir.string() + "' has no stats.csv or stats.json");
    }
    r.stats.vdd = r.meta.at("vdd_v").get<double>();
    r.stats.wall_clock_s = r.meta.at("wall_clock_s").get<double>();
    if (fs::exists(dir / "nominal.csv")) {
        r.nominal = read_nominal_csv(dir / "nominal.csv");
        r.nominal->vdd = r.stats.vdd;
    }
    return r;
}

inline json report_json(const ComparisonReport& rep) {
    return json{{"avg_pct_err_mu", rep.avg_pct_err_mu},
                {"max_pct_err_mu", rep.max_pct_err_mu},
                {"avg_pct_err_sigma", rep.avg_pct_err_sigma},
                {"max_pct_err_sigma", rep.max_pct_err_sigma},
                {"pm3sigma_pct_of_nominal", rep.pm3sigma_pct_of_nominal},
                {"time_ref_s", rep.time_ref_s},
                {"time_pc_s", rep.time_pc_s},
                {"speedup", rep.speedup},
                {"cells", rep.cells},
                {"sigma_cells", rep.sigma_cells},
                {"excluded_sigma_cells", rep.excluded_sigma_cells}};
}

inline std::string report_csv(const ComparisonReport& rep) {
    const json j = report_json(rep);
    std::ostringstream head, row;
    bool first = true;
    for (const auto& [k, v] : j.items()) {
        if (!first) {
            head << ',';
            row << ',';
        }
        first = false;
        head << k;
        if (v.is_number_float()) {
            row << format_value(v.get<double>());
        } else {
            row << v.dump();
        }
    }
    return head.str() + '\n' + row.str() + '\n';
}

inline std::string histogram_csv(const Histogram& h) {
    std::ostringstream os;
    os << "bin_center,count\n";
    const auto c = h.centers();
    for (std::size_t i = 0; i < c.size(); ++i) os << format_value(c[i]) << ',' << h.counts[i] << '\n';
    return os.str();
}

inline json histogram_json(const Histogram& h) {
    return json{{"bin_edges", h.edges}, {"bin_centers", h.centers()}, {"counts", h.counts}};
}

}  // namespace pcgrid::io
