#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include <anj/errors.hpp>

namespace anj::cli {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        const auto piece = trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
        if (!piece.empty()) out.emplace_back(piece);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double to_double(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw ParseError("expected a number, got '" + std::string(text) + "'");
    }
    return v;
}

template <class Int>
Int to_int(std::string_view text) {
    text = trim(text);
    Int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw ParseError("expected an integer, got '" + std::string(text) + "'");
    }
    return v;
}

bool to_bool(std::string_view text) {
    text = trim(text);
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ParseError("expected true or false, got '" + std::string(text) + "'");
}

// Bare numbers are watts.
double to_watts(std::string_view text) {
    text = trim(text);
    if (ends_with(text, "dBm")) return dbm_to_watts(to_double(text.substr(0, text.size() - 3)));
    if (ends_with(text, "mW")) return 1e-3 * to_double(text.substr(0, text.size() - 2));
    if (ends_with(text, "W")) return to_double(text.substr(0, text.size() - 1));
    return to_double(text);
}

// Bare numbers are linear; "-inf dB" gives 0.
double to_linear(std::string_view text) {
    text = trim(text);
    if (ends_with(text, "dB")) return db_to_linear(to_double(text.substr(0, text.size() - 2)));
    return to_double(text);
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"p_s", [](auto& c, auto v) { c.params.p_s = to_watts(v); }},
        {"p_j", [](auto& c, auto v) { c.params.p_j = to_watts(v); }},
        {"p_c", [](auto& c, auto v) { c.params.p_c = to_watts(v); }},
        {"sigma2_d", [](auto& c, auto v) { c.params.sigma2_d = to_watts(v); }},
        {"sigma2_e", [](auto& c, auto v) { c.sigma2_e = to_watts(v); }},
        {"sigma2_err", [](auto& c, auto v) { c.sigma2_err = to_double(v); }},
        {"rho", [](auto& c, auto v) { c.params.rho = to_double(v); }},
        {"rs", [](auto& c, auto v) { c.params.r_s = to_double(v); }},
        {"n_t", [](auto& c, auto v) { c.params.n_t = to_int<int>(v); }},
        {"n_r", [](auto& c, auto v) { c.params.n_r = to_int<int>(v); }},
        {"k_rician", [](auto& c, auto v) { c.params.k_rician = to_linear(v); }},
        {"eta", [](auto& c, auto v) { c.params.eta = to_double(v); }},
        {"eta_prime", [](auto& c, auto v) { c.params.eta_prime = to_double(v); }},
        {"c1", [](auto& c, auto v) { c.storage.c1 = to_double(v); }},
        {"c2", [](auto& c, auto v) { c.storage.c2 = to_double(v); }},
        {"L", [](auto& c, auto v) { c.storage.levels = to_int<int>(v); }},
        {"d_sj", [](auto& c, auto v) { c.topology.d_sj = to_double(v); }},
        {"d_se", [](auto& c, auto v) { c.topology.d_se = to_double(v); }},
        {"d_sd", [](auto& c, auto v) { c.topology.d_sd = to_double(v); }},
        {"alpha", [](auto& c, auto v) { c.topology.alpha = to_double(v); }},
        {"sweep.axis",
         [](auto& c, auto v) {
             static const std::vector<std::string_view> axes = {"p_s_dbm", "p_j_dbm", "rho", "n_t_split",
                                                                "rs",      "L",       "c1"};
             const auto axis = trim(v);
             if (!axis.empty() && std::find(axes.begin(), axes.end(), axis) == axes.end()) {
                 throw ParseError("unknown sweep axis '" + std::string(axis) +
                                  "' (expected p_s_dbm, p_j_dbm, rho, n_t_split, rs, L or c1)");
             }
             c.sweep.axis = std::string(axis);
         }},
        {"sweep.values", [](auto& c, auto v) { c.sweep.values = split(v, ','); }},
        {"mc.enabled", [](auto& c, auto v) { c.mc.enabled = to_bool(v); }},
        {"mc.blocks", [](auto& c, auto v) { c.mc.blocks = to_int<std::uint64_t>(v); }},
        {"mc.seed", [](auto& c, auto v) { c.mc.seed = to_int<std::uint64_t>(v); }},
        {"mc.batches", [](auto& c, auto v) { c.mc.batches = to_int<int>(v); }},
        {"mc.threads", [](auto& c, auto v) { c.mc.threads = to_int<int>(v); }},
        {"mc.target_se", [](auto& c, auto v) { c.mc.target_se = to_double(v); }},
        {"mc.batch_csv", [](auto& c, auto v) { c.mc.batch_csv = std::string(trim(v)); }},
        {"pj_grid",
         [](auto& c, auto v) {
             const auto parts = split(v, ':');
             if (parts.size() != 3) throw ParseError("pj_grid expects start:stop:count in dBm");
             c.pj_grid = PjGrid{to_double(parts[0]), to_double(parts[1]), to_int<int>(parts[2])};
             if (c.pj_grid.count < 1) throw ParseError("pj_grid count must be >= 1");
         }},
        {"output.path", [](auto& c, auto v) { c.output.path = std::string(trim(v)); }},
        {"output.format",
         [](auto& c, auto v) {
             if (trim(v) != "csv") throw ParseError("only output.format = csv is supported");
             c.output.format = "csv";
         }},
    };
    return table;
}

void apply_assignment(ExperimentConfig& cfg, std::string_view line, const std::string& where) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(where + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ParseError(where + ": unknown key '" + std::string(key) + "'");
    try {
        it->second(cfg, value);
    } catch (const ParseError& e) {
        throw ParseError(where + ": " + std::string(key) + ": " + e.what());
    }
}

std::vector<std::pair<std::string, std::string>> entries(const ExperimentConfig& c) {
    const auto d = format_double;
    std::vector<std::pair<std::string, std::string>> e = {
        {"p_s", d(c.params.p_s)},
        {"p_j", d(c.params.p_j)},
        {"p_c", d(c.params.p_c)},
        {"sigma2_d", d(c.params.sigma2_d)},
    };
    if (c.sigma2_e) e.emplace_back("sigma2_e", d(*c.sigma2_e));
    if (c.sigma2_err) e.emplace_back("sigma2_err", d(*c.sigma2_err));
    const std::vector<std::pair<std::string, std::string>> rest = {
        {"rho", d(c.params.rho)},
        {"rs", d(c.params.r_s)},
        {"n_t", std::to_string(c.params.n_t)},
        {"n_r", std::to_string(c.params.n_r)},
        {"k_rician", d(c.params.k_rician)},
        {"eta", d(c.params.eta)},
        {"eta_prime", d(c.params.eta_prime)},
        {"c1", d(c.storage.c1)},
        {"c2", d(c.storage.c2)},
        {"L", std::to_string(c.storage.levels)},
        {"d_sj", d(c.topology.d_sj)},
        {"d_se", d(c.topology.d_se)},
        {"d_sd", d(c.topology.d_sd)},
        {"alpha", d(c.topology.alpha)},
    };
    e.insert(e.end(), rest.begin(), rest.end());
    std::string values;
    for (std::size_t i = 0; i < c.sweep.values.size(); ++i) {
        if (i > 0) values += ',';
        values += c.sweep.values[i];
    }
    const std::vector<std::pair<std::string, std::string>> tail = {
        {"sweep.axis", c.sweep.axis},
        {"sweep.values", values},
        {"mc.enabled", c.mc.enabled ? "true" : "false"},
        {"mc.blocks", std::to_string(c.mc.blocks)},
        {"mc.seed", std::to_string(c.mc.seed)},
        {"mc.batches", std::to_string(c.mc.batches)},
        {"mc.threads", std::to_string(c.mc.threads)},
        {"mc.target_se", d(c.mc.target_se)},
        {"mc.batch_csv", c.mc.batch_csv},
        {"pj_grid", d(c.pj_grid.start_dbm) + ":" + d(c.pj_grid.stop_dbm) + ":" +
                        std::to_string(c.pj_grid.count)},
        {"output.path", c.output.path},
        {"output.format", c.output.format},
    };
    e.insert(e.end(), tail.begin(), tail.end());
    return e;
}

std::string short_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> PjGrid::watts() const {
    if (count < 1) throw UsageError("pj_grid: count must be >= 1");
    std::vector<double> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        const double dbm =
            count == 1 ? start_dbm : start_dbm + (stop_dbm - start_dbm) * i / (count - 1);
        out.push_back(dbm_to_watts(dbm));
    }
    return out;
}

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
    ExperimentConfig cfg;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        std::string_view line = text.substr(start, end == std::string_view::npos ? text.npos : end - start);
        ++line_no;
        if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (!line.empty() && line.front() != '[') {
            apply_assignment(cfg, line, source + ":" + std::to_string(line_no));
        }
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return cfg;
}

void apply_override(ExperimentConfig& cfg, std::string_view assignment, const std::string& source) {
    apply_assignment(cfg, trim(assignment), source);
}

std::string serialize(const ExperimentConfig& cfg) {
    std::string out;
    for (const auto& [k, v] : entries(cfg)) out += k + " = " + v + "\n";
    return out;
}

std::string serialize_inline(const ExperimentConfig& cfg) {
    std::string out;
    for (const auto& [k, v] : entries(cfg)) {
        if (!out.empty()) out += "; ";
        out += k + "=" + v;
    }
    return out;
}

SystemParams resolve_params(const ExperimentConfig& cfg) {
    SystemParams p = cfg.params;
    apply_topology(p, cfg.topology);
    p.sigma2_e = cfg.sigma2_e.value_or(p.sigma2_d);
    p.sigma2_err = cfg.sigma2_err.value_or(p.omega_jd);
    return p;
}

std::vector<double> parse_range(std::string_view token) {
    const auto parts = split(token, ':');
    if (parts.size() == 1) return {to_double(parts[0])};
    if (parts.size() != 3) throw ParseError("expected start:stop:step, got '" + std::string(token) + "'");
    const double start = to_double(parts[0]);
    const double stop = to_double(parts[1]);
    const double step = to_double(parts[2]);
    if (step == 0 || (stop - start) / step < 0 || !std::isfinite((stop - start) / step)) {
        throw ParseError("range '" + std::string(token) + "' does not reach its end point");
    }
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (n > 1'000'000) throw ParseError("range '" + std::string(token) + "' is too long");
    std::vector<double> out;
    out.reserve(n);
    for (long i = 0; i < n; ++i) out.push_back(start + step * i);
    return out;
}

std::vector<SweepPoint> expand_sweep(const ExperimentConfig& cfg) {
    const SystemParams base = resolve_params(cfg);
    std::vector<SweepPoint> points;
    const auto& axis = cfg.sweep.axis;

    if (axis.empty()) {
        points.push_back({"", base, cfg.storage});
    } else {
        if (cfg.sweep.values.empty()) throw ParseError("sweep.values: empty list for axis " + axis);
        for (const auto& token : cfg.sweep.values) {
            if (axis == "n_t_split") {
                const auto parts = split(token, '/');
                if (parts.size() != 2) throw ParseError("n_t_split values look like 4/4, got '" + token + "'");
                SweepPoint pt{token, base, cfg.storage};
                pt.params.n_t = to_int<int>(parts[0]);
                pt.params.n_r = to_int<int>(parts[1]);
                points.push_back(pt);
                continue;
            }
            for (const double v : parse_range(token)) {
                SweepPoint pt{short_label(v), base, cfg.storage};
                if (axis == "p_s_dbm") {
                    pt.params.p_s = dbm_to_watts(v);
                } else if (axis == "p_j_dbm") {
                    pt.params.p_j = dbm_to_watts(v);
                } else if (axis == "rho") {
                    pt.params.rho = v;
                } else if (axis == "rs") {
                    pt.params.r_s = v;
                } else if (axis == "L") {
                    if (v != std::floor(v)) throw ParseError("L must be an integer");
                    pt.storage.levels = static_cast<int>(v);
                } else if (axis == "c1") {
                    pt.storage.c1 = v;
                }
                points.push_back(pt);
            }
        }
    }
    for (const auto& pt : points) {
        try {
            validate(pt.params);
            make_storage(pt.storage, pt.params);
        } catch (const DomainError& e) {
            const std::string where = pt.label.empty() ? "" : " at " + axis + " = " + pt.label;
            throw DomainError(std::string(e.what()) + where);
        }
    }
    return points;
}

}  // namespace anj::cli
