#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include <anj/errors.hpp>
#include <anj/mc_sim.hpp>
#include <anj/secrecy.hpp>

#ifndef ANJ_VERSION
#define ANJ_VERSION "dev"
#endif

namespace anj::cli {
namespace {

std::string fmt(double v) { return format_double(v); }
std::string fmt(int v) { return std::to_string(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }

int worker_count(int configured) {
    if (configured > 0) return configured;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// Evaluates fn(0..n-1) on up to `threads` workers; results keep index order.
template <class Fn>
auto parallel_map(std::size_t n, int threads, Fn fn) {
    using R = decltype(fn(std::size_t{}));
    std::vector<std::optional<R>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int t = std::min<int>(worker_count(threads), static_cast<int>(std::max<std::size_t>(n, 1)));
    std::vector<std::thread> pool;
    for (int k = 1; k < t; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<R> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

std::vector<double> ps_axis_dbm() {
    std::vector<double> v;
    for (int ps = 10; ps <= 40; ++ps) v.push_back(ps);
    return v;
}

double ratio(double diff, double se) {
    if (se > 0) return std::fabs(diff) / se;
    return diff == 0 ? 0.0 : std::numeric_limits<double>::infinity();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_table(const CsvTable& table, const std::string& path, std::ostream& fallback,
                 const std::string& comment) {
    if (path.empty()) {
        table.write(fallback, comment);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open output file '" + path + "'");
    table.write(f, comment);
    if (!f) throw UsageError("failed writing '" + path + "'");
}

void echo_resolved(const ExperimentConfig& cfg, std::ostream& out) {
    const SystemParams p = resolve_params(cfg);
    out << "# resolved (watts, linear gains)\n";
    out << "# p_s_dbm = " << fmt(watts_to_dbm(p.p_s)) << "\n";
    out << "# p_j_dbm = " << fmt(watts_to_dbm(p.p_j)) << "\n";
    out << "# e_th = " << fmt(p.e_th()) << "\n";
    out << "# sigma2_e = " << fmt(p.sigma2_e) << "\n";
    out << "# sigma2_err = " << fmt(p.sigma2_err) << "\n";
    out << "# omega_sj = " << fmt(p.omega_sj) << "\n";
    out << "# omega_sd = " << fmt(p.omega_sd) << "\n";
    out << "# omega_se = " << fmt(p.omega_se) << "\n";
    out << "# omega_jd = " << fmt(p.omega_jd) << "\n";
    out << "# omega_je = " << fmt(p.omega_je) << "\n";
    out << "# n_j = " << p.n_j() << "\n";
    try {
        out << "# tau = " << make_storage(cfg.storage, p).tau << "\n";
    } catch (const DomainError& e) {
        out << "# tau = (invalid: " << e.what() << ")\n";
    }
}

}  // namespace

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw std::logic_error("CsvTable: row width does not match header");
    rows_.push_back(std::move(row));
}

void CsvTable::write(std::ostream& out, const std::string& comment) const {
    if (!comment.empty()) out << "# " << comment << '\n';
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) out << ',';
            out << cells[i];
        }
        out << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
}

std::string provenance_comment(const std::string& command, const ExperimentConfig& cfg) {
    return std::string("anj ") + ANJ_VERSION + " " + command + "; " + serialize_inline(cfg);
}

CsvTable cmd_analyze(const ExperimentConfig& cfg, std::ostream& err) {
    const auto points = expand_sweep(cfg);
    static constexpr Variant kVariants[] = {Variant::fd_finite, Variant::hd_finite, Variant::fd_infinite};
    const auto reports = parallel_map(points.size() * 3, cfg.mc.threads, [&](std::size_t k) {
        const auto& pt = points[k / 3];
        return evaluate_variant(kVariants[k % 3], pt.params, pt.storage);
    });

    CsvTable t({"sweep_axis", "sweep_value", "variant", "p_s", "p_j", "tau", "ready_prob", "q_c",
                "p_so", "p_nzsc", "kappa1", "kappa2", "varphi", "beta1", "beta2", "mu1", "mu2",
                "stationary_residual"});
    for (std::size_t k = 0; k < reports.size(); ++k) {
        const auto& pt = points[k / 3];
        const auto& r = reports[k];
        if (r.threshold_at_capacity) {
            err << "warning: tau == L" << (pt.label.empty() ? "" : " at " + pt.label)
                << "; jamming is only possible from a full store\n";
        }
        const bool finite = r.variant != Variant::fd_infinite;
        const auto& c = r.constants;
        t.add_row({cfg.sweep.axis, pt.label, std::string(to_string(r.variant)), fmt(pt.params.p_s),
                   fmt(pt.params.p_j), finite ? fmt(r.tau) : "", fmt(r.ready_prob), fmt(r.q_c),
                   fmt(r.p_so), fmt(r.p_nzsc), fmt(c.kappa1), fmt(c.kappa2), fmt(c.varphi),
                   fmt(c.beta1), fmt(c.beta2), fmt(c.mu1), fmt(c.mu2),
                   finite ? fmt(r.stationary_residual) : ""});
    }
    return t;
}

CsvTable cmd_simulate(const ExperimentConfig& cfg, std::ostream& err) {
    const auto points = expand_sweep(cfg);
    CsvTable t({"sweep_axis", "sweep_value", "scheme", "blocks", "seed", "p_so_cf", "p_so_mc",
                "p_so_se", "p_so_ratio", "p_nzsc_cf", "p_nzsc_mc", "p_nzsc_se", "p_nzsc_ratio",
                "ready_cf", "ready_mc", "oeh_rate_mc"});
    std::ofstream batch_out;
    if (cfg.mc.enabled && !cfg.mc.batch_csv.empty()) {
        batch_out.open(cfg.mc.batch_csv, std::ios::binary);
        if (!batch_out) throw UsageError("cannot open mc.batch_csv '" + cfg.mc.batch_csv + "'");
        batch_out << "# " << provenance_comment("simulate", cfg) << '\n';
    }

    for (const auto& pt : points) {
        for (const Scheme scheme : {Scheme::fd, Scheme::hd}) {
            const Variant variant = scheme == Scheme::fd ? Variant::fd_finite : Variant::hd_finite;
            const SecrecyReport cf = evaluate_variant(variant, pt.params, pt.storage);
            const std::string name = scheme == Scheme::fd ? "fd" : "hd";
            if (!cfg.mc.enabled) {
                t.add_row({cfg.sweep.axis, pt.label, name, "0", fmt(cfg.mc.seed), fmt(cf.p_so), "", "",
                           "", fmt(cf.p_nzsc), "", "", "", fmt(cf.ready_prob), "", ""});
                continue;
            }
            const EnergyStorageSpec storage = make_storage(pt.storage, pt.params);
            const BatchRun run = simulate_batches(scheme, pt.params, storage, cfg.mc.blocks, cfg.mc.seed,
                                                  cfg.mc.batches, cfg.mc.threads);
            const EmpiricalReport mc = estimate(run.total);
            if (cfg.mc.target_se > 0 &&
                std::max(mc.p_so.std_error, mc.p_nzsc.std_error) > cfg.mc.target_se) {
                err << "warning: " << name << (pt.label.empty() ? "" : " at " + pt.label)
                    << ": standard error above mc.target_se; increase mc.blocks\n";
            }
            if (batch_out.is_open()) {
                batch_out << "# sweep_value=" << pt.label << " scheme=" << name << '\n';
                write_batch_csv(batch_out, run);
            }
            t.add_row({cfg.sweep.axis, pt.label, name, fmt(mc.blocks), fmt(cfg.mc.seed), fmt(cf.p_so),
                       fmt(mc.p_so.value), fmt(mc.p_so.std_error),
                       fmt(ratio(mc.p_so.value - cf.p_so, mc.p_so.std_error)), fmt(cf.p_nzsc),
                       fmt(mc.p_nzsc.value), fmt(mc.p_nzsc.std_error),
                       fmt(ratio(mc.p_nzsc.value - cf.p_nzsc, mc.p_nzsc.std_error)),
                       fmt(cf.ready_prob), fmt(mc.ready_rate.value), fmt(mc.oeh_rate.value)});
        }
    }
    return t;
}

CsvTable cmd_optimize_pj(const ExperimentConfig& cfg, std::ostream& err) {
    const auto points = expand_sweep(cfg);
    const std::vector<double> grid = cfg.pj_grid.watts();
    const auto searches = parallel_map(points.size() * 2, cfg.mc.threads, [&](std::size_t k) {
        const auto& pt = points[k / 2];
        return optimal_jamming_power(pt.params, pt.storage, grid,
                                     k % 2 == 0 ? Variant::fd_finite : Variant::hd_finite);
    });

    CsvTable t({"sweep_axis", "sweep_value", "scheme", "p_j_star", "p_j_star_dbm", "p_so_min",
                "feasible", "rejected"});
    for (std::size_t k = 0; k < searches.size(); ++k) {
        const auto& s = searches[k];
        const auto feasible = std::count_if(s.candidates.begin(), s.candidates.end(),
                                            [](const JammingCandidate& c) { return c.feasible; });
        const auto rejected = static_cast<long>(s.candidates.size()) - feasible;
        if (rejected > 0 && k == 0) {
            err << "note: " << rejected << " of " << s.candidates.size()
                << " grid candidates rejected (E_th must stay below c1)\n";
        }
        t.add_row({cfg.sweep.axis, points[k / 2].label, k % 2 == 0 ? "fd" : "hd", fmt(s.p_j_star),
                   fmt(watts_to_dbm(s.p_j_star)), fmt(s.p_so_min), std::to_string(feasible),
                   std::to_string(rejected)});
    }
    return t;
}

CsvTable figure_table(int figure, const ExperimentConfig& cfg) {
    const SystemParams base = resolve_params(cfg);
    const std::vector<double> ps_dbm = ps_axis_dbm();
    const std::vector<double> grid = cfg.pj_grid.watts();
    const int threads = cfg.mc.threads;

    auto with_ps = [&](SystemParams p, double dbm) {
        p.p_s = dbm_to_watts(dbm);
        return p;
    };

    switch (figure) {
        case 2: {
            struct Series {
                std::string name;
                StorageSizing sizing;
                bool infinite;
            };
            const std::vector<Series> series = {
                {"c1=0.1,L=100", {0.1, cfg.storage.c2, 100}, false},
                {"c1=0.1,L=400", {0.1, cfg.storage.c2, 400}, false},
                {"c1=0.02,L=50", {0.02, cfg.storage.c2, 50}, false},
                {"c1=0.02,L=100", {0.02, cfg.storage.c2, 100}, false},
                {"infinite", cfg.storage, true},
            };
            SystemParams p = base;
            p.p_j = dbm_to_watts(10);
            const auto rows = parallel_map(ps_dbm.size() * series.size(), threads, [&](std::size_t k) {
                const auto& s = series[k % series.size()];
                return evaluate_variant(s.infinite ? Variant::fd_infinite : Variant::fd_finite,
                                        with_ps(p, ps_dbm[k / series.size()]), s.sizing);
            });
            CsvTable t({"p_s_dbm", "series", "c1", "L", "p_so"});
            for (std::size_t k = 0; k < rows.size(); ++k) {
                const auto& s = series[k % series.size()];
                t.add_row({fmt(ps_dbm[k / series.size()]), s.name, s.infinite ? "" : fmt(s.sizing.c1),
                           s.infinite ? "" : fmt(s.sizing.levels), fmt(rows[k].p_so)});
            }
            return t;
        }
        case 3:
        case 4: {
            struct Series {
                int n_j;
                double k_linear;
                std::string k_db;
            };
            const std::vector<Series> series = {
                {4, db_to_linear(5), "5"}, {4, 0, "-inf"}, {8, db_to_linear(5), "5"}, {8, 0, "-inf"}};
            SystemParams p = base;
            p.p_j = dbm_to_watts(0);
            const auto rows = parallel_map(ps_dbm.size() * series.size(), threads, [&](std::size_t k) {
                const auto& s = series[k % series.size()];
                SystemParams q = with_ps(p, ps_dbm[k / series.size()]);
                q.n_t = s.n_j / 2;
                q.n_r = s.n_j - q.n_t;
                q.k_rician = s.k_linear;
                return evaluate_variant(Variant::fd_finite, q, cfg.storage);
            });
            CsvTable t({"p_s_dbm", "n_j", "k_db", figure == 3 ? "p_so" : "p_nzsc"});
            for (std::size_t k = 0; k < rows.size(); ++k) {
                const auto& s = series[k % series.size()];
                t.add_row({fmt(ps_dbm[k / series.size()]), fmt(s.n_j), s.k_db,
                           fmt(figure == 3 ? rows[k].p_so : rows[k].p_nzsc)});
            }
            return t;
        }
        case 5: {
            const std::vector<double> ps_values = {20, 25, 30};
            const auto searches = parallel_map(ps_values.size() * 2, threads, [&](std::size_t k) {
                return optimal_jamming_power(with_ps(base, ps_values[k / 2]), cfg.storage, grid,
                                             k % 2 == 0 ? Variant::fd_finite : Variant::hd_finite);
            });
            CsvTable t({"p_s_dbm", "scheme", "p_j_dbm", "feasible", "p_so"});
            for (std::size_t k = 0; k < searches.size(); ++k) {
                for (const auto& c : searches[k].candidates) {
                    t.add_row({fmt(ps_values[k / 2]), k % 2 == 0 ? "fd" : "hd", fmt(watts_to_dbm(c.p_j)),
                               c.feasible ? "1" : "0", c.feasible ? fmt(c.p_so) : "nan"});
                }
            }
            return t;
        }
        case 6: {
            const std::vector<double> rates = {0.1, 1.0};
            const std::size_t per_rate = ps_dbm.size() * 2;
            const auto searches = parallel_map(rates.size() * per_rate, threads, [&](std::size_t k) {
                SystemParams p = with_ps(base, ps_dbm[(k % per_rate) / 2]);
                p.r_s = rates[k / per_rate];
                return optimal_jamming_power(p, cfg.storage, grid,
                                             k % 2 == 0 ? Variant::fd_finite : Variant::hd_finite);
            });
            CsvTable t({"rs", "p_s_dbm", "scheme", "p_j_star_dbm", "p_so"});
            for (std::size_t k = 0; k < searches.size(); ++k) {
                t.add_row({fmt(rates[k / per_rate]), fmt(ps_dbm[(k % per_rate) / 2]),
                           k % 2 == 0 ? "fd" : "hd", fmt(watts_to_dbm(searches[k].p_j_star)),
                           fmt(searches[k].p_so_min)});
            }
            return t;
        }
        case 7: {
            const std::vector<std::pair<int, int>> splits = {{2, 6}, {4, 4}, {6, 2}};
            const auto searches = parallel_map(splits.size() * ps_dbm.size(), threads, [&](std::size_t k) {
                SystemParams p = with_ps(base, ps_dbm[k % ps_dbm.size()]);
                p.n_t = splits[k / ps_dbm.size()].first;
                p.n_r = splits[k / ps_dbm.size()].second;
                return optimal_jamming_power(p, cfg.storage, grid, Variant::fd_finite);
            });
            CsvTable t({"n_t", "n_r", "p_s_dbm", "p_j_star_dbm", "p_so"});
            for (std::size_t k = 0; k < searches.size(); ++k) {
                const auto& sp = splits[k / ps_dbm.size()];
                t.add_row({fmt(sp.first), fmt(sp.second), fmt(ps_dbm[k % ps_dbm.size()]),
                           fmt(watts_to_dbm(searches[k].p_j_star)), fmt(searches[k].p_so_min)});
            }
            return t;
        }
        case 8: {
            const std::vector<double> rhos = {1, 0.99, 0.9, 0.5, 0};
            // P_J* is found with perfect CSI and then held fixed across rho.
            const auto stars = parallel_map(ps_dbm.size(), threads, [&](std::size_t k) {
                SystemParams p = with_ps(base, ps_dbm[k]);
                p.rho = 1;
                return optimal_jamming_power(p, cfg.storage, grid, Variant::fd_finite).p_j_star;
            });
            const auto rows = parallel_map(rhos.size() * ps_dbm.size(), threads, [&](std::size_t k) {
                SystemParams p = with_ps(base, ps_dbm[k % ps_dbm.size()]);
                p.rho = rhos[k / ps_dbm.size()];
                p.p_j = stars[k % ps_dbm.size()];
                return evaluate_variant(Variant::fd_finite, p, cfg.storage).p_so;
            });
            CsvTable t({"rho", "p_s_dbm", "p_j_star_dbm", "p_so"});
            for (std::size_t k = 0; k < rows.size(); ++k) {
                t.add_row({fmt(rhos[k / ps_dbm.size()]), fmt(ps_dbm[k % ps_dbm.size()]),
                           fmt(watts_to_dbm(stars[k % ps_dbm.size()])), fmt(rows[k])});
            }
            return t;
        }
        default:
            throw UsageError("unknown figure " + std::to_string(figure) + " (expected 2..8)");
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Accumulate-and-jam secrecy analysis and simulation", "anj"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ANJ_VERSION);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> blocks;
    std::vector<int> figures;
    bool print_config = false;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key = value configuration file");
        sub->add_option("--set", overrides, "override one key, KEY=VALUE (repeatable)");
        sub->add_option("--out", out_path, "output CSV (reproduce: output directory)");
        sub->add_flag("--print-config", print_config, "print the resolved configuration and exit");
    };
    CLI::App* analyze = app.add_subcommand("analyze", "closed-form metrics for FD, HD and the infinite store");
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo estimates next to the closed forms");
    CLI::App* optimize = app.add_subcommand("optimize-pj", "grid search for the jamming power");
    CLI::App* reproduce = app.add_subcommand("reproduce", "write the data behind figures 2..8");
    for (auto* sub : {analyze, simulate, optimize, reproduce}) common(sub);
    simulate->add_option("--seed", seed, "Monte Carlo seed");
    simulate->add_option("--blocks", blocks, "recorded blocks per scheme and sweep point");
    reproduce->add_option("--figure", figures, "figure id 2..8 (repeatable; default all)")
        ->check(CLI::Range(2, 8));

    std::vector<const char*> argv{"anj"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        ExperimentConfig cfg;
        if (!config_path.empty()) cfg = parse_config(read_file(config_path), config_path);
        for (std::size_t i = 0; i < overrides.size(); ++i) {
            apply_override(cfg, overrides[i], "--set #" + std::to_string(i + 1));
        }
        if (seed) cfg.mc.seed = *seed;
        if (blocks) cfg.mc.blocks = *blocks;
        const bool is_reproduce = reproduce->parsed();
        if (!out_path.empty() && !is_reproduce) cfg.output.path = out_path;

        if (print_config) {
            out << serialize(cfg);
            echo_resolved(cfg, out);
            return kOk;
        }

        if (is_reproduce) {
            const std::filesystem::path dir = out_path.empty() ? std::string(".") : out_path;
            std::filesystem::create_directories(dir);
            if (figures.empty()) figures = {2, 3, 4, 5, 6, 7, 8};
            for (const int f : figures) {
                const CsvTable t = figure_table(f, cfg);
                const auto path = dir / ("fig" + std::to_string(f) + ".csv");
                write_table(t, path.string(), out, provenance_comment("reproduce --figure " + std::to_string(f), cfg));
                out << "wrote " << path.string() << '\n';
            }
            return kOk;
        }

        std::string command;
        CsvTable table{std::vector<std::string>{}};
        if (analyze->parsed()) {
            command = "analyze";
            table = cmd_analyze(cfg, err);
        } else if (simulate->parsed()) {
            command = "simulate";
            table = cmd_simulate(cfg, err);
        } else {
            command = "optimize-pj";
            table = cmd_optimize_pj(cfg, err);
        }
        write_table(table, cfg.output.path, out, provenance_comment(command, cfg));
        return kOk;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

}  // namespace anj::cli
