// Command-line frontend: datum ingestion, field dumps, energy audits,
// weak-geodesic validation, oracle comparison, and weak-solution audits.
//
// Exit codes: 0 success, 1 validation failure (bad datum, bad arguments,
// t_end at or past the breakdown time), 2 numerical guard trips inside the
// method-of-lines oracle. Errors print one line "error: ..." on stderr.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hs2/circle_calculus.hpp"
#include "hs2/geodesic.hpp"
#include "hs2/report_io.hpp"

namespace {

using nlohmann::json;

struct RunConfig {
    std::string command;
    std::string datum_path;
    int n = 512;
    std::string times_spec;
    std::vector<double> times;
    std::string out_path;
    std::string format = "csv";
    bool auto_normalize = false;
    double eps = 1e-9;
    double h = 1e-4;
    double dt = 1e-4;
    int steps = 256;
};

std::vector<double> parse_times(const std::string& spec) {
    std::vector<double> out;
    if (spec.empty()) return out;
    const auto colons = std::count(spec.begin(), spec.end(), ':');
    if (colons == 2) {
        std::istringstream is(spec);
        std::string a, b, c;
        std::getline(is, a, ':');
        std::getline(is, b, ':');
        std::getline(is, c, ':');
        const double t0 = std::stod(a), t1 = std::stod(b);
        const int count = std::stoi(c);
        if (count < 1) throw std::invalid_argument("times: COUNT must be >= 1");
        if (count == 1) {
            out.push_back(t0);
        } else {
            for (int i = 0; i < count; ++i)
                out.push_back(t0 + (t1 - t0) * i / (count - 1));
        }
        return out;
    }
    std::istringstream is(spec);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    if (out.empty()) throw std::invalid_argument("times: empty list");
    return out;
}

class Sink {
  public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw std::invalid_argument("cannot open output file " + path);
        }
    }
    std::ostream& out() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

json config_json(const RunConfig& cfg) {
    json j;
    j["datum"] = cfg.datum_path;
    j["n"] = cfg.n;
    j["times"] = cfg.times;
    j["format"] = cfg.format;
    j["auto_normalize"] = cfg.auto_normalize;
    j["eps"] = cfg.eps;
    j["h"] = cfg.h;
    j["dt"] = cfg.dt;
    j["steps"] = cfg.steps;
    return j;
}

void emit_report(const RunConfig& cfg, const std::string& csv_header,
                 const std::vector<std::vector<std::string>>& csv_rows, json results) {
    Sink sink(cfg.out_path);
    if (cfg.format == "json") {
        json doc;
        doc["command"] = cfg.command;
        doc["config"] = config_json(cfg);
        doc["results"] = std::move(results);
        sink.out() << doc.dump(2) << "\n";
        return;
    }
    sink.out() << csv_header << "\n";
    for (const auto& row : csv_rows) sink.out() << hs2::csv_row(row);
}

json finite_or_string(double v) {
    if (std::isfinite(v)) return v;
    return hs2::fmt_double(v);
}

int cmd_breakdown(const RunConfig& cfg, const hs2::InitialDatum& d) {
    const double tstar = hs2::breakdown_time(d);
    std::cout << "T* = " << hs2::fmt_double(tstar) << "\n";
    std::vector<hs2::Interval> set;
    if (std::isfinite(tstar)) set = hs2::breakdown_set(d, tstar, cfg.eps);
    if (set.empty())
        std::cout << "breakdown set at T*: empty\n";
    else
        for (const auto& iv : set)
            std::cout << "breakdown set at T*: [" << hs2::fmt_double(iv.lo) << ", "
                      << hs2::fmt_double(iv.hi) << "]\n";

    std::vector<std::vector<std::string>> rows;
    json results = json::array();
    if (set.empty()) {
        rows.push_back({hs2::fmt_double(tstar), "", ""});
        results.push_back({{"t_star", finite_or_string(tstar)},
                           {"intervals", json::array()}});
    } else {
        json ivs = json::array();
        for (const auto& iv : set) {
            rows.push_back({hs2::fmt_double(tstar), hs2::fmt_double(iv.lo),
                            hs2::fmt_double(iv.hi)});
            ivs.push_back({iv.lo, iv.hi});
        }
        results.push_back({{"t_star", finite_or_string(tstar)}, {"intervals", ivs}});
    }
    emit_report(cfg, "t_star,interval_lo,interval_hi", rows, std::move(results));
    return 0;
}

int cmd_simulate(const RunConfig& cfg, const hs2::InitialDatum& d) {
    std::vector<std::vector<std::string>> rows;
    json results = json::array();
    for (double t : cfg.times) {
        const hs2::EulerianFields ef = hs2::eulerian_fields(d, t);
        json ju = json::array(), jux = json::array(), jrho = json::array(),
             jmask = json::array();
        for (int j = 0; j < d.n(); ++j) {
            const int m = ef.masked[static_cast<std::size_t>(j)] ? 1 : 0;
            rows.push_back({hs2::fmt_double(t), hs2::fmt_double(d.grid().node(j)),
                            hs2::fmt_double(ef.u[j]), hs2::fmt_double(ef.u_x[j]),
                            hs2::fmt_double(ef.rho[j]), std::to_string(m)});
            ju.push_back(ef.u[j]);
            jux.push_back(m ? json() : json(ef.u_x[j]));
            jrho.push_back(m ? json() : json(ef.rho[j]));
            jmask.push_back(m);
        }
        results.push_back({{"t", t},
                           {"u", std::move(ju)},
                           {"ux", std::move(jux)},
                           {"rho", std::move(jrho)},
                           {"mask", std::move(jmask)}});
    }
    emit_report(cfg, "t,x,u,ux,rho,mask", rows, std::move(results));
    return 0;
}

int cmd_energy_audit(const RunConfig& cfg, const hs2::InitialDatum& d) {
    std::vector<std::vector<std::string>> rows;
    json results = json::array();
    for (double t : cfg.times) {
        const hs2::EnergyReport rep = hs2::energy_report(d, t, cfg.eps);
        rows.push_back({hs2::fmt_double(rep.t), hs2::fmt_double(rep.measured_E),
                        hs2::fmt_double(rep.predicted_E),
                        hs2::fmt_double(rep.defect_measure),
                        rep.is_defect_time ? "1" : "0"});
        results.push_back({{"t", rep.t},
                           {"measured_E", rep.measured_E},
                           {"predicted_E", rep.predicted_E},
                           {"defect_measure", rep.defect_measure},
                           {"is_defect", rep.is_defect_time}});
    }
    emit_report(cfg, "t,measured_E,predicted_E,defect_measure,is_defect", rows,
                std::move(results));
    return 0;
}

int cmd_validate_geodesic(const RunConfig& cfg, const hs2::InitialDatum& d) {
    std::vector<std::vector<std::string>> rows;
    json results = json::array();
    for (double t : cfg.times) {
        const hs2::ResidualReport rep = hs2::geodesic_residual(d, t, cfg.h);
        rows.push_back({hs2::fmt_double(rep.t), hs2::fmt_double(rep.max_r1()),
                        hs2::fmt_double(rep.max_r2()),
                        hs2::fmt_double(rep.r1_linf_unmasked),
                        hs2::fmt_double(rep.mask_fraction)});
        results.push_back({{"t", rep.t},
                           {"r1_weak", rep.r1_weak},
                           {"r2_weak", rep.r2_weak},
                           {"r1_weak_max", rep.max_r1()},
                           {"r2_weak_max", rep.max_r2()},
                           {"r1_linf_unmasked", rep.r1_linf_unmasked},
                           {"mask_fraction", rep.mask_fraction}});
    }
    emit_report(cfg, "t,r1_weak_max,r2_weak_max,r1_linf_unmasked,mask_fraction", rows,
                std::move(results));
    return 0;
}

int cmd_oracle_compare(const RunConfig& cfg, const hs2::InitialDatum& d) {
    const double t_end = cfg.times.back();
    const hs2::OracleResult res = hs2::oracle_solve(d, t_end, cfg.n, cfg.dt);
    const hs2::EulerianFields expl = hs2::eulerian_fields(d, t_end);
    hs2::GridFn diff = hs2::zip(res.fields.u, expl.u, [](double a, double b) { return a - b; });
    const double l2 = std::sqrt(hs2::l2_norm_sq(diff));

    std::vector<std::vector<std::string>> rows;
    rows.push_back({hs2::fmt_double(t_end), std::to_string(cfg.n), hs2::fmt_double(cfg.dt),
                    hs2::fmt_double(l2), hs2::fmt_double(res.energy_drift_max)});
    json results = json::array();
    results.push_back({{"t_end", t_end},
                       {"n", cfg.n},
                       {"dt", cfg.dt},
                       {"l2_distance", l2},
                       {"energy_drift", res.energy_drift_max}});
    emit_report(cfg, "t_end,n,dt,l2_distance,energy_drift", rows, std::move(results));
    return 0;
}

int cmd_audit_weak(const RunConfig& cfg, const hs2::InitialDatum& d) {
    const hs2::AuditReport rep = hs2::weak_solution_audit(d, cfg.times, cfg.h, cfg.steps);
    std::cout << "condition (a) finite H1 seminorm:   " << (rep.a_pass ? "PASS" : "FAIL")
              << "\n"
              << "condition (b) initial data:         " << (rep.b_pass ? "PASS" : "FAIL")
              << "\n"
              << "condition (c) bounded norms:        " << (rep.c_pass ? "PASS" : "FAIL")
              << " (sup |u_x|^2 = " << hs2::fmt_double(rep.c_sup_ux_l2_sq)
              << ", sup |rho|^2 = " << hs2::fmt_double(rep.c_sup_rho_l2_sq) << ")\n"
              << "condition (d) weak geodesic eq.:    " << (rep.d_pass ? "PASS" : "FAIL")
              << "\n";

    std::vector<std::vector<std::string>> rows;
    json jrows = json::array();
    for (const auto& row : rep.rows) {
        rows.push_back({hs2::fmt_double(row.t), hs2::fmt_double(row.h1_seminorm_sq),
                        hs2::fmt_double(row.ux_l2_sq), hs2::fmt_double(row.rho_l2_sq),
                        hs2::fmt_double(row.r1_weak_max), hs2::fmt_double(row.r2_weak_max),
                        row.excluded_defect ? "1" : "0", row.tangent_pass ? "1" : "0",
                        hs2::fmt_double(row.tangent_inner)});
        jrows.push_back({{"t", row.t},
                         {"h1_seminorm_sq", row.h1_seminorm_sq},
                         {"ux_l2_sq", row.ux_l2_sq},
                         {"rho_l2_sq", row.rho_l2_sq},
                         {"r1_weak_max", row.r1_weak_max},
                         {"r2_weak_max", row.r2_weak_max},
                         {"excluded_defect", row.excluded_defect},
                         {"tangent_pass", row.tangent_pass},
                         {"tangent_inner", row.tangent_inner}});
    }
    json results = json::array();
    results.push_back({{"a_pass", rep.a_pass},
                       {"b_pass", rep.b_pass},
                       {"c_pass", rep.c_pass},
                       {"d_pass", rep.d_pass},
                       {"b_u_err", rep.b_u_err},
                       {"b_rho_err_fraction", rep.b_rho_err_fraction},
                       {"c_sup_ux_l2_sq", rep.c_sup_ux_l2_sq},
                       {"c_sup_rho_l2_sq", rep.c_sup_rho_l2_sq},
                       {"rows", std::move(jrows)}});
    emit_report(cfg,
                "t,h1_seminorm_sq,ux_l2_sq,rho_l2_sq,r1_weak_max,r2_weak_max,excluded_defect,tangent_pass,tangent_inner",
                rows, std::move(results));
    return rep.pass() ? 0 : 1;
}

int run(RunConfig cfg) {
    cfg.times = parse_times(cfg.times_spec);
    if (cfg.command != "breakdown") {
        if (cfg.times.empty()) throw std::invalid_argument("times: required and nonempty");
        std::sort(cfg.times.begin(), cfg.times.end());
    }
    if (cfg.format != "csv" && cfg.format != "json")
        throw std::invalid_argument("format must be csv or json");

    const hs2::InitialDatum d = hs2::load_datum(cfg.datum_path, cfg.n, cfg.auto_normalize);

    if (cfg.command == "breakdown") return cmd_breakdown(cfg, d);
    if (cfg.command == "simulate") return cmd_simulate(cfg, d);
    if (cfg.command == "energy-audit") return cmd_energy_audit(cfg, d);
    if (cfg.command == "validate-geodesic") return cmd_validate_geodesic(cfg, d);
    if (cfg.command == "oracle-compare") return cmd_oracle_compare(cfg, d);
    if (cfg.command == "audit-weak") return cmd_audit_weak(cfg, d);
    throw std::invalid_argument("unknown command " + cfg.command);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "hs2: explicit and conservative weak solutions of the periodic two-component "
        "Hunter-Saxton system"};
    app.set_help_flag("--help", "print usage");  // frees -h / --h for the step size
    app.require_subcommand(1);

    RunConfig cfg;
    app.add_option("--datum", cfg.datum_path, "datum JSON file")->required();
    app.add_option("--n", cfg.n, "grid size (even, >= 8)");
    app.add_option("--times", cfg.times_spec, "T0:T1:COUNT or comma list");
    app.add_option("--out", cfg.out_path, "output path (default stdout)");
    app.add_option("--format", cfg.format, "csv|json");
    app.add_flag("--auto-normalize", cfg.auto_normalize, "rescale the datum to the gauge");
    app.add_option("--eps", cfg.eps, "band half-width for sampled level sets");
    app.add_option("--h", cfg.h, "time step for centered residual differences");
    app.add_option("--dt", cfg.dt, "oracle time step");
    app.add_option("--steps", cfg.steps, "quadrature steps for the varrho integral");

    for (const char* name : {"simulate", "breakdown", "energy-audit", "validate-geodesic",
                             "oracle-compare", "audit-weak"})
        app.add_subcommand(name)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    cfg.command = app.get_subcommands().front()->get_name();
    try {
        return run(std::move(cfg));
    } catch (const hs2::OracleGuard& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
