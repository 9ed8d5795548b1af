#pragma once

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "ppcauchy/config.hpp"

namespace ppcauchy::cli {

enum class Command { ToClassical, ToNonClassical, CheckAgreement, Solve, Mms, Convergence, Norm };

inline const char* command_name(Command c) {
    switch (c) {
    case Command::ToClassical: return "transform to-classical";
    case Command::ToNonClassical: return "transform to-nonclassical";
    case Command::CheckAgreement: return "check-agreement";
    case Command::Solve: return "solve";
    case Command::Mms: return "mms";
    case Command::Convergence: return "convergence";
    case Command::Norm: return "norm";
    }
    return "unknown";
}

enum ExitCode : int { kOk = 0, kInputError = 1, kAgreementFailed = 2, kNotConverged = 3 };

struct RunOptions {
    std::optional<std::size_t> grid_nx;
    std::optional<std::size_t> grid_ny;
    bool full_jet = false;
    bool quiet = false;
};

namespace detail {

/// Collects output files (relative to the out directory) and metrics for the summary.
class Outputs {
public:
    explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

    fs::path path(const std::string& rel) {
        files_.push_back(rel);
        return dir_ / rel;
    }
    void note(const std::string& rel) { files_.push_back(rel); }
    [[nodiscard]] const fs::path& dir() const { return dir_; }
    [[nodiscard]] const std::vector<std::string>& files() const { return files_; }

    json metrics = json::object();

private:
    fs::path dir_;
    std::vector<std::string> files_;
};

inline json double_or_string(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    if (std::isnan(v)) return json("nan");
    return json(v);
}

inline json agreement_json(const AgreementReport& r) {
    json entries = json::array();
    for (std::size_t k = 0; k < r.entries.size(); ++k) {
        const auto& e = r.entries[k];
        json norms = json::array();
        for (double n : e.norms) norms.push_back(double_or_string(n));
        entries.push_back(json{{"k", k + 1},
                               {"norms", norms},
                               {"ratio", double_or_string(e.refinement_ratio)},
                               {"flagged", e.flagged}});
    }
    return json{{"levels", r.levels},
                {"threshold", r.threshold},
                {"p", io::exponent_to_json(r.p)},
                {"any_flagged", r.any_flagged()},
                {"functions", entries}};
}

inline json convergence_json(const ConvergenceReport& r) {
    json norms = json::array();
    for (double u : r.update_norms) norms.push_back(double_or_string(u));
    return json{{"iterations", r.iterations},
                {"update_norms", norms},
                {"final_residual", double_or_string(r.final_residual)},
                {"tolerance", r.tolerance},
                {"converged", r.converged}};
}

inline json majorants_json(const std::vector<MajorantCheck>& checks) {
    json out = json::array();
    for (const auto& c : checks) {
        if (!c.checked) continue;
        out.push_back(json{{"coefficient", c.coefficient},
                           {"pass", c.pass},
                           {"worst_excess", c.worst_excess},
                           {"worst_node", {c.worst_i, c.worst_j}}});
    }
    return out;
}

inline void write_json(const fs::path& path, const json& j) { io::write_text(path, j.dump(2) + "\n"); }

inline Grid config_grid(const RunConfig& cfg) { return Grid::uniform(cfg.domain, cfg.grid_nx, cfg.grid_ny); }

inline void require_grid_match(const RunConfig& cfg, const Grid& g, const std::string& what) {
    require(g.x.cells() == cfg.grid_nx && g.y.cells() == cfg.grid_ny, ErrorKind::Config,
            what + " grid " + std::to_string(g.x.cells()) + "x" + std::to_string(g.y.cells()) +
                " differs from config grid " + std::to_string(cfg.grid_nx) + "x" + std::to_string(cfg.grid_ny));
}

} // namespace detail

namespace commands {

using detail::Outputs;

inline io::LoadedNonClassical load_nc(const RunConfig& cfg) {
    require(cfg.nonclassical.has_value(), ErrorKind::Config, "data.nonclassical: required by this command");
    auto loaded = io::load_nonclassical(*cfg.nonclassical);
    detail::require_grid_match(cfg, loaded.grid, "non-classical bundle");
    return loaded;
}

inline io::LoadedClassical load_cl(const RunConfig& cfg) {
    require(cfg.classical.has_value(), ErrorKind::Config, "data.classical: required by this command");
    auto loaded = io::load_classical(*cfg.classical);
    detail::require_grid_match(cfg, loaded.grid, "classical bundle");
    return loaded;
}

inline int to_classical(const RunConfig& cfg, Outputs& out) {
    const auto in = load_nc(cfg);
    const MonotoneCurve c = make_curve(cfg, in.grid);
    const ClassicalData cl = ppcauchy::to_classical(in.data, c);
    io::save_classical(out.dir() / "classical", cl, in.domain, &in.data.rhs);
    out.note("classical/manifest.json");
    out.metrics["input_product_norm"] = product_norm(in.data, in.domain.p);
    return kOk;
}

inline int to_nonclassical(const RunConfig& cfg, Outputs& out) {
    const auto in = load_cl(cfg);
    const MonotoneCurve c = make_curve(cfg, in.grid);
    const Fn2 rhs = in.rhs ? *in.rhs : Fn2::zeros(in.grid.x, in.grid.y);
    const InverseResult r = ppcauchy::to_nonclassical(in.data, c, rhs, cfg.agreement);
    io::save_nonclassical(out.dir() / "nonclassical", r.data, in.domain);
    out.note("nonclassical/manifest.json");
    detail::write_json(out.path("agreement.json"), detail::agreement_json(r.agreement));
    out.metrics["output_product_norm"] = product_norm(r.data, in.domain.p);
    out.metrics["rhs_supplied"] = in.rhs.has_value();
    out.metrics["agreement_flagged"] = r.agreement.any_flagged();
    return r.agreement.any_flagged() ? kAgreementFailed : kOk;
}

inline int check_agreement(const RunConfig& cfg, Outputs& out) {
    const auto in = load_cl(cfg);
    const MonotoneCurve c = make_curve(cfg, in.grid);
    const AgreementReport r = agreement_check(in.data, c, cfg.agreement);
    const json j = detail::agreement_json(r);
    detail::write_json(out.path("agreement.json"), j);
    out.metrics["agreement"] = j;
    return r.any_flagged() ? kAgreementFailed : kOk;
}

inline void write_jet(Outputs& out, const DerivativeJet& jet, bool full) {
    io::save_fn2(out.path("g00.csv"), jet.g[0][0]);
    if (!full) return;
    for (int i = 0; i <= 3; ++i) {
        for (int j = 0; j <= 2; ++j) {
            io::save_fn2(out.path("jet/" + index_name("g", i, j) + ".csv"), jet.g[i][j]);
        }
    }
}

inline int solve(const RunConfig& cfg, Outputs& out, bool full_jet) {
    const auto in = load_nc(cfg);
    const MonotoneCurve c = make_curve(cfg, in.grid);
    const CoefficientSet coeffs = make_coefficients(cfg, in.grid);
    const Solution sol = solve_picard(in.data, coeffs, c, cfg.solver);
    write_jet(out, sol.jet, full_jet || cfg.full_jet);
    const json report = detail::convergence_json(sol.report);
    detail::write_json(out.path("convergence.json"), report);
    out.metrics["convergence"] = report;
    out.metrics["majorants"] = detail::majorants_json(validate_majorants(coeffs));
    out.metrics["sobolev_norm"] = detail::double_or_string(sobolev_norm_32(sol.jet, in.domain.p));
    return sol.report.converged ? kOk : kNotConverged;
}

inline int mms(const RunConfig& cfg, Outputs& out, bool full_jet) {
    const Grid g = detail::config_grid(cfg);
    const MonotoneCurve c = make_curve(cfg, g);
    const CoefficientSet coeffs = make_coefficients(cfg, g);
    const PolySolution& ps = cfg.polynomial;
    const NonClassicalData nc = generate_nonclassical(ps, c, coeffs, g);
    const ClassicalData cl = generate_classical(ps, c, g);
    io::save_nonclassical(out.dir() / "nonclassical", nc, cfg.domain);
    out.note("nonclassical/manifest.json");
    io::save_classical(out.dir() / "classical", cl, cfg.domain, &nc.rhs);
    out.note("classical/manifest.json");
    io::save_coefficients(out.dir() / "coefficients", coeffs, cfg.domain);
    out.note("coefficients/manifest.json");

    const Solution sol = solve_picard(nc, coeffs, c, cfg.solver);
    write_jet(out, sol.jet, full_jet || cfg.full_jet);
    const JetError sup = jet_error(sol.jet, ps, kInf);
    const JetError lp = jet_error(sol.jet, ps, cfg.domain.p);
    std::string csv = "field,i,j,error_sup,error_p\n";
    for (int i = 0; i <= 3; ++i) {
        for (int j = 0; j <= 2; ++j) {
            csv += index_name("g", i, j) + "," + std::to_string(i) + "," + std::to_string(j) + "," +
                   io::format_double(sup.field[i][j]) + "," + io::format_double(lp.field[i][j]) + "\n";
        }
    }
    csv += "sobolev_total,,," + io::format_double(sup.sobolev_total) + "," + io::format_double(lp.sobolev_total) + "\n";
    io::write_text(out.path("errors.csv"), csv);
    const json report = detail::convergence_json(sol.report);
    detail::write_json(out.path("convergence.json"), report);
    out.metrics["convergence"] = report;
    out.metrics["g00_error_sup"] = sup.field[0][0];
    out.metrics["sobolev_error_p"] = lp.sobolev_total;
    return sol.report.converged ? kOk : kNotConverged;
}

inline int convergence(const RunConfig& cfg, Outputs& out) {
    for (const auto& [key, spec] : cfg.coefficients) {
        require(spec.kind != FieldSpec::Kind::File, ErrorKind::Config,
                "coefficients." + key + ": file coefficients cannot be regridded for a convergence study");
    }
    require(!cfg.coefficient_manifest, ErrorKind::Config,
            "coefficients.manifest: file coefficients cannot be regridded for a convergence study");
    ProblemSetup setup;
    setup.domain = cfg.domain;
    setup.curve = [&cfg](const Grid& g) { return make_curve(cfg, g); };
    setup.coefficients = [&cfg](const Grid& g) { return make_coefficients(cfg, g); };
    setup.solver = cfg.solver;
    const StudyTable table = convergence_study(cfg.polynomial, setup, cfg.sizes);

    std::string csv = "metric,n,error,order\n";
    json summary = json::object();
    for (const auto& row : table.rows) {
        json orders = json::array();
        for (std::size_t k = 0; k < table.sizes.size(); ++k) {
            std::string order;
            if (row.orders[k]) {
                order = row.orders[k]->exact ? "exact" : io::format_double(row.orders[k]->value);
                orders.push_back(row.orders[k]->exact ? json("exact") : detail::double_or_string(row.orders[k]->value));
            }
            csv += row.metric + "," + std::to_string(table.sizes[k]) + "," + io::format_double(row.errors[k]) + "," +
                   order + "\n";
        }
        json errors = json::array();
        for (double e : row.errors) errors.push_back(e);
        summary[row.metric] = json{{"errors", errors},
                                   {"orders", orders},
                                   {"min_order", row.all_exact() ? json("exact") : detail::double_or_string(row.min_order())}};
    }
    io::write_text(out.path("orders.csv"), csv);
    detail::write_json(out.path("orders.json"), json{{"sizes", table.sizes}, {"metrics", summary}});
    out.metrics["g00_min_order"] = summary["solve.g00"]["min_order"];
    return kOk;
}

inline int norm(const RunConfig& cfg, Outputs& out) {
    const auto in = load_nc(cfg);
    const double p = in.domain.p;
    const auto& nc = in.data;
    json parts{{"z32", lp_norm(nc.rhs, p)},
               {"z30", lp_norm(nc.x_traces[0], p)},
               {"z31", lp_norm(nc.x_traces[1], p)},
               {"z02", lp_norm(nc.y_traces[0], p)},
               {"z12", lp_norm(nc.y_traces[1], p)},
               {"z22", lp_norm(nc.y_traces[2], p)}};
    double scalars = 0.0;
    for (const auto& row : nc.corner)
        for (double v : row) scalars += std::abs(v);
    parts["scalars"] = scalars;
    out.metrics["components"] = parts;
    out.metrics["product_norm"] = product_norm(nc, p);
    out.metrics["p"] = io::exponent_to_json(p);
    return kOk;
}

} // namespace commands

inline const char* status_name(int code) {
    switch (code) {
    case kOk: return "ok";
    case kAgreementFailed: return "agreement-failed";
    case kNotConverged: return "not-converged";
    default: return "input-error";
    }
}

/// Runs one command and writes summary.json into `out_dir`, whatever the outcome.
/// Returns the process exit code.
inline int run(Command command, const fs::path& config_path, const fs::path& out_dir, const RunOptions& opts = {}) {
    detail::Outputs out(out_dir);
    json echo;
    int code = kInputError;
    try {
        fs::create_directories(out_dir);
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: cannot create output directory: " << e.what() << "\n";
        return kInputError;
    }
    try {
        RunConfig cfg = parse_config(config_path);
        if (opts.grid_nx) cfg.grid_nx = *opts.grid_nx;
        if (opts.grid_ny) cfg.grid_ny = *opts.grid_ny;
        finalize_config(cfg);
        echo = cfg.echo;
        switch (command) {
        case Command::ToClassical: code = commands::to_classical(cfg, out); break;
        case Command::ToNonClassical: code = commands::to_nonclassical(cfg, out); break;
        case Command::CheckAgreement: code = commands::check_agreement(cfg, out); break;
        case Command::Solve: code = commands::solve(cfg, out, opts.full_jet); break;
        case Command::Mms: code = commands::mms(cfg, out, opts.full_jet); break;
        case Command::Convergence: code = commands::convergence(cfg, out); break;
        case Command::Norm: code = commands::norm(cfg, out); break;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        out.metrics["error"] = e.what();
        code = kInputError;
    } catch (const json::exception& e) {
        std::cerr << "error: config/json: " << e.what() << "\n";
        out.metrics["error"] = std::string("json: ") + e.what();
        code = kInputError;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        out.metrics["error"] = e.what();
        code = kInputError;
    }
    if (code == kAgreementFailed) std::cerr << "agreement conditions fail for the classical data\n";
    if (code == kNotConverged) std::cerr << "Picard iteration did not converge\n";

    const json summary{{"command", command_name(command)},
                       {"config_echo", echo},
                       {"outputs", out.files()},
                       {"status", status_name(code)},
                       {"metrics", out.metrics}};
    try {
        detail::write_json(out_dir / "summary.json", summary);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    if (!opts.quiet && code == kOk) std::cerr << command_name(command) << ": ok, wrote " << out_dir.string() << "\n";
    return code;
}

} // namespace ppcauchy::cli
