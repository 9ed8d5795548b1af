#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ppcauchy/io.hpp"
#include "ppcauchy/mms.hpp"

namespace ppcauchy::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

/// One coefficient field as written in the config.
struct FieldSpec {
    enum class Kind { Constant, Step, File } kind = Kind::Constant;
    double value = 0.0;  // Constant
    double left = 0.0;   // Step
    double right = 0.0;
    double at = 0.0;
    bool along_x = true;
    fs::path file;       // File, resolved against the config directory
};

struct CurveSpec {
    enum class Kind { Linear, Samples } kind = Kind::Linear;
    fs::path file;
};

struct RunConfig {
    Domain domain;
    std::size_t grid_nx = 0;
    std::size_t grid_ny = 0;
    CurveSpec curve;
    std::vector<std::pair<std::string, FieldSpec>> coefficients;  // keyed "a00" .. "a31"
    std::vector<std::pair<std::string, FieldSpec>> majorants;     // keyed "a0_02" .. "a0_31"
    std::optional<fs::path> coefficient_manifest;
    std::optional<fs::path> nonclassical;
    std::optional<fs::path> classical;
    SolverOptions solver;
    AgreementOptions agreement;
    PolySolution polynomial = PolySolution::default_solution();
    std::vector<std::size_t> sizes{16, 32, 64};
    bool full_jet = false;
    json echo;  // the config as given, with defaults filled in
};

namespace detail {

inline void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    require(j.is_object(), ErrorKind::Config, where + ": expected an object");
    for (const auto& [key, val] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        require(ok, ErrorKind::Config, (where.empty() ? key : where + "." + key) + ": unknown key");
    }
}

inline double number(const json& j, const std::string& where) {
    require(j.is_number(), ErrorKind::Config, where + ": expected a number");
    return j.get<double>();
}

inline std::size_t count(const json& j, const std::string& where) {
    require(j.is_number_integer() && j.get<long long>() >= 0, ErrorKind::Config,
            where + ": expected a non-negative integer");
    return j.get<std::size_t>();
}

inline FieldSpec field_spec(const json& j, const std::string& where, const fs::path& base) {
    FieldSpec f;
    if (j.is_number()) {
        f.value = j.get<double>();
        return f;
    }
    require(j.is_object() && j.contains("type"), ErrorKind::Config,
            where + ": expected a number or an object with a \"type\"");
    const std::string type = j.at("type").get<std::string>();
    if (type == "constant") {
        only_keys(j, where, {"type", "value"});
        f.value = number(j.at("value"), where + ".value");
    } else if (type == "step") {
        only_keys(j, where, {"type", "left", "right", "at", "axis"});
        f.kind = FieldSpec::Kind::Step;
        f.left = j.contains("left") ? number(j.at("left"), where + ".left") : 0.0;
        f.right = j.contains("right") ? number(j.at("right"), where + ".right") : 1.0;
        require(j.contains("at"), ErrorKind::Config, where + ".at: required for a step coefficient");
        f.at = number(j.at("at"), where + ".at");
        if (j.contains("axis")) {
            const std::string axis = j.at("axis").get<std::string>();
            require(axis == "x" || axis == "y", ErrorKind::Config, where + ".axis: expected \"x\" or \"y\"");
            f.along_x = axis == "x";
        }
    } else if (type == "file") {
        only_keys(j, where, {"type", "file"});
        f.kind = FieldSpec::Kind::File;
        f.file = base / j.at("file").get<std::string>();
    } else {
        fail(ErrorKind::Config, where + ".type: unknown coefficient type '" + type + "'");
    }
    return f;
}

inline bool is_coefficient_key(const std::string& key) {
    for (int i = 0; i <= 3; ++i)
        for (int j = 0; j <= 2; ++j)
            if (CoefficientSet::is_term(i, j) && key == index_name("a", i, j)) return true;
    return false;
}

inline bool is_majorant_key(const std::string& key) {
    for (int i = 0; i < 3; ++i)
        if (key == io::majorant_key_x(i)) return true;
    for (int j = 0; j < 2; ++j)
        if (key == io::majorant_key_y(j)) return true;
    return false;
}

} // namespace detail

/// Parses and validates a JSON config. Unknown keys are rejected with their path;
/// relative file names resolve against the config's directory.
inline RunConfig parse_config(const json& j, const fs::path& base = {}) {
    using namespace detail;
    only_keys(j, "", {"domain", "grid", "curve", "coefficients", "data", "solver", "agreement", "mms", "convergence",
                      "output"});
    RunConfig cfg;
    require(j.contains("domain"), ErrorKind::Config, "domain: required");
    cfg.domain = io::domain_from_json(j.at("domain"), "domain");

    require(j.contains("grid"), ErrorKind::Config, "grid: required");
    only_keys(j.at("grid"), "grid", {"nx", "ny"});
    require(j.at("grid").contains("nx") && j.at("grid").contains("ny"), ErrorKind::Config, "grid: nx and ny required");
    cfg.grid_nx = count(j.at("grid").at("nx"), "grid.nx");
    cfg.grid_ny = count(j.at("grid").at("ny"), "grid.ny");

    require(j.contains("curve"), ErrorKind::Config, "curve: required");
    const json& cj = j.at("curve");
    if (cj.is_string()) {
        require(cj.get<std::string>() == "linear", ErrorKind::Config, "curve: only \"linear\" may be given as a string");
    } else {
        only_keys(cj, "curve", {"type", "file"});
        const std::string type = cj.value("type", "");
        if (type == "linear") {
            require(!cj.contains("file"), ErrorKind::Config, "curve.file: not allowed for a linear curve");
        } else if (type == "samples") {
            require(cj.contains("file"), ErrorKind::Config, "curve.file: required for sampled curves");
            cfg.curve.kind = CurveSpec::Kind::Samples;
            cfg.curve.file = base / cj.at("file").get<std::string>();
        } else {
            fail(ErrorKind::Config, "curve.type: expected \"linear\" or \"samples\"");
        }
    }

    if (j.contains("coefficients")) {
        const json& co = j.at("coefficients");
        require(co.is_object(), ErrorKind::Config, "coefficients: expected an object");
        for (const auto& [key, val] : co.items()) {
            const std::string where = "coefficients." + key;
            if (key == "manifest") {
                cfg.coefficient_manifest = base / val.get<std::string>();
            } else if (key == "majorants") {
                require(val.is_object(), ErrorKind::Config, where + ": expected an object");
                for (const auto& [mk, mv] : val.items()) {
                    require(is_majorant_key(mk), ErrorKind::Config, where + "." + mk + ": unknown key");
                    FieldSpec f = field_spec(mv, where + "." + mk, base);
                    require(f.kind != FieldSpec::Kind::Step || !f.along_x == (mk.rfind("a0_3", 0) == 0),
                            ErrorKind::Config, where + "." + mk + ": step axis must match the majorant's variable");
                    cfg.majorants.emplace_back(mk, f);
                }
            } else {
                require(is_coefficient_key(key), ErrorKind::Config, where + ": unknown key");
                cfg.coefficients.emplace_back(key, field_spec(val, where, base));
            }
        }
    }

    if (j.contains("data")) {
        only_keys(j.at("data"), "data", {"nonclassical", "classical"});
        const json& d = j.at("data");
        if (d.contains("nonclassical")) cfg.nonclassical = base / d.at("nonclassical").get<std::string>();
        if (d.contains("classical")) cfg.classical = base / d.at("classical").get<std::string>();
    }

    if (j.contains("solver")) {
        const json& s = j.at("solver");
        only_keys(s, "solver", {"tol", "max_iter", "relaxation"});
        if (s.contains("tol")) cfg.solver.tol = number(s.at("tol"), "solver.tol");
        if (s.contains("max_iter")) cfg.solver.max_iter = static_cast<int>(count(s.at("max_iter"), "solver.max_iter"));
        if (s.contains("relaxation")) cfg.solver.relaxation = number(s.at("relaxation"), "solver.relaxation");
    }

    if (j.contains("agreement")) {
        const json& a = j.at("agreement");
        only_keys(a, "agreement", {"levels", "threshold", "p"});
        if (a.contains("levels")) cfg.agreement.levels = static_cast<int>(count(a.at("levels"), "agreement.levels"));
        if (a.contains("threshold")) cfg.agreement.threshold = number(a.at("threshold"), "agreement.threshold");
        if (a.contains("p")) cfg.agreement.p = io::exponent_from_json(a.at("p"), "agreement.p");
    }

    if (j.contains("mms")) {
        only_keys(j.at("mms"), "mms", {"coeff"});
        const json& m = j.at("mms");
        require(m.contains("coeff") && m.at("coeff").is_array(), ErrorKind::Config, "mms.coeff: expected an array");
        std::vector<std::vector<double>> rows;
        for (const auto& r : m.at("coeff")) {
            require(r.is_array(), ErrorKind::Config, "mms.coeff: expected an array of rows");
            std::vector<double> row;
            for (const auto& v : r) row.push_back(number(v, "mms.coeff"));
            rows.push_back(std::move(row));
        }
        try {
            cfg.polynomial = PolySolution(std::move(rows));
        } catch (const Error& e) {
            fail(ErrorKind::Config, std::string("mms.coeff: ") + e.what());
        }
    }

    if (j.contains("convergence")) {
        only_keys(j.at("convergence"), "convergence", {"sizes"});
        const json& c = j.at("convergence");
        if (c.contains("sizes")) {
            cfg.sizes.clear();
            for (const auto& s : c.at("sizes")) cfg.sizes.push_back(count(s, "convergence.sizes"));
        }
    }

    if (j.contains("output")) {
        only_keys(j.at("output"), "output", {"full_jet"});
        if (j.at("output").contains("full_jet")) cfg.full_jet = j.at("output").at("full_jet").get<bool>();
    }

    cfg.echo = j;
    return cfg;
}

/// Checks the RunConfig invariants and fills the defaults into the echo.
inline void finalize_config(RunConfig& cfg) {
    require(cfg.grid_nx >= 8, ErrorKind::Config, "grid.nx: at least 8 cells required");
    require(cfg.grid_ny >= 8, ErrorKind::Config, "grid.ny: at least 8 cells required");
    require(cfg.solver.tol > 0.0, ErrorKind::Config, "solver.tol: must be positive");
    require(cfg.solver.max_iter >= 1, ErrorKind::Config, "solver.max_iter: must be at least 1");
    require(cfg.solver.relaxation > 0.0 && cfg.solver.relaxation <= 1.0, ErrorKind::Config,
            "solver.relaxation: must lie in (0, 1]");
    require(cfg.agreement.levels >= 2, ErrorKind::Config, "agreement.levels: at least 2 required");
    require(cfg.agreement.threshold > 0.0, ErrorKind::Config, "agreement.threshold: must be positive");
    try {
        require_doubling(cfg.sizes);
    } catch (const Error& e) {
        fail(ErrorKind::Config, std::string("convergence.sizes: ") + e.what());
    }

    json& e = cfg.echo;
    e["domain"] = io::domain_to_json(cfg.domain);
    e["grid"] = json{{"nx", cfg.grid_nx}, {"ny", cfg.grid_ny}};
    e["solver"] = json{{"tol", cfg.solver.tol}, {"max_iter", cfg.solver.max_iter}, {"relaxation", cfg.solver.relaxation}};
    e["agreement"] = json{{"levels", cfg.agreement.levels},
                          {"threshold", cfg.agreement.threshold},
                          {"p", io::exponent_to_json(cfg.agreement.p)}};
    e["mms"] = json{{"coeff", cfg.polynomial.coeff()}};
    e["convergence"] = json{{"sizes", cfg.sizes}};
    e["output"] = json{{"full_jet", cfg.full_jet}};
}

inline RunConfig parse_config(const fs::path& path) {
    require(fs::exists(path), ErrorKind::Io, "config file " + path.string() + " does not exist");
    json j;
    try {
        j = json::parse(io::read_text(path));
    } catch (const json::parse_error& e) {
        fail(ErrorKind::Config, path.string() + ": " + e.what());
    }
    RunConfig cfg = parse_config(j, path.parent_path());
    finalize_config(cfg);
    return cfg;
}

/// Carrier curve for a grid.
inline MonotoneCurve make_curve(const RunConfig& cfg, const Grid& g) {
    if (cfg.curve.kind == CurveSpec::Kind::Linear) return MonotoneCurve::linear(cfg.domain.h1, cfg.domain.h2, g.x);
    return io::load_curve(cfg.curve.file, cfg.domain.h1, cfg.domain.h2);
}

inline Fn2 make_field(const FieldSpec& f, const Grid& g) {
    switch (f.kind) {
    case FieldSpec::Kind::Constant: return Fn2::constant(g.x, g.y, f.value);
    case FieldSpec::Kind::Step: return step_coefficient(g, f.left, f.right, f.at, f.along_x);
    case FieldSpec::Kind::File: return io::load_fn2(f.file, g);
    }
    return Fn2::zeros(g.x, g.y);
}

inline Fn1 make_majorant(const FieldSpec& f, const Axis& ax) {
    switch (f.kind) {
    case FieldSpec::Kind::Constant: return Fn1::constant(ax, f.value);
    case FieldSpec::Kind::Step: return sample(ax, [&](double t) { return t <= f.at ? f.left : f.right; });
    case FieldSpec::Kind::File: return io::load_fn1(f.file, ax);
    }
    return Fn1::zeros(ax);
}

/// Coefficient set for a grid: manifest first, then inline entries on top.
inline CoefficientSet make_coefficients(const RunConfig& cfg, const Grid& g) {
    CoefficientSet c = cfg.coefficient_manifest ? io::load_coefficients(*cfg.coefficient_manifest, g)
                                                : CoefficientSet::zeros(g);
    for (const auto& [key, spec] : cfg.coefficients) {
        const int i = key[1] - '0';
        const int j = key[2] - '0';
        c.a[i][j] = make_field(spec, g);
    }
    for (const auto& [key, spec] : cfg.majorants) {
        const int i = key[3] - '0';
        const int j = key[4] - '0';
        if (i == 3) {
            c.majorant_y[j] = make_majorant(spec, g.y);
        } else {
            c.majorant_x[i] = make_majorant(spec, g.x);
        }
    }
    c.validate(g);
    return c;
}

} // namespace ppcauchy::cli
