#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ppcauchy/curve.hpp"
#include "ppcauchy/data.hpp"

namespace ppcauchy::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

/// Shortest text that reads back to the same double (17 significant digits).
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline double parse_double(std::string_view field, const std::string& where) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        fail(ErrorKind::Parse, where + ": cannot parse '" + std::string(field) + "' as a number");
    }
    require(std::isfinite(v), ErrorKind::Parse, where + ": non-finite value '" + std::string(field) + "'");
    return v;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

inline std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
    out << text;
    require(static_cast<bool>(out), ErrorKind::Io, "write failed for " + path.string());
}

/// Numeric rows of a CSV with a mandatory header; each row must have `columns` fields.
inline std::vector<std::vector<double>> read_csv_rows(const fs::path& path, std::size_t columns) {
    const std::string text = read_text(path);
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (!header_seen) {
            header_seen = true;
            require(split_commas(line).size() == columns, ErrorKind::Parse,
                    path.string() + ": header must have " + std::to_string(columns) + " columns");
            continue;
        }
        const auto fields = split_commas(line);
        const std::string where = path.string() + " row " + std::to_string(line_no);
        require(fields.size() == columns, ErrorKind::Parse,
                where + ": expected " + std::to_string(columns) + " columns, got " + std::to_string(fields.size()));
        std::vector<double> row;
        row.reserve(columns);
        for (auto f : fields) row.push_back(parse_double(f, where));
        rows.push_back(std::move(row));
    }
    require(header_seen, ErrorKind::Parse, path.string() + ": empty file (header row required)");
    return rows;
}

inline std::string fn1_to_csv(const Fn1& f) {
    std::string s = "coord,value\n";
    for (std::size_t k = 0; k < f.size(); ++k) {
        s += format_double(f.axis[k]) + "," + format_double(f[k]) + "\n";
    }
    return s;
}

inline std::string fn2_to_csv(const Fn2& g) {
    std::string s = "x,y,value\n";
    for (std::size_t i = 0; i < g.nx(); ++i) {
        for (std::size_t j = 0; j < g.ny(); ++j) {
            s += format_double(g.axis_x[i]) + "," + format_double(g.axis_y[j]) + "," + format_double(g(i, j)) + "\n";
        }
    }
    return s;
}

inline void save_fn1(const fs::path& path, const Fn1& f) { write_text(path, fn1_to_csv(f)); }
inline void save_fn2(const fs::path& path, const Fn2& g) { write_text(path, fn2_to_csv(g)); }

inline Fn1 load_fn1(const fs::path& path) {
    const auto rows = read_csv_rows(path, 2);
    std::vector<double> coords;
    std::vector<double> values;
    for (const auto& r : rows) {
        coords.push_back(r[0]);
        values.push_back(r[1]);
    }
    try {
        return Fn1(Axis(std::move(coords)), std::move(values));
    } catch (const Error& e) {
        fail(e.kind(), path.string() + ": " + e.what());
    }
}

/// Loads an Fn1 and checks it lies on `expected`.
inline Fn1 load_fn1(const fs::path& path, const Axis& expected) {
    Fn1 f = load_fn1(path);
    require(f.size() == expected.size(), ErrorKind::AxisMismatch,
            path.string() + ": " + std::to_string(f.size()) + " rows, axis has " + std::to_string(expected.size()) +
                " points");
    require(f.axis == expected, ErrorKind::AxisMismatch, path.string() + ": coordinates differ from the grid axis");
    return f;
}

inline Fn2 load_fn2(const fs::path& path) {
    const auto rows = read_csv_rows(path, 3);
    require(!rows.empty(), ErrorKind::Parse, path.string() + ": no data rows");
    std::size_t ny = 0;
    while (ny < rows.size() && rows[ny][0] == rows[0][0]) ++ny;
    require(rows.size() % ny == 0, ErrorKind::AxisMismatch,
            path.string() + ": row count " + std::to_string(rows.size()) + " is not a multiple of " +
                std::to_string(ny));
    const std::size_t nx = rows.size() / ny;
    std::vector<double> xs(nx);
    std::vector<double> ys(ny);
    std::vector<double> values(rows.size());
    for (std::size_t j = 0; j < ny; ++j) ys[j] = rows[j][1];
    for (std::size_t i = 0; i < nx; ++i) {
        xs[i] = rows[i * ny][0];
        for (std::size_t j = 0; j < ny; ++j) {
            const auto& r = rows[i * ny + j];
            require(r[0] == xs[i] && r[1] == ys[j], ErrorKind::Parse,
                    path.string() + ": data row " + std::to_string(i * ny + j + 1) +
                        " breaks the x-major tensor layout");
            values[i * ny + j] = r[2];
        }
    }
    try {
        return Fn2(Axis(std::move(xs)), Axis(std::move(ys)), std::move(values));
    } catch (const Error& e) {
        fail(e.kind(), path.string() + ": " + e.what());
    }
}

inline Fn2 load_fn2(const fs::path& path, const Grid& expected) {
    Fn2 g = load_fn2(path);
    require(g.axis_x == expected.x && g.axis_y == expected.y, ErrorKind::AxisMismatch,
            path.string() + ": grid " + std::to_string(g.nx()) + "x" + std::to_string(g.ny()) +
                " differs from the expected " + std::to_string(expected.x.size()) + "x" +
                std::to_string(expected.y.size()));
    return g;
}

/// Curve CSV: two columns (x, S(x)).
inline MonotoneCurve load_curve(const fs::path& path, double h1, double h2) {
    return MonotoneCurve::from_samples(h1, h2, load_fn1(path));
}

// JSON helpers ---------------------------------------------------------------

inline json exponent_to_json(double p) { return std::isinf(p) ? json("inf") : json(p); }

inline double exponent_from_json(const json& j, const std::string& where) {
    if (j.is_string() && (j.get<std::string>() == "inf" || j.get<std::string>() == "infinity")) return kInf;
    require(j.is_number(), ErrorKind::Config, where + ": expected a number or \"inf\"");
    const double p = j.get<double>();
    require(p >= 1.0, ErrorKind::Config, where + ": exponent must be >= 1");
    return p;
}

inline json domain_to_json(const Domain& d) { return json{{"h1", d.h1}, {"h2", d.h2}, {"p", exponent_to_json(d.p)}}; }

inline Domain domain_from_json(const json& j, const std::string& where) {
    require(j.is_object(), ErrorKind::Config, where + ": expected an object");
    Domain d;
    for (const auto& [key, val] : j.items()) {
        if (key == "h1" || key == "h2") {
            require(val.is_number(), ErrorKind::Config, where + "." + key + ": expected a number");
            (key == "h1" ? d.h1 : d.h2) = val.get<double>();
        } else if (key == "p") {
            d.p = exponent_from_json(val, where + ".p");
        } else {
            fail(ErrorKind::Config, where + "." + key + ": unknown key");
        }
    }
    require(j.contains("h1") && j.contains("h2"), ErrorKind::Config, where + ": h1 and h2 are required");
    d.validate();
    return d;
}

inline json grid_to_json(const Grid& g) { return json{{"nx", g.x.cells()}, {"ny", g.y.cells()}}; }

inline const char* corner_key(int i, int j) {
    static const char* keys[3][2] = {{"z00", "z01"}, {"z10", "z11"}, {"z20", "z21"}};
    return keys[i][j];
}

struct Manifest {
    std::string kind;
    Domain domain;
    std::size_t nx = 0;
    std::size_t ny = 0;
    json files;
    json scalars;
    fs::path dir;

    [[nodiscard]] fs::path file(const std::string& key) const {
        require(files.contains(key), ErrorKind::MissingField, "manifest lacks file entry '" + key + "'");
        return dir / files.at(key).get<std::string>();
    }
};

inline Manifest read_manifest(const fs::path& path, const std::string& expected_kind) {
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        fail(ErrorKind::Parse, path.string() + ": " + e.what());
    }
    Manifest m;
    m.dir = path.parent_path();
    require(j.is_object(), ErrorKind::Parse, path.string() + ": manifest must be a JSON object");
    for (const auto& [key, val] : j.items()) {
        if (key == "kind") {
            m.kind = val.get<std::string>();
        } else if (key == "domain") {
            m.domain = domain_from_json(val, "manifest.domain");
        } else if (key == "grid") {
            require(val.contains("nx") && val.contains("ny"), ErrorKind::Parse, "manifest.grid needs nx and ny");
            m.nx = val.at("nx").get<std::size_t>();
            m.ny = val.at("ny").get<std::size_t>();
        } else if (key == "files") {
            m.files = val;
        } else if (key == "scalars") {
            m.scalars = val;
        } else {
            fail(ErrorKind::Parse, path.string() + ": unknown manifest key '" + key + "'");
        }
    }
    require(m.kind == expected_kind, ErrorKind::Parse,
            path.string() + ": manifest kind '" + m.kind + "', expected '" + expected_kind + "'");
    require(j.contains("domain") && j.contains("grid") && j.contains("files"), ErrorKind::Parse,
            path.string() + ": manifest needs domain, grid and files");
    return m;
}

/// Grid of a manifest, derived from the first Fn1 file on the given axis and checked against nx/ny.
inline Grid manifest_grid(const Manifest& m, const fs::path& x_file, const fs::path& y_file) {
    const Fn1 fx = load_fn1(x_file);
    const Fn1 fy = load_fn1(y_file);
    require(fx.axis.cells() == m.nx, ErrorKind::AxisMismatch,
            x_file.string() + ": " + std::to_string(fx.axis.cells()) + " cells, manifest says nx = " +
                std::to_string(m.nx));
    require(fy.axis.cells() == m.ny, ErrorKind::AxisMismatch,
            y_file.string() + ": " + std::to_string(fy.axis.cells()) + " cells, manifest says ny = " +
                std::to_string(m.ny));
    require(std::abs(fx.axis.length() - m.domain.h1) <= 1e-12 * m.domain.h1, ErrorKind::AxisMismatch,
            x_file.string() + ": axis does not span [0, h1]");
    require(std::abs(fy.axis.length() - m.domain.h2) <= 1e-12 * m.domain.h2, ErrorKind::AxisMismatch,
            y_file.string() + ": axis does not span [0, h2]");
    return Grid{fx.axis, fy.axis};
}

// Non-classical bundle -------------------------------------------------------

inline fs::path save_nonclassical(const fs::path& dir, const NonClassicalData& nc, const Domain& d) {
    fs::create_directories(dir);
    save_fn2(dir / "z32.csv", nc.rhs);
    save_fn1(dir / "z30.csv", nc.x_traces[0]);
    save_fn1(dir / "z31.csv", nc.x_traces[1]);
    save_fn1(dir / "z02.csv", nc.y_traces[0]);
    save_fn1(dir / "z12.csv", nc.y_traces[1]);
    save_fn1(dir / "z22.csv", nc.y_traces[2]);
    json scalars = json::object();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) scalars[corner_key(i, j)] = nc.corner[i][j];
    const json m{{"kind", "nonclassical"},
                 {"domain", domain_to_json(d)},
                 {"grid", grid_to_json(Grid{nc.axis_x(), nc.axis_y()})},
                 {"files",
                  {{"z32", "z32.csv"},
                   {"z30", "z30.csv"},
                   {"z31", "z31.csv"},
                   {"z02", "z02.csv"},
                   {"z12", "z12.csv"},
                   {"z22", "z22.csv"}}},
                 {"scalars", scalars}};
    const fs::path path = dir / "manifest.json";
    write_text(path, m.dump(2) + "\n");
    return path;
}

struct LoadedNonClassical {
    Domain domain;
    Grid grid;
    NonClassicalData data;
};

inline LoadedNonClassical load_nonclassical(const fs::path& manifest_path) {
    const Manifest m = read_manifest(manifest_path, "nonclassical");
    LoadedNonClassical out;
    out.domain = m.domain;
    out.grid = manifest_grid(m, m.file("z30"), m.file("z22"));
    auto& nc = out.data;
    nc.rhs = load_fn2(m.file("z32"), out.grid);
    nc.x_traces[0] = load_fn1(m.file("z30"), out.grid.x);
    nc.x_traces[1] = load_fn1(m.file("z31"), out.grid.x);
    nc.y_traces[0] = load_fn1(m.file("z02"), out.grid.y);
    nc.y_traces[1] = load_fn1(m.file("z12"), out.grid.y);
    nc.y_traces[2] = load_fn1(m.file("z22"), out.grid.y);
    require(m.scalars.is_object(), ErrorKind::Parse, "manifest.scalars must be an object");
    for (const auto& [key, val] : m.scalars.items()) {
        bool known = false;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 2; ++j) {
                if (key == corner_key(i, j)) {
                    require(val.is_number(), ErrorKind::Parse, "manifest.scalars." + key + " must be a number");
                    nc.corner[i][j] = val.get<double>();
                    known = true;
                }
            }
        }
        require(known, ErrorKind::Parse, "manifest.scalars." + key + ": unknown scalar");
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j)
            require(m.scalars.contains(corner_key(i, j)), ErrorKind::MissingField,
                    std::string("manifest.scalars lacks ") + corner_key(i, j));
    return out;
}

// Classical bundle -----------------------------------------------------------

inline std::string classical_key(int i, int j) { return "Z" + std::to_string(i) + std::to_string(j); }

inline fs::path save_classical(const fs::path& dir, const ClassicalData& cl, const Domain& d,
                               const Fn2* rhs = nullptr) {
    fs::create_directories(dir);
    json files = json::object();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 2; ++j) {
            const std::string key = classical_key(i, j);
            save_fn1(dir / (key + ".csv"), cl.traces[i][j]);
            files[key] = key + ".csv";
        }
    }
    save_fn1(dir / "Z4.csv", cl.mixed22);
    files["Z4"] = "Z4.csv";
    if (rhs) {
        save_fn2(dir / "z32.csv", *rhs);
        files["z32"] = "z32.csv";
    }
    const json m{{"kind", "classical"},
                 {"domain", domain_to_json(d)},
                 {"grid", grid_to_json(Grid{cl.axis_x(), cl.axis_y()})},
                 {"files", files}};
    const fs::path path = dir / "manifest.json";
    write_text(path, m.dump(2) + "\n");
    return path;
}

struct LoadedClassical {
    Domain domain;
    Grid grid;
    ClassicalData data;
    std::optional<Fn2> rhs;  // the equation's right side, when the bundle carries it
};

inline LoadedClassical load_classical(const fs::path& manifest_path) {
    const Manifest m = read_manifest(manifest_path, "classical");
    for (const auto& [key, val] : m.files.items()) {
        bool known = key == "Z4" || key == "z32";
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 2; ++j) known = known || key == classical_key(i, j);
        require(known, ErrorKind::Parse, "manifest.files." + key + ": unknown component");
    }
    LoadedClassical out;
    out.domain = m.domain;
    out.grid = manifest_grid(m, m.file("Z00"), m.file("Z4"));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) out.data.traces[i][j] = load_fn1(m.file(classical_key(i, j)), out.grid.x);
    out.data.mixed22 = load_fn1(m.file("Z4"), out.grid.y);
    if (m.files.contains("z32")) out.rhs = load_fn2(m.file("z32"), out.grid);
    return out;
}

// Coefficients ---------------------------------------------------------------

inline std::string majorant_key_x(int i) { return "a0_" + std::to_string(i) + "2"; }
inline std::string majorant_key_y(int j) { return "a0_3" + std::to_string(j); }

inline fs::path save_coefficients(const fs::path& dir, const CoefficientSet& c, const Domain& d) {
    fs::create_directories(dir);
    json files = json::object();
    for (int i = 0; i <= 3; ++i) {
        for (int j = 0; j <= 2; ++j) {
            if (!CoefficientSet::is_term(i, j)) continue;
            const std::string key = index_name("a", i, j);
            save_fn2(dir / (key + ".csv"), c.a[i][j]);
            files[key] = key + ".csv";
        }
    }
    for (int i = 0; i < 3; ++i) {
        if (!c.majorant_x[i]) continue;
        save_fn1(dir / (majorant_key_x(i) + ".csv"), *c.majorant_x[i]);
        files[majorant_key_x(i)] = majorant_key_x(i) + ".csv";
    }
    for (int j = 0; j < 2; ++j) {
        if (!c.majorant_y[j]) continue;
        save_fn1(dir / (majorant_key_y(j) + ".csv"), *c.majorant_y[j]);
        files[majorant_key_y(j)] = majorant_key_y(j) + ".csv";
    }
    const json m{{"kind", "coefficients"},
                 {"domain", domain_to_json(d)},
                 {"grid", grid_to_json(Grid{c.a[0][0].axis_x, c.a[0][0].axis_y})},
                 {"files", files}};
    const fs::path path = dir / "manifest.json";
    write_text(path, m.dump(2) + "\n");
    return path;
}

/// Coefficient bundle; absent coefficient files mean identically zero.
inline CoefficientSet load_coefficients(const fs::path& manifest_path, const Grid& grid) {
    const Manifest m = read_manifest(manifest_path, "coefficients");
    CoefficientSet c = CoefficientSet::zeros(grid);
    for (const auto& [key, val] : m.files.items()) {
        const fs::path file = m.dir / val.get<std::string>();
        bool known = false;
        for (int i = 0; i <= 3; ++i) {
            for (int j = 0; j <= 2; ++j) {
                if (CoefficientSet::is_term(i, j) && key == index_name("a", i, j)) {
                    c.a[i][j] = load_fn2(file, grid);
                    known = true;
                }
            }
        }
        for (int i = 0; i < 3; ++i) {
            if (key == majorant_key_x(i)) {
                c.majorant_x[i] = load_fn1(file, grid.x);
                known = true;
            }
        }
        for (int j = 0; j < 2; ++j) {
            if (key == majorant_key_y(j)) {
                c.majorant_y[j] = load_fn1(file, grid.y);
                known = true;
            }
        }
        require(known, ErrorKind::Parse, "manifest.files." + key + ": unknown coefficient");
    }
    return c;
}

} // namespace ppcauchy::io
