#pragma once

#include "husimi/job_config.hpp"

#include <array>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace husimi {

/// Grid output: "# key=value" metadata, a header row, then one row per point.
struct GridCsv {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns = {"x_re", "x_im", "p_re", "p_im", "value_re", "value_im"};
    std::vector<std::vector<double>> rows;

    void meta(const std::string& key, const std::string& value) { metadata.emplace_back(key, value); }
    void meta(const std::string& key, double value) { metadata.emplace_back(key, format_double(value)); }

    void add(cplx x, cplx p, cplx value) {
        rows.push_back({x.real(), x.imag(), p.real(), p.imag(), value.real(), value.imag()});
    }

    std::string to_string() const {
        std::string out;
        for (const auto& [k, v] : metadata) out += "# " + k + "=" + v + "\n";
        for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
        out += "\n";
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + format_double(r[i]);
            out += "\n";
        }
        return out;
    }

    static GridCsv parse(const std::string& text) {
        GridCsv g;
        g.columns.clear();
        std::istringstream in(text);
        std::string line;
        bool header = false;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (!header && line.rfind("# ", 0) == 0) {
                const auto eq = line.find('=');
                if (eq != std::string::npos) g.meta(line.substr(2, eq - 2), line.substr(eq + 1));
                continue;
            }
            if (!header) {
                g.columns = split(line, ',');
                header = true;
                continue;
            }
            std::vector<double> r;
            for (const auto& f : split(line, ',')) r.push_back(parse_double(f, "csv"));
            if (r.size() != g.columns.size()) throw ConfigError("csv: row width does not match header");
            g.rows.push_back(std::move(r));
        }
        return g;
    }

    std::string meta_value(const std::string& key) const {
        for (const auto& [k, v] : metadata)
            if (k == key) return v;
        throw ConfigError("csv: no metadata key '" + key + "'");
    }
};

/// Matrix file: "# dim=N" then "row,col,value_re,value_im" lines; missing entries are zero.
inline CMatrix parse_matrix_file(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    long long dim = -1;
    CMatrix m;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos && trim(line.substr(1, eq - 1)) == "dim") {
                dim = parse_int(line.substr(eq + 1), "matrix dim");
                if (dim < 1 || dim > 2000) throw ConfigError("matrix: dim must lie in [1, 2000]");
                m = CMatrix::Zero(dim, dim);
            }
            continue;
        }
        if (line.rfind("row", 0) == 0) continue;
        if (dim < 0) throw ConfigError("matrix: '# dim=N' must precede the entries");
        const auto f = split(line, ',');
        if (f.size() != 4) throw ConfigError("matrix line " + std::to_string(lineno) + ": expected row,col,re,im");
        const auto r = parse_int(f[0], "matrix row"), c = parse_int(f[1], "matrix col");
        if (r < 0 || r >= dim || c < 0 || c >= dim)
            throw ConfigError("matrix line " + std::to_string(lineno) + ": index out of range");
        m(r, c) = cplx(parse_double(f[2], "matrix"), parse_double(f[3], "matrix"));
    }
    if (dim < 0) throw ConfigError("matrix: missing '# dim=N' header");
    return m;
}

inline std::string matrix_file_text(const CMatrix& m) {
    std::string out = "# dim=" + std::to_string(m.rows()) + "\nrow,col,value_re,value_im\n";
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c)
            if (m(r, c) != cplx(0.0))
                out += std::to_string(r) + "," + std::to_string(c) + "," + format_double(m(r, c).real()) + "," +
                       format_double(m(r, c).imag()) + "\n";
    return out;
}

}  // namespace husimi
