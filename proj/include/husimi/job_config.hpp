#pragma once

#include "husimi/fock_core.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace husimi {

/// Malformed or inconsistent job configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    if (t == "pi") return pi;
    if (t == "pi/2") return pi / 2;
    if (t == "pi/4") return pi / 4;
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw ConfigError(what + ": not a number: '" + s + "'");
    return v;
}

inline long long parse_int(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    long long v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw ConfigError(what + ": not an integer: '" + s + "'");
    return v;
}

inline std::vector<double> parse_doubles(const std::string& s, std::size_t count, const std::string& what) {
    const auto parts = split(s, ',');
    if (parts.size() != count)
        throw ConfigError(what + ": expected " + std::to_string(count) + " comma separated numbers, got '" + s + "'");
    std::vector<double> v;
    for (const auto& p : parts) v.push_back(parse_double(p, what));
    return v;
}

struct StateSpec {
    enum class Kind { fock, coherent, thermal, matrix } kind = Kind::fock;
    int n = 0;
    double x = 0.0, p = 0.0, mean = 0.0;
    std::string path;
};

inline StateSpec parse_state(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ConfigError("state: expected kind:args, got '" + s + "'");
    const std::string kind = trim(s.substr(0, colon)), args = trim(s.substr(colon + 1));
    StateSpec st;
    if (kind == "fock") {
        st.kind = StateSpec::Kind::fock;
        const auto n = parse_int(args, "state fock");
        if (n < 0 || n > 400) throw ConfigError("state fock: n must lie in [0, 400]");
        st.n = static_cast<int>(n);
    } else if (kind == "coherent") {
        st.kind = StateSpec::Kind::coherent;
        const auto v = parse_doubles(args, 2, "state coherent");
        st.x = v[0];
        st.p = v[1];
    } else if (kind == "thermal") {
        st.kind = StateSpec::Kind::thermal;
        st.mean = parse_double(args, "state thermal");
        if (!(st.mean >= 0.0)) throw ConfigError("state thermal: mean must be >= 0");
    } else if (kind == "matrix") {
        st.kind = StateSpec::Kind::matrix;
        if (args.empty()) throw ConfigError("state matrix: missing path");
        st.path = args;
    } else {
        throw ConfigError("state: unknown kind '" + kind + "'");
    }
    return st;
}

inline SqueezedFrame parse_frame(const std::string& s, const std::string& what = "frame") {
    const auto v = parse_doubles(s, 2, what);
    if (!(v[0] > 0.0) || !std::isfinite(v[0])) throw ConfigError(what + ": lambda must be positive");
    return SqueezedFrame(v[0], v[1]);
}

struct AxisSpec {
    double lo = 0.0, hi = 0.0;
    int n = 1;
    std::vector<double> values() const {
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
        return v;
    }
};

struct GridSpec {
    AxisSpec x, p;
    double x_im = 0.0, p_im = 0.0;
    bool complex_offsets() const { return x_im != 0.0 || p_im != 0.0; }
};

inline AxisSpec parse_axis(const std::string& s) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw ConfigError("grid: axis must be lo:hi:n, got '" + s + "'");
    AxisSpec a{parse_double(parts[0], "grid"), parse_double(parts[1], "grid"),
               static_cast<int>(parse_int(parts[2], "grid"))};
    if (a.n < 1 || a.n > 100000) throw ConfigError("grid: point count must lie in [1, 100000]");
    if (a.n > 1 && !(a.hi > a.lo)) throw ConfigError("grid: need lo < hi");
    return a;
}

/// "xlo:xhi:nx,plo:phi:np" with optional ",x_im,p_im" imaginary offsets.
inline GridSpec parse_grid(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() != 2 && parts.size() != 4) throw ConfigError("grid: expected xlo:xhi:n,plo:phi:n[,x_im,p_im]");
    GridSpec g{parse_axis(parts[0]), parse_axis(parts[1])};
    if (parts.size() == 4) {
        g.x_im = parse_double(parts[2], "grid");
        g.p_im = parse_double(parts[3], "grid");
    }
    return g;
}

struct DispSpec {
    cplx eta, zeta;
};

/// "eta_re,eta_im,zeta_re,zeta_im;..."
inline std::vector<DispSpec> parse_disps(const std::string& s) {
    std::vector<DispSpec> out;
    for (const auto& item : split(s, ';')) {
        if (item.empty()) continue;
        const auto v = parse_doubles(item, 4, "disp");
        out.push_back({{v[0], v[1]}, {v[2], v[3]}});
    }
    if (out.empty()) throw ConfigError("disp: need at least one displacement");
    return out;
}

/// Everything a job needs, as text. Keys double as long flag names.
struct JobConfig {
    std::map<std::string, std::string> values;

    static const std::vector<std::pair<std::string, std::string>>& defaults() {
        static const std::vector<std::pair<std::string, std::string>> d = {
            {"command", "husimi"},
            {"state", "fock:0"},
            {"basis", "frame"},
            {"frame", "1,0"},
            {"grid", "-3:3:7,-3:3:7"},
            {"figure_grid", "-6:6:121,-6:6:121"},
            {"figure_n", "6"},
            {"quad", "48"},
            {"tolerance", "1e-10"},
            {"dim", "40"},
            {"seed", "20240601"},
            {"out", "-"},
            {"pt1", "0,0"},
            {"pt2", "0,0"},
            {"at", "0,0"},
            {"sigma", "1e-6"},
            {"trials", "10000"},
            {"noise_model", "independent"},
            {"disp", "0.5,0,0,0;1,0,0,0;0,0,0.5,0;0,0,1,0;0.5,0,0.5,0;1,0,1,0"},
        };
        return d;
    }

    static bool known(const std::string& key) {
        for (const auto& [k, v] : defaults())
            if (k == key) return true;
        return false;
    }

    JobConfig() {
        for (const auto& [k, v] : defaults()) values[k] = v;
    }

    const std::string& get(const std::string& key) const {
        const auto it = values.find(key);
        if (it == values.end()) throw ConfigError("unknown config key '" + key + "'");
        return it->second;
    }

    void set(const std::string& key, const std::string& value) {
        if (!known(key)) throw ConfigError("unknown config key '" + key + "'");
        values[key] = trim(value);
    }

    /// key=value lines in fixed order.
    std::string to_text(const std::string& line_prefix = "") const {
        std::string out;
        for (const auto& [k, v] : defaults()) out += line_prefix + k + "=" + get(k) + "\n";
        return out;
    }

    /// Plain config text: key=value lines, '#' starts a comment line.
    void apply_text(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            line = trim(line);
            if (line.empty() || line[0] == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
            set(trim(line.substr(0, eq)), line.substr(eq + 1));
        }
    }

    /// Reads the "# key=value" metadata lines at the top of a GridCSV; other keys are ignored.
    void apply_csv_metadata(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (line.rfind("# ", 0) != 0) break;
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = trim(line.substr(2, eq - 2));
            if (known(key)) set(key, line.substr(eq + 1));
        }
    }

    bool operator==(const JobConfig& o) const { return values == o.values; }
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace husimi
