#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace radhydro::io {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Flat key/value configuration

/// Error with every problem found, not just the first.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::vector<std::string>& problems)
        : std::runtime_error(join(problems)), problems_(problems) {}
    const std::vector<std::string>& problems() const { return problems_; }

  private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s = "configuration invalid:";
        for (const auto& p : v) s += "\n  - " + p;
        return s;
    }
    std::vector<std::string> problems_;
};

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

/// `key = value` lines; '#' starts a comment; blank lines ignored.
struct FlatConfig {
    std::map<std::string, std::string> values;

    static FlatConfig parse(std::istream& in) {
        FlatConfig cfg;
        std::vector<std::string> problems;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                problems.push_back("line " + std::to_string(lineno) + ": expected key = value");
                continue;
            }
            const std::string key = trim(line.substr(0, eq));
            const std::string val = trim(line.substr(eq + 1));
            if (key.empty()) {
                problems.push_back("line " + std::to_string(lineno) + ": empty key");
                continue;
            }
            if (cfg.values.count(key)) {
                problems.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key +
                                   "'");
                continue;
            }
            cfg.values[key] = val;
        }
        if (!problems.empty()) throw ConfigError(problems);
        return cfg;
    }

    static FlatConfig parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError({"cannot open config file: " + path});
        return parse(in);
    }

    bool has(const std::string& key) const { return values.count(key) != 0; }

    std::string get(const std::string& key, const std::string& fallback) const {
        auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }

    /// Canonical serialization (sorted keys) used for hashing and echo files.
    std::string canonical() const {
        std::string out;
        for (const auto& [k, v] : values) out += k + " = " + v + "\n";
        return out;
    }
};

/// Typed accessor that collects all conversion/validation problems before
/// throwing.
class ConfigReader {
  public:
    explicit ConfigReader(FlatConfig cfg) : cfg_(std::move(cfg)) {}

    const FlatConfig& config() const { return cfg_; }

    double get_double(const std::string& key, double fallback) {
        if (!cfg_.has(key)) return fallback;
        return parse_with<double>(key, "number", [](const std::string& s, std::size_t* pos) {
            return std::stod(s, pos);
        });
    }
    long long get_int(const std::string& key, long long fallback) {
        if (!cfg_.has(key)) return fallback;
        return parse_with<long long>(key, "integer", [](const std::string& s, std::size_t* pos) {
            return std::stoll(s, pos);
        });
    }
    std::string get_string(const std::string& key, const std::string& fallback) {
        touch(key);
        return cfg_.get(key, fallback);
    }
    bool get_bool(const std::string& key, bool fallback) {
        touch(key);
        if (!cfg_.has(key)) return fallback;
        const std::string v = cfg_.values.at(key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        problems_.push_back("key '" + key + "': expected a boolean, got '" + v + "'");
        return fallback;
    }

    void require(bool condition, const std::string& message) {
        if (!condition) problems_.push_back(message);
    }

    /// Flag unknown keys and throw if any problem accumulated.
    void finish() {
        for (const auto& [k, v] : cfg_.values)
            if (!seen_.count(k)) problems_.push_back("unknown key '" + k + "'");
        if (!problems_.empty()) throw ConfigError(problems_);
    }

  private:
    template <typename T, typename Fn>
    T parse_with(const std::string& key, const char* kind, Fn&& fn) {
        touch(key);
        const std::string& v = cfg_.values.at(key);
        try {
            std::size_t pos = 0;
            T out = fn(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("trailing garbage");
            return out;
        } catch (const std::exception&) {
            problems_.push_back("key '" + key + "': expected a " + kind + ", got '" + v + "'");
            return T{};
        }
    }
    void touch(const std::string& key) { seen_.insert(key); }

    FlatConfig cfg_;
    std::set<std::string> seen_;
    std::vector<std::string> problems_;
};

// ---------------------------------------------------------------------------
// Config hash

/// FNV-1a 64-bit over the canonical key/value serialization plus the seed.
inline std::uint64_t config_hash(const FlatConfig& cfg, std::uint64_t seed = 0) {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&](const char* data, std::size_t len) {
        for (std::size_t i = 0; i < len; ++i) {
            h ^= static_cast<unsigned char>(data[i]);
            h *= 1099511628211ull;
        }
    };
    const std::string canon = cfg.canonical();
    mix(canon.data(), canon.size());
    const std::string s = "seed=" + std::to_string(seed);
    mix(s.data(), s.size());
    return h;
}

inline std::string hash_string(std::uint64_t h) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Deterministic numeric formatting

/// Shortest round-trip decimal form of a double; locale-independent.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) {
        for (int prec = 1; prec <= 16; ++prec) {
            char shorter[32];
            std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
            std::sscanf(shorter, "%lf", &back);
            if (back == v) return shorter;
        }
    }
    return buf;
}

// ---------------------------------------------------------------------------
// CSV

/// CSV with a two-line comment preamble:
///   # schema: <name> v<version>
///   # config-hash: 0x<16 hex digits>
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::string& schema, int version,
              std::uint64_t cfg_hash, const std::vector<std::string>& columns)
        : out_(path), ncols_(columns.size()) {
        if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
        out_ << "# schema: " << schema << " v" << version << "\n";
        out_ << "# config-hash: " << hash_string(cfg_hash) << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != ncols_) throw std::logic_error("CsvWriter: column count mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
    }

    bool good() const { return bool(out_); }

  private:
    std::ofstream out_;
    std::size_t ncols_;
};

struct CsvTable {
    std::string schema;
    std::string config_hash;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path);
    CsvTable t;
    std::string line;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (line.rfind("# schema: ", 0) == 0) {
            t.schema = line.substr(10);
            continue;
        }
        if (line.rfind("# config-hash: ", 0) == 0) {
            t.config_hash = line.substr(15);
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!header_done) {
            t.columns = cells;
            header_done = true;
        } else {
            t.rows.push_back(cells);
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// JSON with the same provenance header

inline json json_document(const std::string& schema, int version, std::uint64_t cfg_hash) {
    json doc;
    doc["schema"] = schema;
    doc["schema_version"] = version;
    doc["config_hash"] = hash_string(cfg_hash);
    return doc;
}

inline void write_json(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_json: cannot open " + path);
    out << doc.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Minimal SVG polyline plot

struct SvgSeries {
    std::string label;
    std::string color = "#1f77b4";
    std::vector<double> x, y;
};

/// Log-log or linear polyline chart; enough to eyeball a decay curve.
inline void write_svg_plot(const std::string& path, const std::string& title,
                           const std::vector<SvgSeries>& series, std::uint64_t cfg_hash,
                           bool log_x = false, bool log_y = false) {
    const int W = 720, H = 480, M = 60;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((log_x && s.x[i] <= 0.0) || (log_y && s.y[i] <= 0.0)) continue;
            xmin = std::min(xmin, tx(s.x[i]));
            xmax = std::max(xmax, tx(s.x[i]));
            ymin = std::min(ymin, ty(s.y[i]));
            ymax = std::max(ymax, ty(s.y[i]));
        }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_svg_plot: cannot open " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\">\n";
    out << "<!-- config-hash: " << hash_string(cfg_hash) << " -->\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << title << "</text>\n";
    out << "<rect x=\"" << M << "\" y=\"" << M << "\" width=\"" << W - 2 * M << "\" height=\""
        << H - 2 * M << "\" fill=\"none\" stroke=\"black\"/>\n";

    auto px = [&](double v) { return M + (tx(v) - xmin) / (xmax - xmin) * (W - 2 * M); };
    auto py = [&](double v) { return H - M - (ty(v) - ymin) / (ymax - ymin) * (H - 2 * M); };

    int legend_y = M + 16;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((log_x && s.x[i] <= 0.0) || (log_y && s.y[i] <= 0.0)) continue;
            out << format_double(px(s.x[i])) << "," << format_double(py(s.y[i])) << " ";
        }
        out << "\"/>\n";
        out << "<text x=\"" << W - M - 150 << "\" y=\"" << legend_y << "\" font-size=\"12\" fill=\""
            << s.color << "\">" << s.label << "</text>\n";
        legend_y += 16;
    }
    out << "</svg>\n";
}

}  // namespace radhydro::io
