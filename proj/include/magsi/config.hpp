#pragma once

/// Sectioned key-value run configuration.
///
///   [section]
///   key = value   ; comment
///
/// Keys are unique per section. Every parse and validation error names the
/// source and line it refers to.

#include "magsi/cgo.hpp"
#include "magsi/linearize.hpp"
#include "magsi/mesh.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace magsi {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, const std::string& message);
    /// 1-based line, or 0 when the error is not tied to a line.
    int line() const { return line_; }

private:
    int line_;
};

struct IniEntry {
    std::string value;
    int line = 0;
};

/// Parsed INI text with line numbers kept for every key.
class IniFile {
public:
    static IniFile parse(const std::string& text, const std::string& source = "<config>");
    static IniFile load(const std::string& path);

    const std::string& source() const { return source_; }
    bool has(const std::string& section, const std::string& key) const;
    const IniEntry* find(const std::string& section, const std::string& key) const;
    bool has_section(const std::string& section) const { return sections_.count(section) != 0; }
    int section_line(const std::string& section) const;
    const std::map<std::string, std::map<std::string, IniEntry>>& sections() const { return sections_; }

    std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                    const std::vector<double>& fallback) const;

    /// ConfigError anchored at the line of `section.key` (or of the section).
    [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& message) const;
    /// Rejects keys of `section` that are not listed in `allowed`.
    void require_known(const std::string& section, const std::vector<std::string>& allowed) const;

private:
    std::string source_;
    std::map<std::string, std::map<std::string, IniEntry>> sections_;
    std::map<std::string, int> section_lines_;
};

struct BoundarySpec {
    /// Edge names from {left, right, bottom, top}, or "all".
    std::vector<std::string> edges{"all"};
    /// Optional thresholds on x1: keep nodes with x1 <= x_max and x1 >= x_min.
    std::optional<double> x_max;
    std::optional<double> x_min;
};

/// Boundary nodes on the named edges that pass the thresholds.
BoundarySegment make_segment(const Grid& grid, const BoundarySpec& spec);

struct RunConfig {
    std::string source;

    int nx = 65;
    int ny = 65;
    Rect rect{};

    PotentialSpec potential;
    bool compact_support = true;
    /// Second potential for identity checks; defaults to the first one.
    std::optional<PotentialSpec> potential2;

    BoundarySpec gamma1;
    BoundarySpec gamma2;

    double tol = 1e-12;
    int max_iter = 100;

    int m = 2;
    double eps = 1e-2;
    bool richardson = true;
    /// Named harmonic traces f_1 ... f_{m+1} (see harmonic_by_name).
    std::vector<std::string> traces{"1+xy", "x", "y", "1", "1"};
    /// Dirichlet datum for the forward and dtn commands.
    std::string f = "x2-y2";
    double f_scale = 1e-2;

    int K = 8;
    double recon_eps = 1e-4;
    double max_condition = 100.0;
    int support_margin = 2;

    std::string zeta_kind = "paper_step1";
    std::vector<double> h_list{0.4, 0.3, 0.2, 0.15, 0.1};
    double c = 0.2;

    Grid make_grid() const;
    /// Flat section -> key -> value view of the resolved configuration.
    std::map<std::string, std::map<std::string, std::string>> resolved() const;
};

/// Reads and validates a configuration; unknown sections or keys are errors.
RunConfig parse_run_config(const IniFile& ini);
RunConfig load_run_config(const std::string& path);
RunConfig default_run_config();

/// Harmonic polynomials by name: 1, x, y, xy, x2-y2, 1+xy.
/// Throws std::invalid_argument for an unknown name.
ScalarField harmonic_by_name(const Grid& grid, const std::string& name);

}  // namespace magsi
