#include "magsi/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace magsi {

namespace {

std::string anchored(const std::string& source, int line, const std::string& message) {
    std::ostringstream os;
    os << source;
    if (line > 0) os << ":" << line;
    os << ": " << message;
    return os.str();
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

bool parse_number(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    const auto r = std::from_chars(b, e, out);
    return r.ec == std::errc() && r.ptr == e;
}

// shortest representation that round-trips
std::string fmt(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    return s;
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(anchored(source, line, message)), line_(line) {}

IniFile IniFile::parse(const std::string& text, const std::string& source) {
    IniFile ini;
    ini.source_ = source;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto cut = raw.find_first_of(";#");
        const std::string s = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(source, line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty()) throw ConfigError(source, line, "empty section name");
            if (ini.section_lines_.count(section)) throw ConfigError(source, line, "duplicate section [" + section + "]");
            ini.section_lines_[section] = line;
            ini.sections_[section];
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(source, line, "expected 'key = value'");
        if (section.empty()) throw ConfigError(source, line, "key outside of any section");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) throw ConfigError(source, line, "empty key");
        auto& sec = ini.sections_[section];
        if (sec.count(key)) throw ConfigError(source, line, "duplicate key '" + key + "' in [" + section + "]");
        sec[key] = {value, line};
    }
    return ini;
}

IniFile IniFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot open configuration file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

bool IniFile::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

const IniEntry* IniFile::find(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

int IniFile::section_line(const std::string& section) const {
    const auto it = section_lines_.find(section);
    return it == section_lines_.end() ? 0 : it->second;
}

void IniFile::fail(const std::string& section, const std::string& key, const std::string& message) const {
    const IniEntry* e = find(section, key);
    const int line = e ? e->line : section_line(section);
    throw ConfigError(source_, line, "[" + section + "] " + key + ": " + message);
}

void IniFile::require_known(const std::string& section, const std::vector<std::string>& allowed) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return;
    for (const auto& [key, entry] : s->second)
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError(source_, entry.line, "unknown key '" + key + "' in [" + section + "]");
}

std::string IniFile::get_string(const std::string& section, const std::string& key, const std::string& fallback) const {
    const IniEntry* e = find(section, key);
    return e ? e->value : fallback;
}

double IniFile::get_double(const std::string& section, const std::string& key, double fallback) const {
    const IniEntry* e = find(section, key);
    if (!e) return fallback;
    double v = 0.0;
    if (!parse_number(e->value, v)) fail(section, key, "expected a number, got '" + e->value + "'");
    return v;
}

int IniFile::get_int(const std::string& section, const std::string& key, int fallback) const {
    const IniEntry* e = find(section, key);
    if (!e) return fallback;
    int v = 0;
    const char* b = e->value.data();
    const char* end = b + e->value.size();
    const auto r = std::from_chars(b, end, v);
    if (r.ec != std::errc() || r.ptr != end) fail(section, key, "expected an integer, got '" + e->value + "'");
    return v;
}

bool IniFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    const IniEntry* e = find(section, key);
    if (!e) return fallback;
    const std::string v = lower(e->value);
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    fail(section, key, "expected a boolean, got '" + e->value + "'");
}

std::vector<double> IniFile::get_doubles(const std::string& section, const std::string& key,
                                         const std::vector<double>& fallback) const {
    const IniEntry* e = find(section, key);
    if (!e) return fallback;
    std::vector<double> out;
    for (const auto& item : split_list(e->value)) {
        double v = 0.0;
        if (!parse_number(item, v)) fail(section, key, "expected a list of numbers, got '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) fail(section, key, "empty list");
    return out;
}

BoundarySegment make_segment(const Grid& grid, const BoundarySpec& spec) {
    std::vector<Edge> edges;
    bool all = false;
    for (const auto& name : spec.edges) {
        if (name == "all") all = true;
        else if (name == "left") edges.push_back(Edge::left);
        else if (name == "right") edges.push_back(Edge::right);
        else if (name == "bottom") edges.push_back(Edge::bottom);
        else if (name == "top") edges.push_back(Edge::top);
        else throw std::invalid_argument("unknown edge '" + name + "'");
    }
    BoundarySegment seg = all ? BoundarySegment::full(grid) : BoundarySegment::edges(grid, edges);
    for (std::size_t b = 0; b < grid.boundary_count(); ++b) {
        const auto& n = grid.boundary_node(b);
        const double x = grid.x(n.ix);
        if (spec.x_max && x > *spec.x_max) seg.mask[b] = false;
        if (spec.x_min && x < *spec.x_min) seg.mask[b] = false;
    }
    return seg;
}

Grid RunConfig::make_grid() const { return build_grid(nx, ny, rect); }

RunConfig default_run_config() {
    RunConfig c;
    c.source = "<defaults>";
    c.potential.scales = {{"q2", 1.0}};
    return c;
}

namespace {

const std::vector<std::string> kPotentialKeys{"preset", "amplitude", "sigma", "center_x", "center_y", "order",
                                              "compact_support"};

bool is_coefficient_key(const std::string& k) {
    if (k.size() < 2) return false;
    if (k[0] == 'q') return std::all_of(k.begin() + 1, k.end(), ::isdigit);
    if (k[0] == 'A' && k.size() >= 3) {
        const char c = k.back();
        return (c == 'x' || c == 'y') && std::all_of(k.begin() + 1, k.end() - 1, ::isdigit);
    }
    return false;
}

PotentialSpec parse_potential(const IniFile& ini, const std::string& sec, const PotentialSpec& base) {
    PotentialSpec p = base;
    for (const auto& [key, entry] : ini.sections().at(sec)) {
        if (std::find(kPotentialKeys.begin(), kPotentialKeys.end(), key) != kPotentialKeys.end()) continue;
        if (!is_coefficient_key(key))
            throw ConfigError(ini.source(), entry.line, "unknown key '" + key + "' in [" + sec + "]");
    }
    p.preset = ini.get_string(sec, "preset", p.preset);
    try {
        parse_preset(p.preset);
    } catch (const std::invalid_argument& e) {
        ini.fail(sec, "preset", e.what());
    }
    p.amplitude = ini.get_double(sec, "amplitude", p.amplitude);
    p.sigma = ini.get_double(sec, "sigma", p.sigma);
    if (!(p.sigma > 0.0)) ini.fail(sec, "sigma", "must be positive");
    p.center_x = ini.get_double(sec, "center_x", p.center_x);
    p.center_y = ini.get_double(sec, "center_y", p.center_y);
    p.order = ini.get_int(sec, "order", p.order);
    if (p.order < 2) ini.fail(sec, "order", "must be at least 2");
    bool any = false;
    for (const auto& [key, entry] : ini.sections().at(sec))
        if (is_coefficient_key(key)) {
            if (!any) p.scales.clear();
            any = true;
            p.scales[key] = ini.get_double(sec, key, 0.0);
            const int k = std::stoi(key.substr(1, key.size() - (key[0] == 'A' ? 2 : 1)));
            if (k > p.order) ini.fail(sec, key, "order " + std::to_string(k) + " exceeds potential order");
            if (key[0] == 'A' && k < 1) ini.fail(sec, key, "A orders start at 1");
            if (key[0] == 'q' && k < 2) ini.fail(sec, key, "q orders start at 2");
        }
    return p;
}

BoundarySpec parse_boundary(const IniFile& ini, const std::string& name, const BoundarySpec& base) {
    BoundarySpec b = base;
    const std::string sec = "boundary";
    if (ini.has(sec, name)) {
        b.edges = split_list(ini.get_string(sec, name, "all"));
        if (b.edges.empty()) ini.fail(sec, name, "empty edge list");
        for (const auto& e : b.edges)
            if (e != "all" && e != "left" && e != "right" && e != "top" && e != "bottom")
                ini.fail(sec, name, "unknown edge '" + e + "'");
    }
    if (ini.has(sec, name + "_x_max")) b.x_max = ini.get_double(sec, name + "_x_max", 0.0);
    if (ini.has(sec, name + "_x_min")) b.x_min = ini.get_double(sec, name + "_x_min", 0.0);
    return b;
}

}  // namespace

RunConfig parse_run_config(const IniFile& ini) {
    RunConfig c = default_run_config();
    c.source = ini.source();
    const std::vector<std::string> known{"grid",          "potential",      "potential2", "boundary", "solver",
                                         "linearization", "reconstruction", "cgo",        "data"};
    for (const auto& [name, keys] : ini.sections())
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw ConfigError(ini.source(), ini.section_line(name), "unknown section [" + name + "]");

    ini.require_known("grid", {"nx", "ny", "x_min", "x_max", "y_min", "y_max"});
    c.nx = ini.get_int("grid", "nx", c.nx);
    c.ny = ini.get_int("grid", "ny", c.ny);
    if (c.nx < 5) ini.fail("grid", "nx", "need at least 5 nodes");
    if (c.ny < 5) ini.fail("grid", "ny", "need at least 5 nodes");
    c.rect.x_min = ini.get_double("grid", "x_min", c.rect.x_min);
    c.rect.x_max = ini.get_double("grid", "x_max", c.rect.x_max);
    c.rect.y_min = ini.get_double("grid", "y_min", c.rect.y_min);
    c.rect.y_max = ini.get_double("grid", "y_max", c.rect.y_max);
    if (!(c.rect.x_max > c.rect.x_min)) ini.fail("grid", "x_max", "must exceed x_min");
    if (!(c.rect.y_max > c.rect.y_min)) ini.fail("grid", "y_max", "must exceed y_min");

    if (ini.has_section("potential")) {
        c.potential = parse_potential(ini, "potential", c.potential);
        c.compact_support = ini.get_bool("potential", "compact_support", c.compact_support);
    }
    if (ini.has_section("potential2")) c.potential2 = parse_potential(ini, "potential2", c.potential);

    ini.require_known("boundary", {"gamma1", "gamma2", "gamma1_x_max", "gamma1_x_min", "gamma2_x_max", "gamma2_x_min"});
    c.gamma1 = parse_boundary(ini, "gamma1", c.gamma1);
    c.gamma2 = parse_boundary(ini, "gamma2", c.gamma2);
    {
        const Grid g = c.make_grid();
        if (make_segment(g, c.gamma1).empty()) ini.fail("boundary", "gamma1", "selects no boundary node");
        if (make_segment(g, c.gamma2).empty()) ini.fail("boundary", "gamma2", "selects no boundary node");
    }

    ini.require_known("solver", {"tol", "max_iter"});
    c.tol = ini.get_double("solver", "tol", c.tol);
    c.max_iter = ini.get_int("solver", "max_iter", c.max_iter);
    if (!(c.tol > 0.0)) ini.fail("solver", "tol", "must be positive");
    if (c.max_iter < 1) ini.fail("solver", "max_iter", "must be at least 1");

    ini.require_known("linearization", {"m", "eps", "richardson", "traces"});
    c.m = ini.get_int("linearization", "m", c.m);
    if (c.m < 1 || c.m > kMaxLinearizationOrder)
        ini.fail("linearization", "m", "must lie in [1, " + std::to_string(kMaxLinearizationOrder) + "]");
    if (c.m > c.potential.order) ini.fail("linearization", "m", "exceeds the potential order");
    c.eps = ini.get_double("linearization", "eps", c.eps);
    if (!(c.eps > 0.0) || c.eps > 0.25) ini.fail("linearization", "eps", "must lie in (0, 0.25]");
    c.richardson = ini.get_bool("linearization", "richardson", c.richardson);
    if (ini.has("linearization", "traces")) c.traces = split_list(ini.get_string("linearization", "traces", ""));
    if (static_cast<int>(c.traces.size()) < c.m + 1)
        ini.fail("linearization", "traces", "need m + 1 = " + std::to_string(c.m + 1) + " trace names");
    {
        const Grid g = build_grid(5, 5, c.rect);
        for (const auto& t : c.traces) try {
                harmonic_by_name(g, t);
            } catch (const std::invalid_argument& e) {
                ini.fail("linearization", "traces", e.what());
            }
    }

    ini.require_known("data", {"f", "scale"});
    c.f = ini.get_string("data", "f", c.f);
    c.f_scale = ini.get_double("data", "scale", c.f_scale);
    try {
        harmonic_by_name(build_grid(5, 5, c.rect), c.f);
    } catch (const std::invalid_argument& e) {
        ini.fail("data", "f", e.what());
    }

    ini.require_known("reconstruction", {"K", "eps", "max_condition", "support_margin"});
    c.K = ini.get_int("reconstruction", "K", c.K);
    if (c.K < 0 || c.K > 64) ini.fail("reconstruction", "K", "must lie in [0, 64]");
    c.recon_eps = ini.get_double("reconstruction", "eps", c.recon_eps);
    if (!(c.recon_eps > 0.0)) ini.fail("reconstruction", "eps", "must be positive");
    c.max_condition = ini.get_double("reconstruction", "max_condition", c.max_condition);
    if (!(c.max_condition >= 1.0)) ini.fail("reconstruction", "max_condition", "must be at least 1");
    c.support_margin = ini.get_int("reconstruction", "support_margin", c.support_margin);
    if (c.support_margin < 0) ini.fail("reconstruction", "support_margin", "must be non-negative");

    ini.require_known("cgo", {"zeta_kind", "h", "c"});
    c.zeta_kind = ini.get_string("cgo", "zeta_kind", c.zeta_kind);
    try {
        parse_isotropic_kind(c.zeta_kind);
    } catch (const std::invalid_argument& e) {
        ini.fail("cgo", "zeta_kind", e.what());
    }
    c.h_list = ini.get_doubles("cgo", "h", c.h_list);
    for (double h : c.h_list)
        if (!(h > 0.0)) ini.fail("cgo", "h", "every h must be positive");
    c.c = ini.get_double("cgo", "c", c.c);
    if (!(c.c > 0.0)) ini.fail("cgo", "c", "must be positive");
    return c;
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(IniFile::load(path)); }

std::map<std::string, std::map<std::string, std::string>> RunConfig::resolved() const {
    std::map<std::string, std::map<std::string, std::string>> r;
    r["grid"] = {{"nx", std::to_string(nx)},   {"ny", std::to_string(ny)},       {"x_min", fmt(rect.x_min)},
                 {"x_max", fmt(rect.x_max)}, {"y_min", fmt(rect.y_min)}, {"y_max", fmt(rect.y_max)}};
    const auto pot = [](const PotentialSpec& p, bool cs) {
        std::map<std::string, std::string> m{{"preset", p.preset},
                                             {"amplitude", fmt(p.amplitude)},
                                             {"sigma", fmt(p.sigma)},
                                             {"center_x", fmt(p.center_x)},
                                             {"center_y", fmt(p.center_y)},
                                             {"order", std::to_string(p.order)},
                                             {"compact_support", cs ? "true" : "false"}};
        for (const auto& [k, v] : p.scales) m[k] = fmt(v);
        return m;
    };
    r["potential"] = pot(potential, compact_support);
    if (potential2) r["potential2"] = pot(*potential2, compact_support);
    const auto bnd = [&](const std::string& name, const BoundarySpec& b) {
        r["boundary"][name] = join(b.edges);
        if (b.x_max) r["boundary"][name + "_x_max"] = fmt(*b.x_max);
        if (b.x_min) r["boundary"][name + "_x_min"] = fmt(*b.x_min);
    };
    bnd("gamma1", gamma1);
    bnd("gamma2", gamma2);
    r["solver"] = {{"tol", fmt(tol)}, {"max_iter", std::to_string(max_iter)}};
    r["linearization"] = {{"m", std::to_string(m)},
                          {"eps", fmt(eps)},
                          {"richardson", richardson ? "true" : "false"},
                          {"traces", join(traces)}};
    r["data"] = {{"f", f}, {"scale", fmt(f_scale)}};
    r["reconstruction"] = {{"K", std::to_string(K)},
                           {"eps", fmt(recon_eps)},
                           {"max_condition", fmt(max_condition)},
                           {"support_margin", std::to_string(support_margin)}};
    r["cgo"] = {{"zeta_kind", zeta_kind}, {"h", join(h_list)}, {"c", fmt(c)}};
    return r;
}

ScalarField harmonic_by_name(const Grid& grid, const std::string& name) {
    std::function<complex(double, double)> fn;
    if (name == "1") fn = [](double, double) { return complex(1.0); };
    else if (name == "x") fn = [](double x, double) { return complex(x); };
    else if (name == "y") fn = [](double, double y) { return complex(y); };
    else if (name == "xy") fn = [](double x, double y) { return complex(x * y); };
    else if (name == "x2-y2") fn = [](double x, double y) { return complex(x * x - y * y); };
    else if (name == "1+xy") fn = [](double x, double y) { return complex(1.0 + x * y); };
    else throw std::invalid_argument("unknown harmonic '" + name + "' (use 1, x, y, xy, x2-y2, 1+xy)");
    return ScalarField::sample(grid, fn);
}

}  // namespace magsi
