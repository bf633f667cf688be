#include "magsi/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace magsi {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << std::setprecision(17);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return in;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

[[noreturn]] void bad(const std::string& source, int line, const std::string& msg) {
    throw IoError(source + ":" + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& s, const std::string& source, int line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size() && s.find_first_not_of(" \r", used) != std::string::npos) bad(source, line, "bad number '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        bad(source, line, "bad number '" + s + "'");
    }
}

int to_int(const std::string& s, const std::string& source, int line) {
    const double v = to_double(s, source, line);
    if (v != static_cast<int>(v)) bad(source, line, "expected an integer index, got '" + s + "'");
    return static_cast<int>(v);
}

}  // namespace

void write_field_csv(std::ostream& out, const ScalarField& f) {
    const Grid& g = f.grid();
    out << std::setprecision(17) << "ix,iy,x,y,re,im\n";
    for (int iy = 0; iy < g.ny(); ++iy)
        for (int ix = 0; ix < g.nx(); ++ix)
            out << ix << ',' << iy << ',' << g.x(ix) << ',' << g.y(iy) << ',' << f(ix, iy).real() << ','
                << f(ix, iy).imag() << '\n';
}

void write_field_csv(const std::string& path, const ScalarField& f) {
    auto out = open_out(path);
    write_field_csv(out, f);
}

ScalarField read_field_csv(std::istream& in, const Grid& grid, const std::string& source) {
    ScalarField f(grid);
    std::vector<bool> seen(grid.node_count(), false);
    std::string line;
    int n = 0;
    std::size_t count = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty() || line == "\r") continue;
        if (n == 1 && line.rfind("ix", 0) == 0) continue;
        const auto c = split_row(line);
        if (c.size() != 6) bad(source, n, "expected 6 columns (ix,iy,x,y,re,im)");
        const int ix = to_int(c[0], source, n), iy = to_int(c[1], source, n);
        if (ix < 0 || iy < 0 || ix >= grid.nx() || iy >= grid.ny()) bad(source, n, "node index off the grid");
        const std::size_t k = grid.index(ix, iy);
        if (seen[k]) bad(source, n, "duplicate node");
        seen[k] = true;
        ++count;
        f(ix, iy) = complex(to_double(c[4], source, n), to_double(c[5], source, n));
    }
    if (count != grid.node_count())
        throw IoError(source + ": " + std::to_string(count) + " of " + std::to_string(grid.node_count()) +
                      " nodes present");
    return f;
}

ScalarField read_field_csv(const std::string& path, const Grid& grid) {
    auto in = open_in(path);
    return read_field_csv(in, grid, path);
}

void write_boundary_csv(std::ostream& out, const BoundaryData& b) {
    const Grid& g = b.grid;
    out << std::setprecision(17) << "boundary_index,x,y,re,im\n";
    for (std::size_t k = 0; k < g.boundary_count(); ++k) {
        const auto& node = g.boundary_node(k);
        out << k << ',' << g.x(node.ix) << ',' << g.y(node.iy) << ',' << b[k].real() << ',' << b[k].imag() << '\n';
    }
}

void write_boundary_csv(const std::string& path, const BoundaryData& b) {
    auto out = open_out(path);
    write_boundary_csv(out, b);
}

BoundaryData read_boundary_csv(std::istream& in, const Grid& grid, const std::string& source) {
    BoundaryData b(grid);
    std::vector<bool> seen(grid.boundary_count(), false);
    std::string line;
    int n = 0;
    std::size_t count = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty() || line == "\r") continue;
        if (n == 1 && line.rfind("boundary_index", 0) == 0) continue;
        const auto c = split_row(line);
        if (c.size() != 5) bad(source, n, "expected 5 columns (boundary_index,x,y,re,im)");
        const int k = to_int(c[0], source, n);
        if (k < 0 || static_cast<std::size_t>(k) >= grid.boundary_count()) bad(source, n, "boundary index out of range");
        if (seen[static_cast<std::size_t>(k)]) bad(source, n, "duplicate boundary index");
        seen[static_cast<std::size_t>(k)] = true;
        ++count;
        b[static_cast<std::size_t>(k)] = complex(to_double(c[3], source, n), to_double(c[4], source, n));
    }
    if (count != grid.boundary_count())
        throw IoError(source + ": " + std::to_string(count) + " of " + std::to_string(grid.boundary_count()) +
                      " boundary nodes present");
    return b;
}

BoundaryData read_boundary_csv(const std::string& path, const Grid& grid) {
    auto in = open_in(path);
    return read_boundary_csv(in, grid, path);
}

void write_vector_csv(const std::string& path, const VectorField& v) {
    auto out = open_out(path);
    const Grid& g = v.grid();
    out << "ix,iy,x,y,re_x,im_x,re_y,im_y\n";
    for (int iy = 0; iy < g.ny(); ++iy)
        for (int ix = 0; ix < g.nx(); ++ix)
            out << ix << ',' << iy << ',' << g.x(ix) << ',' << g.y(iy) << ',' << v.x(ix, iy).real() << ','
                << v.x(ix, iy).imag() << ',' << v.y(ix, iy).real() << ',' << v.y(ix, iy).imag() << '\n';
}

}  // namespace magsi
