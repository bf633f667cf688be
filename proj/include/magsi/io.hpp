#pragma once

/// CSV exchange of fields and boundary data.
///
///   field:    ix,iy,x,y,re,im           one row per node
///   boundary: boundary_index,x,y,re,im  one row per boundary node, counter-clockwise

#include "magsi/mesh.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace magsi {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_field_csv(std::ostream& out, const ScalarField& f);
void write_field_csv(const std::string& path, const ScalarField& f);
/// Throws IoError on malformed rows, indices off the grid or missing nodes.
ScalarField read_field_csv(std::istream& in, const Grid& grid, const std::string& source = "<field>");
ScalarField read_field_csv(const std::string& path, const Grid& grid);

void write_boundary_csv(std::ostream& out, const BoundaryData& b);
void write_boundary_csv(const std::string& path, const BoundaryData& b);
/// Rows may come in any order; every boundary node must appear exactly once.
BoundaryData read_boundary_csv(std::istream& in, const Grid& grid, const std::string& source = "<boundary>");
BoundaryData read_boundary_csv(const std::string& path, const Grid& grid);

/// A vector field as two columns pairs: ix,iy,x,y,re_x,im_x,re_y,im_y.
void write_vector_csv(const std::string& path, const VectorField& v);

}  // namespace magsi
