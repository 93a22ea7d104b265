#pragma once

#include <string>

#include "dblab/grid.hpp"

namespace dblab {

// Field dump: <name>.json header plus <name>.bin holding little-endian complex128
// values (interleaved re, im). Data order is the row-major order of `shape`.
struct DumpHeader {
    std::string kind;     // "boundary", "scalar", "matrix" or "strip"
    std::string content;  // free-form label, e.g. "grad_A u"
    GridSpec grid;
    int components = 1;
    Representation rep = Representation::physical;
    std::vector<std::size_t> shape;
    std::vector<double> t_grid;  // strip dumps only
};

void write_dump(const std::string& json_path, const DumpHeader& header, const std::vector<cplx>& data);
std::pair<DumpHeader, std::vector<cplx>> read_dump(const std::string& json_path);

void write_boundary_field(const std::string& json_path, const BoundaryField& F);
BoundaryField read_boundary_field(const std::string& json_path);

void write_scalar_field(const std::string& json_path, const GridSpec& g, const Vec& f, const std::string& content);
Vec read_scalar_field(const std::string& json_path, const GridSpec& expected);

void write_matrix(const std::string& json_path, const GridSpec& g, const Mat& m, const std::string& content);

}  // namespace dblab
