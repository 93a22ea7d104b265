#include "dblab/field_io.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

namespace dblab {
namespace {

using ojson = nlohmann::ordered_json;

std::string bin_path_for(const std::string& json_path) {
    std::filesystem::path p(json_path);
    p.replace_extension(".bin");
    return p.string();
}

void put_le(std::ofstream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    os.write(reinterpret_cast<const char*>(&bits), 8);
}

double get_le(std::ifstream& is) {
    std::uint64_t bits = 0;
    is.read(reinterpret_cast<char*>(&bits), 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void write_dump(const std::string& json_path, const DumpHeader& h, const std::vector<cplx>& data) {
    std::size_t expect = 1;
    for (auto s : h.shape) expect *= s;
    if (expect != data.size()) throw InputError("write_dump: shape does not match data length");
    const std::string bin = bin_path_for(json_path);
    ojson j;
    j["format"] = "dblab-field";
    j["version"] = 1;
    j["kind"] = h.kind;
    j["content"] = h.content;
    j["grid"] = {{"n", h.grid.n}, {"N", h.grid.N}, {"L", h.grid.L}};
    j["components"] = h.components;
    j["representation"] = h.rep == Representation::physical ? "physical" : "frequency";
    j["dtype"] = "complex128-le";
    j["shape"] = h.shape;
    if (!h.t_grid.empty()) j["t_grid"] = h.t_grid;
    j["data_file"] = std::filesystem::path(bin).filename().string();
    {
        std::ofstream os(json_path);
        if (!os) throw InputError("cannot write " + json_path);
        os << j.dump(2) << "\n";
    }
    std::ofstream os(bin, std::ios::binary);
    if (!os) throw InputError("cannot write " + bin);
    for (const auto& z : data) {
        put_le(os, z.real());
        put_le(os, z.imag());
    }
}

std::pair<DumpHeader, std::vector<cplx>> read_dump(const std::string& json_path) {
    std::ifstream is(json_path);
    if (!is) throw InputError("cannot read " + json_path);
    ojson j;
    try {
        j = ojson::parse(is);
    } catch (const std::exception& e) {
        throw InputError(json_path + ": " + e.what());
    }
    DumpHeader h;
    try {
        if (j.at("format") != "dblab-field") throw InputError(json_path + ": not a field dump");
        h.kind = j.at("kind").get<std::string>();
        h.content = j.value("content", "");
        h.grid.n = j.at("grid").at("n").get<int>();
        h.grid.N = j.at("grid").at("N").get<int>();
        h.grid.L = j.at("grid").at("L").get<double>();
        h.components = j.at("components").get<int>();
        h.rep = j.at("representation") == "frequency" ? Representation::frequency : Representation::physical;
        h.shape = j.at("shape").get<std::vector<std::size_t>>();
        if (j.contains("t_grid")) h.t_grid = j["t_grid"].get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(json_path + ": malformed header: " + e.what());
    }
    std::size_t count = 1;
    for (auto s : h.shape) count *= s;
    std::filesystem::path bin = std::filesystem::path(json_path).parent_path() / j.at("data_file").get<std::string>();
    std::ifstream bs(bin, std::ios::binary);
    if (!bs) throw InputError("cannot read " + bin.string());
    std::vector<cplx> data(count);
    for (auto& z : data) {
        const double re = get_le(bs);
        const double im = get_le(bs);
        z = cplx(re, im);
    }
    if (!bs) throw InputError(bin.string() + ": truncated data file");
    return {h, data};
}

void write_boundary_field(const std::string& json_path, const BoundaryField& F) {
    DumpHeader h;
    h.kind = "boundary";
    h.grid = F.grid;
    h.components = F.ncomp();
    h.rep = F.rep;
    h.shape = {std::size_t(F.ncomp()), F.grid.points()};
    std::vector<cplx> data;
    data.reserve(h.shape[0] * h.shape[1]);
    for (const auto& c : F.comp) data.insert(data.end(), c.data(), c.data() + c.size());
    write_dump(json_path, h, data);
}

BoundaryField read_boundary_field(const std::string& json_path) {
    auto [h, data] = read_dump(json_path);
    if (h.kind != "boundary" || h.shape.size() != 2) throw InputError(json_path + ": not a boundary field dump");
    h.grid.validate();
    BoundaryField F;
    F.grid = h.grid;
    F.rep = h.rep;
    const std::size_t np = h.grid.points();
    if (h.shape[1] != np || int(h.shape[0]) != 1 + h.grid.n) throw InputError(json_path + ": shape mismatch");
    for (std::size_t c = 0; c < h.shape[0]; ++c) F.comp.push_back(Eigen::Map<const Vec>(data.data() + c * np, np));
    F.validate();
    return F;
}

void write_scalar_field(const std::string& json_path, const GridSpec& g, const Vec& f, const std::string& content) {
    DumpHeader h;
    h.kind = "scalar";
    h.content = content;
    h.grid = g;
    h.shape = {g.points()};
    write_dump(json_path, h, std::vector<cplx>(f.data(), f.data() + f.size()));
}

Vec read_scalar_field(const std::string& json_path, const GridSpec& expected) {
    auto [h, data] = read_dump(json_path);
    if (h.kind != "scalar") throw InputError(json_path + ": not a scalar field dump");
    if (!(h.grid == expected)) throw InputError(json_path + ": grid does not match the configured grid");
    Vec f = Eigen::Map<const Vec>(data.data(), data.size());
    if (h.rep == Representation::frequency) f = ifft(expected, f);
    return f;
}

void write_matrix(const std::string& json_path, const GridSpec& g, const Mat& m, const std::string& content) {
    DumpHeader h;
    h.kind = "matrix";
    h.content = content;
    h.grid = g;
    h.rep = Representation::frequency;
    h.shape = {std::size_t(m.rows()), std::size_t(m.cols())};
    std::vector<cplx> data;
    data.reserve(m.size());
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    write_dump(json_path, h, data);
}

}  // namespace dblab
