#include "nyv/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace nyv {

namespace {

template <typename T>
void put(std::ofstream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw io_error("unexpected end of file");
    return v;
}

}  // namespace

void dump_field(const std::filesystem::path& file, const TorusField& f) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw io_error("cannot open " + file.string() + " for writing");
    os.write("NYVF", 4);
    put<std::uint32_t>(os, 1);
    put<std::uint64_t>(os, f.grid().n);
    put<double>(os, f.grid().period);
    for (double v : f.values()) put<double>(os, v);
    if (!os) throw io_error("write failed on " + file.string());
}

TorusField load_field(const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw io_error("cannot open " + file.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "NYVF", 4) != 0) throw io_error("bad field magic");
    const auto version = get<std::uint32_t>(is);
    if (version != 1) throw io_error("unsupported field version");
    const auto n = get<std::uint64_t>(is);
    const auto period = get<double>(is);
    std::vector<double> vals(n);
    for (auto& v : vals) v = get<double>(is);
    return TorusField(SpectralGrid(static_cast<std::size_t>(n), period), std::move(vals));
}

void dump_averaged(const std::filesystem::path& file, const AveragedField& A) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw io_error("cannot open " + file.string() + " for writing");
    os.write("NYVA", 4);
    put<std::uint32_t>(os, 1);
    put<std::uint64_t>(os, A.n_t());
    put<std::uint64_t>(os, A.value_grid().n);
    put<double>(os, A.t_grid().back());
    put<double>(os, A.x_max());
    for (std::size_t i = 0; i < A.n_t(); ++i)
        for (double v : A.row(i)) put<double>(os, v);
    if (!os) throw io_error("write failed on " + file.string());
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void CsvWriter::add_row(const std::vector<double>& row) {
    std::vector<std::string> r;
    r.reserve(row.size());
    for (double v : row) r.push_back(format_double(v));
    rows_.push_back(std::move(r));
}

void CsvWriter::add_row(const std::vector<std::string>& row) { rows_.push_back(row); }

void CsvWriter::write(const std::filesystem::path& file) const {
    std::ofstream os(file, std::ios::binary);  // binary keeps LF endings
    if (!os) throw io_error("cannot open " + file.string() + " for writing");
    for (std::size_t i = 0; i < header_.size(); ++i)
        os << header_[i] << (i + 1 < header_.size() ? "," : "");
    os << "\n";
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) os << r[i] << (i + 1 < r.size() ? "," : "");
        os << "\n";
    }
    if (!os) throw io_error("write failed on " + file.string());
}

}  // namespace nyv
