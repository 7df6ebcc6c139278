#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nyv/averaged.hpp"
#include "nyv/spectral.hpp"

namespace nyv {

// Field dump: magic "NYVF", u32 version = 1, u64 n, f64 period, then n
// little-endian f64 values.
void dump_field(const std::filesystem::path& file, const TorusField& f);
TorusField load_field(const std::filesystem::path& file);

// Averaged-field dump: magic "NYVA", u32 version = 1, u64 n_t, u64 m,
// f64 T, f64 x_max, then the row-major f64 table.
void dump_averaged(const std::filesystem::path& file, const AveragedField& A);

// CSV with comma delimiter, '.' decimal point, header row, LF endings.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}
    void add_row(const std::vector<double>& row);
    void add_row(const std::vector<std::string>& row);
    void write(const std::filesystem::path& file) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string format_double(double v);

}  // namespace nyv
