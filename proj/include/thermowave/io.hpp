#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace thermowave {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

/// In-memory CSV table; numbers are written with format_double.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    void add_row(std::span<const double> values);
    void add_row(std::initializer_list<double> values) { add_row(std::span<const double>(values.begin(), values.size())); }

    std::size_t rows() const { return rows_.size(); }
    std::string str() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
};

/// Dense matrix as row-major CSV without a header.
std::string matrix_csv(const Eigen::MatrixXd& m);

void write_text(const std::filesystem::path& path, std::string_view content);
std::string read_text(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

}  // namespace thermowave
