#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wofe3d {

struct CsvTable {
    std::string source;  // label used in error messages
    std::string schema;  // from a leading "# wofe3d-schema: ..." line, empty if none
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> lines;  // 1-based file line of each row

    int column(const std::string& name) const;
    int require_column(const std::string& name) const;
    const std::string& cell(std::size_t row, int col) const { return rows[row][col]; }
};

CsvTable read_csv_text(std::string_view text, std::string source);
CsvTable read_csv_file(const std::filesystem::path& path);

bool parse_number(std::string_view s, double& out);
bool parse_int(std::string_view s, long long& out);

// Round-trip exact formatting (%.17g) for intermediate files.
std::string fmt_full(double v);
// Display formatting with the given number of significant digits.
std::string fmt_digits(double v, int digits);

std::string schema_line(const std::string& name, int version);
// Throws SchemaVersionError when the table's schema tag is absent or differs.
void require_schema(const CsvTable& table, const std::string& name, int version);

}  // namespace wofe3d
