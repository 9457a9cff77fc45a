#include "wofe3d/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "wofe3d/error.hpp"

namespace wofe3d {

namespace {

constexpr std::string_view kSchemaPrefix = "# wofe3d-schema: ";

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_row(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.emplace_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

}  // namespace

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

int CsvTable::require_column(const std::string& name) const {
    const int c = column(name);
    if (c < 0) throw std::runtime_error(source + ": missing required column '" + name + "'");
    return c;
}

CsvTable read_csv_text(std::string_view text, std::string source) {
    CsvTable table;
    table.source = std::move(source);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool have_header = false;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = trim(text.substr(pos, eol - pos));
        ++line_no;
        pos = eol + 1;
        if (line.empty()) {
            if (eol == text.size()) break;
            continue;
        }
        if (line.front() == '#') {
            if (line.substr(0, kSchemaPrefix.size()) == kSchemaPrefix && table.schema.empty()) {
                table.schema = std::string(trim(line.substr(kSchemaPrefix.size())));
            }
            continue;
        }
        auto fields = split_row(line);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
        } else {
            if (fields.size() != table.header.size()) {
                throw std::runtime_error(table.source + ":" + std::to_string(line_no) +
                                         ": expected " + std::to_string(table.header.size()) +
                                         " fields, found " + std::to_string(fields.size()));
            }
            table.rows.push_back(std::move(fields));
            table.lines.push_back(line_no);
        }
        if (eol == text.size()) break;
    }
    if (!have_header) throw std::runtime_error(table.source + ": empty table (no header row)");
    return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_csv_text(buf.str(), path.filename().string());
}

bool parse_number(std::string_view s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool parse_int(std::string_view s, long long& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_digits(double v, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

std::string schema_line(const std::string& name, int version) {
    return std::string(kSchemaPrefix) + name + " v" + std::to_string(version);
}

void require_schema(const CsvTable& table, const std::string& name, int version) {
    const std::string expected = name + " v" + std::to_string(version);
    if (table.schema != expected) {
        throw SchemaVersionError(table.source + ": schema version mismatch: expected '" + expected +
                                 "', found '" + (table.schema.empty() ? "<none>" : table.schema) + "'");
    }
}

}  // namespace wofe3d
