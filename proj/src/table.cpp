#include "lhsm/table.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "lhsm/errors.hpp"

namespace lhsm::io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)v);
    return buf;
}

void Table::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns.size())
        throw config_error("table row width does not match the header");
    rows.push_back(std::move(cells));
}

namespace {

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n\r") == std::string::npos)
        return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

std::string render_csv(const Table& table, std::uint64_t config_hash) {
    std::string out = "# config-hash: " + hex64(config_hash) + "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i)
            out += ',';
        out += csv_escape(table.columns[i]);
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                out += ',';
            out += csv_escape(row[i]);
        }
        out += '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw config_error("cannot open output file: " + path);
    f.write(bytes.data(), std::streamsize(bytes.size()));
    if (!f)
        throw config_error("write failed: " + path);
}

} // namespace lhsm::io
