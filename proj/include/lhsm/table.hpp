#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lhsm::io {

// Fixed numeric rendering: 17 significant digits, '.' decimal separator,
// enough to round-trip any double, so identical runs produce identical
// bytes.
std::string format_double(double v);

// FNV-1a, 64 bit; hashes the canonical serialized config so every output
// file can name the exact inputs that produced it.
std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);

// Rectangular table with pre-rendered cells (numeric cells go through
// format_double; an error column may hold free text).
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> cells);
};

// CSV bytes: `# config-hash: <hex>` comment line, header, rows, LF line
// endings, RFC-style quoting only where a cell needs it.
std::string render_csv(const Table& table, std::uint64_t config_hash);

void write_file(const std::string& path, const std::string& bytes);

} // namespace lhsm::io
