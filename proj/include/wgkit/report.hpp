#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wgkit {

const char* tool_version();

// Shortest round-trip-safe text for a double, period decimal separator.
std::string format_number(double v);
std::string hex64(std::uint64_t v);

// Header-first CSV with a commented metadata block:
//   # wgkit <version>
//   # command: <name>
//   # config_hash: <16 hex digits>
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
    std::string render(const std::string& command, std::uint64_t config_hash) const;
};

// Writes to a temporary sibling and renames it into place, so readers never
// see a partial file.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace wgkit
