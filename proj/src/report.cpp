#include "wgkit/report.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <system_error>
#include <unistd.h>

#include "wgkit/materials.hpp"

namespace wgkit {

const char* tool_version() { return WGKIT_VERSION; }

std::string format_number(double v) {
    char buf[64];
    // Shortest form that parses back to the same double; locale-independent.
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    if (r.ec != std::errc{}) throw std::runtime_error("format_number: conversion failed");
    return std::string(buf, r.ptr);
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void CsvTable::add(std::vector<std::string> row) {
    if (row.size() != columns.size()) throw std::logic_error("csv: row width mismatch");
    rows.push_back(std::move(row));
}

std::string CsvTable::render(const std::string& command, std::uint64_t config_hash) const {
    std::string out;
    out += "# wgkit " + std::string(tool_version()) + "\n";
    out += "# command: " + command + "\n";
    out += "# config_hash: " + hex64(config_hash) + "\n";
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(columns);
    for (const auto& r : rows) line(r);
    return out;
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DomainError("cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) throw DomainError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw DomainError("cannot move output into place at '" + path + "': " + ec.message());
    }
}

}  // namespace wgkit
