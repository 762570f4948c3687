#pragma once

#include <charconv>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace cloning {

inline constexpr int kCsvSignificantDigits = 12;

/// Shortest general-format rendering with 12 significant digits,
/// independent of the process locale.
inline std::string format_number(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, kCsvSignificantDigits);
    if (ec != std::errc{}) throw std::runtime_error("format_number: conversion failed");
    return {buf, end};
}

struct CsvColumn {
    std::string name;
    std::vector<double> values;
};

inline void write_csv(std::ostream& out, std::span<const CsvColumn> columns) {
    if (columns.empty()) return;
    const std::size_t rows = columns.front().values.size();
    for (const auto& c : columns)
        if (c.values.size() != rows) throw std::invalid_argument("write_csv: column " + c.name + " has wrong length");

    for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << columns[j].name;
    out << '\n';
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << format_number(columns[j].values[i]);
        out << '\n';
    }
}

}  // namespace cloning
