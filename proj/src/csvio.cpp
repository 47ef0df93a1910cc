#include "ddsim/csvio.hpp"

#include <charconv>
#include <ostream>
#include <stdexcept>
#include <system_error>

namespace ddsim {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc())
    throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size())
    throw std::invalid_argument("write_csv: header/column count mismatch");
  if (columns.empty()) throw std::invalid_argument("write_csv: no columns");
  const std::size_t rows = columns.front().size();
  for (const auto& col : columns)
    if (col.size() != rows)
      throw std::invalid_argument("write_csv: ragged columns");

  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) os << ',';
    os << header[c];
  }
  os << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) os << ',';
      os << format_double(columns[c][r]);
    }
    os << '\n';
  }
}

}  // namespace ddsim
