#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <initializer_list>
#include <locale>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "egoe/errors.hpp"

namespace egoe {

/// Minimal RFC 4180 writer: header row first, '.' decimals, CRLF-free lines.
class CsvWriter {
 public:
  using Cell = std::variant<double, long long, std::string>;

  CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns)
      : path_(path), out_(path, std::ios::trunc), columns_(columns.size()) {
    if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
    out_.imbue(std::locale::classic());
    out_ << std::setprecision(17);
    write_cells(columns);
  }

  void row(std::initializer_list<Cell> cells) {
    if (cells.size() != columns_) {
      throw DomainError("csv '" + path_.string() + "': row has " + std::to_string(cells.size()) +
                        " cells, header has " + std::to_string(columns_));
    }
    bool first = true;
    for (const auto& c : cells) {
      if (!first) out_ << ',';
      first = false;
      std::visit([this](const auto& v) { put(v); }, c);
    }
    out_ << '\n';
    if (!out_) throw IoError("write failed for '" + path_.string() + "'");
  }

 private:
  void put(double v) { out_ << v; }
  void put(long long v) { out_ << v; }
  void put(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
      out_ << s;
      return;
    }
    out_ << '"';
    for (char ch : s) {
      if (ch == '"') out_ << '"';
      out_ << ch;
    }
    out_ << '"';
  }

  void write_cells(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      put(cells[i]);
    }
    out_ << '\n';
  }

  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

}  // namespace egoe
