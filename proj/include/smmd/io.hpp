#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "smmd/types.hpp"

namespace smmd {

/// Malformed input file. The message names the offending row and column.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads comma-separated decimal rows into a matrix. A first row containing
/// any non-numeric field is treated as a header. Blank lines are skipped.
/// When expected_dim is given, every row must have that many columns.
Matrix read_csv_matrix(std::istream& in, const std::string& source = "<input>",
                       std::optional<std::size_t> expected_dim = std::nullopt);
Matrix read_csv_matrix_file(const std::string& path, std::optional<std::size_t> expected_dim = std::nullopt);

/// %.17g, with non-finite values spelled nan / inf / -inf.
std::string format_number(double v);

using Cell = std::variant<std::string, double, std::int64_t, bool>;

/// Flat result table with named columns, written as CSV or as a JSON array
/// of objects with keys in column order.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  void write_csv(std::ostream& out) const;
  void write_json(std::ostream& out) const;
};

/// Single JSON object with keys kept in insertion order.
using JsonFields = std::vector<std::pair<std::string, Cell>>;
std::string to_json(const JsonFields& fields);

}  // namespace smmd
