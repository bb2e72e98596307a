#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "fedmf/matrix.hpp"

namespace fedmf {

struct LabeledTable {
    Matrix features;
    std::optional<std::vector<int>> labels;
};

/// Rectangular delimited numeric text. With `has_label_column` the first
/// field of every row is read as an integer label. Blank lines and lines
/// starting with '#' are skipped.
/// Throws ParseError (with line number) on ragged rows, non-numeric cells or
/// an empty file.
LabeledTable load_csv(const std::filesystem::path& path, bool has_label_column,
                      char delimiter = ',');

/// libsvm "label idx:val idx:val ..." lines with 1-based indices <= dim.
/// Absent indices are zero. Throws ParseError on malformed pairs or
/// out-of-range indices.
LabeledTable load_libsvm(const std::filesystem::path& path, std::size_t dim);

/// Writes values with 17 significant digits so load_csv reproduces them
/// bit-for-bit. Labels, when present, go in the first column.
void write_csv(const std::filesystem::path& path, const LabeledTable& table,
               char delimiter = ',');
void write_csv(const std::filesystem::path& path, const Matrix& m, char delimiter = ',');

/// Emits only non-zero entries; requires labels.
void write_libsvm(const std::filesystem::path& path, const LabeledTable& table);

/// Subtract each column's mean (the optional --center preprocessing).
Matrix center_columns(const Matrix& m);

/// Shortest decimal text that round-trips `x` exactly.
std::string format_double(double x);

}  // namespace fedmf
