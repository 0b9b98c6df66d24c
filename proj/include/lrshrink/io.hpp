#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "lrshrink/covariance.hpp"
#include "lrshrink/types.hpp"

namespace lrshrink {

// Delimited text I/O. Rows are samples, columns are parts. Lines starting
// with '#' and blank lines are ignored; the separator is a comma or a tab.

struct Table {
  Matrix values;
  Labels header;  ///< empty unless a header row was read
};

struct ReadOptions {
  bool header = false;
  /// 0 picks a tab when the first line contains one, a comma otherwise.
  char separator = 0;
};

Table parse_table(std::string_view text, const ReadOptions& options = {});
Table read_table(const std::filesystem::path& path, const ReadOptions& options = {});

/// Shortest decimal string that reads back to the same double.
std::string format_double(double value);

void write_table(std::ostream& out, const Matrix& values, const Labels& header = {}, char separator = ',');
void write_table(const std::filesystem::path& path, const Matrix& values, const Labels& header = {},
                 char separator = ',');

/// A vector stored as a single row or a single column.
Vector read_vector(const std::filesystem::path& path, const ReadOptions& options = {});

// Covariance CSV: a metadata comment `# repr=ALR ref=<k>` (k is 1-based),
// `# repr=CLR` or `# repr=BASIS`, an optional header of column labels, then
// the matrix rows. For ALR the reference label travels as `ref_label=<name>`.

std::string format_covariance(const CovMatrix& c);
CovMatrix parse_covariance(std::string_view text);
void write_covariance(const std::filesystem::path& path, const CovMatrix& c);
CovMatrix read_covariance(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace lrshrink
