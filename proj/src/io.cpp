#include "lrshrink/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "lrshrink/error.hpp"

namespace lrshrink {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string_view unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

bool parse_number(std::string_view field, double& out) {
  field = unquote(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

// Content lines with their 1-based line numbers; comments and blanks dropped.
std::vector<std::pair<std::size_t, std::string_view>> content_lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::size_t number = 0;
  while (!text.empty()) {
    ++number;
    const auto pos = text.find('\n');
    auto line = trim(text.substr(0, pos));
    text.remove_prefix(pos == std::string_view::npos ? text.size() : pos + 1);
    if (line.empty() || line.front() == '#') continue;
    lines.emplace_back(number, line);
  }
  return lines;
}

}  // namespace

Table parse_table(std::string_view text, const ReadOptions& options) {
  const auto lines = content_lines(text);
  Table table;
  if (lines.empty()) throw Error(ErrorCode::ParseError, "no data rows");

  char sep = options.separator;
  if (sep == 0) sep = lines.front().second.find('\t') != std::string_view::npos ? '\t' : ',';

  std::size_t first = 0;
  if (options.header) {
    for (auto field : split(lines.front().second, sep)) table.header.emplace_back(unquote(field));
    first = 1;
  }
  if (lines.size() == first) throw Error(ErrorCode::ParseError, "no data rows");

  const auto cols = split(lines[first].second, sep).size();
  if (!table.header.empty() && table.header.size() != cols) {
    throw Error(ErrorCode::ParseError, "header has " + std::to_string(table.header.size()) + " fields, data has " +
                                           std::to_string(cols));
  }
  table.values.resize(static_cast<Index>(lines.size() - first), static_cast<Index>(cols));
  for (std::size_t r = first; r < lines.size(); ++r) {
    const auto fields = split(lines[r].second, sep);
    const auto where = "line " + std::to_string(lines[r].first);
    if (fields.size() != cols) {
      throw Error(ErrorCode::ParseError, where + ": expected " + std::to_string(cols) + " fields, got " +
                                             std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      double v = 0.0;
      if (!parse_number(fields[c], v)) {
        throw Error(ErrorCode::ParseError, where + ": not a number: '" + std::string(fields[c]) + "'");
      }
      table.values(static_cast<Index>(r - first), static_cast<Index>(c)) = v;
    }
  }
  return table;
}

Table read_table(const std::filesystem::path& path, const ReadOptions& options) {
  return parse_table(read_file(path), options);
}

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_table(std::ostream& out, const Matrix& values, const Labels& header, char separator) {
  if (!header.empty()) {
    if (static_cast<Index>(header.size()) != values.cols()) {
      throw Error(ErrorCode::ShapeMismatch, "header size does not match column count");
    }
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? std::string(1, separator) : "") << header[c];
    out << '\n';
  }
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c) {
      if (c) out << separator;
      out << format_double(values(r, c));
    }
    out << '\n';
  }
}

void write_table(const std::filesystem::path& path, const Matrix& values, const Labels& header, char separator) {
  std::ostringstream out;
  write_table(out, values, header, separator);
  write_file(path, out.str());
}

Vector read_vector(const std::filesystem::path& path, const ReadOptions& options) {
  const auto table = read_table(path, options);
  if (table.values.rows() == 1) return table.values.row(0).transpose();
  if (table.values.cols() == 1) return table.values.col(0);
  throw Error(ErrorCode::ShapeMismatch, path.string() + ": expected a single row or column");
}

std::string format_covariance(const CovMatrix& c) {
  std::ostringstream out;
  out << "# repr=" << to_string(c.representation());
  const auto& labels = c.labels();
  if (c.representation() == Representation::Alr) {
    out << " ref=" << c.ref() + 1;
    if (!labels.empty()) out << " ref_label=" << labels[static_cast<std::size_t>(c.ref())];
  }
  out << '\n';
  Labels header;
  if (!labels.empty()) {
    for (Index p : c.part_indices()) header.push_back(labels[static_cast<std::size_t>(p)]);
  }
  write_table(out, c.values(), header);
  return out.str();
}

CovMatrix parse_covariance(std::string_view text) {
  std::string_view first = trim(text.substr(0, text.find('\n')));
  if (first.substr(0, 1) != "#") throw Error(ErrorCode::ParseError, "missing '# repr=...' metadata line");
  first.remove_prefix(1);

  std::string repr;
  Index ref = -1;
  std::string ref_label;
  std::istringstream meta{std::string(first)};
  for (std::string token; meta >> token;) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    const auto key = token.substr(0, eq);
    const auto value = token.substr(eq + 1);
    if (key == "repr") {
      repr = value;
    } else if (key == "ref") {
      double v = 0.0;
      if (!parse_number(value, v) || v != static_cast<double>(static_cast<Index>(v))) {
        throw Error(ErrorCode::ParseError, "bad ref '" + value + "'");
      }
      ref = static_cast<Index>(v) - 1;
    } else if (key == "ref_label") {
      ref_label = value;
    }
  }

  // A header row is present when its first field is not numeric.
  const auto lines = content_lines(text);
  bool header = false;
  if (!lines.empty()) {
    const char sep = lines.front().second.find('\t') != std::string_view::npos ? '\t' : ',';
    double v = 0.0;
    header = !parse_number(split(lines.front().second, sep).front(), v);
  }
  auto table = parse_table(text, {.header = header});

  if (repr == "ALR") {
    if (ref < 0) throw Error(ErrorCode::ParseError, "ALR covariance without ref");
    Labels labels;
    if (!table.header.empty()) {
      if (ref > static_cast<Index>(table.header.size())) throw Error(ErrorCode::BadReferenceIndex, "ref out of range");
      labels = table.header;
      labels.insert(labels.begin() + ref, ref_label.empty() ? "ref" : ref_label);
    }
    return CovMatrix::alr(std::move(table.values), ref, std::move(labels));
  }
  if (repr == "CLR") return CovMatrix::clr(std::move(table.values), std::move(table.header));
  if (repr == "BASIS") return CovMatrix::basis(std::move(table.values), std::move(table.header));
  throw Error(ErrorCode::ParseError, "unknown representation '" + repr + "'");
}

void write_covariance(const std::filesystem::path& path, const CovMatrix& c) { write_file(path, format_covariance(c)); }

CovMatrix read_covariance(const std::filesystem::path& path) { return parse_covariance(read_file(path)); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << contents;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace lrshrink
