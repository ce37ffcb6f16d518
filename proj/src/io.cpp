#include "qggm/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "qggm/errors.hpp"

namespace qggm {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace

DenseMatrix read_csv_matrix(const fs::path& path) {
  auto in = open_in(path);
  std::vector<double> values;
  std::size_t cols = 0, rows = 0, line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest = trim(line);
    if (rest.empty()) continue;
    std::size_t col = 0;
    while (true) {
      const std::size_t comma = rest.find(',');
      const std::string_view field = trim(rest.substr(0, comma));
      ++col;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v))
        throw ValidationError(path.string() + ": line " + std::to_string(line_no) + ", column " +
                              std::to_string(col) + ": cannot parse '" + std::string(field) +
                              "' as a finite number");
      values.push_back(v);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (rows == 0)
      cols = col;
    else if (col != cols)
      throw ValidationError(path.string() + ": line " + std::to_string(line_no) + " has " +
                            std::to_string(col) + " fields, expected " + std::to_string(cols));
    ++rows;
  }
  if (rows == 0) throw ValidationError(path.string() + ": no data rows");
  return DenseMatrix(rows, cols, std::move(values));
}

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw NumericalError("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

void write_csv_matrix(const fs::path& path, const DenseMatrix& m) {
  auto out = open_out(path);
  std::string line;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    line.clear();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) line += ',';
      line += format_double(m(r, c));
    }
    line += '\n';
    out << line;
  }
  finish(out, path);
}

void write_csv_table(const fs::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  auto out = open_out(path);
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
  finish(out, path);
}

void write_text(const fs::path& path, const std::string& content) {
  auto out = open_out(path);
  out << content;
  finish(out, path);
}

std::string read_text(const fs::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json read_json(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
}

Json matrix_to_json(const DenseMatrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

DenseMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("matrix JSON must be a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  std::vector<double> data;
  data.reserve(rows * cols);
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != cols) throw ValidationError("matrix JSON rows differ in length");
    for (const auto& v : row) {
      if (!v.is_number()) throw ValidationError("matrix JSON holds a non-number");
      data.push_back(v.get<double>());
    }
  }
  return DenseMatrix(rows, cols, std::move(data));
}

Json pairs_to_json(const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  Json out = Json::array();
  for (auto [i, j] : pairs) out.push_back({i, j});
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> pairs_from_json(const Json& j) {
  if (!j.is_array()) throw ValidationError("pair list JSON must be an array");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw ValidationError("pair list entries must be [i, j]");
    out.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
  }
  return out;
}

namespace {

constexpr char kMagic[4] = {'Q', 'G', 'G', 'M'};
constexpr std::uint32_t kSampleVersion = 1;

static_assert(std::endian::native == std::endian::little, "sample files assume a little-endian host");

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& in, const fs::path& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
    throw ValidationError(path.string() + ": truncated sample file");
  return v;
}

}  // namespace

void write_samples(const fs::path& path, const std::vector<DenseMatrix>& samples) {
  auto out = open_out(path, std::ios::binary);
  const std::uint64_t p = samples.empty() ? 0 : samples.front().rows();
  out.write(kMagic, 4);
  put(out, kSampleVersion);
  put(out, p);
  put(out, static_cast<std::uint64_t>(samples.size()));
  for (const auto& s : samples) {
    if (s.rows() != p || s.cols() != p) throw ValidationError("write_samples: draws differ in shape");
    out.write(reinterpret_cast<const char*>(s.data().data()),
              static_cast<std::streamsize>(s.data().size() * sizeof(double)));
  }
  finish(out, path);
}

std::vector<DenseMatrix> read_samples(const fs::path& path) {
  auto in = open_in(path, std::ios::binary);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw ValidationError(path.string() + ": not a sample file");
  if (get<std::uint32_t>(in, path) != kSampleVersion)
    throw ValidationError(path.string() + ": unsupported sample file version");
  const auto p = get<std::uint64_t>(in, path);
  const auto count = get<std::uint64_t>(in, path);
  std::vector<DenseMatrix> out;
  out.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    std::vector<double> data(p * p);
    if (!in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double))))
      throw ValidationError(path.string() + ": truncated sample file");
    out.emplace_back(p, p, std::move(data));
  }
  return out;
}

void prepare_output_dir(const fs::path& dir, bool force) {
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir, ec)) throw IoError("'" + dir.string() + "' exists and is not a directory");
    if (!force && !fs::is_empty(dir, ec))
      throw IoError("output directory '" + dir.string() + "' is not empty (use --force to overwrite)");
    return;
  }
  if (!fs::create_directories(dir, ec) || ec)
    throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

}  // namespace qggm
