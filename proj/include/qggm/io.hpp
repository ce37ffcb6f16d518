#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "qggm/matrix.hpp"

namespace qggm {

using Json = nlohmann::ordered_json;

/// Headerless numeric CSV. Throws ValidationError naming line and column on
/// malformed or non-finite fields and ragged rows; IoError if unreadable.
DenseMatrix read_csv_matrix(const std::filesystem::path& path);

/// Shortest round-trip decimal formatting.
std::string format_double(double x);

void write_csv_matrix(const std::filesystem::path& path, const DenseMatrix& m);
/// CSV with a header row.
void write_csv_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

/// Pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

Json matrix_to_json(const DenseMatrix& m);
DenseMatrix matrix_from_json(const Json& j);

Json pairs_to_json(const std::vector<std::pair<std::size_t, std::size_t>>& pairs);
std::vector<std::pair<std::size_t, std::size_t>> pairs_from_json(const Json& j);

/// Binary spill of retained draws: "QGGM", uint32 version, uint64 p,
/// uint64 count, then count·p·p little-endian doubles (row-major per draw).
void write_samples(const std::filesystem::path& path, const std::vector<DenseMatrix>& samples);
std::vector<DenseMatrix> read_samples(const std::filesystem::path& path);

/// Creates `dir` (and parents). Unless `force`, fails if it exists and is not empty.
void prepare_output_dir(const std::filesystem::path& dir, bool force);

}  // namespace qggm
