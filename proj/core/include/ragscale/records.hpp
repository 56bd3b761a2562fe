#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ragscale {

/// One observed experiment point. Token counts are raw integers; the 1e9
/// normalization of the laws happens only at evaluation time.
struct RunRecord {
  std::int64_t model_params = 0;      // N
  std::int64_t pretrain_tokens = 0;   // D
  std::int64_t retrieval_tokens = 0;  // R, 0 means no retrieval
  double loss = 0.0;
  std::string benchmark;
  std::string seed;          // empty when absent
  std::string model_family;  // empty when absent
  std::size_t row = 0;       // 1-based data row in the source file

  bool operator==(const RunRecord&) const = default;
};

/// Immutable, validated collection of records in file order.
class Dataset {
 public:
  Dataset() = default;

  /// Validates every record and key uniqueness; throws DomainError naming the
  /// offending row.
  static Dataset create(std::vector<RunRecord> records, std::string source_path = {},
                        std::string checksum = {});

  const std::vector<RunRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const RunRecord& operator[](std::size_t i) const { return records_[i]; }
  auto begin() const noexcept { return records_.begin(); }
  auto end() const noexcept { return records_.end(); }

  const std::string& source_path() const noexcept { return source_path_; }
  /// Digest of the raw bytes the dataset was loaded from (empty if built in memory).
  const std::string& checksum() const noexcept { return checksum_; }

  /// Records at the given indices, in the given order.
  Dataset subset(std::span<const std::size_t> indices) const;

  /// Equality of the record sequences; source path and checksum are ignored.
  bool operator==(const Dataset& other) const { return records_ == other.records_; }

 private:
  std::vector<RunRecord> records_;
  std::string source_path_;
  std::string checksum_;
};

enum class DataFormat { csv, json };

/// Picks the format from the file extension (".json" -> json, otherwise csv).
DataFormat format_from_path(const std::filesystem::path& path);

Dataset load_dataset(const std::filesystem::path& path, DataFormat format);
Dataset load_dataset(const std::filesystem::path& path);

Dataset parse_csv_dataset(std::string_view text, std::string source_path = {});
Dataset parse_json_dataset(std::string_view text, std::string source_path = {});

/// Canonical serializations. Losses use 17 significant digits so a reload
/// reproduces every value bit-for-bit.
std::string to_csv(const Dataset& dataset);
std::string to_json(const Dataset& dataset);

/// Digest of the canonical CSV form; stable across csv/json round trips.
std::string canonical_checksum(const Dataset& dataset);

struct RecordFilter {
  std::optional<std::string> benchmark{};
  std::optional<std::string> family{};
  std::optional<std::string> seed{};
  /// true keeps only R = 0 rows, false keeps only R > 0 rows.
  std::optional<bool> r_equals_zero{};
};

bool matches(const RunRecord& record, const RecordFilter& filter);
Dataset filter(const Dataset& dataset, const RecordFilter& predicate);

/// Distinct values in first-appearance order.
std::vector<std::string> distinct_benchmarks(const Dataset& dataset);
std::vector<std::int64_t> distinct_model_sizes(const Dataset& dataset);

/// Minimal RFC 4180 CSV reader shared by the dataset and catalog loaders.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  /// Column index by name, or nullopt.
  std::optional<std::size_t> column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);
std::string csv_escape(std::string_view field);

/// Integer token count written either as an integer or in exponent notation
/// ("3e7"); throws ParseError when not an exact integer.
std::int64_t parse_token_count(std::string_view text);
double parse_real(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Shortest form that reads back to the same double (%.17g fallback).
std::string format_real(double value);

}  // namespace ragscale
