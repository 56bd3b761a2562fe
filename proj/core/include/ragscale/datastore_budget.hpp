#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ragscale {

struct ChunkEntry {
  std::string chunk_id;
  std::int64_t token_count = 0;

  bool operator==(const ChunkEntry&) const = default;
};

/// Chunks of an embedding store with their token counts, in catalog order.
class ChunkCatalog {
 public:
  ChunkCatalog() = default;
  /// Throws DomainError on duplicate ids or token_count < 1.
  ChunkCatalog(std::vector<ChunkEntry> entries, std::string source_label = {});

  const std::vector<ChunkEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::string& source_label() const noexcept { return source_label_; }
  std::int64_t total_tokens() const noexcept { return total_tokens_; }
  std::int64_t max_token_count() const noexcept { return max_token_count_; }

 private:
  std::vector<ChunkEntry> entries_;
  std::string source_label_;
  std::int64_t total_tokens_ = 0;
  std::int64_t max_token_count_ = 0;
};

ChunkCatalog parse_catalog_csv(std::string_view text, std::string source_label = {});
ChunkCatalog parse_catalog_json(std::string_view text, std::string source_label = {});
/// Format from the extension (".json" or csv).
ChunkCatalog load_catalog(const std::filesystem::path& path);

struct SelectionManifest {
  std::uint64_t seed = 0;
  std::int64_t budget = 0;
  std::vector<std::string> selected;  // permutation-prefix order
  std::int64_t cumulative_tokens = 0;
  std::string permutation_digest;
  std::string filter_label;  // opaque caller-supplied filtering config
  std::string source_label;

  bool operator==(const SelectionManifest&) const = default;
};

/// Seeded uniform permutation of catalog indices. Throws EmptyCatalog.
std::vector<std::size_t> permute_indices(const ChunkCatalog& catalog, std::uint64_t seed);

/// Seeded uniform permutation of chunk ids. Throws EmptyCatalog.
std::vector<std::string> permute(const ChunkCatalog& catalog, std::uint64_t seed);

/// Digest of a permutation (ids joined by newlines).
std::string permutation_digest(const std::vector<std::string>& ids);

/// Shortest prefix of the seeded permutation whose tokens reach `budget`.
/// Throws BudgetExceedsCorpus, or InvalidArgument for budget < 1.
SelectionManifest select_budget(const ChunkCatalog& catalog, std::uint64_t seed, std::int64_t budget,
                                std::string filter_label = {});

/// Several budgets from one shared permutation.
std::vector<SelectionManifest> select_budgets(const ChunkCatalog& catalog, std::uint64_t seed,
                                              const std::vector<std::int64_t>& budgets,
                                              std::string filter_label = {});

struct NestingCheck {
  bool nested = false;
  std::optional<std::size_t> divergence_index;
  std::string diagnostic;
};

/// True iff the smaller-budget selection is a prefix of the larger one.
/// Throws SeedMismatch / DigestMismatch.
NestingCheck verify_nesting(const SelectionManifest& small, const SelectionManifest& large);

std::string manifest_to_json(const SelectionManifest& manifest);
SelectionManifest manifest_from_json(std::string_view text);
/// One chunk id per line.
std::string manifest_to_text(const SelectionManifest& manifest);

}  // namespace ragscale
