#include "ragscale/datastore_budget.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "ragscale/error.hpp"
#include "ragscale/records.hpp"
#include "ragscale/rng.hpp"

namespace ragscale {

ChunkCatalog::ChunkCatalog(std::vector<ChunkEntry> entries, std::string source_label)
    : entries_(std::move(entries)), source_label_(std::move(source_label)) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.token_count < 1)
      throw Error(ErrorCode::domain_error, "chunk '" + e.chunk_id + "' (row " + std::to_string(i + 1) + ") has token_count < 1");
    if (!seen.insert(e.chunk_id).second)
      throw Error(ErrorCode::domain_error, "duplicate chunk_id '" + e.chunk_id + "' at row " + std::to_string(i + 1));
    total_tokens_ += e.token_count;
    max_token_count_ = std::max(max_token_count_, e.token_count);
  }
}

ChunkCatalog parse_catalog_csv(std::string_view text, std::string source_label) {
  const CsvTable table = parse_csv(text);
  const auto ci = table.column("chunk_id"), ct = table.column("token_count");
  if (!ci || !ct) throw Error(ErrorCode::schema_error, "catalog needs columns chunk_id, token_count");
  std::vector<ChunkEntry> entries;
  entries.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (row.size() != table.header.size())
      throw Error(ErrorCode::parse_error, "catalog row " + std::to_string(i + 1) + ": wrong field count");
    try {
      entries.push_back(ChunkEntry{row[*ci], parse_token_count(row[*ct])});
    } catch (const Error& e) {
      throw Error(ErrorCode::parse_error, "catalog row " + std::to_string(i + 1) + ": " + e.detail());
    }
  }
  return ChunkCatalog(std::move(entries), std::move(source_label));
}

ChunkCatalog parse_catalog_json(std::string_view text, std::string source_label) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::schema_error, "catalog JSON must be an array");
  std::vector<ChunkEntry> entries;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& o = doc[i];
    if (!o.is_object() || !o.contains("chunk_id") || !o.contains("token_count"))
      throw Error(ErrorCode::schema_error, "catalog row " + std::to_string(i + 1) + " needs chunk_id and token_count");
    const auto& id = o["chunk_id"];
    const auto& tc = o["token_count"];
    if (!tc.is_number_integer())
      throw Error(ErrorCode::parse_error, "catalog row " + std::to_string(i + 1) + ": token_count is not an integer");
    entries.push_back(ChunkEntry{id.is_string() ? id.get<std::string>() : id.dump(), tc.get<std::int64_t>()});
  }
  return ChunkCatalog(std::move(entries), std::move(source_label));
}

ChunkCatalog load_catalog(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  return format_from_path(path) == DataFormat::json ? parse_catalog_json(bytes, path.string())
                                                    : parse_catalog_csv(bytes, path.string());
}

std::vector<std::size_t> permute_indices(const ChunkCatalog& catalog, std::uint64_t seed) {
  if (catalog.empty()) throw Error(ErrorCode::empty_catalog, "cannot permute an empty catalog");
  std::vector<std::size_t> idx(catalog.size());
  std::iota(idx.begin(), idx.end(), 0);
  SplitMix64 rng(seed);
  shuffle_indices(idx, rng);
  return idx;
}

std::vector<std::string> permute(const ChunkCatalog& catalog, std::uint64_t seed) {
  std::vector<std::string> ids;
  ids.reserve(catalog.size());
  for (std::size_t i : permute_indices(catalog, seed)) ids.push_back(catalog.entries()[i].chunk_id);
  return ids;
}

std::string permutation_digest(const std::vector<std::string>& ids) {
  std::string joined;
  for (const auto& id : ids) {
    joined += id;
    joined += '\n';
  }
  return content_digest(joined);
}

std::vector<SelectionManifest> select_budgets(const ChunkCatalog& catalog, std::uint64_t seed,
                                              const std::vector<std::int64_t>& budgets, std::string filter_label) {
  for (auto b : budgets) {
    if (b < 1) throw Error(ErrorCode::invalid_argument, "budget must be >= 1");
    if (b > catalog.total_tokens())
      throw Error(ErrorCode::budget_exceeds_corpus, "budget " + std::to_string(b) + " exceeds catalog total " +
                                                        std::to_string(catalog.total_tokens()));
  }
  const auto order = permute_indices(catalog, seed);
  std::vector<std::string> ids;
  ids.reserve(order.size());
  for (std::size_t i : order) ids.push_back(catalog.entries()[i].chunk_id);
  const std::string digest = permutation_digest(ids);

  std::vector<SelectionManifest> out;
  for (auto budget : budgets) {
    SelectionManifest m;
    m.seed = seed;
    m.budget = budget;
    m.permutation_digest = digest;
    m.filter_label = filter_label;
    m.source_label = catalog.source_label();
    for (std::size_t k = 0; k < order.size() && m.cumulative_tokens < budget; ++k) {
      m.cumulative_tokens += catalog.entries()[order[k]].token_count;
      m.selected.push_back(ids[k]);
    }
    out.push_back(std::move(m));
  }
  return out;
}

SelectionManifest select_budget(const ChunkCatalog& catalog, std::uint64_t seed, std::int64_t budget,
                                std::string filter_label) {
  if (catalog.empty()) throw Error(ErrorCode::empty_catalog, "catalog is empty");
  return select_budgets(catalog, seed, {budget}, std::move(filter_label)).front();
}

NestingCheck verify_nesting(const SelectionManifest& small, const SelectionManifest& large) {
  if (small.seed != large.seed)
    throw Error(ErrorCode::seed_mismatch, std::to_string(small.seed) + " vs " + std::to_string(large.seed));
  if (small.permutation_digest != large.permutation_digest)
    throw Error(ErrorCode::digest_mismatch, small.permutation_digest + " vs " + large.permutation_digest);
  const bool swapped = small.budget > large.budget;
  const auto& a = swapped ? large : small;
  const auto& b = swapped ? small : large;

  NestingCheck check;
  if (a.selected.size() > b.selected.size()) {
    check.divergence_index = b.selected.size();
    check.diagnostic = "budget " + std::to_string(a.budget) + " selects " + std::to_string(a.selected.size()) +
                       " chunks, more than budget " + std::to_string(b.budget) + " (" +
                       std::to_string(b.selected.size()) + ")";
    return check;
  }
  for (std::size_t i = 0; i < a.selected.size(); ++i) {
    if (a.selected[i] != b.selected[i]) {
      check.divergence_index = i;
      check.diagnostic = "first divergence at index " + std::to_string(i) + ": '" + a.selected[i] + "' vs '" +
                         b.selected[i] + "'";
      return check;
    }
  }
  check.nested = true;
  check.diagnostic = "budget " + std::to_string(a.budget) + " selection is a prefix of budget " +
                     std::to_string(b.budget) + " selection";
  return check;
}

std::string manifest_to_json(const SelectionManifest& m) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["seed"] = m.seed;
  j["budget"] = m.budget;
  j["cumulative_tokens"] = m.cumulative_tokens;
  j["permutation_digest"] = m.permutation_digest;
  j["filter_label"] = m.filter_label;
  j["source_label"] = m.source_label;
  j["n_selected"] = m.selected.size();
  j["selected"] = m.selected;
  return j.dump(2) + "\n";
}

SelectionManifest manifest_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SelectionManifest m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.budget = j.at("budget").get<std::int64_t>();
    m.cumulative_tokens = j.at("cumulative_tokens").get<std::int64_t>();
    m.permutation_digest = j.at("permutation_digest").get<std::string>();
    m.filter_label = j.value("filter_label", "");
    m.source_label = j.value("source_label", "");
    m.selected = j.at("selected").get<std::vector<std::string>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("manifest: ") + e.what());
  }
}

std::string manifest_to_text(const SelectionManifest& m) {
  std::string out;
  for (const auto& id : m.selected) {
    out += id;
    out += '\n';
  }
  return out;
}

}  // namespace ragscale
