#include "ragscale/records.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "ragscale/error.hpp"
#include "ragscale/rng.hpp"

namespace ragscale {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string row_label(std::size_t row) { return "row " + std::to_string(row); }

void validate_record(const RunRecord& r) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::domain_error, row_label(r.row) + ": " + what);
  };
  if (r.model_params < 1) fail("n_params must be >= 1");
  if (r.pretrain_tokens < 1) fail("d_tokens must be >= 1");
  if (r.retrieval_tokens < 0) fail("r_tokens must be >= 0");
  if (!std::isfinite(r.loss) || r.loss <= 0.0) fail("loss must be positive and finite");
}

const char* const kRequired[] = {"n_params", "d_tokens", "r_tokens", "loss", "benchmark"};

}  // namespace

Dataset Dataset::create(std::vector<RunRecord> records, std::string source_path,
                        std::string checksum) {
  using Key = std::tuple<std::int64_t, std::int64_t, std::int64_t, std::string, std::string>;
  std::set<Key> seen;
  for (const auto& r : records) {
    validate_record(r);
    Key key{r.model_params, r.pretrain_tokens, r.retrieval_tokens, r.benchmark, r.seed};
    if (!seen.insert(std::move(key)).second) {
      throw Error(ErrorCode::domain_error,
                  row_label(r.row) + ": duplicate (n_params, d_tokens, r_tokens, benchmark, seed)");
    }
  }
  Dataset d;
  d.records_ = std::move(records);
  d.source_path_ = std::move(source_path);
  d.checksum_ = std::move(checksum);
  return d;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset d;
  d.records_.reserve(indices.size());
  for (std::size_t i : indices) d.records_.push_back(records_.at(i));
  d.source_path_ = source_path_;
  return d;
}

DataFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".json" ? DataFormat::json : DataFormat::csv;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::io_error, "short write to " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path, DataFormat format) {
  const std::string bytes = read_file(path);
  Dataset d = format == DataFormat::json ? parse_json_dataset(bytes, path.string())
                                         : parse_csv_dataset(bytes, path.string());
  if (d.empty()) throw Error(ErrorCode::schema_error, path.string() + ": no data rows");
  return d;
}

Dataset load_dataset(const std::filesystem::path& path) {
  return load_dataset(path, format_from_path(path));
}

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  return std::nullopt;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  std::size_t line = 1;
  std::size_t record_line = 1;

  auto end_field = [&] {
    fields.push_back(field_was_quoted ? field : std::string(trim(field)));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = fields.size() == 1 && fields[0].empty();
    if (!blank) {
      if (table.header.empty() && table.rows.empty()) {
        table.header = std::move(fields);
      } else {
        table.rows.push_back(std::move(fields));
        table.line_numbers.push_back(record_line);
      }
    }
    fields.clear();
  };

  std::size_t i = 0;
  // Skip a UTF-8 byte-order mark.
  if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && trim(field).empty()) {
      field.clear();
      in_quotes = true;
      field_was_quoted = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_record();
      ++line;
      record_line = line;
    } else {
      field.push_back(c);
    }
  }
  if (in_quotes) throw Error(ErrorCode::parse_error, "line " + std::to_string(record_line) + ": unterminated quote");
  if (!field.empty() || !fields.empty()) end_record();
  return table;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::int64_t parse_token_count(std::string_view text) {
  text = trim(text);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec == std::errc() && ptr == text.data() + text.size()) return value;
  double real = 0.0;
  auto [p2, ec2] = std::from_chars(text.data(), text.data() + text.size(), real);
  if (ec2 != std::errc() || p2 != text.data() + text.size() || !std::isfinite(real) ||
      std::trunc(real) != real || std::fabs(real) > 9.0e18) {
    throw Error(ErrorCode::parse_error, "not an integer token count: '" + std::string(text) + "'");
  }
  return static_cast<std::int64_t>(real);
}

double parse_real(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::parse_error, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::string format_real(double value) {
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    double back = 0.0;
    std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
    if (back == value) break;
  }
  return buf;
}

Dataset parse_csv_dataset(std::string_view text, std::string source_path) {
  const CsvTable table = parse_csv(text);
  if (table.header.empty()) throw Error(ErrorCode::schema_error, "missing header row");
  for (const char* name : kRequired) {
    if (!table.column(name)) throw Error(ErrorCode::schema_error, std::string("missing column '") + name + "'");
  }
  const std::size_t cn = *table.column("n_params"), cd = *table.column("d_tokens"),
                    cr = *table.column("r_tokens"), cl = *table.column("loss"),
                    cb = *table.column("benchmark");
  const auto cs = table.column("seed");
  const auto cf = table.column("family");

  std::vector<RunRecord> records;
  records.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::size_t row_no = i + 1;
    if (row.size() != table.header.size()) {
      throw Error(ErrorCode::parse_error, row_label(row_no) + " (line " + std::to_string(table.line_numbers[i]) +
                                              "): expected " + std::to_string(table.header.size()) +
                                              " fields, got " + std::to_string(row.size()));
    }
    RunRecord r;
    r.row = row_no;
    try {
      r.model_params = parse_token_count(row[cn]);
      r.pretrain_tokens = parse_token_count(row[cd]);
      r.retrieval_tokens = parse_token_count(row[cr]);
      r.loss = parse_real(row[cl]);
    } catch (const Error& e) {
      throw Error(ErrorCode::parse_error, row_label(row_no) + ": " + e.detail());
    }
    r.benchmark = row[cb];
    if (cs) r.seed = row[*cs];
    if (cf) r.model_family = row[*cf];
    records.push_back(std::move(r));
  }
  return Dataset::create(std::move(records), std::move(source_path), content_digest(text));
}

namespace {

std::int64_t json_tokens(const nlohmann::json& v, std::size_t row, const char* name) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (std::isfinite(x) && std::trunc(x) == x && std::fabs(x) <= 9.0e18) return static_cast<std::int64_t>(x);
  }
  if (v.is_string()) {
    try {
      return parse_token_count(v.get<std::string>());
    } catch (const Error&) {
    }
  }
  throw Error(ErrorCode::parse_error, row_label(row) + ": field '" + name + "' is not an integer");
}

std::string json_label(const nlohmann::json& v, std::size_t row, const char* name) {
  if (v.is_null()) return {};
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  throw Error(ErrorCode::parse_error, row_label(row) + ": field '" + name + "' is not a string");
}

}  // namespace

Dataset parse_json_dataset(std::string_view text, std::string source_path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::schema_error, "expected a JSON array of records");
  std::vector<RunRecord> records;
  records.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& obj = doc[i];
    const std::size_t row_no = i + 1;
    if (!obj.is_object()) throw Error(ErrorCode::parse_error, row_label(row_no) + ": not an object");
    for (const char* name : kRequired) {
      if (!obj.contains(name))
        throw Error(ErrorCode::schema_error, row_label(row_no) + ": missing field '" + name + "'");
    }
    RunRecord r;
    r.row = row_no;
    r.model_params = json_tokens(obj["n_params"], row_no, "n_params");
    r.pretrain_tokens = json_tokens(obj["d_tokens"], row_no, "d_tokens");
    r.retrieval_tokens = json_tokens(obj["r_tokens"], row_no, "r_tokens");
    const auto& loss = obj["loss"];
    if (loss.is_number()) {
      r.loss = loss.get<double>();
    } else if (loss.is_string()) {
      try {
        r.loss = parse_real(loss.get<std::string>());
      } catch (const Error& e) {
        throw Error(ErrorCode::parse_error, row_label(row_no) + ": " + e.detail());
      }
    } else {
      throw Error(ErrorCode::parse_error, row_label(row_no) + ": field 'loss' is not a number");
    }
    r.benchmark = json_label(obj["benchmark"], row_no, "benchmark");
    if (obj.contains("seed")) r.seed = json_label(obj["seed"], row_no, "seed");
    if (obj.contains("family")) r.model_family = json_label(obj["family"], row_no, "family");
    records.push_back(std::move(r));
  }
  return Dataset::create(std::move(records), std::move(source_path), content_digest(text));
}

std::string to_csv(const Dataset& dataset) {
  std::string out = "n_params,d_tokens,r_tokens,loss,benchmark,seed,family\n";
  for (const auto& r : dataset) {
    out += std::to_string(r.model_params);
    out += ',';
    out += std::to_string(r.pretrain_tokens);
    out += ',';
    out += std::to_string(r.retrieval_tokens);
    out += ',';
    out += format_real(r.loss);
    out += ',';
    out += csv_escape(r.benchmark);
    out += ',';
    out += csv_escape(r.seed);
    out += ',';
    out += csv_escape(r.model_family);
    out += '\n';
  }
  return out;
}

std::string to_json(const Dataset& dataset) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : dataset) {
    nlohmann::ordered_json o;
    o["n_params"] = r.model_params;
    o["d_tokens"] = r.pretrain_tokens;
    o["r_tokens"] = r.retrieval_tokens;
    o["loss"] = r.loss;
    o["benchmark"] = r.benchmark;
    o["seed"] = r.seed;
    o["family"] = r.model_family;
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

std::string canonical_checksum(const Dataset& dataset) { return content_digest(to_csv(dataset)); }

bool matches(const RunRecord& r, const RecordFilter& f) {
  if (f.benchmark && r.benchmark != *f.benchmark) return false;
  if (f.family && r.model_family != *f.family) return false;
  if (f.seed && r.seed != *f.seed) return false;
  if (f.r_equals_zero && ((r.retrieval_tokens == 0) != *f.r_equals_zero)) return false;
  return true;
}

Dataset filter(const Dataset& dataset, const RecordFilter& predicate) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < dataset.size(); ++i)
    if (matches(dataset[i], predicate)) keep.push_back(i);
  return dataset.subset(keep);
}

std::vector<std::string> distinct_benchmarks(const Dataset& dataset) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& r : dataset)
    if (seen.insert(r.benchmark).second) out.push_back(r.benchmark);
  return out;
}

std::vector<std::int64_t> distinct_model_sizes(const Dataset& dataset) {
  std::vector<std::int64_t> out;
  std::unordered_set<std::int64_t> seen;
  for (const auto& r : dataset)
    if (seen.insert(r.model_params).second) out.push_back(r.model_params);
  return out;
}

}  // namespace ragscale
