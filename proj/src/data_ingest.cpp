#include "lilklucb/data_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace lilklucb {

std::vector<std::vector<std::string>> read_csv_records(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A bare line break yields one empty field; treat it as a blank line.
    if (!(record.size() == 1 && record.front().empty())) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field_started && field.empty()) {
          quoted = true;
          field_started = true;
        } else {
          field.push_back(ch);
        }
        break;
      case ',': end_field(); break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n': end_record(); break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (quoted) throw IngestError(IngestError::Kind::malformed, "unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

int contest_id_from_name(const std::filesystem::path& path) {
  const std::string stem = path.stem().string();
  auto first = std::find_if(stem.begin(), stem.end(), [](char c) { return c >= '0' && c <= '9'; });
  auto last = std::find_if(first, stem.end(), [](char c) { return c < '0' || c > '9'; });
  int id = 0;
  if (first != last) std::from_chars(&*first, &*first + (last - first), id);
  return id;
}

}  // namespace

ParsedContest parse_contest_csv(const std::filesystem::path& path, const ColumnMap& columns,
                                std::optional<int> contest_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IngestError(IngestError::Kind::io, "cannot open contest file " + path.string());
  }
  return parse_contest_csv(in, columns, contest_id.value_or(contest_id_from_name(path)));
}

ParsedContest parse_contest_csv(std::istream& in, const ColumnMap& columns, int contest_id) {
  const auto records = read_csv_records(in);
  if (records.empty()) throw IngestError(IngestError::Kind::missing_column, "contest file is empty");

  const auto& header = records.front();
  auto column = [&](const std::string& name) {
    auto it = std::find_if(header.begin(), header.end(),
                           [&](const std::string& h) { return trim(h) == name; });
    if (it == header.end()) {
      throw IngestError(IngestError::Kind::missing_column, "missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t text_col = column(columns.caption);
  const std::array<std::size_t, 3> count_cols{column(columns.one_star), column(columns.two_star),
                                              column(columns.three_star)};
  const std::size_t width = std::max(text_col, *std::max_element(count_cols.begin(), count_cols.end())) + 1;

  ParsedContest parsed;
  parsed.dataset.contest_id = contest_id;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = "record " + std::to_string(r + 1);
    if (rec.size() < width) {
      throw IngestError(IngestError::Kind::malformed, where + " has too few fields");
    }
    Caption caption;
    caption.text = rec[text_col];
    for (std::size_t s = 0; s < 3; ++s) {
      const std::string_view raw = trim(rec[count_cols[s]]);
      std::uint64_t value = 0;
      auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
      if (raw.empty() || ec != std::errc{} || ptr != raw.data() + raw.size()) {
        throw IngestError(IngestError::Kind::bad_count,
                          where + ": vote count '" + std::string(raw) + "' is not a non-negative integer");
      }
      caption.star_counts[s] = value;
    }
    if (caption.total_votes() == 0) {
      ++parsed.dropped_rows;
      continue;
    }
    parsed.dataset.captions.push_back(std::move(caption));
  }
  if (parsed.dataset.captions.size() < 2) {
    throw IngestError(IngestError::Kind::too_few_captions,
                      "need at least 2 captions with votes, found " +
                          std::to_string(parsed.dataset.captions.size()));
  }
  return parsed;
}

OutputFormat parse_format(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown output format '" + std::string(name) + "' (expected csv or json)");
}

namespace {

void append_number(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

double parse_number(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw OutputError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    parts.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

void check_shape(const ExperimentOutput& out) {
  for (std::size_t r = 0; r < out.rows.size(); ++r) {
    if (out.rows[r].size() != out.columns.size()) {
      throw std::invalid_argument("row " + std::to_string(r) + " does not match the column count");
    }
    if (r > 0 && !out.rows[r].empty() && out.rows[r].front() < out.rows[r - 1].front()) {
      throw std::invalid_argument("rows must be sorted by their first column");
    }
  }
}

}  // namespace

std::string format_output(const ExperimentOutput& out, OutputFormat format) {
  check_shape(out);
  if (format == OutputFormat::json) {
    nlohmann::ordered_json doc;
    doc["metadata"] = out.metadata;
    doc["columns"] = out.columns;
    doc["rows"] = out.rows;
    return doc.dump(2) + "\n";
  }
  std::string text;
  for (const auto& [key, value] : out.metadata.items()) {
    text += "# " + key + "=" + value.dump() + "\n";
  }
  for (std::size_t c = 0; c < out.columns.size(); ++c) {
    if (c) text += ',';
    text += out.columns[c];
  }
  text += '\n';
  for (const auto& row : out.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) text += ',';
      append_number(text, row[c]);
    }
    text += '\n';
  }
  return text;
}

ExperimentOutput parse_output(std::string_view text, OutputFormat format) {
  ExperimentOutput out;
  if (format == OutputFormat::json) {
    nlohmann::ordered_json doc;
    try {
      doc = nlohmann::ordered_json::parse(text);
      out.metadata = doc.at("metadata");
      out.columns = doc.at("columns").get<std::vector<std::string>>();
      out.rows = doc.at("rows").get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception& e) {
      throw OutputError(std::string("malformed JSON output: ") + e.what());
    }
    return out;
  }

  bool header_seen = false;
  for (std::string_view line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen && line.starts_with('#')) {
      line.remove_prefix(1);
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw OutputError("metadata line without '='");
      const std::string key(trim(line.substr(0, eq)));
      try {
        out.metadata[key] = nlohmann::ordered_json::parse(line.substr(eq + 1));
      } catch (const nlohmann::json::exception& e) {
        throw OutputError("metadata '" + key + "': " + e.what());
      }
      continue;
    }
    if (!header_seen) {
      for (auto name : split(line, ',')) out.columns.emplace_back(trim(name));
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    for (auto cell : split(line, ',')) row.push_back(parse_number(cell));
    out.rows.push_back(std::move(row));
  }
  return out;
}

void write_output(const ExperimentOutput& out, const std::filesystem::path& path,
                  OutputFormat format) {
  const std::string text = format_output(out, format);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw OutputError("cannot open " + path.string() + " for writing");
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!file.flush()) throw OutputError("write to " + path.string() + " failed");
}

ExperimentOutput read_output(const std::filesystem::path& path, OutputFormat format) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw OutputError("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << file.rdbuf();
  return parse_output(buf.str(), format);
}

}  // namespace lilklucb
