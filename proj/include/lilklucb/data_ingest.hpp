#pragma once
// Caption-contest vote tables in, experiment tables out.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace lilklucb {

struct Caption {
  std::string text;
  std::array<std::uint64_t, 3> star_counts{};  // 1-, 2-, 3-star votes

  [[nodiscard]] std::uint64_t total_votes() const noexcept {
    return star_counts[0] + star_counts[1] + star_counts[2];
  }
};

struct ContestDataset {
  int contest_id = 0;
  std::vector<Caption> captions;
};

/// Header names of the caption column and the three vote-count columns.
struct ColumnMap {
  std::string caption = "caption";
  std::string one_star = "unfunny";
  std::string two_star = "somewhat_funny";
  std::string three_star = "funny";
};

struct ParsedContest {
  ContestDataset dataset;
  std::size_t dropped_rows = 0;  // rows with zero votes
};

class IngestError : public std::runtime_error {
 public:
  enum class Kind { io, missing_column, bad_count, too_few_captions, malformed };

  IngestError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Splits comma-separated text into records. Fields may be double-quoted, in
/// which case they can hold commas, newlines and "" escapes. CRLF line ends
/// and a leading UTF-8 byte-order mark are accepted.
[[nodiscard]] std::vector<std::vector<std::string>> read_csv_records(std::istream& in);

/// Parses a contest vote table. `contest_id` defaults to the first run of
/// digits in the file name (0 if there is none).
[[nodiscard]] ParsedContest parse_contest_csv(const std::filesystem::path& path,
                                              const ColumnMap& columns = {},
                                              std::optional<int> contest_id = std::nullopt);
[[nodiscard]] ParsedContest parse_contest_csv(std::istream& in, const ColumnMap& columns,
                                              int contest_id);

enum class OutputFormat { csv, json };

[[nodiscard]] OutputFormat parse_format(std::string_view name);

/// A table of numbers plus free-form metadata. Rows are sorted by their first
/// column.
struct ExperimentOutput {
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  friend bool operator==(const ExperimentOutput&, const ExperimentOutput&) = default;
};

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// CSV: metadata as leading `# key=<json value>` lines, a header line, then one
/// line per row with shortest round-trip number formatting. JSON: an object
/// with "metadata", "columns" and "rows".
[[nodiscard]] std::string format_output(const ExperimentOutput& out, OutputFormat format);
[[nodiscard]] ExperimentOutput parse_output(std::string_view text, OutputFormat format);

/// Throws OutputError (with the path in the message) when the file cannot be
/// written or read.
void write_output(const ExperimentOutput& out, const std::filesystem::path& path,
                  OutputFormat format);
[[nodiscard]] ExperimentOutput read_output(const std::filesystem::path& path, OutputFormat format);

}  // namespace lilklucb
