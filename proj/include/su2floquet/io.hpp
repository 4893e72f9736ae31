#pragma once

#include "su2floquet/classical.hpp"
#include "su2floquet/crossings.hpp"
#include "su2floquet/dynamics.hpp"
#include "su2floquet/fractal.hpp"
#include "su2floquet/spectrum.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace su2floquet {

inline constexpr int kSchemaVersion = 1;

enum class DatasetKind { Butterfly, Crossings, CrossingCounts, Section, Dq, PowerSpectrum };

const char* to_string(DatasetKind k);
DatasetKind dataset_kind_from_string(const std::string& s);

enum class ColumnType { Real, Integer, Text };

struct Column {
  std::string name;
  ColumnType type;
};

/// Fixed column layout of each dataset kind.
const std::vector<Column>& columns_of(DatasetKind k);

using Cell = std::variant<double, std::int64_t, std::string>;
using Row = std::vector<Cell>;

/// A serializable table: a metadata record plus typed rows.
struct Dataset {
  DatasetKind kind = DatasetKind::Butterfly;
  /// Canonical parameter record; object keys serialize in sorted order.
  nlohmann::json params = nlohmann::json::object();
  std::string engine_version = kEngineVersion;
  std::uint64_t rng_seed = 0;
  std::vector<Row> rows;

  /// Sorts rows lexicographically by column (numbers numerically).
  void sort_rows();
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

enum class Format { Tsv, Json };

const char* to_string(Format f);
Format format_from_string(const std::string& s);

/// Serialized form. TSV: '# {meta json}', '# col1<TAB>col2...', one line per
/// row with numbers in shortest round-trip form, then '# end <rows>'.
std::string serialize(const Dataset& d, Format f);

/// Inverse of serialize (format detected from the first byte). ParseError
/// carries the 1-based line number; SchemaMismatch for another schema
/// version or a column layout that does not match the kind.
Dataset parse_dataset(const std::string& text);

struct WriteOptions {
  Format format = Format::Tsv;
  /// Called after each serialized chunk is written to the temporary file;
  /// lets tests interrupt a write midway.
  std::function<void(std::size_t bytes_written)> on_progress;
};

/// Writes to a temporary file in the target directory and renames it over
/// the target, so the target is either untouched or complete. IoError on
/// failure; the temporary file is removed.
void write_dataset(const Dataset& d, const std::filesystem::path& path, const WriteOptions& opt = {});

Dataset read_dataset(const std::filesystem::path& path);

// Conversions between module results and tables.

nlohmann::json params_record(const ModelParams& p);
ModelParams params_from_record(const nlohmann::json& j);

Dataset butterfly_table(const ButterflyDataset& b);

struct ButterflyRow {
  double heta = 0.0;
  double phase = 0.0;
  Parity parity = Parity::Unresolved;
  double residual = 0.0;
  friend bool operator==(const ButterflyRow&, const ButterflyRow&) = default;
};

/// Flattened (heta, phase) rows in table order. Validates phases in
/// [0, 2pi), heta in [0, 4pi) and parity labels (SchemaMismatch otherwise).
std::vector<ButterflyRow> butterfly_rows(const Dataset& d);

Dataset crossings_table(const ModelParams& templ, const std::vector<CrossingRecord>& records);
std::vector<CrossingRecord> crossing_records(const Dataset& d);

struct CountRow {
  double j = 0.0;
  CrossingCounts counts;
};
Dataset crossing_counts_table(const ModelParams& templ, const std::vector<CountRow>& rows);

Dataset section_table(const ClassicalParams& p, Variant v, std::uint64_t rng_seed,
                      const std::vector<SectionPoint>& points);
std::vector<SectionPoint> section_points(const Dataset& d);

struct NamedCurve {
  std::string sector;
  DqCurve curve;
};
Dataset dq_table(const ModelParams& p, const std::vector<NamedCurve>& curves);

struct PowerColumn {
  double heta = 0.0;
  PowerSpectrum spectrum;
};
/// Rows (heta, phase, power); amplitude = true stores sqrt(power).
Dataset power_table(const ModelParams& p, const std::string& state_tag, std::size_t n_seq,
                    const std::vector<PowerColumn>& columns, bool amplitude);

}  // namespace su2floquet
