#include "su2floquet/io.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>

namespace su2floquet {

using nlohmann::json;

const char* to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::Butterfly: return "butterfly";
    case DatasetKind::Crossings: return "crossings";
    case DatasetKind::CrossingCounts: return "crossing-counts";
    case DatasetKind::Section: return "section";
    case DatasetKind::Dq: return "dq";
    case DatasetKind::PowerSpectrum: return "power-spectrum";
  }
  return "?";
}

DatasetKind dataset_kind_from_string(const std::string& s) {
  for (auto k : {DatasetKind::Butterfly, DatasetKind::Crossings, DatasetKind::CrossingCounts, DatasetKind::Section,
                 DatasetKind::Dq, DatasetKind::PowerSpectrum}) {
    if (s == to_string(k)) return k;
  }
  throw SchemaMismatch("unknown dataset kind '" + s + "'");
}

const std::vector<Column>& columns_of(DatasetKind k) {
  using T = ColumnType;
  static const std::vector<Column> butterfly{
      {"heta", T::Real}, {"phase", T::Real}, {"parity", T::Text}, {"residual", T::Real}};
  static const std::vector<Column> crossings{{"heta_star", T::Real},  {"phase_star", T::Real},
                                             {"kind", T::Text},       {"sector_pair", T::Text},
                                             {"level_a", T::Integer}, {"level_b", T::Integer},
                                             {"gap_bound", T::Real},  {"alpha_independent", T::Text},
                                             {"partial", T::Integer}};
  static const std::vector<Column> counts{{"J", T::Real},
                                          {"different_parity", T::Integer},
                                          {"same_parity", T::Integer},
                                          {"avoided", T::Integer},
                                          {"collapse", T::Integer}};
  static const std::vector<Column> section{
      {"seed_id", T::Integer}, {"step", T::Integer}, {"y", T::Real}, {"z", T::Real}};
  static const std::vector<Column> dq{
      {"sector", T::Text}, {"q", T::Real}, {"dq", T::Real}, {"std_error", T::Real}, {"fit_r2", T::Real}};
  static const std::vector<Column> power{{"heta", T::Real}, {"phase", T::Real}, {"power", T::Real}};
  switch (k) {
    case DatasetKind::Butterfly: return butterfly;
    case DatasetKind::Crossings: return crossings;
    case DatasetKind::CrossingCounts: return counts;
    case DatasetKind::Section: return section;
    case DatasetKind::Dq: return dq;
    case DatasetKind::PowerSpectrum: return power;
  }
  throw SchemaMismatch("unknown dataset kind");
}

const char* to_string(Format f) { return f == Format::Tsv ? "tsv" : "json"; }

Format format_from_string(const std::string& s) {
  if (s == "tsv") return Format::Tsv;
  if (s == "json") return Format::Json;
  throw ConfigError("unknown format '" + s + "' (expected tsv or json)");
}

namespace {

// NaN sorts last; otherwise numeric order
int compare_real(double a, double b) {
  const bool na = std::isnan(a), nb = std::isnan(b);
  if (na || nb) return na == nb ? 0 : (na ? 1 : -1);
  return a < b ? -1 : (b < a ? 1 : 0);
}

int compare_cell(const Cell& a, const Cell& b) {
  if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
  if (const auto* x = std::get_if<double>(&a)) return compare_real(*x, std::get<double>(b));
  if (const auto* x = std::get_if<std::int64_t>(&a)) {
    const auto y = std::get<std::int64_t>(b);
    return *x < y ? -1 : (y < *x ? 1 : 0);
  }
  return std::get<std::string>(a).compare(std::get<std::string>(b));
}

std::string format_real(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string format_cell(const Cell& c) {
  if (const auto* x = std::get_if<double>(&c)) return format_real(*x);
  if (const auto* x = std::get_if<std::int64_t>(&c)) return std::to_string(*x);
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of("\t\n\r") != std::string::npos) throw IoError("text cell holds a tab or newline: '" + s + "'");
  return s;
}

json meta_record(const Dataset& d) {
  json m = json::object();
  m["schema_version"] = kSchemaVersion;
  m["kind"] = to_string(d.kind);
  m["params"] = d.params;
  m["engine_version"] = d.engine_version;
  m["rng_seed"] = d.rng_seed;
  return m;
}

void check_row_types(const Dataset& d) {
  const auto& cols = columns_of(d.kind);
  for (const auto& row : d.rows) {
    if (row.size() != cols.size()) throw IoError(std::string("row width does not match ") + to_string(d.kind));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const bool ok = (cols[c].type == ColumnType::Real && std::holds_alternative<double>(row[c])) ||
                      (cols[c].type == ColumnType::Integer && std::holds_alternative<std::int64_t>(row[c])) ||
                      (cols[c].type == ColumnType::Text && std::holds_alternative<std::string>(row[c]));
      if (!ok) throw IoError("cell type does not match column '" + cols[c].name + "'");
    }
  }
}

json cell_json(const Cell& c) {
  if (const auto* x = std::get_if<double>(&c)) return std::isfinite(*x) ? json(*x) : json(format_real(*x));
  if (const auto* x = std::get_if<std::int64_t>(&c)) return json(*x);
  return json(std::get<std::string>(c));
}

Cell parse_cell(const std::string& s, ColumnType t, long line, const std::string& column) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (t == ColumnType::Real) {
    double v = 0.0;
    const auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e || s.empty())
      throw ParseError("bad number '" + s + "' in column '" + column + "'", line);
    return v;
  }
  if (t == ColumnType::Integer) {
    std::int64_t v = 0;
    const auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e || s.empty())
      throw ParseError("bad integer '" + s + "' in column '" + column + "'", line);
    return v;
  }
  return s;
}

Cell cell_from_json(const json& v, ColumnType t, long line, const std::string& column) {
  if (t == ColumnType::Real) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_cell(v.get<std::string>(), t, line, column);
  } else if (t == ColumnType::Integer) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
  } else if (v.is_string()) {
    return v.get<std::string>();
  }
  throw ParseError("wrong value type in column '" + column + "'", line);
}

void apply_meta(Dataset& d, const json& m, long line) {
  if (!m.is_object() || !m.contains("schema_version")) throw ParseError("header lacks schema_version", line);
  const auto& v = m["schema_version"];
  if (!v.is_number_integer()) throw ParseError("schema_version is not an integer", line);
  if (v.get<long>() != kSchemaVersion)
    throw SchemaMismatch("schema version " + std::to_string(v.get<long>()) + " is not supported (reader speaks " +
                         std::to_string(kSchemaVersion) + ")");
  try {
    d.kind = dataset_kind_from_string(m.at("kind").get<std::string>());
    d.params = m.at("params");
    d.engine_version = m.at("engine_version").get<std::string>();
    d.rng_seed = m.at("rng_seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed header: ") + e.what(), line);
  }
}

void check_columns(const Dataset& d, const std::vector<std::string>& names) {
  const auto& cols = columns_of(d.kind);
  bool ok = names.size() == cols.size();
  for (std::size_t c = 0; ok && c < cols.size(); ++c) ok = names[c] == cols[c].name;
  if (!ok) throw SchemaMismatch(std::string("column layout does not match kind ") + to_string(d.kind));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t p = s.find(sep, start);
    out.push_back(s.substr(start, p == std::string::npos ? std::string::npos : p - start));
    if (p == std::string::npos) break;
    start = p + 1;
  }
  return out;
}

Dataset parse_tsv(const std::string& text) {
  std::vector<std::string> lines;
  bool complete_last = text.empty() || text.back() == '\n';
  {
    std::size_t start = 0;
    while (start < text.size()) {
      const std::size_t p = text.find('\n', start);
      if (p == std::string::npos) {
        lines.push_back(text.substr(start));
        break;
      }
      lines.push_back(text.substr(start, p - start));
      start = p + 1;
    }
  }
  if (lines.empty()) throw ParseError("empty file", 1);
  if (lines.size() == 1 && !complete_last) throw ParseError("incomplete header line", 1);
  if (lines[0].rfind("# ", 0) != 0) throw ParseError("expected '# {metadata}'", 1);
  Dataset d;
  json meta;
  try {
    meta = json::parse(lines[0].substr(2));
  } catch (const json::exception& e) {
    throw ParseError(std::string("metadata is not valid JSON: ") + e.what(), 1);
  }
  apply_meta(d, meta, 1);
  if (lines.size() < 2) throw ParseError("missing column header (truncated file?)", 2);
  if (lines[1].rfind("# ", 0) != 0) throw ParseError("expected '# <columns>'", 2);
  check_columns(d, split(lines[1].substr(2), '\t'));
  const auto& cols = columns_of(d.kind);
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const long line = static_cast<long>(i) + 1;
    const std::string& l = lines[i];
    if (i + 1 == lines.size() && !complete_last) throw ParseError("incomplete final line (truncated file?)", line);
    if (l.rfind("# end ", 0) == 0) {
      std::size_t n = 0;
      const auto r = std::from_chars(l.data() + 6, l.data() + l.size(), n);
      if (r.ec != std::errc() || r.ptr != l.data() + l.size()) throw ParseError("malformed end marker", line);
      if (n != d.rows.size())
        throw ParseError("end marker announces " + std::to_string(n) + " rows, found " +
                             std::to_string(d.rows.size()),
                         line);
      if (i + 1 != lines.size()) throw ParseError("content after end marker", line + 1);
      return d;
    }
    if (!l.empty() && l[0] == '#') throw ParseError("unexpected comment line", line);
    const auto fields = split(l, '\t');
    if (fields.size() != cols.size())
      throw ParseError("expected " + std::to_string(cols.size()) + " fields, found " + std::to_string(fields.size()),
                       line);
    Row row;
    row.reserve(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) row.push_back(parse_cell(fields[c], cols[c].type, line, cols[c].name));
    d.rows.push_back(std::move(row));
  }
  throw ParseError("missing end marker (truncated file?)", static_cast<long>(lines.size()) + 1);
}

long line_of_byte(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<long>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

Dataset parse_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON (truncated file?): ") + e.what(), line_of_byte(text, e.byte));
  }
  Dataset d;
  if (!doc.is_object() || !doc.contains("meta")) throw ParseError("missing meta record", 1);
  apply_meta(d, doc["meta"], 1);
  if (!doc.contains("columns") || !doc["columns"].is_array()) throw ParseError("missing columns", 1);
  check_columns(d, doc["columns"].get<std::vector<std::string>>());
  if (!doc.contains("rows") || !doc["rows"].is_array()) throw ParseError("missing rows", 1);
  const auto& cols = columns_of(d.kind);
  long line = 1;
  for (const auto& r : doc["rows"]) {
    ++line;  // one row per line as written
    if (!r.is_array() || r.size() != cols.size()) throw ParseError("row has the wrong width", line);
    Row row;
    for (std::size_t c = 0; c < cols.size(); ++c) row.push_back(cell_from_json(r[c], cols[c].type, line, cols[c].name));
    d.rows.push_back(std::move(row));
  }
  return d;
}

std::mutex& writer_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void Dataset::sort_rows() {
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    for (std::size_t c = 0; c < std::min(a.size(), b.size()); ++c) {
      const int r = compare_cell(a[c], b[c]);
      if (r != 0) return r < 0;
    }
    return a.size() < b.size();
  });
}

std::string serialize(const Dataset& d, Format f) {
  check_row_types(d);
  const auto& cols = columns_of(d.kind);
  std::string out;
  if (f == Format::Tsv) {
    out += "# " + meta_record(d).dump() + "\n# ";
    for (std::size_t c = 0; c < cols.size(); ++c) out += (c ? "\t" : "") + cols[c].name;
    out += '\n';
    for (const auto& row : d.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out += '\t';
        out += format_cell(row[c]);
      }
      out += '\n';
    }
    out += "# end " + std::to_string(d.rows.size()) + "\n";
    return out;
  }
  json names = json::array();
  for (const auto& c : cols) names.push_back(c.name);
  out += "{\"meta\":" + meta_record(d).dump() + ",\"columns\":" + names.dump() + ",\"rows\":[";
  for (std::size_t r = 0; r < d.rows.size(); ++r) {
    json row = json::array();
    for (const auto& c : d.rows[r]) row.push_back(cell_json(c));
    out += (r ? ",\n" : "\n") + row.dump();
  }
  out += "\n]}\n";
  return out;
}

Dataset parse_dataset(const std::string& text) {
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_json(text);
  return parse_tsv(text);
}

void write_dataset(const Dataset& d, const std::filesystem::path& path, const WriteOptions& opt) {
  namespace fs = std::filesystem;
  const std::string body = serialize(d, opt.format);
  static std::atomic<unsigned> counter{0};
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp-" + std::to_string(::getpid()) + "-" +
                              std::to_string(counter++));
  std::lock_guard lock(writer_mutex());
  try {
    {
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
      constexpr std::size_t chunk = 1 << 16;
      for (std::size_t off = 0; off < body.size(); off += chunk) {
        os.write(body.data() + off, static_cast<std::streamsize>(std::min(chunk, body.size() - off)));
        if (!os) throw IoError("write to " + tmp.string() + " failed");
        if (opt.on_progress) opt.on_progress(std::min(off + chunk, body.size()));
      }
      os.flush();
      if (!os) throw IoError("flush of " + tmp.string() + " failed");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  } catch (...) {
    std::error_code ignore;
    fs::remove(tmp, ignore);
    throw;
  }
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_dataset(ss.str());
}

json params_record(const ModelParams& p) {
  json j = json::object();
  j["J"] = p.j();
  j["alpha_scaled"] = p.alpha_scaled;
  j["heta"] = p.heta;
  j["variant"] = to_string(p.variant);
  if (const auto* r = std::get_if<RationalPrefactor>(&p.prefactor)) {
    j["prefactor"] = {{"nu", r->nu}, {"mu", r->mu}};
  } else if (const auto* a = std::get_if<AnglePrefactor>(&p.prefactor)) {
    j["prefactor"] = {{"beta", a->beta}};
  } else {
    j["prefactor"] = nullptr;
  }
  return j;
}

ModelParams params_from_record(const json& j) {
  try {
    ModelParams p;
    p.basis = SpinBasis::from_j(j.at("J").get<double>());
    p.alpha_scaled = j.at("alpha_scaled").get<double>();
    p.heta = j.at("heta").get<double>();
    p.variant = variant_from_string(j.at("variant").get<std::string>());
    const auto& pf = j.at("prefactor");
    if (pf.is_object() && pf.contains("nu")) {
      p.prefactor = RationalPrefactor{pf.at("nu").get<long>(), pf.at("mu").get<long>()};
    } else if (pf.is_object() && pf.contains("beta")) {
      p.prefactor = AnglePrefactor{pf.at("beta").get<double>()};
    }
    return p;
  } catch (const json::exception& e) {
    throw SchemaMismatch(std::string("malformed parameter record: ") + e.what());
  } catch (const ConfigError& e) {
    throw SchemaMismatch(std::string("invalid parameter record: ") + e.what());
  }
}

Dataset butterfly_table(const ButterflyDataset& b) {
  Dataset d;
  d.kind = DatasetKind::Butterfly;
  d.params = params_record(b.params);
  d.params["parameter_hash"] = b.parameter_hash;
  d.params["grid_points"] = b.grid.size();
  d.engine_version = b.engine_version;
  for (std::size_t k = 0; k < b.columns.size(); ++k) {
    for (const auto& s : b.columns[k].sectors) {
      for (std::size_t i = 0; i < s.set.size(); ++i) {
        d.rows.push_back({b.grid[k], s.set.phases[i], std::string(to_string(s.set.parities[i])), s.set.residual});
      }
    }
  }
  d.sort_rows();
  return d;
}

namespace {

void expect_kind(const Dataset& d, DatasetKind k) {
  if (d.kind != k)
    throw SchemaMismatch(std::string("expected a ") + to_string(k) + " dataset, found " + to_string(d.kind));
}

}  // namespace

std::vector<ButterflyRow> butterfly_rows(const Dataset& d) {
  expect_kind(d, DatasetKind::Butterfly);
  std::vector<ButterflyRow> out;
  out.reserve(d.rows.size());
  for (const auto& r : d.rows) {
    ButterflyRow b;
    b.heta = std::get<double>(r[0]);
    b.phase = std::get<double>(r[1]);
    try {
      b.parity = parity_from_string(std::get<std::string>(r[2]));
    } catch (const ConfigError& e) {
      throw SchemaMismatch(e.what());
    }
    b.residual = std::get<double>(r[3]);
    if (!(b.phase >= 0.0 && b.phase < kTwoPi)) throw SchemaMismatch("phase outside [0, 2pi)");
    if (!(b.heta >= 0.0 && b.heta < kFourPi)) throw SchemaMismatch("heta outside [0, 4pi)");
    out.push_back(b);
  }
  return out;
}

Dataset crossings_table(const ModelParams& templ, const std::vector<CrossingRecord>& records) {
  Dataset d;
  d.kind = DatasetKind::Crossings;
  d.params = params_record(templ);
  for (const auto& r : records) {
    const std::string ai = r.alpha_independent ? (*r.alpha_independent ? "yes" : "no") : "unknown";
    d.rows.push_back({r.heta_star, r.phase_star, std::string(to_string(r.kind)), std::string(to_string(r.sector_pair)),
                      std::int64_t{r.level_ids[0]}, std::int64_t{r.level_ids[1]}, r.gap_bound, ai,
                      std::int64_t{r.partial ? 1 : 0}});
  }
  d.sort_rows();
  return d;
}

std::vector<CrossingRecord> crossing_records(const Dataset& d) {
  expect_kind(d, DatasetKind::Crossings);
  std::vector<CrossingRecord> out;
  for (const auto& r : d.rows) {
    CrossingRecord c;
    c.heta_star = std::get<double>(r[0]);
    c.phase_star = std::get<double>(r[1]);
    try {
      c.kind = crossing_kind_from_string(std::get<std::string>(r[2]));
      c.sector_pair = sector_pair_from_string(std::get<std::string>(r[3]));
    } catch (const ConfigError& e) {
      throw SchemaMismatch(e.what());
    }
    c.level_ids = {static_cast<int>(std::get<std::int64_t>(r[4])), static_cast<int>(std::get<std::int64_t>(r[5]))};
    c.gap_bound = std::get<double>(r[6]);
    const auto& ai = std::get<std::string>(r[7]);
    if (ai == "yes") c.alpha_independent = true;
    else if (ai == "no") c.alpha_independent = false;
    else if (ai != "unknown") throw SchemaMismatch("bad alpha_independent value '" + ai + "'");
    c.partial = std::get<std::int64_t>(r[8]) != 0;
    out.push_back(c);
  }
  return out;
}

Dataset crossing_counts_table(const ModelParams& templ, const std::vector<CountRow>& rows) {
  Dataset d;
  d.kind = DatasetKind::CrossingCounts;
  d.params = params_record(templ);
  for (const auto& r : rows) {
    d.rows.push_back({r.j, static_cast<std::int64_t>(r.counts.different_parity),
                      static_cast<std::int64_t>(r.counts.same_parity), static_cast<std::int64_t>(r.counts.avoided),
                      static_cast<std::int64_t>(r.counts.collapse)});
  }
  d.sort_rows();
  return d;
}

Dataset section_table(const ClassicalParams& p, Variant v, std::uint64_t rng_seed,
                      const std::vector<SectionPoint>& points) {
  Dataset d;
  d.kind = DatasetKind::Section;
  d.params = {{"alpha", p.alpha}, {"eta", p.eta}, {"torsion_sign", p.torsion_sign}, {"variant", to_string(v)}};
  d.rng_seed = rng_seed;
  for (const auto& pt : points) {
    d.rows.push_back({static_cast<std::int64_t>(pt.seed_id), static_cast<std::int64_t>(pt.step), pt.y, pt.z});
  }
  d.sort_rows();
  return d;
}

std::vector<SectionPoint> section_points(const Dataset& d) {
  expect_kind(d, DatasetKind::Section);
  std::vector<SectionPoint> out;
  for (const auto& r : d.rows) {
    const auto id = std::get<std::int64_t>(r[0]);
    const auto step = std::get<std::int64_t>(r[1]);
    if (id < 0 || step < 0) throw SchemaMismatch("negative seed id or step");
    out.push_back({static_cast<std::size_t>(id), static_cast<std::size_t>(step), std::get<double>(r[2]),
                   std::get<double>(r[3])});
  }
  return out;
}

Dataset dq_table(const ModelParams& p, const std::vector<NamedCurve>& curves) {
  Dataset d;
  d.kind = DatasetKind::Dq;
  d.params = params_record(p);
  json scales = json::object();
  for (const auto& nc : curves) {
    scales[nc.sector] = nc.curve.fit_scales;
    for (std::size_t i = 0; i < nc.curve.q_values.size(); ++i) {
      d.rows.push_back({nc.sector, nc.curve.q_values[i], nc.curve.dq[i], nc.curve.std_error[i], nc.curve.fit_r2[i]});
    }
  }
  d.params["fit_boxes"] = scales;
  d.sort_rows();
  return d;
}

Dataset power_table(const ModelParams& p, const std::string& state_tag, std::size_t n_seq,
                    const std::vector<PowerColumn>& columns, bool amplitude) {
  Dataset d;
  d.kind = DatasetKind::PowerSpectrum;
  d.params = params_record(p);
  d.params["initial_state"] = state_tag;
  d.params["n_seq"] = n_seq;
  d.params["quantity"] = amplitude ? "amplitude" : "power";
  for (const auto& c : columns) {
    const auto values = amplitude ? c.spectrum.amplitude() : c.spectrum.power;
    for (std::size_t k = 0; k < values.size(); ++k) d.rows.push_back({c.heta, c.spectrum.phases[k], values[k]});
  }
  d.sort_rows();
  return d;
}

}  // namespace su2floquet
