#include "tcs/io.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "tcs/errors.hpp"

namespace tcs {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_) throw std::logic_error("csv: row width differs from header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    std::visit(
        [this](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            out_ << format_double(v);
          } else {
            out_ << v;
          }
        },
        cells[i]);
  }
  out_ << '\n';
  if (!out_) throw std::runtime_error("write failed: " + path_.string());
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
}

const std::vector<std::string>& ensemble_csv_header() {
  static const std::vector<std::string> header{
      "duration_index[index]", "T[s]",          "rep[index]",
      "n_g1[count]",           "n_g2[count]",   "n_e1[count]",
      "n_e2[count]",           "p1_hat[1]",     "pg_hat[1]",
      "delta_realized[rad/s]"};
  return header;
}

void write_ensemble_csv(const std::filesystem::path& path, const EnsembleTable& table) {
  CsvWriter csv(path, ensemble_csv_header());
  for (std::size_t i = 0; i < table.n_durations; ++i) {
    for (std::size_t j = 0; j < table.n_reps; ++j) {
      const RunResult& r = table.at(i, j);
      csv.row({std::uint64_t{i}, table.durations[i], std::uint64_t{j},
               std::uint64_t{r.counts[0]}, std::uint64_t{r.counts[1]}, std::uint64_t{r.counts[2]},
               std::uint64_t{r.counts[3]}, r.p1_hat, r.pg_hat, r.delta_realized});
    }
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_cell(const std::string& cell, const std::string& where) {
  T v{};
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(where + ": cannot parse '" + cell + "'");
  return v;
}

}  // namespace

EnsembleTable read_ensemble_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read ensemble table " + path.string());
  std::string line;
  if (!std::getline(in, line) || split_csv(line) != ensemble_csv_header()) {
    throw ConfigError(path.string() + ": unexpected header");
  }
  EnsembleTable table;
  std::size_t line_no = 1;
  std::size_t current = 0;
  std::size_t reps_in_current = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const auto cells = split_csv(line);
    if (cells.size() != 10) throw ConfigError(where + ": expected 10 columns");
    const auto i = parse_cell<std::size_t>(cells[0], where);
    const auto T = parse_cell<double>(cells[1], where);
    const auto j = parse_cell<std::size_t>(cells[2], where);
    RunResult r;
    std::size_t atoms = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      r.counts[k] = parse_cell<std::uint32_t>(cells[3 + k], where);
      atoms += r.counts[k];
    }
    r.p1_hat = parse_cell<double>(cells[7], where);
    r.pg_hat = parse_cell<double>(cells[8], where);
    r.delta_realized = parse_cell<double>(cells[9], where);

    if (table.rows.empty()) {
      table.n_atoms = atoms;
      if (i != 0) throw ConfigError(where + ": first row must be duration 0");
      table.durations.push_back(T);
    } else if (i == current + 1) {
      if (table.n_reps == 0) table.n_reps = reps_in_current;
      if (reps_in_current != table.n_reps) throw ConfigError(where + ": ragged repetitions");
      current = i;
      reps_in_current = 0;
      table.durations.push_back(T);
    } else if (i != current) {
      throw ConfigError(where + ": rows are not duration-major");
    }
    if (j != reps_in_current) throw ConfigError(where + ": repetition index out of order");
    if (T != table.durations.back()) throw ConfigError(where + ": duration changes within a block");
    if (atoms != table.n_atoms || atoms == 0) throw ConfigError(where + ": inconsistent atom count");
    table.rows.push_back(r);
    ++reps_in_current;
  }
  if (table.rows.empty()) throw ConfigError(path.string() + ": no data rows");
  if (table.n_reps == 0) table.n_reps = reps_in_current;
  if (reps_in_current != table.n_reps) throw ConfigError(path.string() + ": ragged repetitions");
  table.n_durations = table.durations.size();
  return table;
}

}  // namespace tcs
