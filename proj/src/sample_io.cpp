#include "binfam/sample_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "binfam/errors.hpp"

namespace binfam {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

bool parse_number(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

struct CsvContent {
  std::vector<std::vector<double>> data;  // binary columns only
  std::vector<double> weights;            // empty when no weight column
  std::vector<double> logpi;              // empty when no logpi column
};

CsvContent read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) lines.push_back(line);
  }
  if (lines.empty()) throw ValidationError("'" + path + "' contains no data");

  // Header detection: any cell of the first line that is not a number.
  std::vector<std::string> first = split_csv_line(lines[0]);
  bool has_header = false;
  for (const auto& cell : first) {
    double v;
    if (!parse_number(cell, v)) {
      has_header = true;
      break;
    }
  }

  long weight_col = -1;
  long logpi_col = -1;
  long prob_col = -1;  // probability column written by `sample`; ignored on input
  std::size_t ncols = first.size();
  std::size_t start = 0;
  if (has_header) {
    for (std::size_t c = 0; c < first.size(); ++c) {
      if (first[c] == "weight") {
        if (weight_col >= 0) throw ValidationError("duplicate weight column");
        weight_col = static_cast<long>(c);
      } else if (first[c] == "logpi") {
        if (logpi_col >= 0) throw ValidationError("duplicate logpi column");
        logpi_col = static_cast<long>(c);
      } else if (first[c] == "p") {
        if (prob_col >= 0) throw ValidationError("duplicate p column");
        prob_col = static_cast<long>(c);
      }
    }
    start = 1;
    if (lines.size() == 1) throw ValidationError("'" + path + "' contains a header but no rows");
  }

  CsvContent content;
  for (std::size_t r = start; r < lines.size(); ++r) {
    const std::vector<std::string> cells = split_csv_line(lines[r]);
    if (cells.size() != ncols)
      throw ValidationError("ragged CSV: line " + std::to_string(r + 1) + " has " +
                            std::to_string(cells.size()) + " cells, expected " + std::to_string(ncols));
    std::vector<double> row;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v;
      if (!parse_number(cells[c], v))
        throw ValidationError("non-numeric cell '" + cells[c] + "' on line " + std::to_string(r + 1));
      if (static_cast<long>(c) == prob_col) {
        continue;
      } else if (static_cast<long>(c) == weight_col) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("weights must be finite and nonnegative");
        content.weights.push_back(v);
      } else if (static_cast<long>(c) == logpi_col) {
        if (!std::isfinite(v)) throw ValidationError("logpi values must be finite");
        content.logpi.push_back(v);
      } else {
        if (v != 0.0 && v != 1.0)
          throw ValidationError("data cells must be 0 or 1 (line " + std::to_string(r + 1) + ")");
        row.push_back(v);
      }
    }
    if (row.empty()) throw ValidationError("no data columns found");
    content.data.push_back(std::move(row));
  }
  return content;
}

}  // namespace

SampleData load_sample_csv(const std::string& path) {
  CsvContent content = read_csv(path);
  std::vector<BinaryVector> rows;
  rows.reserve(content.data.size());
  for (const auto& r : content.data) {
    BinaryVector g(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) g.set(i, r[i] != 0.0);
    rows.push_back(std::move(g));
  }
  std::vector<double> weights = content.weights.empty()
                                    ? std::vector<double>(rows.size(), 1.0)
                                    : std::move(content.weights);
  SampleData out{WeightedSample(std::move(weights), std::move(rows)), std::nullopt};
  if (!content.logpi.empty()) out.log_target = std::move(content.logpi);
  return out;
}

std::vector<BinaryVector> load_rows_csv(const std::string& path) {
  return load_sample_csv(path).sample.rows();
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw NumericalError("failed to format a number");
  return std::string(buf, ptr);
}

void write_sample_csv(const std::string& path, const SampleBatch& batch) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const std::size_t d = batch.rows.empty() ? 0 : batch.rows[0].dim();
  for (std::size_t i = 0; i < d; ++i) out << (i ? "," : "") << "x" << (i + 1);
  if (batch.probs) out << ",p";
  out << "\n";
  for (std::size_t k = 0; k < batch.rows.size(); ++k) {
    const BinaryVector& row = batch.rows[k];
    for (std::size_t i = 0; i < d; ++i) out << (i ? "," : "") << (row[i] ? '1' : '0');
    if (batch.probs) out << "," << format_double((*batch.probs)[k]);
    out << "\n";
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

void write_eval_csv(const std::string& path, const std::vector<double>& log_probs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "logp\n";
  for (double lp : log_probs) out << format_double(lp) << "\n";
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace binfam
