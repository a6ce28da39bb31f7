#include "mdecay/csv.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "mdecay/error.hpp"

namespace mdecay {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& comment,
                     const std::vector<std::string>& columns)
    : path_(path), out_(path, std::ios::binary), width_(columns.size()) {
  if (!out_) throw Error(ErrorCode::IoError, "cannot write " + path);
  if (!comment.empty()) out_ << "# " << comment << "\n";
  for (std::size_t k = 0; k < columns.size(); ++k) out_ << (k ? "," : "") << columns[k];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != width_) throw Error(ErrorCode::InvalidArgument, "csv row width mismatch");
  for (std::size_t k = 0; k < values.size(); ++k) out_ << (k ? "," : "") << format_number(values[k]);
  out_ << "\n";
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw Error(ErrorCode::IoError, "write failed for " + path_);
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < columns.size(); ++k)
    if (columns[k] == name) return k;
  throw Error(ErrorCode::InvalidArgument, "no column " + name);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  CsvTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.comments.push_back(line);
      continue;
    }
    std::istringstream ls(line);
    std::string cell;
    if (t.columns.empty()) {
      while (std::getline(ls, cell, ',')) t.columns.push_back(cell);
      continue;
    }
    std::vector<double> r;
    while (std::getline(ls, cell, ',')) r.push_back(std::strtod(cell.c_str(), nullptr));
    t.rows.push_back(std::move(r));
  }
  return t;
}

}  // namespace mdecay
