#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace mdecay {

// Numbers are written with 17 significant digits so that a round trip through
// the file reproduces every double bit for bit.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& comment, const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void close();
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
  std::size_t width_;
};

std::string format_number(double x);

struct CsvTable {
  std::vector<std::string> comments, columns;
  std::vector<std::vector<double>> rows;
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace mdecay
