#pragma once

#include <string>
#include <vector>

namespace pmflow {

// minimal multi-series line chart; one x column shared by every series
struct ChartSeries {
  std::string label;
  std::vector<double> x, y;
};

void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::string& xlabel, const std::string& ylabel,
                          const std::vector<ChartSeries>& series, bool log_x,
                          bool log_y);

// run manifest: what a subcommand produced and under which config identity
void write_manifest(const std::string& dir, const std::string& subcommand,
                    const std::string& config_hash, bool complete,
                    const std::vector<std::string>& outputs);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const;  // -1 when absent
  double num(std::size_t row, int col) const;
};

CsvTable read_csv(const std::string& path);

// renders charts + index.md from a finished output directory; throws when
// the files disagree about the config hash
void write_report(const std::string& dir);

}  // namespace pmflow
