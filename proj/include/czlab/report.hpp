#pragma once

#include <string>
#include <vector>

#include "czlab/grid.hpp"
#include "json.hpp"

namespace czlab {

struct CheckLine {
  std::string name;
  std::string status;  // pass | fail | inconclusive
  std::string detail;
};

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Experiment outcome: echoed config, three-valued checks, numeric tables.
// Timing is segregated so reports are byte-comparable without it.
struct Report {
  nlohmann::json config = nlohmann::json::object();
  std::vector<CheckLine> checks;
  std::vector<Table> tables;
  double wall_ms = 0.0;
  int threads = 1;

  void check(const std::string& name, bool pass, const std::string& detail = "");
  void inconclusive(const std::string& name, const std::string& detail = "");
  void table(Table t) { tables.push_back(std::move(t)); }
  bool ok(bool strict) const;  // strict counts inconclusive as failure
  nlohmann::json to_json(bool with_timing = true) const;
};

// Build identifier baked in at configure time.
std::string build_identifier();

void write_text_atomic(const std::string& path, const std::string& content);
std::string csv_text(const Table& t);
// report JSON plus one CSV per table, all atomic, under out_dir/stem*.
void write_report_files(const Report& r, const std::string& out_dir, const std::string& stem);
// Flatten a grid to a table: node coordinates then component values.
Table grid_table(const std::string& name, const GridField& g);

}  // namespace czlab
