#include "czlab/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "czlab/common.hpp"

#ifndef CZLAB_GIT_SHA
#define CZLAB_GIT_SHA "unknown"
#endif

namespace czlab {

void Report::check(const std::string& name, bool pass, const std::string& detail) {
  checks.push_back({name, pass ? "pass" : "fail", detail});
}

void Report::inconclusive(const std::string& name, const std::string& detail) {
  checks.push_back({name, "inconclusive", detail});
}

bool Report::ok(bool strict) const {
  for (const auto& c : checks) {
    if (c.status == "fail") return false;
    if (strict && c.status == "inconclusive") return false;
  }
  return true;
}

nlohmann::json Report::to_json(bool with_timing) const {
  nlohmann::json j;
  j["format"] = "czlab-report-v1";
  j["build"] = build_identifier();
  j["config"] = config;
  j["threads"] = threads;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks)
    j["checks"].push_back({{"name", c.name}, {"status", c.status}, {"detail", c.detail}});
  j["tables"] = nlohmann::json::object();
  for (const auto& t : tables)
    j["tables"][t.name] = {{"header", t.header}, {"rows", t.rows}};
  if (with_timing) j["timing"] = {{"wall_ms", wall_ms}};
  return j;
}

std::string build_identifier() { return CZLAB_GIT_SHA; }

void write_text_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), "write_text_atomic: cannot open " + tmp);
    out << content;
    require(out.good(), "write_text_atomic: write failed for " + tmp);
  }
  require(std::rename(tmp.c_str(), path.c_str()) == 0,
          "write_text_atomic: rename failed for " + path);
}

std::string csv_text(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (i) out += ',';
    out += t.header[i];
  }
  out += '\n';
  char buf[40];
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void write_report_files(const Report& r, const std::string& out_dir, const std::string& stem) {
  std::filesystem::create_directories(out_dir);
  std::filesystem::path base(out_dir);
  write_text_atomic((base / (stem + ".json")).string(), r.to_json().dump(2) + "\n");
  for (const auto& t : r.tables)
    write_text_atomic((base / (stem + "_" + t.name + ".csv")).string(), csv_text(t));
}

Table grid_table(const std::string& name, const GridField& g) {
  Table t;
  t.name = name;
  for (int a = 0; a < g.dim(); ++a) t.header.push_back("x" + std::to_string(a));
  for (int c = 0; c < g.ncomp; ++c) t.header.push_back("v" + std::to_string(c));
  t.rows.reserve(g.size());
  std::vector<double> p(g.dim());
  for (std::size_t n = 0; n < g.size(); ++n) {
    g.node_point(n, p.data());
    std::vector<double> row(p);
    for (int c = 0; c < g.ncomp; ++c) row.push_back(g.values[n * g.ncomp + c]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace czlab
