#include "linfty/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace linfty::io {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream stream(line);
  std::string field;
  while (std::getline(stream, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    fields.push_back(first == std::string::npos ? "" : field.substr(first, last - first + 1));
  }
  return fields;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size() && errno != ERANGE;
}

// Numeric rows of a CSV file; a leading header line is allowed.
std::vector<std::vector<double>> read_numeric_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_fields(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t k = 0; k < fields.size() && numeric; ++k) {
      numeric = parse_double(fields[k], row[k]);
    }
    if (!numeric) {
      if (rows.empty() && line_no == 1) continue;  // header
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": non-numeric field");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

double round_to_reported(double value) {
  return std::strtod(format_number(value).c_str(), nullptr);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + temp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + temp.string());
  }
  std::filesystem::rename(temp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

MeasurePtr read_measure_csv(const std::filesystem::path& path) {
  const auto rows = read_numeric_rows(path);
  if (rows.empty()) throw std::runtime_error(path.string() + ": no measure rows");
  std::vector<Point> points;
  std::vector<double> weights;
  for (const auto& row : rows) {
    if (row.size() != rows.front().size() || row.size() < 2) {
      throw std::runtime_error(path.string() + ": rows need x1,...,xd,weight");
    }
    points.emplace_back(std::vector<double>(row.begin(), row.end() - 1));
    weights.push_back(row.back());
  }
  return share(make_measure(std::move(points), std::move(weights), true));
}

std::string measure_csv(const DiscreteMeasure& measure) {
  std::string out;
  for (std::size_t k = 1; k <= measure.dim(); ++k) out += "x" + std::to_string(k) + ",";
  out += "weight\n";
  for (std::size_t i = 0; i < measure.size(); ++i) {
    for (double v : measure.point(i).coords()) out += format_number(v) + ",";
    out += format_number(measure.weight(i)) + "\n";
  }
  return out;
}

Coupling read_coupling_csv(const std::filesystem::path& path, MeasurePtr mu,
                           MeasurePtr nu) {
  std::vector<CouplingEntry> entries;
  for (const auto& row : read_numeric_rows(path)) {
    if (row.size() != 3 || row[0] < 0 || row[1] < 0) {
      throw std::runtime_error(path.string() + ": rows need i,j,mass");
    }
    entries.push_back({static_cast<std::size_t>(row[0]), static_cast<std::size_t>(row[1]),
                       row[2]});
  }
  return Coupling(std::move(mu), std::move(nu), std::move(entries));
}

std::string coupling_csv(const Coupling& plan) {
  std::string out = "i,j,mass\n";
  for (const auto& e : plan.entries()) {
    out += std::to_string(e.i) + "," + std::to_string(e.j) + "," + format_number(e.mass) +
           "\n";
  }
  return out;
}

std::string map_csv(const MapExtraction& map, const DiscreteMeasure& mu) {
  std::string out = "source_index,target_index,dominant_mass,source_weight\n";
  for (std::size_t i = 0; i < map.assignment.size(); ++i) {
    const std::string target =
        map.assignment[i] == kNoTarget ? "" : std::to_string(map.assignment[i]);
    out += std::to_string(i) + "," + target + "," + format_number(map.dominant_mass[i]) +
           "," + format_number(mu.weight(i)) + "\n";
  }
  return out;
}

nlohmann::ordered_json certificate_json(const MonotonicityCertificate& cert,
                                        const Coupling& plan) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(cert.kind);
  j["verdict"] = cert.pass ? "pass" : "fail";
  j["tolerance"] = round_to_reported(cert.tolerance);
  auto witness = nlohmann::ordered_json::array();
  for (std::size_t k : cert.witness) {
    const auto& e = plan.entries().at(k);
    witness.push_back({{"entry", k}, {"i", e.i}, {"j", e.j}});
  }
  j["witness"] = witness;
  if (!cert.pass) {
    j["own_max"] = round_to_reported(cert.own_max);
    j["permuted_max"] = round_to_reported(cert.permuted_max);
  }
  j["pairs_checked"] = cert.pairs_checked;
  j["cycles_explored"] = cert.cycles_explored;
  return j;
}

}  // namespace linfty::io
