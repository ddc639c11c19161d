#include "circcoords/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "circcoords/errors.hpp"

namespace circcoords {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r\"");
    const auto last = field.find_last_not_of(" \t\r\"");
    fields.push_back(first == std::string::npos ? std::string() : field.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

}  // namespace

std::optional<std::size_t> CsvTable::column_index(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == name) return c;
  }
  return std::nullopt;
}

std::vector<double> CsvTable::column(std::size_t c) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = values[r * columns + c];
  return out;
}

std::vector<double> CsvTable::without_column(std::optional<std::size_t> skip) const {
  std::vector<double> out;
  out.reserve(values.size());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < columns; ++c) {
      if (skip && *skip == c) continue;
      out.push_back(values[r * columns + c]);
    }
  }
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_fields(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size(); ++i) numeric = numeric && parse_double(fields[i], row[i]);
    if (first) {
      first = false;
      table.columns = fields.size();
      if (!numeric) {
        table.header = std::move(fields);
        continue;
      }
    }
    if (fields.size() != table.columns) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                  std::to_string(table.columns) + " fields");
    }
    if (!numeric) throw Error(path.string() + ":" + std::to_string(line_no) + ": non-numeric field");
    table.values.insert(table.values.end(), row.begin(), row.end());
  }
  if (table.rows() == 0) throw Error(path.string() + ": no data rows");
  return table;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

void write_coordinates_csv(const std::filesystem::path& path, const CircularCoordinate& coord) {
  auto out = open_output(path);
  out << "point_index,angle_radians,flags\n";
  for (std::size_t i = 0; i < coord.angles.size(); ++i) {
    out << coord.domain[i] << ',' << coord.angles[i] << ','
        << static_cast<unsigned>(i < coord.flags.size() ? coord.flags[i] : 0) << '\n';
  }
}

void write_synthetic_csv(const std::filesystem::path& path, const SyntheticSample& sample) {
  auto out = open_output(path);
  for (std::size_t c = 0; c < sample.cloud.dim(); ++c) out << 'x' << c << ',';
  out << "true_parameter\n";
  for (std::size_t i = 0; i < sample.cloud.size(); ++i) {
    for (double v : sample.cloud[i]) out << v << ',';
    out << sample.true_parameter[i] << '\n';
  }
}

nlohmann::json barcode_json(const std::vector<PersistenceBar>& bars) {
  auto doc = nlohmann::json::array();
  for (const auto& bar : bars) {
    doc.push_back({{"dim", 1},
                   {"birth", bar.birth},
                   {"death", bar.is_finite() ? nlohmann::json(bar.death) : nlohmann::json()},
                   {"persistence", bar.is_finite() ? nlohmann::json(bar.persistence()) : nlohmann::json()}});
  }
  return doc;
}

nlohmann::json cocycle_json(const IntegerCocycle& cocycle) {
  auto values = nlohmann::json::array();
  for (const auto& e : cocycle.values) values.push_back({e.u, e.v, e.value});
  return {{"scale", cocycle.scale}, {"values", values}};
}

nlohmann::json alignment_json(const AlignmentResult& result) {
  auto transforms = nlohmann::json::array();
  for (const auto& g : result.transforms) transforms.push_back({{"reflect", g.reflect}, {"rotation", g.rotation}});
  return {{"transforms", transforms},
          {"final_loss", result.final_loss()},
          {"iterations", result.iterations()},
          {"converged", result.converged},
          {"loss_trace", result.loss_trace}};
}

nlohmann::json subsamples_json(const SubsampleSet& set) {
  return {{"seed", set.seed}, {"subsamples", set.subsamples}};
}

}  // namespace circcoords
