#pragma once

#include <cstddef>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "circcoords/alignment.hpp"
#include "circcoords/circular_coords.hpp"
#include "circcoords/data_prep.hpp"
#include "circcoords/density_sampling.hpp"
#include "circcoords/persistence.hpp"

namespace circcoords {

/// Numeric table; the first row is treated as a header when any field fails to parse.
struct CsvTable {
  std::vector<std::string> header;
  std::size_t columns = 0;
  std::vector<double> values;  // row-major

  std::size_t rows() const noexcept { return columns == 0 ? 0 : values.size() / columns; }
  std::optional<std::size_t> column_index(const std::string& name) const;
  std::vector<double> column(std::size_t c) const;
  /// All columns except `skip`, row-major.
  std::vector<double> without_column(std::optional<std::size_t> skip) const;
};

CsvTable read_csv(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

/// point_index,angle_radians,flags
void write_coordinates_csv(const std::filesystem::path& path, const CircularCoordinate& coord);

/// Coordinates plus true_parameter column.
void write_synthetic_csv(const std::filesystem::path& path, const SyntheticSample& sample);

/// One entry per bar: {dim, birth, death (null when infinite), persistence}.
nlohmann::json barcode_json(const std::vector<PersistenceBar>& bars);
nlohmann::json cocycle_json(const IntegerCocycle& cocycle);
nlohmann::json alignment_json(const AlignmentResult& result);
nlohmann::json subsamples_json(const SubsampleSet& set);

}  // namespace circcoords
