#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "squeezelab/detection.hpp"
#include "squeezelab/interferometer.hpp"
#include "squeezelab/spectrum.hpp"

namespace squeezelab::cli {

using Json = nlohmann::ordered_json;

// Column-oriented numeric table with free-form metadata. This is the on-disk
// shape of every data file the tool writes.
struct Table {
  Json metadata = Json::object();
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  void add_column(std::string name, std::vector<double> values);
  std::size_t rows() const;
};

Table to_table(const PhotonRecord& record);
Table to_table(const TimeSeries& series);
Table to_table(const NoiseSpectrum& spectrum);
Table to_table(const BudgetCurve& curve);

// CSV: one "# key: value" line per metadata entry (values JSON-encoded), then
// a header row, then one row per sample. Numbers use the shortest
// representation that round-trips.
void write_csv(std::ostream& out, const Table& table);
Table read_csv(std::istream& in);

// {"metadata": {...}, "columns": {"name": [...], ...}}
Json to_json(const Table& table);

std::string format_number(double value);

}  // namespace squeezelab::cli
