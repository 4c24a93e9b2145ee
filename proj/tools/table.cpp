#include "table.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "squeezelab/gaussian_state.hpp"

namespace squeezelab::cli {

void Table::add_column(std::string name, std::vector<double> values) {
  if (!columns.empty() && values.size() != columns.front().size()) {
    throw std::logic_error("column '" + name + "' has a mismatched length");
  }
  names.push_back(std::move(name));
  columns.push_back(std::move(values));
}

std::size_t Table::rows() const {
  return columns.empty() ? 0 : columns.front().size();
}

Table to_table(const PhotonRecord& record) {
  Table t;
  t.metadata["window"] = record.windowing.window;
  t.metadata["window_shape"] =
      record.windowing.shape == WindowShape::kGaussian ? "gaussian" : "rectangular";
  t.metadata["n_windows"] = record.windowing.n_windows;
  t.metadata["mean_photons"] = record.mean_photons;
  t.metadata["seed"] = record.seed;
  std::vector<double> index(record.counts.size());
  std::vector<double> counts(record.counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    index[i] = static_cast<double>(i);
    counts[i] = static_cast<double>(record.counts[i]);
  }
  t.add_column("window", std::move(index));
  t.add_column("count", std::move(counts));
  return t;
}

Table to_table(const TimeSeries& series) {
  Table t;
  t.metadata["sample_rate"] = series.sample_rate;
  t.metadata["lo_phase"] = series.lo_phase;
  std::vector<double> time(series.samples.size());
  for (std::size_t i = 0; i < time.size(); ++i) {
    time[i] = static_cast<double>(i) / series.sample_rate;
  }
  t.add_column("time", std::move(time));
  t.add_column("sample", series.samples);
  return t;
}

Table to_table(const NoiseSpectrum& spectrum) {
  Table t;
  t.metadata["resolution_bandwidth"] = spectrum.resolution_bandwidth;
  t.metadata["averages"] = spectrum.averages;
  std::vector<double> db(spectrum.psd.size());
  for (std::size_t i = 0; i < db.size(); ++i) {
    db[i] = spectrum.psd[i] > 0.0 ? db_from_variance(spectrum.psd[i])
                                  : -std::numeric_limits<double>::infinity();
  }
  t.add_column("frequency", spectrum.frequencies);
  t.add_column("psd", spectrum.psd);
  t.add_column("psd_db", std::move(db));
  return t;
}

Table to_table(const BudgetCurve& curve) {
  Table t;
  t.add_column("frequency", curve.frequencies);
  t.add_column("shot", curve.shot);
  t.add_column("rpn", curve.rpn);
  t.add_column("total", curve.total);
  t.add_column("sql", curve.sql);
  return t;
}

std::string format_number(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

void write_csv(std::ostream& out, const Table& table) {
  for (const auto& [key, value] : table.metadata.items()) {
    out << "# " << key << ": " << value.dump() << '\n';
  }
  for (std::size_t c = 0; c < table.names.size(); ++c) {
    out << (c ? "," : "") << table.names[c];
  }
  out << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      out << (c ? "," : "") << format_number(table.columns[c][r]);
    }
    out << '\n';
  }
}

Table read_csv(std::istream& in) {
  Table table;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!header_seen && line.rfind("# ", 0) == 0) {
      const auto colon = line.find(": ");
      if (colon == std::string::npos) {
        throw std::runtime_error("malformed metadata line: " + line);
      }
      table.metadata[line.substr(2, colon - 2)] = Json::parse(line.substr(colon + 2));
      continue;
    }
    std::stringstream fields(line);
    std::string field;
    if (!header_seen) {
      while (std::getline(fields, field, ',')) table.names.push_back(field);
      table.columns.resize(table.names.size());
      header_seen = true;
      continue;
    }
    std::size_t c = 0;
    while (std::getline(fields, field, ',')) {
      if (c >= table.columns.size()) throw std::runtime_error("row has too many fields");
      double value = 0.0;
      const auto result =
          std::from_chars(field.data(), field.data() + field.size(), value);
      if (result.ec != std::errc()) {
        if (field == "inf") value = std::numeric_limits<double>::infinity();
        else if (field == "-inf") value = -std::numeric_limits<double>::infinity();
        else throw std::runtime_error("not a number: " + field);
      }
      table.columns[c++].push_back(value);
    }
    if (c != table.columns.size()) throw std::runtime_error("row has too few fields");
  }
  return table;
}

Json to_json(const Table& table) {
  Json out;
  out["metadata"] = table.metadata;
  Json columns = Json::object();
  for (std::size_t c = 0; c < table.names.size(); ++c) {
    Json values = Json::array();
    for (double v : table.columns[c]) {
      // JSON has no infinities; -inf only appears for empty PSD bins.
      if (std::isfinite(v)) values.push_back(v); else values.push_back(nullptr);
    }
    columns[table.names[c]] = std::move(values);
  }
  out["columns"] = std::move(columns);
  return out;
}

}  // namespace squeezelab::cli
