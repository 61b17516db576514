#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "ssd/errors.hpp"
#include "ssd/models.hpp"
#include "ssd/rng.hpp"

namespace ssd {

// A validated, immutable column of observations with cached summary stats.
struct Dataset {
  std::vector<double> values;
  std::string label;
  Family family;
  double mean = 0.0;
  double variance = 0.0;  // unbiased, 0 for n == 1

  long n() const { return static_cast<long>(values.size()); }
};

inline Dataset make_dataset(std::vector<double> values, std::string label,
                            Family family) {
  if (values.empty()) throw data_error("dataset '" + label + "' is empty");
  DataSample probe{values};
  try {
    validate_data(family, probe);
  } catch (const invalid_input& e) {
    throw data_error("dataset '" + label + "': " + e.what());
  }
  Dataset d{std::move(values), std::move(label), family};
  double s = 0.0;
  for (double v : d.values) s += v;
  d.mean = s / static_cast<double>(d.n());
  if (d.n() > 1) {
    double ss = 0.0;
    for (double v : d.values) ss += (v - d.mean) * (v - d.mean);
    d.variance = ss / static_cast<double>(d.n() - 1);
  }
  return d;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

// One header row, comma delimiter, one numeric column selected by name.
inline Dataset load_csv(const std::string& path, const std::string& column,
                        Family family) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open " + path);
  std::string line;
  // leading '#' lines are provenance comments
  do {
    if (!std::getline(in, line)) throw data_error(path + " is empty");
  } while (!line.empty() && line[0] == '#');
  auto header = detail::split_csv_line(line);
  std::size_t col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i)
    if (detail::trim(header[i]) == column) col = i;
  if (col == header.size())
    throw data_error(path + ": no column named '" + column + "'");

  std::vector<double> values;
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (col >= cells.size())
      throw data_error(path + ":" + std::to_string(row) + ": missing column");
    std::string cell = detail::trim(cells[col]);
    try {
      std::size_t pos = 0;
      double v = std::stod(cell, &pos);
      if (pos != cell.size()) throw std::invalid_argument(cell);
      values.push_back(v);
    } catch (const std::exception&) {
      throw data_error(path + ":" + std::to_string(row) +
                       ": cannot parse '" + cell + "'");
    }
  }
  try {
    return make_dataset(std::move(values), column, family);
  } catch (const data_error& e) {
    throw data_error(path + ": " + e.what());
  }
}

// Round-trip formatting: integers print without a decimal point, reals with
// max_digits10 so load_csv(write_csv(d)) reproduces the values bit-exact.
inline void write_csv(const std::string& path, const Dataset& d,
                      const std::string& comment = "") {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write " + path);
  if (!comment.empty()) out << "# " << comment << "\n";
  out << d.label << "\n";
  out.precision(std::numeric_limits<double>::max_digits10);
  for (double v : d.values) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
      out << static_cast<long long>(v) << "\n";
    } else {
      out << v << "\n";
    }
  }
  if (!out) throw data_error("write to " + path + " failed");
}

// MLE-style plug-in truth: mean for Poisson/Bernoulli, (mean, unbiased
// variance) for Normal.
inline TrueParameter empirical_truth(const Dataset& d) {
  switch (d.family) {
    case Family::poisson:
      return PoissonTruth(d.mean);
    case Family::bernoulli:
      return BernoulliTruth(d.mean);
    case Family::normal:
      if (d.n() < 2 || !(d.variance > 0.0))
        throw data_error("dataset '" + d.label +
                         "': degenerate sample variance for normal truth");
      return NormalTruth(d.mean, d.variance);
  }
  throw data_error("unknown family");
}

// Synthetic stand-in drawn i.i.d. at a fixed truth.
inline Dataset make_surrogate(const TrueParameter& truth, long size,
                              std::mt19937_64& rng,
                              const std::string& label = "value") {
  if (size < 1) throw invalid_input("make_surrogate: size must be >= 1");
  DataSample x = sampling_draw(truth, size, rng);
  return make_dataset(std::move(x.values), label, family_of(truth));
}

}  // namespace ssd
