#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qres/qese_circuit.hpp"
#include "qres/ranking.hpp"

namespace qres::bench {

struct CellSpec {
  std::size_t keywords = 5;
  std::size_t slos = 10;
  std::size_t providers = 1;
  ranking::Scheme scheme = ranking::Scheme::Boolean;
  std::size_t reps = 5;
  QeseMode mode = QeseMode::Basic;
  std::uint64_t seed = 1;
};

struct CellResult {
  CellSpec spec;
  double mean_ms = 0;
  double stddev_ms = 0;
  std::vector<double> samples_ms;
};

// Builds a fresh in-process deployment under `work_dir`, then times `reps`
// customer submissions end to end. Usage on zero reps or bad counts.
CellResult run_cell(const CellSpec& spec, const std::filesystem::path& work_dir);

std::string csv_header();  // keywords,slos,providers,scheme,mean_ms,stddev_ms,reps
std::string csv_row(const CellResult& r);

// Coefficient of determination of the least-squares line through (x, y).
double r_squared(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qres::bench
