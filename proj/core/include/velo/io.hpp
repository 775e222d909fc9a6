#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>

#include "velo/exchange_sim.hpp"
#include "velo/histogram.hpp"
#include "velo/ledger.hpp"
#include "velo/sample_set.hpp"
#include "velo/sampling_study.hpp"
#include "velo/velocity.hpp"

namespace velo::io {

/// Canonical number rendering for CSV output (12 significant digits).
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, std::string_view text);

/// One-column CSV with a header, e.g. "age". A second weight column is
/// appended when the sample set is weighted.
void write_samples_csv(const std::filesystem::path& path, const SampleSet& samples,
                       const std::string& column_name);

/// Reads a 1- or 2-column CSV of value[,weight]; a non-numeric first line is
/// treated as a header. Throws DataError when no samples are found.
SampleSet read_samples_csv(const std::filesystem::path& path,
                           const std::string& time_unit = "iteration");

void write_entropy_csv(const std::filesystem::path& path,
                       std::span<const sim::EntropyPoint> trace);

/// "bin_center,density,fitted_density" rows for plotting a fit over data.
void write_fitplot_csv(const std::filesystem::path& path, const dist::Histogram& hist,
                       const std::function<double(double)>& fitted);

std::string histogram_json(const dist::Histogram& hist);
std::string exponential_fit_json(const dist::ExponentialFit& fit);
std::string powerlaw_fit_json(const dist::PowerLawFit& fit);
std::string velocity_json(const velocity::Estimate& estimate);
std::string run_summary_json(const sim::RunResult& result);
std::string study_json(const study::StudyResult& result);

std::string periods_csv(std::span<const ledger::PeriodReport> reports);

/// A fit document read back from fit JSON.
struct FitDocument {
  enum class Kind { Exponential, PowerLaw };
  Kind kind = Kind::Exponential;
  dist::ExponentialFit exponential;
  dist::PowerLawFit power_law;
};

FitDocument read_fit_json(const std::filesystem::path& path);

}  // namespace velo::io
