#pragma once

// On-disk formats. CSVs use '.' decimals and LF line endings; unknown or
// not-measured values are empty cells.
//
//   metrics_<mode>.csv     round,active_count,train_loss,eval_loss,eval_acc,eval_top5,phi,delta_max
//   surrogates_<mode>.csv  round,missing_client,surrogate_client
//   similarity_final.csv   m rows x m columns, no header
//   similarity/round_<t>.csv  same format after round t's update (optional)
//   analysis.json          one report object per mode

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "safari/analysis.hpp"
#include "safari/federation.hpp"
#include "safari/server.hpp"

namespace safari {

// Shortest round-trippable decimal form.
std::string format_number(double value);

void write_metrics_csv(std::ostream& out, const ModeRun& run);
void write_surrogates_csv(std::ostream& out, const ModeRun& run);
void write_similarity_csv(std::ostream& out, const SimilarityMatrix& matrix);

// Reads the format written by write_similarity_csv.
SimilarityMatrix read_similarity_csv(std::istream& in);

std::string analysis_json(std::span<const ModeRun> runs, std::span<const AnalysisReport> reports);

// Writes every file above into dir (created if missing).
void write_outputs(const std::filesystem::path& dir, std::span<const ModeRun> runs,
                   std::span<const AnalysisReport> reports);

}  // namespace safari
