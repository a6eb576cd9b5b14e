#include "safari/output.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "safari/errors.hpp"

namespace safari {

std::string format_number(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw Error("format_number failed");
  return std::string(buffer, end);
}

namespace {

std::string optional_cell(const std::optional<double>& value) {
  return value ? format_number(*value) : std::string();
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_metrics_csv(std::ostream& out, const ModeRun& run) {
  out << "round,active_count,train_loss,eval_loss,eval_acc,eval_top5,phi,delta_max\n";
  for (const RoundRecord& r : run.records) {
    out << r.round << ',' << r.active.size() << ',';
    if (r.evaluated) {
      out << format_number(r.train_loss) << ',' << format_number(r.eval.loss) << ','
          << format_number(r.eval.accuracy) << ',' << optional_cell(r.eval.top5);
    } else {
      out << ",,,";
    }
    out << ',' << optional_cell(r.phi) << ',' << format_number(r.delta_max) << '\n';
  }
}

void write_surrogates_csv(std::ostream& out, const ModeRun& run) {
  out << "round,missing_client,surrogate_client\n";
  for (const RoundRecord& r : run.records) {
    for (const auto& [missing, chosen] : r.surrogates) {
      out << r.round << ',' << missing << ',' << chosen << '\n';
    }
  }
}

void write_similarity_csv(std::ostream& out, const SimilarityMatrix& matrix) {
  for (std::size_t u = 0; u < matrix.size(); ++u) {
    for (std::size_t v = 0; v < matrix.size(); ++v) {
      if (v > 0) out << ',';
      if (u == v) {
        out << '0';
      } else {
        out << optional_cell(matrix.at(u, v));
      }
    }
    out << '\n';
  }
}

SimilarityMatrix read_similarity_csv(std::istream& in) {
  std::vector<std::vector<std::optional<double>>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::optional<double>> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string cell = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      row.push_back(cell.empty() ? std::nullopt : std::optional<double>(std::stod(cell)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  SimilarityMatrix matrix(rows.size());
  for (std::size_t u = 0; u < rows.size(); ++u) {
    if (rows[u].size() != rows.size()) throw ConfigError("similarity CSV is not square");
    for (std::size_t v = 0; v < rows.size(); ++v) {
      if (u != v && rows[u][v]) matrix.set(u, v, *rows[u][v]);
    }
  }
  return matrix;
}

std::string analysis_json(std::span<const ModeRun> runs, std::span<const AnalysisReport> reports) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (std::size_t k = 0; k < runs.size() && k < reports.size(); ++k) {
    const AnalysisReport& r = reports[k];
    nlohmann::ordered_json entry;
    entry["sigma_sq"] = r.sigma_sq;
    entry["sigma_sq_standard_error"] = r.sigma_sq_standard_error;
    entry["beta_sq"] = r.beta_sq;
    entry["zeta_sq"] = r.zeta_sq;
    entry["masked_zeta_sq"] = r.masked_zeta_sq;
    entry["smoothness_L"] = r.smoothness_L;
    entry["delta_max"] = r.delta_max;
    entry["learning_rate"] = r.learning_rate;
    entry["local_steps"] = r.local_steps;
    entry["gamma"] = r.gamma;
    entry["phi_measured"] = r.phi_measured;
    entry["phi"] = r.phi;
    entry["phi_standard_error"] = r.phi_standard_error;
    entry["rate_constants"] = {{"A", r.rate_A()}, {"B", r.rate_B()}, {"C", r.rate_C()}};
    doc[std::string(aggregation_mode_name(runs[k].mode))] = std::move(entry);
  }
  return doc.dump(2) + "\n";
}

void write_outputs(const std::filesystem::path& dir, std::span<const ModeRun> runs,
                   std::span<const AnalysisReport> reports) {
  std::filesystem::create_directories(dir);
  for (const ModeRun& run : runs) {
    const std::string name(aggregation_mode_name(run.mode));
    auto metrics = open_for_write(dir / ("metrics_" + name + ".csv"));
    write_metrics_csv(metrics, run);
    auto surrogates = open_for_write(dir / ("surrogates_" + name + ".csv"));
    write_surrogates_csv(surrogates, run);
  }
  if (!runs.empty()) {
    const ModeRun* chosen = &runs.front();
    for (const ModeRun& run : runs) {
      if (run.mode == AggregationMode::safari) chosen = &run;
    }
    auto similarity = open_for_write(dir / "similarity_final.csv");
    write_similarity_csv(similarity, chosen->similarity);
    if (!chosen->similarity_history.empty()) {
      std::filesystem::create_directories(dir / "similarity");
      for (std::size_t t = 0; t < chosen->similarity_history.size(); ++t) {
        auto round = open_for_write(dir / "similarity" / ("round_" + std::to_string(t) + ".csv"));
        write_similarity_csv(round, chosen->similarity_history[t]);
      }
    }
  }
  auto analysis = open_for_write(dir / "analysis.json");
  analysis << analysis_json(runs, reports);
}

}  // namespace safari
