#pragma once

// JSON configs and CSV data files.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "netreg/estimate.hpp"
#include "netreg/experiments.hpp"
#include "netreg/graphon.hpp"
#include "netreg/lemmas.hpp"
#include "netreg/simulate.hpp"

namespace netreg::io {

using json = nlohmann::json;

/// Parses a JSON file; syntax errors become ValidationError(Parse) with the
/// line number.
json load_json(const std::filesystem::path& path);

GraphonSpec graphon_from_json(const json& j);
json to_json(const GraphonSpec& spec);

OutcomeSpec outcome_from_json(const json& j);
json to_json(const OutcomeSpec& spec);

ExperimentConfig experiment_from_json(const json& j);

json to_json(const EstimationResult& result);

/// Outcome CSV: header y,x1,...,xk; one row per agent.
struct OutcomeTable {
  Eigen::VectorXd y;
  Eigen::MatrixXd x;
};
OutcomeTable read_outcome_csv(std::istream& in);

/// Dense 0/1 CSV, or an edge list with header "i,j" (1-based). `n` is the
/// number of agents expected from the outcome file; edge lists need it.
AdjacencyMatrix read_adjacency_csv(std::istream& in, std::optional<std::size_t> n);

/// Reads both files and checks that dimensions agree.
Sample ingest_sample(const std::filesystem::path& outcome_csv,
                     const std::filesystem::path& adjacency_csv);

void write_outcome_csv(std::ostream& out, const Sample& sample);
void write_adjacency_dense_csv(std::ostream& out, const AdjacencyMatrix& d);
void write_edge_list_csv(std::ostream& out, const AdjacencyMatrix& d);
/// Header: agent,w,lambda
void write_truth_csv(std::ostream& out, const Sample& sample);
void write_distance_csv(std::ostream& out, const CodegreeDistanceMatrix& delta);
/// Header: agent,lambda_hat,r_hat
void write_lambda_csv(std::ostream& out, const EstimationResult& result);
/// Header: pair_index,u,v,delta,d,bound,pass
void write_lemma_report_csv(std::ostream& out, const LemmaReport& report);
void write_raw_csv(std::ostream& out, const ExperimentReport& report);
void write_aggregate_csv(std::ostream& out, const ExperimentReport& report);
void write_summary(std::ostream& out, const ExperimentReport& report, bool include_runtime);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace netreg::io
