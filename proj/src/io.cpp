#include "netreg/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "netreg/errors.hpp"

namespace netreg::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

ValidationError parse_error(std::size_t line, const std::string& what) {
  return ValidationError(ValidationKind::Parse, "line " + std::to_string(line) + ": " + what);
}

double parse_number(std::string_view field, std::size_t line) {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw parse_error(line, "not a number: '" + std::string(field) + "'");
  }
  return value;
}

long long parse_integer(std::string_view field, std::size_t line) {
  long long value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw parse_error(line, "not an integer: '" + std::string(field) + "'");
  }
  return value;
}

// Reads nonblank lines together with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string>> read_lines(std::istream& in) {
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!trim(line).empty()) lines.emplace_back(number, line);
  }
  return lines;
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
T field_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? field<T>(j, key) : fallback;
}

Eigen::VectorXd vector_field(const json& j, const char* key) {
  const auto v = field<std::vector<double>>(j, key);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json to_array(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

template <class Fn>
auto wrap_domain(Fn&& fn) {
  try {
    return fn();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

std::string format_double(double v) { return fmt::format("{}", v); }

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(ValidationKind::Parse, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
    throw ValidationError(ValidationKind::Parse,
                          path.string() + " line " + std::to_string(line) + ": " + e.what());
  }
}

GraphonSpec graphon_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("graphon spec must be a JSON object");
  const auto kind = field<std::string>(j, "kind");
  const double scale = field_or<double>(j, "sparsity_scale", 1.0);
  return wrap_domain([&] {
    if (kind == "homophily") return GraphonSpec::homophily(scale);
    if (kind == "additive_logistic") return GraphonSpec::additive_logistic(scale);
    if (kind == "blockmodel") {
      const auto rows = field<std::vector<std::vector<double>>>(j, "theta");
      const auto l = rows.size();
      if (j.contains("l") && field<std::size_t>(j, "l") != l) {
        throw ConfigError("blockmodel: l does not match theta");
      }
      Eigen::MatrixXd theta(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l));
      for (std::size_t a = 0; a < l; ++a) {
        if (rows[a].size() != l) throw ConfigError("blockmodel: theta must be square");
        for (std::size_t b = 0; b < l; ++b) theta(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = rows[a][b];
      }
      return GraphonSpec::blockmodel(std::move(theta), scale);
    }
    if (kind == "grid") {
      const auto m = field<std::size_t>(j, "m");
      const auto values = field<std::vector<double>>(j, "values");
      if (m == 0 || values.size() != m * m) throw ConfigError("grid: values must hold m*m entries");
      Eigen::MatrixXd table(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) table(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = values[a * m + b];
      }
      return GraphonSpec::grid(std::move(table), scale);
    }
    throw ConfigError("unknown graphon kind '" + kind + "'");
  });
}

json to_json(const GraphonSpec& spec) {
  json j;
  j["kind"] = spec.kind();
  if (const auto* b = std::get_if<Blockmodel>(&spec.variant())) {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(b->theta.rows()));
    for (Eigen::Index a = 0; a < b->theta.rows(); ++a) {
      for (Eigen::Index c = 0; c < b->theta.cols(); ++c) rows[static_cast<std::size_t>(a)].push_back(b->theta(a, c));
    }
    j["theta"] = rows;
  } else if (const auto* g = std::get_if<GridGraphon>(&spec.variant())) {
    std::vector<double> values;
    for (Eigen::Index a = 0; a < g->values.rows(); ++a) {
      for (Eigen::Index c = 0; c < g->values.cols(); ++c) values.push_back(g->values(a, c));
    }
    j["m"] = g->values.rows();
    j["values"] = values;
  }
  j["sparsity_scale"] = spec.sparsity_scale();
  return j;
}

OutcomeSpec outcome_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("outcome spec must be a JSON object");
  OutcomeSpec spec;
  spec.beta = vector_field(j, "beta");
  spec.covariate_noise_sd = field<std::vector<double>>(j, "covariate_noise_sd");
  spec.epsilon_sd = field<double>(j, "epsilon_sd");

  std::vector<MeanPolynomial> coords;
  for (const auto& c : field<json>(j, "covariate_mean")) {
    const auto kind = field<std::string>(c, "kind");
    if (kind == "constant") {
      coords.push_back(MeanPolynomial::constant(field<double>(c, "a")));
    } else if (kind == "linear") {
      coords.push_back(MeanPolynomial::linear(field<double>(c, "a"), field<double>(c, "b")));
    } else if (kind == "quadratic") {
      coords.push_back(MeanPolynomial::quadratic(field<double>(c, "a"), field<double>(c, "b"), field<double>(c, "c")));
    } else {
      throw ConfigError("unknown covariate mean kind '" + kind + "'");
    }
  }
  spec.covariate_mean = CovariateMean(std::move(coords));

  const json lam = field_or<json>(j, "lambda", json{{"kind", "zero"}});
  const auto kind = field<std::string>(lam, "kind");
  if (kind == "zero") {
    spec.lambda = ZeroEffect{};
  } else if (kind == "block_effects") {
    spec.lambda = BlockEffects{field<std::vector<double>>(lam, "alpha")};
  } else if (kind == "linear_in_w") {
    spec.lambda = LinearInW{field<double>(lam, "rho")};
  } else if (kind == "peer_effects") {
    spec.lambda = PeerEffects{vector_field(lam, "gamma"), field<double>(lam, "delta")};
  } else {
    throw ConfigError("unknown lambda kind '" + kind + "'");
  }
  spec.validate();
  return spec;
}

json to_json(const OutcomeSpec& spec) {
  json j;
  j["beta"] = to_array(spec.beta);
  json coords = json::array();
  for (const auto& c : spec.covariate_mean.coordinates()) {
    json cj{{"kind", to_string(c.kind)}, {"a", c.a}};
    if (c.kind != MeanPolynomial::Kind::Constant) cj["b"] = c.b;
    if (c.kind == MeanPolynomial::Kind::Quadratic) cj["c"] = c.c;
    coords.push_back(cj);
  }
  j["covariate_mean"] = coords;
  j["covariate_noise_sd"] = spec.covariate_noise_sd;
  j["epsilon_sd"] = spec.epsilon_sd;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ZeroEffect>) {
          j["lambda"] = {{"kind", "zero"}};
        } else if constexpr (std::is_same_v<T, BlockEffects>) {
          j["lambda"] = {{"kind", "block_effects"}, {"alpha", v.alpha}};
        } else if constexpr (std::is_same_v<T, LinearInW>) {
          j["lambda"] = {{"kind", "linear_in_w"}, {"rho", v.rho}};
        } else {
          j["lambda"] = {{"kind", "peer_effects"}, {"gamma", to_array(v.gamma)}, {"delta", v.delta}};
        }
      },
      spec.lambda);
  return j;
}

ExperimentConfig experiment_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  ExperimentConfig config;
  config.graphon = graphon_from_json(field<json>(j, "graphon"));
  if (j.contains("outcome")) config.outcome = outcome_from_json(j.at("outcome"));
  config.sample_sizes = field_or<std::vector<std::size_t>>(j, "sample_sizes", {});
  config.replications = field_or<std::size_t>(j, "replications", 1);
  config.base_seed = field_or<std::uint64_t>(j, "base_seed", 0);
  config.memory_budget_mb = field_or<std::size_t>(j, "memory_budget_mb", config.memory_budget_mb);
  config.lattice_size = field_or<std::size_t>(j, "lattice_size", config.lattice_size);
  config.random_pairs = field_or<std::size_t>(j, "random_pairs", config.random_pairs);
  config.quadrature_nodes = field_or<std::size_t>(j, "quadrature_nodes", config.quadrature_nodes);
  for (const auto& name : field<std::vector<std::string>>(j, "checks")) {
    config.checks.push_back(parse_check(name));
  }

  if (j.contains("kernel")) {
    const json& k = j.at("kernel");
    if (k.is_string()) {
      if (k.get<std::string>() != "auto") throw ConfigError("kernel must be \"auto\" or an object");
      config.kernel.automatic = true;
    } else {
      config.kernel.kind = parse_kernel_kind(field_or<std::string>(k, "kind", "boxcar"));
      config.kernel.automatic = !k.contains("bandwidth") || field_or<bool>(k, "auto", false);
      config.kernel.bandwidth = field_or<double>(k, "bandwidth", 0.0);
      config.kernel.target_r = field_or<double>(k, "target_r", config.kernel.target_r);
      config.kernel.gamma_rate = field_or<double>(k, "gamma_rate", config.kernel.gamma_rate);
      config.kernel.target_decay = field_or<double>(k, "target_decay", config.kernel.target_decay);
    }
  }
  config.validate();
  return config;
}

json to_json(const EstimationResult& result) {
  json j;
  j["n"] = result.lambda_hat.size();
  j["beta_hat"] = to_array(result.beta_hat);
  j["kernel"] = {{"kind", to_string(result.kernel.kind)},
                 {"bandwidth", result.kernel.bandwidth},
                 {"gamma_rate", result.kernel.gamma_rate}};
  j["effective_pairs"] = result.effective_pairs;
  j["condition_number"] = result.condition_number;
  j["r_bar"] = result.r_bar;
  j["r_min"] = result.r_min;
  j["rate_threshold"] = result.rate_threshold;
  j["meets_rate"] = result.r_min > result.rate_threshold;
  j["bias_corrected"] = false;
  return j;
}

OutcomeTable read_outcome_csv(std::istream& in) {
  const auto lines = read_lines(in);
  if (lines.empty()) throw parse_error(1, "outcome file is empty");
  const auto header = split(lines.front().second);
  if (header.size() < 2 || header.front() != "y") {
    throw parse_error(lines.front().first, "outcome header must be y,x1,...,xk");
  }
  const std::size_t k = header.size() - 1;
  const std::size_t n = lines.size() - 1;
  OutcomeTable table;
  table.y.resize(static_cast<Eigen::Index>(n));
  table.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (std::size_t r = 0; r < n; ++r) {
    const auto& [number, text] = lines[r + 1];
    const auto cells = split(text);
    if (cells.size() != k + 1) {
      throw parse_error(number, "expected " + std::to_string(k + 1) + " fields, found " + std::to_string(cells.size()));
    }
    table.y[static_cast<Eigen::Index>(r)] = parse_number(cells[0], number);
    for (std::size_t c = 0; c < k; ++c) {
      table.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_number(cells[c + 1], number);
    }
  }
  return table;
}

AdjacencyMatrix read_adjacency_csv(std::istream& in, std::optional<std::size_t> n) {
  const auto lines = read_lines(in);
  if (lines.empty()) throw parse_error(1, "adjacency file is empty");
  const auto first = split(lines.front().second);
  if (first.size() == 2 && first[0] == "i" && first[1] == "j") {
    if (!n) throw ValidationError(ValidationKind::DimensionMismatch, "edge list needs the agent count");
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t r = 1; r < lines.size(); ++r) {
      const auto& [number, text] = lines[r];
      const auto cells = split(text);
      if (cells.size() != 2) throw parse_error(number, "edge rows must be i,j");
      const long long i = parse_integer(cells[0], number);
      const long long j = parse_integer(cells[1], number);
      if (i < 1 || j < 1) {
        throw ValidationError(ValidationKind::IndexOutOfRange,
                              "line " + std::to_string(number) + ": edge indices are 1-based");
      }
      edges.emplace_back(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1));
    }
    return AdjacencyMatrix::from_edges(*n, edges);
  }

  const std::size_t dim = lines.size();
  std::vector<std::uint8_t> bits(dim * dim);
  for (std::size_t r = 0; r < dim; ++r) {
    const auto& [number, text] = lines[r];
    const auto cells = split(text);
    if (cells.size() != dim) {
      throw ValidationError(ValidationKind::DimensionMismatch,
                            "line " + std::to_string(number) + ": dense adjacency row has " +
                                std::to_string(cells.size()) + " entries, expected " + std::to_string(dim));
    }
    for (std::size_t c = 0; c < dim; ++c) {
      const double v = parse_number(cells[c], number);
      if (v != 0.0 && v != 1.0) {
        throw ValidationError(ValidationKind::NonBinary,
                              "line " + std::to_string(number) + ": entry '" + std::string(cells[c]) + "' is not 0/1");
      }
      bits[r * dim + c] = static_cast<std::uint8_t>(v);
    }
  }
  if (n && *n != dim) {
    throw ValidationError(ValidationKind::DimensionMismatch,
                          "adjacency is " + std::to_string(dim) + "x" + std::to_string(dim) + " but outcome has " +
                              std::to_string(*n) + " agents");
  }
  return AdjacencyMatrix::from_dense(dim, std::move(bits));
}

Sample ingest_sample(const std::filesystem::path& outcome_csv, const std::filesystem::path& adjacency_csv) {
  std::ifstream outcome(outcome_csv);
  if (!outcome) throw ValidationError(ValidationKind::Parse, "cannot open " + outcome_csv.string());
  std::ifstream adjacency(adjacency_csv);
  if (!adjacency) throw ValidationError(ValidationKind::Parse, "cannot open " + adjacency_csv.string());

  OutcomeTable table = read_outcome_csv(outcome);
  const auto n = static_cast<std::size_t>(table.y.size());
  Sample sample;
  sample.n = n;
  sample.d = read_adjacency_csv(adjacency, n);
  sample.y = std::move(table.y);
  sample.x = std::move(table.x);
  return sample;
}

void write_outcome_csv(std::ostream& out, const Sample& sample) {
  out << "y";
  for (std::size_t c = 1; c <= sample.k(); ++c) out << ",x" << c;
  out << '\n';
  for (Eigen::Index i = 0; i < sample.y.size(); ++i) {
    out << format_double(sample.y[i]);
    for (Eigen::Index c = 0; c < sample.x.cols(); ++c) out << ',' << format_double(sample.x(i, c));
    out << '\n';
  }
}

void write_adjacency_dense_csv(std::ostream& out, const AdjacencyMatrix& d) {
  std::string line;
  for (std::size_t i = 0; i < d.size(); ++i) {
    line.clear();
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (j > 0) line += ',';
      line += d(i, j) ? '1' : '0';
    }
    out << line << '\n';
  }
}

void write_edge_list_csv(std::ostream& out, const AdjacencyMatrix& d) {
  out << "i,j\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = i + 1; j < d.size(); ++j) {
      if (d(i, j)) out << i + 1 << ',' << j + 1 << '\n';
    }
  }
}

void write_truth_csv(std::ostream& out, const Sample& sample) {
  out << "agent,w,lambda\n";
  for (std::size_t i = 0; i < sample.n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out << i + 1 << ',' << (sample.hidden_w ? format_double((*sample.hidden_w)[r]) : "") << ','
        << (sample.hidden_lambda ? format_double((*sample.hidden_lambda)[r]) : "") << '\n';
  }
}

void write_distance_csv(std::ostream& out, const CodegreeDistanceMatrix& delta) {
  for (std::size_t i = 0; i < delta.size(); ++i) {
    for (std::size_t j = 0; j < delta.size(); ++j) {
      if (j > 0) out << ',';
      out << format_double(delta(i, j));
    }
    out << '\n';
  }
}

void write_lambda_csv(std::ostream& out, const EstimationResult& result) {
  out << "agent,lambda_hat,r_hat\n";
  for (Eigen::Index i = 0; i < result.lambda_hat.size(); ++i) {
    out << i + 1 << ',' << format_double(result.lambda_hat[i]) << ',' << format_double(result.r_hat[i]) << '\n';
  }
}

void write_lemma_report_csv(std::ostream& out, const LemmaReport& report) {
  out << "pair_index,u,v,delta,d,bound,pass\n";
  for (const auto& r : report.rows) {
    out << r.index << ',' << format_double(r.u) << ',' << format_double(r.v) << ',' << format_double(r.delta) << ','
        << format_double(r.d) << ',' << format_double(r.bound) << ',' << (r.pass ? "true" : "false") << '\n';
  }
}

void write_raw_csv(std::ostream& out, const ExperimentReport& report) {
  out << "check,n,replication,seed,ok,value,signed_value,note\n";
  for (const auto& r : report.raw) {
    std::string note = r.note;
    std::replace(note.begin(), note.end(), ',', ';');
    std::replace(note.begin(), note.end(), '\n', ' ');
    out << to_string(r.check) << ',' << r.n << ',' << r.replication << ',' << r.seed << ',' << (r.ok ? 1 : 0) << ','
        << format_double(r.value) << ',' << format_double(r.signed_value) << ',' << note << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const ExperimentReport& report) {
  out << "check,n,successes,failures,median,bias,rmse,max_error\n";
  for (const auto& a : report.aggregates) {
    out << to_string(a.check) << ',' << a.n << ',' << a.successes << ',' << a.failures << ','
        << format_double(a.median) << ',' << format_double(a.bias) << ',' << format_double(a.rmse) << ','
        << format_double(a.max_error) << '\n';
  }
}

void write_summary(std::ostream& out, const ExperimentReport& report, bool include_runtime) {
  for (const auto& v : report.verdicts) {
    out << (v.pass ? "PASS " : "FAIL ") << to_string(v.check) << "  rule: " << v.rule << "  (" << v.detail << ")\n";
  }
  if (report.config_error) out << "CONFIG ERROR: too many failed replications\n";
  out << "overall: " << (report.passed() ? "PASS" : "FAIL") << '\n';
  if (include_runtime) out << fmt::format("runtime: {:.3f} s\n", report.runtime_seconds);
}

}  // namespace netreg::io
