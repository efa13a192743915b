#pragma once

#include "qcg/io/json.hpp"
#include "qcg/scenarios.hpp"
#include "qcg/sdp/programs.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <exception>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace qcg::experiments {

inline constexpr std::uint64_t kStreamStates = 1;
inline constexpr std::uint64_t kStreamGenerator = 2;
inline constexpr std::uint64_t kStreamNoise = 3;

enum class GeneratorKind { kMaximallyEntangled, kMaximallyMixed, kRandom, kWerner };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::kMaximallyMixed;
  double lambda = 1.0 / 3.0;

  static GeneratorSpec me() { return {GeneratorKind::kMaximallyEntangled, 0.0}; }
  static GeneratorSpec mm() { return {GeneratorKind::kMaximallyMixed, 0.0}; }
  static GeneratorSpec random() { return {GeneratorKind::kRandom, 0.0}; }
  static GeneratorSpec werner(double lambda) { return {GeneratorKind::kWerner, lambda}; }

  // ME, MM, RAND, W (lambda = 1/3), W:<lambda>
  static GeneratorSpec parse(const std::string& text) {
    std::string s;
    for (char c : text) s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (s == "ME") return me();
    if (s == "MM") return mm();
    if (s == "RAND" || s == "RANDOM") return random();
    if (s == "W" || s == "WERNER") return werner(1.0 / 3.0);
    for (const std::string prefix : {"W:", "WERNER:"}) {
      if (s.rfind(prefix, 0) == 0) {
        const std::string number = s.substr(prefix.size());
        std::size_t used = 0;
        double lambda = 0.0;
        try {
          lambda = std::stod(number, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != number.size()) {
          throw Error(ErrorKind::kInvalidArgument, "bad Werner parameter in generator '" + text + "'");
        }
        return werner(lambda);
      }
    }
    throw Error(ErrorKind::kInvalidArgument, "unknown generator '" + text + "' (expected ME, MM, RAND or W:<lambda>)");
  }

  std::string label() const {
    switch (kind) {
      case GeneratorKind::kMaximallyEntangled: return "ME";
      case GeneratorKind::kMaximallyMixed: return "MM";
      case GeneratorKind::kRandom: return "RAND";
      case GeneratorKind::kWerner: break;
    }
    std::ostringstream os;
    os << "W(" << lambda << ")";
    return os.str();
  }

  void validate() const {
    if (kind == GeneratorKind::kWerner && !(lambda >= -1.0 / 3.0 - 1e-15 && lambda < 1.0)) {
      throw Error(ErrorKind::kOutOfRange, "Werner generator needs lambda in [-1/3, 1); lambda = 1 is not invertible");
    }
  }
};

inline Generator make_generator(const GeneratorSpec& spec, std::uint64_t seed) {
  spec.validate();
  switch (spec.kind) {
    case GeneratorKind::kMaximallyEntangled: return Generator::make(maximally_entangled_state(), spec.label());
    case GeneratorKind::kMaximallyMixed: return Generator::make(maximally_mixed_state(), spec.label());
    case GeneratorKind::kRandom: {
      Rng rng = rng_for(seed, kStreamGenerator);
      return Generator::make(random_density(4, rng), spec.label());
    }
    case GeneratorKind::kWerner: return Generator::make(werner_state(spec.lambda), spec.label());
  }
  throw Error(ErrorKind::kInvalidArgument, "make_generator: unknown kind");
}

inline ComplexMatrix sample_state(std::uint64_t seed, std::size_t index) {
  Rng rng = rng_for(seed, kStreamStates, index);
  return random_density(4, rng);
}

enum class OutputFormat { kCsv, kJson };

struct ExperimentConfig {
  int scenario = 1;
  GeneratorSpec generator = GeneratorSpec::mm();
  std::size_t samples = 10000;
  double t = 1.0;
  std::vector<double> t_grid;
  std::vector<double> lambda_grid;
  std::uint64_t seed = 0;
  std::string output_path;
  OutputFormat format = OutputFormat::kCsv;
  unsigned threads = 0;
  double coupling = 1.0;

  void validate() const {
    Scenario::make(scenario, coupling);
    generator.validate();
    if (samples < 1) throw Error(ErrorKind::kInvalidArgument, "samples must be at least 1");
    auto increasing = [](const std::vector<double>& g) {
      return std::adjacent_find(g.begin(), g.end(), [](double a, double b) { return !(a < b); }) == g.end();
    };
    if (!increasing(t_grid)) throw Error(ErrorKind::kInvalidArgument, "t grid must be strictly increasing");
    if (!increasing(lambda_grid)) throw Error(ErrorKind::kInvalidArgument, "lambda grid must be strictly increasing");
    for (double l : lambda_grid) GeneratorSpec::werner(l).validate();
  }
};

struct BenchmarkRecord {
  int scenario = 0;
  std::string generator;
  std::size_t state_id = 0;
  double t = 0.0;
  std::optional<double> lambda;
  double residual = 0.0;
  double condition_residual = 0.0;
  std::uint64_t seed = 0;
};

struct Summary {
  std::size_t count = 0;
  double min = 0.0;
  double q01 = 0.0;
  double median = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

// Linear interpolation between order statistics at position p (n - 1).
inline double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw Error(ErrorKind::kInvalidArgument, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

inline Summary summarize(const std::vector<BenchmarkRecord>& records) {
  std::vector<double> r;
  r.reserve(records.size());
  for (const auto& rec : records) r.push_back(rec.residual);
  Summary s;
  s.count = r.size();
  if (r.empty()) return s;
  s.min = *std::min_element(r.begin(), r.end());
  s.max = *std::max_element(r.begin(), r.end());
  s.q01 = quantile(r, 0.01);
  s.median = quantile(r, 0.5);
  double total = 0.0;
  for (double x : r) total += x;
  s.mean = total / static_cast<double>(r.size());
  return s;
}

// Contiguous chunks per worker; each index is written by exactly one worker, so results never depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct BenchmarkRun {
  std::vector<BenchmarkRecord> records;
  Summary summary;
  KrausChannel emergent;
  Generator generator;

  // Lowest residual, ties to the lowest state index.
  const BenchmarkRecord& best() const {
    if (records.empty()) throw Error(ErrorKind::kInvalidArgument, "best(): empty benchmark");
    const BenchmarkRecord* out = &records.front();
    for (const auto& r : records)
      if (r.residual < out->residual) out = &r;
    return *out;
  }
};

inline BenchmarkRun run_commutativity(const ExperimentConfig& config) {
  config.validate();
  const Scenario sc = Scenario::make(config.scenario, config.coupling);
  Generator gen = make_generator(config.generator, config.seed);
  KrausChannel gamma = petz_emergent(sc.unitary(config.t), sc.cg(), gen);
  const KrausChannel u = sc.unitary(config.t);

  std::vector<BenchmarkRecord> records(config.samples);
  parallel_for(config.samples, config.threads, [&](std::size_t i) {
    const ComplexMatrix rho = sample_state(config.seed, i);
    BenchmarkRecord& r = records[i];
    r.scenario = config.scenario;
    r.generator = gen.label;
    r.state_id = i;
    r.t = config.t;
    if (config.generator.kind == GeneratorKind::kWerner) r.lambda = config.generator.lambda;
    r.residual = commutation_residual(gamma, sc.cg(), u, rho);
    r.condition_residual = condition_residual(sc, rho_to_bloch(rho));
    r.seed = config.seed;
  });
  BenchmarkRun run{std::move(records), {}, std::move(gamma), std::move(gen)};
  run.summary = summarize(run.records);
  return run;
}

struct CrossMatrix {
  int scenario = 0;
  std::vector<std::string> generators;
  std::vector<std::string> states;
  RealMatrix residuals;  // (generator, evaluation state)
};

inline std::vector<GeneratorSpec> named_generators() {
  return {GeneratorSpec::me(), GeneratorSpec::mm(), GeneratorSpec::random(), GeneratorSpec::werner(1.0 / 3.0)};
}

inline CrossMatrix run_cross_generator_matrix(const ExperimentConfig& config) {
  config.validate();
  const Scenario sc = Scenario::make(config.scenario, config.coupling);
  const KrausChannel u = sc.unitary(config.t);
  std::vector<Generator> gens;
  for (const auto& spec : named_generators()) gens.push_back(make_generator(spec, config.seed));
  CrossMatrix m;
  m.scenario = config.scenario;
  m.residuals.resize(static_cast<Eigen::Index>(gens.size()), static_cast<Eigen::Index>(gens.size()));
  for (std::size_t g = 0; g < gens.size(); ++g) {
    m.generators.push_back(gens[g].label);
    m.states.push_back(gens[g].label);
    const KrausChannel gamma = petz_emergent(u, sc.cg(), gens[g]);
    for (std::size_t e = 0; e < gens.size(); ++e) {
      m.residuals(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(e)) =
          commutation_residual(gamma, sc.cg(), u, gens[e].rho);
    }
  }
  return m;
}

inline std::vector<double> linspace(double start, double stop, std::size_t count) {
  if (count == 0) throw Error(ErrorKind::kInvalidArgument, "linspace: count must be positive");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = count == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

// Residual of the Petz emergent map rebuilt at each t, for the given evaluation states.
inline std::vector<BenchmarkRecord> run_time_sweep(const ExperimentConfig& config,
                                                   const std::vector<std::pair<std::size_t, ComplexMatrix>>& states) {
  config.validate();
  if (config.scenario != 2 && config.scenario != 4) {
    throw Error(ErrorKind::kUnsupportedScenario, "time sweeps need a time-dependent scenario (2 or 4)");
  }
  if (config.t_grid.empty()) throw Error(ErrorKind::kInvalidArgument, "time sweep needs a t grid");
  const Scenario sc = Scenario::make(config.scenario, config.coupling);
  const Generator gen = make_generator(config.generator, config.seed);
  std::vector<BenchmarkRecord> out(config.t_grid.size() * states.size());
  parallel_for(config.t_grid.size(), config.threads, [&](std::size_t k) {
    const double t = config.t_grid[k];
    const KrausChannel u = sc.unitary(t);
    const KrausChannel gamma = petz_emergent(u, sc.cg(), gen);
    for (std::size_t s = 0; s < states.size(); ++s) {
      BenchmarkRecord& r = out[k * states.size() + s];
      r.scenario = config.scenario;
      r.generator = gen.label;
      r.state_id = states[s].first;
      r.t = t;
      if (config.generator.kind == GeneratorKind::kWerner) r.lambda = config.generator.lambda;
      r.residual = commutation_residual(gamma, sc.cg(), u, states[s].second);
      r.condition_residual = condition_residual(sc, rho_to_bloch(states[s].second));
      r.seed = config.seed;
    }
  });
  return out;
}

// Sweeps the best state of a benchmark run at config.t.
inline std::vector<BenchmarkRecord> run_time_sweep(const ExperimentConfig& config) {
  const BenchmarkRun bench = run_commutativity(config);
  const std::size_t best = bench.best().state_id;
  return run_time_sweep(config, {{best, sample_state(config.seed, best)}});
}

inline std::string werner_region(double lambda) {
  return lambda <= 1.0 / 3.0 + 1e-12 ? "W-separable" : "W-entangled";
}

inline std::vector<BenchmarkRecord> run_werner_sweep(const ExperimentConfig& config,
                                                     const std::vector<std::pair<std::size_t, ComplexMatrix>>& states) {
  config.validate();
  if (config.lambda_grid.empty()) throw Error(ErrorKind::kInvalidArgument, "Werner sweep needs a lambda grid");
  const Scenario sc = Scenario::make(config.scenario, config.coupling);
  const KrausChannel u = sc.unitary(config.t);
  std::vector<BenchmarkRecord> out(config.lambda_grid.size() * states.size());
  parallel_for(config.lambda_grid.size(), config.threads, [&](std::size_t k) {
    const double lambda = config.lambda_grid[k];
    const Generator gen = make_generator(GeneratorSpec::werner(lambda), config.seed);
    const KrausChannel gamma = petz_emergent(u, sc.cg(), gen);
    for (std::size_t s = 0; s < states.size(); ++s) {
      BenchmarkRecord& r = out[k * states.size() + s];
      r.scenario = config.scenario;
      r.generator = werner_region(lambda);
      r.state_id = states[s].first;
      r.t = config.t;
      r.lambda = lambda;
      r.residual = commutation_residual(gamma, sc.cg(), u, states[s].second);
      r.condition_residual = condition_residual(sc, rho_to_bloch(states[s].second));
      r.seed = config.seed;
    }
  });
  return out;
}

// Evaluation state: the best state of a W(1/3) benchmark at config.t.
inline std::vector<BenchmarkRecord> run_werner_sweep(const ExperimentConfig& config) {
  ExperimentConfig bench_config = config;
  bench_config.generator = GeneratorSpec::werner(1.0 / 3.0);
  const BenchmarkRun bench = run_commutativity(bench_config);
  const std::size_t best = bench.best().state_id;
  return run_werner_sweep(config, {{best, sample_state(config.seed, best)}});
}

struct TableCell {
  std::string table;
  int scenario = 0;
  std::string label;
  double value = std::nan("");
  std::optional<double> reference;
  double tolerance = 0.0;
  std::string status;
  bool within_tolerance = true;
  std::string detail;
  double seconds = 0.0;
};

inline TableCell make_cell(std::string table, int scenario, std::string label) {
  TableCell c;
  c.table = std::move(table);
  c.scenario = scenario;
  c.label = std::move(label);
  return c;
}

struct SdpTables {
  std::vector<TableCell> cells;

  bool all_within_tolerance() const {
    return std::all_of(cells.begin(), cells.end(), [](const TableCell& c) { return c.within_tolerance; });
  }

  std::vector<std::string> discrepancies() const {
    std::vector<std::string> out;
    for (const auto& c : cells)
      if (!c.within_tolerance) out.push_back(c.table + "/" + std::to_string(c.scenario) + "/" + c.label + ": " + c.detail);
    return out;
  }
};

struct SdpTableOptions {
  std::uint64_t seed = 0;
  double t = 1.0;
  double gamma_tol = 1e-3;
  sdp::SolverOptions solver;
};

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::vector<KrausChannel> robustness_noises(std::uint64_t seed, double t = 1.0) {
  Rng full = rng_for(seed, kStreamNoise, 0);
  Rng left = rng_for(seed, kStreamNoise, 1);
  Rng right = rng_for(seed, kStreamNoise, 2);
  const ComplexMatrix u_full = random_unitary(4, full);
  const ComplexMatrix u_left = random_unitary(2, left);
  const ComplexMatrix u_right = random_unitary(2, right);
  return {z_channel(t), KrausChannel::unitary(u_full), KrausChannel::unitary(tensor_product(u_left, u_right))};
}

inline SdpTables run_sdp_tables(const SdpTableOptions& options = {}) {
  using Clock = std::chrono::steady_clock;
  SdpTables out;
  auto run_cell = [&](TableCell cell, auto&& body) {
    const auto start = Clock::now();
    try {
      body(cell);
    } catch (const std::exception& e) {
      cell.status = "Error";
      cell.within_tolerance = false;
      cell.detail = e.what();
    }
    cell.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    out.cells.push_back(std::move(cell));
  };
  auto check = [](TableCell& cell) {
    if (cell.reference) cell.within_tolerance = std::abs(cell.value - *cell.reference) <= cell.tolerance;
  };
  const ComplexMatrix identity_choi = kraus_to_choi(KrausChannel::identity_channel(2)).matrix;

  for (int id = 1; id <= 4; ++id) {
    TableCell cell = make_cell("feasibility", id, "emergent channel");
    run_cell(cell, [&](TableCell& c) {
      const auto r = sdp::feasibility_emergent(Scenario::make(id), options.t, options.solver);
      c.status = sdp::to_string(r.status);
      if (id == 1) {
        c.reference = 0.0;
        c.tolerance = 1e-6;
        c.value = r.feasible() ? (r.emergent->matrix - identity_choi).cwiseAbs().maxCoeff() : std::nan("");
        c.detail = "max entrywise distance to the identity-channel Choi matrix";
        c.within_tolerance = r.feasible() && c.value <= c.tolerance;
      } else {
        c.within_tolerance = r.status == sdp::SdpStatus::kInfeasible;
        if (r.solution.certificate) c.detail = r.solution.certificate->kind + " certificate: " + r.solution.certificate->detail;
      }
    });
  }

  const std::vector<std::pair<GeneratorSpec, double>> closest_rows = {
      {GeneratorSpec::me(), 1.66}, {GeneratorSpec::mm(), 0.42}, {GeneratorSpec::werner(1.0 / 3.0), 0.55}};
  for (int id = 1; id <= 4; ++id) {
    const Scenario sc = Scenario::make(id);
    for (const auto& [spec, ref] : closest_rows) {
      TableCell cell = make_cell("closest_channel", id, spec.label());
      run_cell(cell, [&](TableCell& c) {
        const Generator gen = make_generator(spec, options.seed);
        const KrausChannel petz = petz_emergent(sc.unitary(options.t), sc.cg(), gen);
        const auto r = sdp::closest_state_independent(petz, sc, options.t, options.solver);
        c.status = sdp::to_string(r.status);
        if (id != 1) {
          c.within_tolerance = r.status == sdp::SdpStatus::kInfeasible;
          return;
        }
        c.reference = ref;
        c.tolerance = 0.02;
        if (!r.feasible()) {
          c.within_tolerance = false;
          return;
        }
        c.value = r.epsilon;
        check(c);
        const ConditionalState delta(r.emergent->dims, Form::kChoi, kraus_to_choi(petz).matrix - r.emergent->matrix);
        const double recomputed = sdp::diamond_norm(delta, options.solver);
        c.detail = "recomputed diamond distance " + format_double(recomputed);
        if (!c.within_tolerance) {
          c.detail = "DISCREPANCY: epsilon " + format_double(c.value) + " vs reference " + format_double(ref) + "; " +
                     c.detail;
        }
      });
    }
  }

  const std::vector<std::string> noise_labels = {"U_sigma_z(t=1)", "random unitary", "random product unitary"};
  const auto noises = robustness_noises(options.seed);
  for (std::size_t k = 0; k < noises.size(); ++k) {
    TableCell cell = make_cell("robustness", 1, noise_labels[k]);
    run_cell(cell, [&](TableCell& c) {
      const auto r = sdp::cg_robustness(Scenario::make(1), noises[k], options.t, options.solver);
      c.status = sdp::to_string(r.solution.status);
      c.value = r.robustness;
      c.reference = 0.0;
      c.tolerance = 1e-6;
      check(c);
    });
  }

  const std::vector<std::pair<int, double>> threshold_rows = {{2, 0.557}, {3, 0.249}, {4, 0.524}};
  for (const auto& [id, ref] : threshold_rows) {
    TableCell cell = make_cell("threshold", id, "gamma*");
    run_cell(cell, [&](TableCell& c) {
      const auto r = sdp::gamma_threshold(Scenario::make(id), options.t, options.gamma_tol, options.solver);
      c.status = "Optimal";
      c.value = r.gamma;
      c.reference = ref;
      c.tolerance = 0.01;
      check(c);
      c.detail = std::to_string(r.probes) + " bisection probes";
    });
  }
  return out;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void write_csv(std::ostream& os, const std::vector<BenchmarkRecord>& records) {
  os << "scenario,generator,state_id,t,lambda,residual,condition_residual,seed\n";
  for (const auto& r : records) {
    os << r.scenario << ',' << csv_escape(r.generator) << ',' << r.state_id << ',' << format_double(r.t) << ','
       << (r.lambda ? format_double(*r.lambda) : "") << ',' << format_double(r.residual) << ','
       << format_double(r.condition_residual) << ',' << r.seed << '\n';
  }
}

inline void write_csv(std::ostream& os, const CrossMatrix& m) {
  os << "scenario,generator,evaluation_state,residual\n";
  for (std::size_t g = 0; g < m.generators.size(); ++g) {
    for (std::size_t e = 0; e < m.states.size(); ++e) {
      os << m.scenario << ',' << csv_escape(m.generators[g]) << ',' << csv_escape(m.states[e]) << ','
         << format_double(m.residuals(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(e))) << '\n';
    }
  }
}

inline void write_csv(std::ostream& os, const SdpTables& tables) {
  os << "table,scenario,label,value,reference,tolerance,status,within_tolerance,detail\n";
  for (const auto& c : tables.cells) {
    os << c.table << ',' << c.scenario << ',' << csv_escape(c.label) << ',' << format_double(c.value) << ','
       << (c.reference ? format_double(*c.reference) : "") << ',' << format_double(c.tolerance) << ',' << c.status
       << ',' << (c.within_tolerance ? "true" : "false") << ',' << csv_escape(c.detail) << '\n';
  }
}

inline void write_summary_csv(std::ostream& os, const Summary& s) {
  os << "count,min,q01,median,mean,max\n"
     << s.count << ',' << format_double(s.min) << ',' << format_double(s.q01) << ',' << format_double(s.median) << ','
     << format_double(s.mean) << ',' << format_double(s.max) << '\n';
}

inline io::json to_json(const Summary& s) {
  return {{"count", s.count}, {"min", s.min}, {"q01", s.q01}, {"median", s.median}, {"mean", s.mean}, {"max", s.max}};
}

inline io::json to_json(const std::vector<BenchmarkRecord>& records) {
  io::json rows = io::json::array();
  for (const auto& r : records) {
    rows.push_back({{"scenario", r.scenario},
                    {"generator", r.generator},
                    {"state_id", r.state_id},
                    {"t", r.t},
                    {"lambda", r.lambda ? io::json(*r.lambda) : io::json(nullptr)},
                    {"residual", r.residual},
                    {"condition_residual", r.condition_residual},
                    {"seed", r.seed}});
  }
  return rows;
}

inline io::json to_json(const CrossMatrix& m) {
  io::json rows = io::json::array();
  for (Eigen::Index g = 0; g < m.residuals.rows(); ++g) {
    std::vector<double> row(m.residuals.cols());
    for (Eigen::Index e = 0; e < m.residuals.cols(); ++e) row[static_cast<std::size_t>(e)] = m.residuals(g, e);
    rows.push_back(row);
  }
  return {{"scenario", m.scenario}, {"generators", m.generators}, {"evaluation_states", m.states}, {"residuals", rows}};
}

inline io::json to_json(const SdpTables& tables) {
  io::json rows = io::json::array();
  for (const auto& c : tables.cells) {
    rows.push_back({{"table", c.table},
                    {"scenario", c.scenario},
                    {"label", c.label},
                    {"value", std::isnan(c.value) ? io::json(nullptr) : io::json(c.value)},
                    {"reference", c.reference ? io::json(*c.reference) : io::json(nullptr)},
                    {"tolerance", c.tolerance},
                    {"status", c.status},
                    {"within_tolerance", c.within_tolerance},
                    {"detail", c.detail},
                    {"seconds", c.seconds}});
  }
  return {{"cells", rows}, {"discrepancies", tables.discrepancies()}};
}

}  // namespace qcg::experiments
