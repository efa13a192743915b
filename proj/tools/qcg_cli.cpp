#include "qcg/qcg.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <numbers>

namespace {

using namespace qcg;
using namespace qcg::experiments;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

// Accepts plain numbers and multiples of pi ("pi", "2pi", "0.5pi").
double parse_scalar(const std::string& token, const std::string& s_in) {
  std::string s = s_in;
  double factor = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    factor = std::numbers::pi;
    s.erase(s.size() - 2);
    if (s.empty()) return factor;
    if (s == "-") return -factor;
    if (s.back() == '*') s.pop_back();
  }
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw Error(ErrorKind::kInvalidArgument, "cannot parse number '" + token + "'");
  return value * factor;
}

// Accepts 1.5, 2pi, 2*pi, pi/2, -1/3.
double parse_number(const std::string& token) {
  const auto slash = token.find('/');
  if (slash == std::string::npos) return parse_scalar(token, token);
  const double den = parse_scalar(token, token.substr(slash + 1));
  if (den == 0.0) throw Error(ErrorKind::kInvalidArgument, "division by zero in '" + token + "'");
  return parse_scalar(token, token.substr(0, slash)) / den;
}

// start:stop:count (inclusive) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text) {
  if (text.empty()) return {};
  std::vector<std::string> parts;
  const char sep = text.find(':') != std::string::npos ? ':' : ',';
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, sep);) parts.push_back(item);
  if (sep == ':') {
    if (parts.size() != 3) throw Error(ErrorKind::kInvalidArgument, "grid must be start:stop:count");
    const double count = parse_number(parts[2]);
    if (count < 1 || count != std::floor(count)) throw Error(ErrorKind::kInvalidArgument, "grid count must be a positive integer");
    return linspace(parse_number(parts[0]), parse_number(parts[1]), static_cast<std::size_t>(count));
  }
  std::vector<double> out;
  for (const auto& p : parts) out.push_back(parse_number(p));
  return out;
}

struct Common {
  int scenario = 2;
  std::string generator = "MM";
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  std::string t = "1";
  std::string t_grid;
  std::string lambda_grid;
  std::string out;
  std::string format = "csv";
  double tol = 1e-8;
  unsigned threads = 0;

  ExperimentConfig config() const {
    ExperimentConfig c;
    c.scenario = scenario;
    c.generator = GeneratorSpec::parse(generator);
    c.samples = samples;
    c.seed = seed;
    c.t = parse_number(t);
    c.t_grid = parse_grid(t_grid);
    c.lambda_grid = parse_grid(lambda_grid);
    c.output_path = out;
    c.format = format == "json" ? OutputFormat::kJson : OutputFormat::kCsv;
    c.threads = threads;
    return c;
  }

  sdp::SolverOptions solver() const {
    sdp::SolverOptions o;
    o.feas_tol = tol;
    o.gap_tol = tol;
    return o;
  }
};

template <class WriteCsv>
void emit(const Common& common, const io::json& as_json, WriteCsv&& write_csv_fn) {
  std::ofstream file;
  if (!common.out.empty()) {
    file.open(common.out);
    if (!file) throw Error(ErrorKind::kInvalidArgument, "cannot write '" + common.out + "'");
  }
  std::ostream& os = common.out.empty() ? std::cout : file;
  if (common.format == "json") {
    os << as_json.dump(2) << '\n';
  } else {
    write_csv_fn(os);
  }
}

KrausChannel channel_from_spec(const std::string& spec) {
  if (spec == "id" || spec == "identity") return KrausChannel::identity_channel(2);
  if (spec == "sz" || spec == "sigmaz") return KrausChannel::unitary(pauli::z());
  if (spec.rfind("dep:", 0) == 0) return depolarizing_channel(2, parse_number(spec.substr(4)));
  return io::kraus_channel_from_json(io::read_json_file(spec));
}

ConditionalState choi_from_spec(const std::string& spec) {
  if (spec == "id" || spec == "identity" || spec == "sz" || spec == "sigmaz" || spec.rfind("dep:", 0) == 0) {
    return kraus_to_choi(channel_from_spec(spec));
  }
  return io::choi_from_json(io::read_json_file(spec));
}

void add_common(CLI::App* app, Common& c, bool with_samples, bool with_grids) {
  app->add_option("--scenario", c.scenario, "scenario id (1-4)")->check(CLI::Range(1, 4));
  app->add_option("--generator", c.generator, "ME, MM, RAND or W:<lambda>");
  app->add_option("--seed", c.seed, "64-bit seed");
  app->add_option("--t", c.t, "evolution time (number or multiple of pi)");
  app->add_option("--out", c.out, "output path (default stdout)");
  app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--tol", c.tol, "solver feasibility and gap tolerance");
  app->add_option("--threads", c.threads, "worker threads (0 = hardware)");
  if (with_samples) app->add_option("--samples", c.samples, "number of random states")->check(CLI::PositiveNumber);
  if (with_grids) {
    app->add_option("--t-grid", c.t_grid, "start:stop:count or comma list");
    app->add_option("--lambda-grid", c.lambda_grid, "start:stop:count or comma list");
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Coarse-graining emergent dynamics toolkit"};
  app.require_subcommand(1);
  Common c;

  auto* bench = app.add_subcommand("bench", "commutativity benchmark over random states");
  add_common(bench, c, true, false);
  auto* matrix = app.add_subcommand("matrix", "4x4 generator x evaluation-state residual matrix");
  add_common(matrix, c, false, false);
  auto* timesweep = app.add_subcommand("timesweep", "residual of the best state against t");
  add_common(timesweep, c, true, true);
  auto* werner = app.add_subcommand("wernersweep", "residual of the best state against the Werner parameter");
  add_common(werner, c, true, true);
  auto* tables = app.add_subcommand("sdp-tables", "reproduce the feasibility, epsilon, robustness and threshold tables");
  add_common(tables, c, false, false);
  double gamma_tol = 1e-3;
  tables->add_option("--gamma-tol", gamma_tol, "bisection width for thresholds");
  auto* petz = app.add_subcommand("petz", "dump the Petz emergent channel");
  add_common(petz, c, false, false);
  auto* diamond = app.add_subcommand("diamond", "diamond distance between two channels");
  add_common(diamond, c, false, false);
  std::string chan_a = "id";
  std::string chan_b = "sz";
  diamond->add_option("--a", chan_a, "channel: id, sz, dep:<p> or a JSON file");
  diamond->add_option("--b", chan_b, "channel: id, sz, dep:<p> or a JSON file");
  auto* single = app.add_subcommand("sdp", "solve one program and print the solution");
  add_common(single, c, false, false);
  std::string program = "feasibility";
  double gamma = 0.5;
  std::string noise = "z";
  single->add_option("--program", program, "feasibility, closest, robustness, compatibilize or threshold")
      ->check(CLI::IsMember({"feasibility", "closest", "robustness", "compatibilize", "threshold"}));
  single->add_option("--gamma", gamma, "mixing weight for compatibilize");
  single->add_option("--noise", noise, "robustness noise: z, unitary or product");

  CLI11_PARSE(app, argc, argv);

  if (bench->parsed()) {
    const BenchmarkRun run = run_commutativity(c.config());
    emit(c, {{"records", to_json(run.records)}, {"summary", to_json(run.summary)}},
         [&](std::ostream& os) { write_csv(os, run.records); });
    std::cerr << "scenario " << c.scenario << " generator " << run.generator.label << ": ";
    write_summary_csv(std::cerr, run.summary);
    return kExitOk;
  }
  if (matrix->parsed()) {
    const CrossMatrix m = run_cross_generator_matrix(c.config());
    emit(c, to_json(m), [&](std::ostream& os) { write_csv(os, m); });
    return kExitOk;
  }
  if (timesweep->parsed()) {
    ExperimentConfig cfg = c.config();
    if (cfg.t_grid.empty()) cfg.t_grid = linspace(0.0, 2.0 * std::numbers::pi, 50);
    const auto records = run_time_sweep(cfg);
    emit(c, {{"records", to_json(records)}}, [&](std::ostream& os) { write_csv(os, records); });
    return kExitOk;
  }
  if (werner->parsed()) {
    ExperimentConfig cfg = c.config();
    if (cfg.lambda_grid.empty()) cfg.lambda_grid = linspace(-1.0 / 3.0, 0.99, 50);
    const auto records = run_werner_sweep(cfg);
    emit(c, {{"records", to_json(records)}}, [&](std::ostream& os) { write_csv(os, records); });
    return kExitOk;
  }
  if (tables->parsed()) {
    SdpTableOptions opt;
    opt.seed = c.seed;
    opt.t = parse_number(c.t);
    opt.gamma_tol = gamma_tol;
    opt.solver = c.solver();
    const SdpTables result = run_sdp_tables(opt);
    emit(c, to_json(result), [&](std::ostream& os) { write_csv(os, result); });
    for (const auto& d : result.discrepancies()) std::cerr << "discrepancy: " << d << '\n';
    return result.all_within_tolerance() ? kExitOk : kExitError;
  }
  if (petz->parsed()) {
    const ExperimentConfig cfg = c.config();
    const Scenario sc = Scenario::make(cfg.scenario);
    const Generator gen = make_generator(cfg.generator, cfg.seed);
    const KrausChannel gamma_petz = petz_emergent(sc.unitary(cfg.t), sc.cg(), gen);
    const PetzMap recovery = petz_map(sc.cg(), gen.rho);
    std::cout << io::json{{"scenario", cfg.scenario},
                          {"generator", gen.label},
                          {"t", cfg.t},
                          {"support_dim", recovery.support_dim},
                          {"kraus", io::to_json(gamma_petz)},
                          {"choi", io::to_json(kraus_to_choi(gamma_petz))}}
                     .dump(2)
              << '\n';
    return kExitOk;
  }
  if (diamond->parsed()) {
    const ConditionalState a = choi_from_spec(chan_a);
    const ConditionalState b = choi_from_spec(chan_b);
    if (a.dims.dim_a != b.dims.dim_a || a.dims.dim_b != b.dims.dim_b) {
      throw Error(ErrorKind::kDimensionMismatch, "channels have different dimensions");
    }
    const auto r = sdp::solve_diamond_norm(a.matrix - b.matrix, a.dims, c.solver());
    std::cout << io::json{{"diamond_distance", r.value}, {"status", sdp::to_string(r.solution.status)}}.dump(2) << '\n';
    return kExitOk;
  }
  if (single->parsed()) {
    const ExperimentConfig cfg = c.config();
    const Scenario sc = Scenario::make(cfg.scenario);
    io::json out = {{"program", program}, {"scenario", cfg.scenario}, {"t", cfg.t}};
    sdp::SdpStatus status = sdp::SdpStatus::kOptimal;
    if (program == "feasibility") {
      const auto r = sdp::feasibility_emergent(sc, cfg.t, c.solver());
      status = r.status;
      out["solution"] = io::to_json(r.solution);
    } else if (program == "closest") {
      const Generator gen = make_generator(cfg.generator, cfg.seed);
      const auto r = sdp::closest_state_independent(petz_emergent(sc.unitary(cfg.t), sc.cg(), gen), sc, cfg.t, c.solver());
      status = r.status;
      out["generator"] = gen.label;
      out["epsilon"] = r.feasible() ? io::json(r.epsilon) : io::json(nullptr);
      out["solution"] = io::to_json(r.solution);
    } else if (program == "robustness") {
      const auto noises = robustness_noises(cfg.seed, cfg.t);
      const std::size_t k = noise == "z" ? 0 : noise == "unitary" ? 1 : noise == "product" ? 2 : 3;
      if (k == 3) throw Error(ErrorKind::kInvalidArgument, "noise must be z, unitary or product");
      const auto r = sdp::cg_robustness(sc, noises[k], cfg.t, c.solver());
      status = r.solution.status;
      out["robustness"] = r.robustness;
      out["solution"] = io::to_json(r.solution);
    } else if (program == "compatibilize") {
      const auto r = sdp::compatibilize(sc, cfg.t, gamma, c.solver());
      status = r.status;
      out["gamma"] = gamma;
      out["solution"] = io::to_json(r.solution);
    } else {
      const auto r = sdp::gamma_threshold(sc, cfg.t, 1e-3, c.solver());
      out["gamma"] = r.gamma;
      out["probes"] = r.probes;
    }
    out["status"] = sdp::to_string(status);
    std::cout << out.dump(2) << '\n';
    if (status == sdp::SdpStatus::kInfeasible) return kExitInfeasible;
    return status == sdp::SdpStatus::kOptimal ? kExitOk : kExitError;
  }
  return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const qcg::Error& e) {
    std::cerr << "error (" << qcg::to_string(e.kind()) << "): " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kExitError;
}
