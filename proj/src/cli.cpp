#include "zenoq/cli.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zenoq/fixedpoint.hpp"
#include "zenoq/io.hpp"
#include "zenoq/measurement.hpp"
#include "zenoq/reconcile.hpp"
#include "zenoq/spectra.hpp"

namespace zenoq {

namespace {

using nlohmann::json;

struct Opts {
  // benchmark configuration by default so every subcommand runs bare
  double g = kBenchmarkParams.g;
  double dtf = kBenchmarkParams.dtf;
  double dtm = kBenchmarkParams.dtm;
  std::string detector = "0,0,1";
  std::string initial;
  std::string target = "0,0,1";
  std::string grid;
  std::string out;
  std::string config;
  double eps = 1e-2;
  double tol = 1e-8;
  long budget = 20000;
  int n = 100;
  int ndirs = 64;
  int nradii = 5;
  int npoints = 100;
  std::uint64_t seed = 42;
  int workers = 1;
};

double parse_double(const std::string& key, const std::string& s) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ContractError("config: cannot parse '" + s + "' for key " + key);
  }
}

long parse_long(const std::string& key, const std::string& s) {
  try {
    size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ContractError("config: cannot parse '" + s + "' for key " + key);
  }
}

std::vector<double> split_doubles(const std::string& what, const std::string& s,
                                  char sep, size_t expect) {
  std::vector<double> out;
  size_t start = 0;
  while (true) {
    const size_t end = s.find(sep, start);
    const std::string tok = s.substr(start, end == std::string::npos ? end : end - start);
    out.push_back(parse_double(what, tok));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  if (out.size() != expect)
    throw ContractError(what + ": expected " + std::to_string(expect) +
                        " values separated by '" + sep + "', got '" + s + "'");
  return out;
}

Bloch parse_triplet(const std::string& what, const std::string& s) {
  const std::vector<double> v = split_doubles(what, s, ',', 3);
  return Bloch(v[0], v[1], v[2]);
}

ScanGrid parse_grid(const std::string& s) {
  // lo:hi:n per axis, axes separated by commas: g, dtf, dtm
  std::vector<std::string> axes;
  size_t start = 0;
  while (true) {
    const size_t end = s.find(',', start);
    axes.push_back(s.substr(start, end == std::string::npos ? end : end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  if (axes.size() != 3)
    throw ContractError("grid: expected three axis specs lo:hi:n, got '" + s + "'");
  ScanGrid grid;
  double lows[3], highs[3];
  int counts[3];
  for (int a = 0; a < 3; ++a) {
    const std::vector<double> v = split_doubles("grid axis", axes[static_cast<size_t>(a)], ':', 3);
    lows[a] = v[0];
    highs[a] = v[1];
    counts[a] = static_cast<int>(v[2]);
    if (counts[a] < 1 || v[2] != counts[a])
      throw ContractError("grid: point count must be a positive integer");
  }
  grid.g_lo = lows[0];
  grid.g_hi = highs[0];
  grid.g_n = counts[0];
  grid.dtf_lo = lows[1];
  grid.dtf_hi = highs[1];
  grid.dtf_n = counts[1];
  grid.dtm_lo = lows[2];
  grid.dtm_hi = highs[2];
  grid.dtm_n = counts[2];
  return grid;
}

std::map<std::string, std::string> load_config(const std::string& path) {
  std::map<std::string, std::string> cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw ContractError("config: cannot open " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ContractError("config: line " + std::to_string(lineno) +
                          " is not key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw ContractError("config: empty key on line " + std::to_string(lineno));
    cfg[key] = val;
  }
  return cfg;
}

// Command-line flags win; config fills in only what was not given. Keys are
// flag names without the dashes. Keys that no subcommand uses are rejected.
void apply_config(const CLI::App* sub, Opts& o,
                  const std::map<std::string, std::string>& cfg) {
  const std::map<std::string, std::function<void(const std::string&)>> setters = {
      {"g", [&](const std::string& v) { o.g = parse_double("g", v); }},
      {"dtf", [&](const std::string& v) { o.dtf = parse_double("dtf", v); }},
      {"dtm", [&](const std::string& v) { o.dtm = parse_double("dtm", v); }},
      {"detector", [&](const std::string& v) { o.detector = v; }},
      {"initial", [&](const std::string& v) { o.initial = v; }},
      {"target", [&](const std::string& v) { o.target = v; }},
      {"grid", [&](const std::string& v) { o.grid = v; }},
      {"out", [&](const std::string& v) { o.out = v; }},
      {"eps", [&](const std::string& v) { o.eps = parse_double("eps", v); }},
      {"tol", [&](const std::string& v) { o.tol = parse_double("tol", v); }},
      {"budget", [&](const std::string& v) { o.budget = parse_long("budget", v); }},
      {"n", [&](const std::string& v) { o.n = static_cast<int>(parse_long("n", v)); }},
      {"ndirs",
       [&](const std::string& v) { o.ndirs = static_cast<int>(parse_long("ndirs", v)); }},
      {"nradii",
       [&](const std::string& v) { o.nradii = static_cast<int>(parse_long("nradii", v)); }},
      {"npoints",
       [&](const std::string& v) { o.npoints = static_cast<int>(parse_long("npoints", v)); }},
      {"seed",
       [&](const std::string& v) { o.seed = static_cast<std::uint64_t>(parse_long("seed", v)); }},
      {"workers",
       [&](const std::string& v) { o.workers = static_cast<int>(parse_long("workers", v)); }},
  };
  for (const auto& [key, val] : cfg) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ContractError("config: unknown key '" + key + "'");
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) continue;  // legal key, unused by this subcommand
    if (opt->count() > 0) continue;  // flag wins
    it->second(val);
  }
}

json cplx(const Complex& z) { return json::array({z.real(), z.imag()}); }

json op2_json(const Op2& m) {
  return json::array({m(0, 0).real(), m(0, 0).imag(), m(0, 1).real(), m(0, 1).imag(),
                      m(1, 0).real(), m(1, 0).imag(), m(1, 1).real(), m(1, 1).imag()});
}

json bloch_json(const Bloch& b) { return json::array({b.x(), b.y(), b.z()}); }

const char* class_name(EigenClass c) {
  switch (c) {
    case EigenClass::kFixed:
      return "fixed";
    case EigenClass::kAlmostFixed:
      return "almost_fixed";
    default:
      return "transient";
  }
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty())
    std::cout << content;
  else
    atomic_write(out, content);
}

int do_spectrum(const Opts& o) {
  const ModelParams p{o.g, o.dtf, o.dtm};
  const Bloch det = parse_triplet("detector", o.detector);
  const QubitState rho_d = QubitState::from_bloch(det);
  const SuperOp ch = cycle_channel(p, rho_d);
  const SpectralData sd = spectral_decompose(ch);
  const CptpDiagnostics diag = validate_cptp(ch);

  json j;
  j["params"] = json{{"g", p.g}, {"dtf", p.dtf}, {"dtm", p.dtm}};
  j["detector"] = bloch_json(det);
  json vals = json::array(), ops = json::array(), res = json::array(),
       cls = json::array();
  for (int k = 0; k < 4; ++k) {
    vals.push_back(cplx(sd.values[k]));
    ops.push_back(op2_json(sd.eigen_ops[k]));
    res.push_back(sd.residuals[k]);
    cls.push_back(class_name(sd.classes[k]));
  }
  j["eigenvalues"] = vals;
  j["eigen_ops"] = ops;
  j["residuals"] = res;
  j["classification"] = cls;
  j["defective"] = sd.defective;
  j["min_gap"] = sd.min_gap();
  try {
    j["fixed_point"] = bloch_json(brouwer_fixed_point(ch).bloch());
  } catch (const NumericalError&) {
    j["fixed_point"] = nullptr;
  }
  j["diagnostics"] = json{{"trace_dev", diag.trace_dev},
                          {"min_choi_eig", diag.min_choi_eig},
                          {"herm_dev", diag.herm_dev}};
  if (det.x() == 0.0 && det.y() == 0.0 && det.z() == 1.0) {
    const SuperOp ref = analytic_superop(p);
    json rows = json::array();
    for (int r = 0; r < 4; ++r) {
      json row = json::array();
      for (int c = 0; c < 4; ++c) row.push_back(std::abs(ref(r, c) - ch(r, c)));
      rows.push_back(row);
    }
    j["reference_dev"] = json{{"by_entry", rows},
                              {"max", (ref - ch).cwiseAbs().maxCoeff()}};
  }
  emit(o.out, j.dump(2) + "\n");
  return 0;
}

int do_scan(const Opts& o) {
  ScanGrid grid;
  if (!o.grid.empty()) grid = parse_grid(o.grid);
  grid.detector = parse_triplet("detector", o.detector);
  const std::vector<ScanRecord> recs = zeno_scan(grid, o.eps, o.workers);
  const std::string csv = scan_csv(recs);
  if (o.out.empty()) {
    std::cout << csv;
  } else {
    atomic_write(o.out, csv);
    std::cout << "flagged " << recs.size() << " of " << grid.points()
              << " grid points\n";
  }
  return 0;
}

int do_sweep(const Opts& o) {
  const ModelParams p{o.g, o.dtf, o.dtm};
  const std::vector<ScanRecord> recs = detector_sweep(p, o.ndirs, o.nradii, o.workers);
  emit(o.out, scan_csv(recs));
  return 0;
}

int do_design(const Opts& o) {
  SearchConfig cfg;
  cfg.tol = o.tol;
  cfg.budget = o.budget;
  cfg.seed = o.seed;
  const Bloch tb = parse_triplet("target", o.target);
  const DesignResult r = freeze_design(QubitState::from_bloch(tb), cfg);

  json j;
  j["target"] = bloch_json(tb);
  j["params"] = json{{"g", r.params.g}, {"dtf", r.params.dtf}, {"dtm", r.params.dtm}};
  j["detector"] = bloch_json(r.detector.bloch());
  j["detector_matrix"] = op2_json(r.detector.matrix());
  j["residual"] = r.residual;
  j["eigen_moduli"] = r.eigen_moduli;
  j["attractive"] = r.attractive;
  j["converged"] = r.converged;
  j["evaluations"] = r.evaluations;
  emit(o.out, j.dump(2) + "\n");
  return 0;
}

int do_trajectory(const Opts& o) {
  const ModelParams p{o.g, o.dtf, o.dtm};
  const QubitState det = QubitState::from_bloch(parse_triplet("detector", o.detector));
  const std::string init = o.initial.empty() ? "1,0,0" : o.initial;
  const QubitState rho0 = QubitState::from_bloch(parse_triplet("initial", init));
  if (o.n < 0) throw ContractError("trajectory: n must be nonnegative");
  const Trajectory tr = evolve_n(cycle_channel(p, det), rho0, o.n);
  emit(o.out, trajectory_csv(tr.states));
  return 0;
}

int do_kraus(const Opts& o) {
  const ModelParams p{o.g, o.dtf, o.dtm};
  const QubitState det = QubitState::from_bloch(parse_triplet("detector", o.detector));
  const SuperOp ch = cycle_channel(p, det);
  const KrausSet ks = kraus_from_channel(ch);
  const PovmSet pv = povm_from_kraus(ks);
  const std::string init = o.initial.empty() ? "0,0,0" : o.initial;
  const QubitState rho0 = QubitState::from_bloch(parse_triplet("initial", init));
  const std::vector<double> probs = outcome_probabilities(pv, rho0);

  json j;
  j["params"] = json{{"g", p.g}, {"dtf", p.dtf}, {"dtm", p.dtm}};
  j["detector"] = bloch_json(det.bloch());
  json kj = json::array(), ej = json::array(), pj = json::array(),
       post = json::array();
  for (size_t r = 0; r < ks.ops.size(); ++r) {
    kj.push_back(op2_json(ks.ops[r]));
    ej.push_back(op2_json(pv.elements[r]));
    pj.push_back(probs[r]);
    if (probs[r] > 1e-12)
      post.push_back(bloch_json(
          post_measurement_state(ks, static_cast<int>(r), rho0).bloch()));
    else
      post.push_back(nullptr);
  }
  j["kraus"] = kj;
  j["povm"] = ej;
  j["initial"] = bloch_json(rho0.bloch());
  j["probabilities"] = pj;
  j["post_measurement"] = post;
  j["completeness_dev"] = ks.completeness_dev();
  j["roundtrip_dev"] = (channel_from_kraus(ks) - ch).cwiseAbs().maxCoeff();
  emit(o.out, j.dump(2) + "\n");
  return 0;
}

int do_reconcile(const Opts& o) {
  const json j = reconcile_report(o.npoints, o.seed);
  emit(o.out, j.dump(2) + "\n");
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Repeated-measurement qubit channel toolkit"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* cmd = nullptr;
    Opts o;
    int (*fn)(const Opts&) = nullptr;
  };
  std::vector<Sub> subs(7);

  auto add_params = [](CLI::App* c, Opts& o) {
    c->add_option("--g", o.g, "Coupling strength (level-splitting units)");
    c->add_option("--dtf", o.dtf, "Free-evolution window");
    c->add_option("--dtm", o.dtm, "Measurement window");
  };
  auto add_common = [](CLI::App* c, Opts& o) {
    c->add_option("--out", o.out, "Output path (atomic write); stdout if omitted");
    c->add_option("--config", o.config, "key=value config file; flags win");
  };

  subs[0].fn = do_spectrum;
  subs[0].cmd = app.add_subcommand(
      "spectrum", "Eigenvalues, eigen-operators, and diagnostics of one channel");
  add_params(subs[0].cmd, subs[0].o);
  subs[0].cmd->add_option("--detector", subs[0].o.detector,
                          "Detector Bloch vector x,y,z");
  add_common(subs[0].cmd, subs[0].o);

  subs[1].fn = do_scan;
  subs[1].cmd = app.add_subcommand(
      "scan", "Flag near-degenerate unit eigenvalues over a parameter grid");
  subs[1].cmd->add_option("--grid", subs[1].o.grid,
                          "glo:ghi:gn,dtflo:dtfhi:dtfn,dtmlo:dtmhi:dtmn");
  subs[1].cmd->add_option("--eps", subs[1].o.eps, "Flagging threshold on |lambda-1|");
  subs[1].cmd->add_option("--detector", subs[1].o.detector,
                          "Detector Bloch vector x,y,z");
  subs[1].cmd->add_option("--workers", subs[1].o.workers, "Worker threads");
  add_common(subs[1].cmd, subs[1].o);

  subs[2].fn = do_sweep;
  subs[2].cmd = app.add_subcommand(
      "sweep-detector", "Fixed-point response over detector states");
  add_params(subs[2].cmd, subs[2].o);
  subs[2].cmd->add_option("--ndirs", subs[2].o.ndirs, "Bloch directions (Fibonacci)");
  subs[2].cmd->add_option("--nradii", subs[2].o.nradii, "Radial steps per direction");
  subs[2].cmd->add_option("--workers", subs[2].o.workers, "Worker threads");
  add_common(subs[2].cmd, subs[2].o);

  subs[3].fn = do_design;
  subs[3].cmd = app.add_subcommand(
      "design", "Search couplings and detector freezing a target state");
  subs[3].cmd->add_option("--target", subs[3].o.target, "Target Bloch vector x,y,z");
  subs[3].cmd->add_option("--tol", subs[3].o.tol, "Residual declared converged");
  subs[3].cmd->add_option("--budget", subs[3].o.budget, "Channel evaluation budget");
  subs[3].cmd->add_option("--seed", subs[3].o.seed, "Search seed");
  add_common(subs[3].cmd, subs[3].o);

  subs[4].fn = do_trajectory;
  subs[4].cmd = app.add_subcommand("trajectory", "Bloch trajectory under n cycles");
  add_params(subs[4].cmd, subs[4].o);
  subs[4].cmd->add_option("--detector", subs[4].o.detector,
                          "Detector Bloch vector x,y,z");
  subs[4].cmd->add_option("--initial", subs[4].o.initial,
                          "Initial Bloch vector x,y,z (default 1,0,0)");
  subs[4].cmd->add_option("--n", subs[4].o.n, "Cycle count");
  add_common(subs[4].cmd, subs[4].o);

  subs[5].fn = do_kraus;
  subs[5].cmd = app.add_subcommand(
      "kraus", "Kraus decomposition and induced POVM of one channel");
  add_params(subs[5].cmd, subs[5].o);
  subs[5].cmd->add_option("--detector", subs[5].o.detector,
                          "Detector Bloch vector x,y,z");
  subs[5].cmd->add_option("--initial", subs[5].o.initial,
                          "State for outcome probabilities (default 0,0,0)");
  add_common(subs[5].cmd, subs[5].o);

  subs[6].fn = do_reconcile;
  subs[6].cmd = app.add_subcommand(
      "reconcile", "Compare tabulated reference values against the channel");
  subs[6].cmd->add_option("--npoints", subs[6].o.npoints, "Random sample points");
  subs[6].cmd->add_option("--seed", subs[6].o.seed, "Sampling seed");
  add_common(subs[6].cmd, subs[6].o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    for (Sub& s : subs) {
      if (!app.got_subcommand(s.cmd)) continue;
      apply_config(s.cmd, s.o, load_config(s.o.config));
      return s.fn(s.o);
    }
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace zenoq
