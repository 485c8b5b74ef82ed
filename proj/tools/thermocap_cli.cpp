// thermocap: batch front end.  Exit codes: 0 success, 1 numeric or
// tolerance failure, 2 usage error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "run_config.hpp"
#include "thermocap/errors.hpp"
#include "thermocap/extremality.hpp"
#include "thermocap/fock.hpp"
#include "thermocap/fock_perturbation.hpp"
#include "thermocap/parallel.hpp"
#include "thermocap/perturbation.hpp"
#include "thermocap/serialization.hpp"

namespace tc = thermocap;
using cli::RunConfig;
using cli::UsageError;
using tc::Json;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Output {
  std::string format;
  std::string path;
};

void add_output(RunConfig& cfg, Output& out, const std::string& default_format) {
  out.format = default_format;
  cfg.add("--format", out.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cfg.add("--out", out.path, "output file (default stdout)");
}

void emit(const Output& out, const std::string& text) {
  if (out.path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out.path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + out.path);
  f << text;
}

Json envelope(const std::string& command, const RunConfig& cfg) {
  Json j;
  j["schema_version"] = tc::kSchemaVersion;
  j["command"] = command;
  j["config"] = cfg.resolved();
  j["certifying"] = cfg.certifying();
  return j;
}

using Row = std::vector<std::string>;

std::string csv(const std::string& table, const RunConfig& cfg,
                const Row& header, const std::vector<Row>& rows) {
  std::ostringstream os;
  os << tc::csv_schema_header(table) << "\n";
  os << "# config " << cfg.resolved().dump() << "\n";
  auto line = [&](const Row& r) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return os.str();
}

std::string fmt(double x) { return tc::format_double(x); }
std::string fmt(bool b) { return b ? "true" : "false"; }
std::string fmt(int i) { return std::to_string(i); }

// "a:b:step", inclusive of b up to rounding.
std::vector<double> parse_range(const std::string& s) {
  std::vector<double> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad grid '" + s + "', expected start:stop:step");
    }
  }
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
    throw UsageError("bad grid '" + s + "', expected start:stop:step");
  }
  const long n = std::lround(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1;
  std::vector<double> g;
  // 12 significant digits drops the accumulated binary noise of i * step.
  char buf[32];
  for (long i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%.12g", parts[0] + i * parts[2]);
    g.push_back(std::stod(buf));
  }
  return g;
}

// Options shared by everything that needs N_s0 or N_c.
struct NcParams {
  std::string order = "two-mode";
  std::string labeling = "reference";
  double noise_lo = 0.01;
  double noise_hi = 0.36;
  int scan_points = 71;

  void add(RunConfig& cfg) {
    cfg.add("--order", order, "perturbation order: single or two-mode")
        ->check(CLI::IsMember({"single", "two-mode"}));
    cfg.add("--labeling", labeling, "normal-mode labeling: reference or channel")
        ->check(CLI::IsMember({"reference", "channel"}));
    cfg.add("--noise-lo", noise_lo, "lower end of the N_c scan");
    cfg.add("--noise-hi", noise_hi, "upper end of the N_c scan");
    cfg.add("--scan-points", scan_points, "points in the N_c scan");
  }
  tc::NcOptions options() const {
    tc::NcOptions o;
    o.ns0.order = tc::parse_order(order);
    o.ns0.shift.labeling = tc::parse_labeling(labeling);
    o.noise_lo = noise_lo;
    o.noise_hi = noise_hi;
    o.scan_points = scan_points;
    return o;
  }
};

struct QuadParams {
  tc::ChannelOptions channel;
  void add(RunConfig& cfg) {
    cfg.add("--radial", channel.quadrature.radial, "radial quadrature nodes");
    cfg.add("--angular", channel.quadrature.angular, "angular quadrature nodes");
    cfg.add("--cutoff", channel.quadrature.cutoff, "radial cutoff in units of sqrt(N)");
    cfg.add("--max-trace-error", channel.max_trace_error,
            "largest accepted trace change through the channel", true);
  }
};

struct EnsembleParams {
  double energy;
  int samples = 1000;
  std::uint64_t seed = 7;
  std::string generator = "squeeze-rotate";
  bool wide_squeeze = false;

  explicit EnsembleParams(double e) : energy(e) {}
  void add(RunConfig& cfg, bool with_energy = true) {
    if (with_energy) cfg.add("--energy", energy, "energy per mode, N_s + 1/2");
    cfg.add("--samples", samples, "probe count");
    cfg.add("--seed", seed, "generator seed");
    cfg.add("--generator", generator, "squeeze-rotate or correlated-two-mode")
        ->check(CLI::IsMember({"squeeze-rotate", "correlated-two-mode"}));
    cfg.add("--wide-squeeze", wide_squeeze, "allow squeezes up to 10 instead of 2");
  }
  tc::ProbeEnsemble ensemble(int modes) const {
    tc::ProbeEnsemble e;
    e.modes = modes;
    e.e_bar = energy;
    e.count = samples;
    e.seed = seed;
    e.kind = tc::parse_generator(generator);
    e.max_squeeze = wide_squeeze ? 10.0 : 2.0;
    return e;
  }
};

// --- commands --------------------------------------------------------------

struct Command {
  explicit Command(CLI::App* a) : app(a), cfg(a) {}
  virtual ~Command() = default;
  virtual int run() = 0;
  CLI::App* app;
  RunConfig cfg;
  Output out;
};

struct CapacityCmd : Command {
  double noise = std::nan("");
  std::string grid;
  NcParams nc;

  explicit CapacityCmd(CLI::App* a) : Command(a) {
    cfg.add("--noise", noise, "channel noise N");
    cfg.add("--grid", grid, "noise grid start:stop:step");
    nc.add(cfg);
    add_output(cfg, out, "csv");
  }

  int run() override {
    std::vector<double> ns;
    if (!grid.empty()) {
      if (!std::isnan(noise)) throw UsageError("give --noise or --grid, not both");
      ns = parse_range(grid);
    } else if (!std::isnan(noise)) {
      ns = {noise};
    } else {
      throw UsageError("capacity needs --noise or --grid");
    }
    std::sort(ns.begin(), ns.end());
    for (double x : ns) {
      if (!(x >= 0.0)) throw UsageError("noise must be >= 0");
    }
    const auto opts = nc.options();
    std::vector<tc::CapacityCertificate> rows(ns.size());
    tc::parallel_for(ns.size(), [&](std::size_t i) {
      rows[i] = tc::certify_capacity(ns[i], opts);
    });
    if (out.format == "json") {
      Json j = envelope("capacity", cfg);
      j["rows"] = Json::array();
      for (const auto& r : rows) j["rows"].push_back(tc::to_json(r));
      emit(out, j.dump(2) + "\n");
    } else {
      std::vector<Row> body;
      for (const auto& r : rows) {
        body.push_back({fmt(r.noise), fmt(r.q), fmt(r.certified), fmt(r.nc),
                        fmt(r.ns0), fmt(r.mi_bound)});
      }
      emit(out, csv("capacity", cfg,
                    {"noise", "q", "certified", "nc", "ns0", "mi_bound"}, body));
    }
    return kOk;
  }
};

struct CiCurveCmd : Command {
  std::vector<double> noise{0.05, 0.1, 0.175};
  double ns_lo = 1e-3;
  double ns_hi = 1e4;
  int points = 57;

  explicit CiCurveCmd(CLI::App* a) : Command(a) {
    cfg.add("--noise", noise, "comma-separated noise levels");
    cfg.add("--ns-lo", ns_lo, "smallest N_s");
    cfg.add("--ns-hi", ns_hi, "largest N_s");
    cfg.add("--points", points, "log-spaced N_s points");
    add_output(cfg, out, "csv");
  }

  int run() override {
    const auto grid = tc::log_grid(ns_lo, ns_hi, points);
    std::vector<double> levels = noise;
    std::sort(levels.begin(), levels.end());
    struct Pt { double noise, ns, ic, mi; };
    std::vector<Pt> pts(levels.size() * grid.size());
    tc::parallel_for(pts.size(), [&](std::size_t i) {
      const double n = levels[i / grid.size()];
      const double s = grid[i % grid.size()];
      const tc::ThermalChannel ch(n);
      const auto cm = tc::thermal_cm(s, 1);
      pts[i] = {n, s, tc::coherent_information(cm, ch),
                tc::mutual_information(cm, ch)};
    });
    if (out.format == "json") {
      Json j = envelope("ci-curve", cfg);
      j["rows"] = Json::array();
      for (const auto& p : pts) {
        j["rows"].push_back({{"noise", p.noise}, {"ns", p.ns},
                             {"ic", tc::number(p.ic)}, {"mi", tc::number(p.mi)}});
      }
      emit(out, j.dump(2) + "\n");
    } else {
      std::vector<Row> body;
      for (const auto& p : pts) body.push_back({fmt(p.noise), fmt(p.ns), fmt(p.ic), fmt(p.mi)});
      emit(out, csv("ci-curve", cfg, {"noise", "ns", "ic", "mi"}, body));
    }
    return kOk;
  }
};

struct NcCmd : Command {
  NcParams nc;
  double residual_tol = 1e-4;

  explicit NcCmd(CLI::App* a) : Command(a) {
    nc.add(cfg);
    cfg.add("--residual-tol", residual_tol, "accepted |residual| in bits", true);
    add_output(cfg, out, "json");
  }

  int run() override {
    const auto r = tc::solve_nc(nc.options());
    const bool ok = std::abs(r.residual) < residual_tol;
    if (out.format == "json") {
      Json j = envelope("nc", cfg);
      j["N_c"] = tc::number(r.nc);
      j["N_s0"] = tc::number(r.ns0);
      j["residual"] = tc::number(r.residual);
      j["detail"] = tc::to_json(r);
      j["caveat"] = tc::certification_caveat();
      j["pass"] = ok;
      emit(out, j.dump(2) + "\n");
    } else {
      emit(out, csv("nc", cfg, {"nc", "ns0", "mutual_information", "bound", "residual"},
                    {{fmt(r.nc), fmt(r.ns0), fmt(r.mutual_information),
                      fmt(r.bound), fmt(r.residual)}}));
    }
    return ok ? kOk : kFail;
  }
};

std::string verify_csv(const std::string& kind, const RunConfig& cfg,
                       const std::vector<Row>& rows) {
  return csv("verify-" + kind, cfg,
             {"config_hash", "kind", "modes", "samples", "violations", "extremum"},
             rows);
}

struct VerifyTraceCmd : Command {
  int modes = 2;
  EnsembleParams ens{1.5};
  double grid_step = 0.01;

  explicit VerifyTraceCmd(CLI::App* a) : Command(a) {
    cfg.add("--modes", modes, "modes per probe");
    ens.add(cfg);
    cfg.add("--grid-step", grid_step, "energy-split step of the diagonal grid (n = 2)");
    add_output(cfg, out, "json");
  }

  int run() override {
    const auto r = tc::verify_trace_bound(ens.ensemble(modes), grid_step);
    if (out.format == "json") {
      Json j = envelope("verify trace", cfg);
      j["ensemble"] = tc::to_json(ens.ensemble(modes));
      j["report"] = tc::to_json(r);
      j["pass"] = r.pass;
      emit(out, j.dump(2) + "\n");
    } else {
      const std::string h = cli::fnv1a_hex(cfg.resolved().dump());
      emit(out, verify_csv("trace", cfg,
                           {{h, "trace", fmt(modes), fmt(r.samples),
                             fmt(r.violations + r.grid_violations), fmt(r.max_t)}}));
    }
    return r.pass ? kOk : kFail;
  }
};

struct VerifyDirectionalCmd : Command {
  std::vector<int> modes{1, 2};
  double noise = 0.1;
  EnsembleParams ens{2.5};

  explicit VerifyDirectionalCmd(CLI::App* a) : Command(a) {
    cfg.add("--modes", modes, "comma-separated mode counts");
    cfg.add("--noise", noise, "channel noise N");
    ens.add(cfg);
    add_output(cfg, out, "json");
  }

  int run() override {
    bool pass = true;
    Json reports = Json::array();
    std::vector<Row> rows;
    const std::string h = cli::fnv1a_hex(cfg.resolved().dump());
    for (int n : modes) {
      const auto e = ens.ensemble(n);
      const auto r = tc::verify_directional(e, noise);
      pass &= r.pass;
      Json rj = tc::to_json(r);
      rj["ensemble"] = tc::to_json(e);
      reports.push_back(rj);
      rows.push_back({h, "directional", fmt(n), fmt(r.samples), fmt(r.violations),
                      fmt(r.max_derivative)});
    }
    if (out.format == "json") {
      Json j = envelope("verify directional", cfg);
      j["reports"] = reports;
      j["pass"] = pass;
      emit(out, j.dump(2) + "\n");
    } else {
      emit(out, verify_csv("directional", cfg, rows));
    }
    return pass ? kOk : kFail;
  }
};

struct VerifyLocalMaxCmd : Command {
  double ns = 2.0;
  double noise = 0.1;
  std::vector<int> modes{1, 2};
  std::vector<double> blend{0.01, 0.05, 0.1};
  EnsembleParams ens{0.0};
  NcParams nc;

  explicit VerifyLocalMaxCmd(CLI::App* a) : Command(a) {
    cfg.add("--ns", ns, "thermal mean photon number N_s");
    cfg.add("--noise", noise, "channel noise N");
    cfg.add("--modes", modes, "comma-separated mode counts");
    cfg.add("--blend", blend, "comma-separated blend weights t");
    ens.add(cfg, false);
    cfg.add("--order", nc.order, "order used to locate N_s0")
        ->check(CLI::IsMember({"single", "two-mode"}));
    cfg.add("--labeling", nc.labeling, "normal-mode labeling for N_s0")
        ->check(CLI::IsMember({"reference", "channel"}));
    add_output(cfg, out, "json");
  }

  int run() override {
    ens.energy = ns + 0.5;
    bool pass = true;
    Json reports = Json::array();
    std::vector<Row> rows;
    const std::string h = cli::fnv1a_hex(cfg.resolved().dump());
    for (int n : modes) {
      const auto e = ens.ensemble(n);
      const auto r = tc::verify_local_max(ns, noise, e, blend, nc.options().ns0);
      pass &= r.pass;
      Json rj = tc::to_json(r);
      rj["ensemble"] = tc::to_json(e);
      reports.push_back(rj);
      rows.push_back({h, "local-max", fmt(n), fmt(r.samples), fmt(r.positives),
                      fmt(r.max_difference)});
    }
    if (out.format == "json") {
      Json j = envelope("verify local-max", cfg);
      j["reports"] = reports;
      j["pass"] = pass;
      emit(out, j.dump(2) + "\n");
    } else {
      emit(out, verify_csv("local-max", cfg, rows));
    }
    return pass ? kOk : kFail;
  }
};

struct VerifyScanCmd : Command {
  double noise = 0.1;
  double ns_lo = 1e-3;
  double ns_hi = 1e3;
  int points = 61;
  std::string order = "two-mode";
  std::string labeling = "reference";
  std::string method = "moments";

  explicit VerifyScanCmd(CLI::App* a) : Command(a) {
    cfg.add("--noise", noise, "channel noise N");
    cfg.add("--ns-lo", ns_lo, "smallest N_s");
    cfg.add("--ns-hi", ns_hi, "largest N_s");
    cfg.add("--points", points, "log-spaced N_s points");
    cfg.add("--order", order, "single or two-mode")
        ->check(CLI::IsMember({"single", "two-mode"}));
    cfg.add("--labeling", labeling, "reference or channel")
        ->check(CLI::IsMember({"reference", "channel"}));
    cfg.add("--method", method, "series evaluation: automatic, moments or direct")
        ->check(CLI::IsMember({"automatic", "moments", "direct"}));
    add_output(cfg, out, "csv");
  }

  int run() override {
    tc::ShiftOptions so;
    so.labeling = tc::parse_labeling(labeling);
    so.method = tc::parse_series_method(method);
    const auto scan = tc::scan_delta_ci(noise, tc::log_grid(ns_lo, ns_hi, points),
                                        tc::parse_order(order), so);
    if (out.format == "json") {
      Json j = envelope("verify scan", cfg);
      j["report"] = tc::to_json(scan);
      try {
        tc::Ns0Options o;
        o.order = tc::parse_order(order);
        o.shift = so;
        j["ns0"] = tc::to_json(tc::find_ns0(noise, o));
      } catch (const tc::NoRootError&) {
        j["ns0"] = nullptr;
      }
      j["pass"] = scan.shape_ok;
      emit(out, j.dump(2) + "\n");
    } else {
      std::vector<Row> body;
      for (const auto& r : scan.rows) body.push_back({fmt(r.ns), fmt(r.delta_ci), fmt(r.sign)});
      emit(out, csv("delta-ci", cfg, {"ns", "delta_ci", "sign"}, body));
    }
    return scan.shape_ok ? kOk : kFail;
  }
};

struct OracleCiCmd : Command {
  double ns = 1.0;
  double noise = 0.1;
  int dim = 40;
  double tol = 1e-3;
  bool doubling = false;
  double doubling_tol = 1e-4;
  std::string dump_output;
  QuadParams quad;

  explicit OracleCiCmd(CLI::App* a) : Command(a) {
    cfg.add("--ns", ns, "thermal mean photon number N_s");
    cfg.add("--noise", noise, "channel noise N");
    cfg.add("--dim", dim, "Fock truncation d");
    cfg.add("--tol", tol, "accepted |Fock - Gaussian| in bits", true);
    cfg.add("--doubling", doubling, "also evaluate at 2d and report the change");
    cfg.add("--doubling-tol", doubling_tol, "accepted change under doubling", true);
    cfg.add("--dump-output", dump_output, "write the channel output density as JSON");
    quad.add(cfg);
    add_output(cfg, out, "json");
  }

  struct Fock {
    double output, exchange, ci, trace_error, deficit;
  };

  Fock fock_at(int d, tc::FockDensity* keep) const {
    const auto rho = tc::thermal_fock(ns, d);
    const auto outp = tc::apply_thermal_channel(rho, noise, quad.channel);
    if (keep) *keep = outp;
    Fock f;
    f.output = tc::von_neumann_entropy(outp);
    f.exchange = tc::exchange_entropy_fock(rho, noise, quad.channel);
    f.ci = f.output - f.exchange;
    f.trace_error = std::abs(outp.trace() - rho.trace());
    f.deficit = rho.truncation_deficit;
    return f;
  }

  int run() override {
    const tc::ThermalChannel ch(noise);
    const auto cm = tc::thermal_cm(ns, 1);
    const double g_out = tc::gaussian_entropy(tc::apply_channel(cm, ch));
    const double g_ex = tc::gaussian_entropy(tc::joint_after_channel(cm, ch));
    const double g_ci = tc::coherent_information(cm, ch);
    tc::FockDensity outp;
    const Fock f = fock_at(dim, &outp);
    if (!dump_output.empty()) {
      std::ofstream o(dump_output, std::ios::binary);
      if (!o) throw UsageError("cannot write " + dump_output);
      o << tc::to_json(outp).dump() << "\n";
    }
    bool pass = true;
    Json cmp = Json::array();
    auto add = [&](const char* name, double a, double o) {
      const double diff = std::abs(a - o);
      pass &= diff < tol;
      cmp.push_back({{"name", name}, {"analytic", a}, {"oracle", o},
                     {"abs_diff", diff}, {"tolerance", tol}, {"within_tolerance", diff < tol}});
    };
    add("coherent_information", g_ci, f.ci);
    add("output_entropy", g_out, f.output);
    add("exchange_entropy", g_ex, f.exchange);

    Json j = envelope("oracle ci", cfg);
    j["units"] = "bits";
    j["comparisons"] = cmp;
    j["truncation"] = {{"input_deficit", f.deficit},
                       {"channel_trace_error", f.trace_error},
                       {"quadrature", tc::to_json(quad.channel.quadrature)}};
    if (doubling) {
      const Fock f2 = fock_at(2 * dim, nullptr);
      const double change = std::max({std::abs(f2.ci - f.ci),
                                      std::abs(f2.output - f.output),
                                      std::abs(f2.exchange - f.exchange)});
      pass &= change < doubling_tol;
      j["doubling"] = {{"dim", 2 * dim}, {"coherent_information", f2.ci},
                       {"max_change", change}, {"tolerance", doubling_tol}};
    }
    j["pass"] = pass;
    if (out.format == "json") {
      emit(out, j.dump(2) + "\n");
    } else {
      std::vector<Row> body;
      for (const auto& c : cmp) {
        body.push_back({c["name"].get<std::string>(), fmt(c["analytic"].get<double>()),
                        fmt(c["oracle"].get<double>()), fmt(c["abs_diff"].get<double>())});
      }
      emit(out, csv("oracle-ci", cfg, {"quantity", "analytic", "oracle", "abs_diff"}, body));
    }
    return pass ? kOk : kFail;
  }
};

struct OraclePairCmd : Command {
  int j = 1;
  double ns = 1.0;
  double noise = 0.1;
  int dim = 30;
  std::string placement = "reference";
  double tol = 0.0;
  QuadParams quad;

  explicit OraclePairCmd(CLI::App* a) : Command(a) {
    cfg.add("--j", j, "pair-creation power, 1 or 2")->check(CLI::IsMember({1, 2}));
    cfg.add("--ns", ns, "thermal mean photon number N_s");
    cfg.add("--noise", noise, "channel noise N");
    cfg.add("--dim", dim, "Fock truncation d");
    cfg.add("--placement", placement, "mode carrying the number operator")
        ->check(CLI::IsMember({"reference", "channel"}));
    cfg.add("--tol", tol, "accepted residual (0 = 1e-6 for j = 1, 1e-5 for j = 2)", true);
    quad.add(cfg);
    add_output(cfg, out, "json");
  }

  int run() override {
    if (tol == 0.0) tol = j == 1 ? 1e-6 : 1e-5;
    const auto r = tc::check_pair_identity(
        j, ns, noise, dim,
        placement == "reference" ? tc::PairIdentityPlacement::reference
                                 : tc::PairIdentityPlacement::channel,
        quad.channel);
    const bool pass = r.residual < tol;
    Json o = envelope("oracle pair-identity", cfg);
    o["report"] = tc::to_json(r);
    o["tolerance"] = tol;
    o["pass"] = pass;
    if (out.format == "json") {
      emit(out, o.dump(2) + "\n");
    } else {
      emit(out, csv("oracle-pair-identity", cfg, {"j", "placement", "residual", "lhs_norm"},
                    {{fmt(r.j), placement, fmt(r.residual), fmt(r.lhs_norm)}}));
    }
    return pass ? kOk : kFail;
  }
};

struct OraclePerturbCmd : Command {
  std::string which = "single";
  tc::PerturbCompareConfig pc;
  std::string labeling = "reference";
  QuadParams quad;

  explicit OraclePerturbCmd(CLI::App* a) : Command(a) {
    quad.channel.max_trace_error = 1e-3;
    cfg.add("--case", which, "single or two-mode")
        ->check(CLI::IsMember({"single", "two-mode"}));
    cfg.add("--ns", pc.ns, "thermal mean photon number N_s");
    cfg.add("--noise", pc.noise, "channel noise N");
    cfg.add("--eps", pc.epsilon, "finite-difference amplitude");
    cfg.add("--dim", pc.dim, "Fock truncation d for output and joint states");
    cfg.add("--input-dim", pc.input_dim, "truncation for the input entropy");
    cfg.add("--rel-tol", pc.rel_tol, "accepted relative difference", true);
    cfg.add("--rank-tol", pc.rank_tol, "relative eigenvalue floor of the oracle");
    cfg.add("--labeling", labeling, "reference or channel")
        ->check(CLI::IsMember({"reference", "channel"}));
    quad.add(cfg);
    add_output(cfg, out, "json");
  }

  int run() override {
    pc.order = tc::parse_order(which);
    pc.shift.labeling = tc::parse_labeling(labeling);
    pc.channel = quad.channel;
    const auto r = tc::perturb_compare(pc);
    if (out.format == "json") {
      Json j = envelope("oracle perturb-compare", cfg);
      j["report"] = tc::to_json(r);
      j["pass"] = r.all_within;
      emit(out, j.dump(2) + "\n");
    } else {
      std::vector<Row> body;
      for (const auto& s : r.shifts) {
        body.push_back({s.name, fmt(s.analytic), fmt(s.oracle_fd),
                        fmt(s.oracle_coefficient), fmt(s.rel_diff),
                        fmt(s.within_tolerance)});
      }
      emit(out, csv("oracle-perturb-compare", cfg,
                    {"shift", "analytic", "oracle_fd", "oracle_coefficient", "rel_diff",
                     "within_tolerance"},
                    body));
    }
    return r.all_within ? kOk : kFail;
  }
};

struct OracleVacuumCmd : Command {
  double noise = 0.1;
  int dim = 40;
  double tol = 1e-4;
  QuadParams quad;

  explicit OracleVacuumCmd(CLI::App* a) : Command(a) {
    cfg.add("--noise", noise, "channel noise N");
    cfg.add("--dim", dim, "Fock truncation d");
    cfg.add("--tol", tol, "accepted |<n> - N|", true);
    quad.add(cfg);
    add_output(cfg, out, "json");
  }

  int run() override {
    const auto vac = tc::number_state(0, dim);
    const auto o = tc::apply_thermal_channel(vac, noise, quad.channel);
    double mean = 0.0;
    for (int n = 0; n < dim; ++n) mean += n * o.rho(n, n).real();
    const double diff = std::abs(mean - noise);
    const bool pass = diff < tol;
    Json j = envelope("oracle vacuum", cfg);
    j["analytic"] = noise;
    j["oracle"] = mean;
    j["abs_diff"] = diff;
    j["tolerance"] = tol;
    j["truncation"] = {{"channel_trace_error", std::abs(o.trace() - 1.0)},
                       {"quadrature", tc::to_json(quad.channel.quadrature)}};
    j["pass"] = pass;
    if (out.format == "json") {
      emit(out, j.dump(2) + "\n");
    } else {
      emit(out, csv("oracle-vacuum", cfg, {"noise", "mean_photons", "abs_diff"},
                    {{fmt(noise), fmt(mean), fmt(diff)}}));
    }
    return pass ? kOk : kFail;
  }
};

// Properties of a covariance matrix read from JSON.
struct CmCmd : Command {
  std::string in;
  double noise = 0.1;

  explicit CmCmd(CLI::App* a) : Command(a) {
    cfg.add("--in", in, "covariance matrix JSON {n, gamma}")->required();
    cfg.add("--noise", noise, "channel noise N");
    add_output(cfg, out, "json");
  }

  int run() override {
    std::ifstream f(in);
    if (!f) throw UsageError("cannot read " + in);
    Json src;
    try {
      src = Json::parse(f);
    } catch (const Json::parse_error& e) {
      throw UsageError("covariance matrix file is not valid JSON");
    }
    const auto cm = tc::cm_from_json(src);
    const auto v = tc::validate_cm(cm);
    Json j = envelope("cm", cfg);
    j["modes"] = cm.modes();
    j["valid"] = v.pass;
    j["min_nu"] = tc::number(v.min_nu);
    j["energy"] = tc::energy(cm);
    if (v.pass) {
      const tc::ThermalChannel ch(noise);
      j["symplectic_eigenvalues"] = tc::symplectic_eigenvalues(cm);
      j["trace_functional"] = tc::trace_functional(cm);
      j["entropy"] = tc::gaussian_entropy(cm);
      j["coherent_information"] = tc::coherent_information(cm, ch);
      j["mutual_information"] = tc::mutual_information(cm, ch);
    }
    if (out.format == "json") {
      emit(out, j.dump(2) + "\n");
    } else {
      emit(out, csv("cm", cfg, {"modes", "valid", "min_nu", "energy"},
                    {{fmt(cm.modes()), fmt(v.pass), fmt(v.min_nu), fmt(tc::energy(cm))}}));
    }
    return v.pass ? kOk : kFail;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacity of the thermal-noise channel: Gaussian analytics, "
               "perturbation shifts and a truncated Fock oracle"};
  app.require_subcommand(1);

  std::vector<std::unique_ptr<Command>> cmds;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& desc,
                  auto tag) {
    using T = typename decltype(tag)::type;
    cmds.push_back(std::make_unique<T>(parent->add_subcommand(name, desc)));
  };

  auto* verify = app.add_subcommand("verify", "extremality checks")->require_subcommand(1);
  auto* oracle = app.add_subcommand("oracle", "truncated-Fock comparisons")->require_subcommand(1);

  leaf(&app, "capacity", "certified capacity table", std::type_identity<CapacityCmd>{});
  leaf(&app, "ci-curve", "coherent and mutual information of thermal inputs",
       std::type_identity<CiCurveCmd>{});
  leaf(&app, "nc", "critical noise N_c", std::type_identity<NcCmd>{});
  leaf(&app, "cm", "properties of a covariance matrix file", std::type_identity<CmCmd>{});
  leaf(verify, "trace", "trace-functional bound", std::type_identity<VerifyTraceCmd>{});
  leaf(verify, "directional", "sign of the mixture derivative",
       std::type_identity<VerifyDirectionalCmd>{});
  leaf(verify, "local-max", "blended probes around the thermal point",
       std::type_identity<VerifyLocalMaxCmd>{});
  leaf(verify, "scan", "sign pattern of the perturbative CI difference",
       std::type_identity<VerifyScanCmd>{});
  leaf(oracle, "ci", "Gaussian vs Fock entropies", std::type_identity<OracleCiCmd>{});
  leaf(oracle, "pair-identity", "channel action on pair-raised purifications",
       std::type_identity<OraclePairCmd>{});
  leaf(oracle, "perturb-compare", "analytic vs oracle entropy shifts",
       std::type_identity<OraclePerturbCmd>{});
  leaf(oracle, "vacuum", "output photon number for vacuum input",
       std::type_identity<OracleVacuumCmd>{});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  for (auto& c : cmds) {
    if (!c->app->parsed()) continue;
    try {
      c->cfg.merge();
      return c->run();
    } catch (const UsageError& e) {
      std::cerr << "usage error: " << e.what() << "\n" << c->app->help();
      return kUsage;
    } catch (const tc::InvalidInput& e) {
      std::cerr << "invalid input: " << e.what() << "\n";
      return kUsage;
    } catch (const tc::DomainError& e) {
      std::cerr << "domain error: " << e.what() << "\n";
      return kUsage;
    } catch (const tc::Error& e) {
      std::cerr << "numeric failure: " << e.what() << "\n";
      return kFail;
    }
  }
  std::cerr << app.help();
  return kUsage;
}
