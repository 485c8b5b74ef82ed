#include "thermocap/serialization.hpp"

#include <charconv>
#include <cmath>

#include "thermocap/errors.hpp"

namespace thermocap {

namespace {

Eigen::MatrixXd read_square(const Json& arr, int dim, const char* what) {
  if (!arr.is_array() || arr.size() != static_cast<std::size_t>(dim) * dim) {
    throw InvalidInput(std::string(what) + " must hold " +
                       std::to_string(dim * dim) + " numbers");
  }
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const Json& x = arr[static_cast<std::size_t>(i * dim + j)];
      if (!x.is_number()) throw InvalidInput(std::string(what) + ": not a number");
      m(i, j) = x.get<double>();
    }
  return m;
}

Json numbers(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

}  // namespace

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string csv_schema_header(const std::string& table) {
  return "# thermocap-csv " + table + " schema_version=" +
         std::to_string(kSchemaVersion);
}

Json to_json(const CovMatrix& cm) {
  Json g = Json::array();
  const auto& m = cm.gamma();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) g.push_back(m(i, j));
  return {{"n", cm.modes()}, {"gamma", g}};
}

CovMatrix cm_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("gamma") ||
      !j["n"].is_number_integer()) {
    throw InvalidInput("covariance matrix JSON needs integer n and gamma");
  }
  const int n = j["n"].get<int>();
  if (n < 1) throw InvalidInput("n must be >= 1");
  return CovMatrix(read_square(j["gamma"], 2 * n, "gamma"));
}

Json to_json(const FockDensity& rho) {
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index i = 0; i < rho.rho.rows(); ++i)
    for (Eigen::Index k = 0; k < rho.rho.cols(); ++k) {
      re.push_back(rho.rho(i, k).real());
      im.push_back(rho.rho(i, k).imag());
    }
  return {{"d", rho.d}, {"modes", rho.modes}, {"re", re}, {"im", im}};
}

FockDensity fock_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("d") || !j.contains("modes") ||
      !j.contains("re") || !j.contains("im")) {
    throw InvalidInput("Fock density JSON needs d, modes, re and im");
  }
  FockDensity f;
  f.d = j["d"].get<int>();
  f.modes = j["modes"].get<int>();
  if (f.d < 1 || (f.modes != 1 && f.modes != 2)) {
    throw InvalidInput("Fock density needs d >= 1 and modes in {1, 2}");
  }
  const int dim = f.dimension();
  const Eigen::MatrixXd re = read_square(j["re"], dim, "re");
  const Eigen::MatrixXd im = read_square(j["im"], dim, "im");
  f.rho = re.cast<std::complex<double>>() +
          std::complex<double>(0.0, 1.0) * im.cast<std::complex<double>>();
  f.validate();
  return f;
}

Json to_json(const DeltaCiReport& r) {
  return {{"ns", r.ns},
          {"noise", r.noise},
          {"order", r.order},
          {"input_shift", number(r.input_shift)},
          {"output_shift", number(r.output_shift)},
          {"exchange_shift", number(r.exchange_shift)},
          {"delta_ci", number(r.delta_ci)},
          {"truncation_error_bound", number(r.truncation_error_bound)}};
}

Json to_json(const Ns0Result& r) {
  return {{"ns0", number(r.ns0)},
          {"bracket", {number(r.bracket_lo), number(r.bracket_hi)}},
          {"residual", number(r.residual)},
          {"sign_changes", r.sign_changes},
          {"shape_ok", r.shape_ok},
          {"warnings", r.warnings}};
}

Json to_json(const NcResult& r) {
  return {{"nc", number(r.nc)},
          {"ns0", number(r.ns0)},
          {"mutual_information", number(r.mutual_information)},
          {"bound", number(r.bound)},
          {"residual", number(r.residual)},
          {"iterations", r.iterations},
          {"skipped_noise", numbers(r.skipped_noise)}};
}

Json to_json(const CapacityCertificate& c) {
  return {{"noise", c.noise},
          {"q", number(c.q)},
          {"unbounded", c.unbounded},
          {"certified", c.certified},
          {"nc", number(c.nc)},
          {"ns0", number(c.ns0)},
          {"mi_bound", number(c.mi_bound)},
          {"caveat", c.caveat}};
}

Json to_json(const ProbeEnsemble& e) {
  return {{"modes", e.modes},
          {"energy", e.e_bar},
          {"samples", e.count},
          {"seed", e.seed},
          {"generator", to_string(e.kind)},
          {"max_squeeze", e.max_squeeze}};
}

Json to_json(const TraceBoundReport& r) {
  Json j = {{"samples", r.samples},
            {"violations", r.violations},
            {"bound", number(r.bound)},
            {"max_t", number(r.max_t)}};
  if (r.grid_points > 0) {
    j["grid"] = {{"points", r.grid_points},
                 {"violations", r.grid_violations},
                 {"max_t", number(r.grid_max_t)},
                 {"argmax_fraction", r.grid_argmax_fraction},
                 {"max_at_equal_split", r.grid_max_at_equal_split}};
  }
  j["pass"] = r.pass;
  return j;
}

Json to_json(const DirectionalReport& r) {
  return {{"samples", r.samples},
          {"violations", r.violations},
          {"max_derivative", number(r.max_derivative)},
          {"thermal_derivative", number(r.thermal_derivative)},
          {"tolerance", r.tolerance},
          {"pass", r.pass}};
}

Json to_json(const LocalMaxReport& r) {
  return {{"ns", r.ns},
          {"noise", r.noise},
          {"blend", r.blend},
          {"samples", r.samples},
          {"positives", r.positives},
          {"max_difference", number(r.max_difference)},
          {"tolerance", r.tolerance},
          {"ns0", number(r.ns0)},
          {"regime", r.regime},
          {"max_directional", number(r.max_directional)},
          {"pass", r.pass}};
}

Json to_json(const DeltaCiScan& s) {
  Json rows = Json::array();
  for (const auto& r : s.rows) {
    rows.push_back({{"ns", r.ns}, {"delta_ci", number(r.delta_ci)}, {"sign", r.sign}});
  }
  return {{"noise", s.noise},
          {"order", s.order},
          {"sign_changes", s.sign_changes},
          {"shape_ok", s.shape_ok},
          {"tail_scaled", number(s.tail_scaled)},
          {"tail_asymptote", number(s.tail_asymptote)},
          {"rows", rows}};
}

Json to_json(const QuadratureSpec& q) {
  return {{"radial", q.radial}, {"angular", q.angular}, {"cutoff", q.cutoff}};
}

Json to_json(const PerturbCompareReport& r) {
  const auto& c = r.config;
  Json shifts = Json::array();
  for (const auto& s : r.shifts) {
    shifts.push_back({{"name", s.name},
                      {"analytic", number(s.analytic)},
                      {"oracle_fd", number(s.oracle_fd)},
                      {"oracle_coefficient", number(s.oracle_coefficient)},
                      {"oracle", number(s.oracle)},
                      {"abs_diff", number(std::abs(s.analytic - s.oracle))},
                      {"rel_diff", number(s.rel_diff)},
                      {"within_tolerance", s.within_tolerance}});
  }
  return {{"case", to_string(c.order)},
          {"ns", c.ns},
          {"noise", c.noise},
          {"epsilon", c.epsilon},
          {"dim", c.dim},
          {"input_dim", c.input_dim},
          {"rel_tol", c.rel_tol},
          {"rank_tol", c.rank_tol},
          {"labeling", to_string(c.shift.labeling)},
          {"units", "nats per eps^2"},
          {"shifts", shifts},
          {"truncation",
           {{"quadrature", to_json(c.channel.quadrature)},
            {"quadrature_raw_mass", number(r.quadrature_raw_mass)},
            {"channel_trace_error", number(r.channel_trace_error)},
            {"max_trace_error", c.channel.max_trace_error},
            {"gram_rank", r.gram_rank}}},
          {"all_within", r.all_within}};
}

Json to_json(const PairIdentityReport& r) {
  return {{"j", r.j},
          {"placement",
           r.placement == PairIdentityPlacement::reference ? "reference" : "channel"},
          {"residual", number(r.residual)},
          {"lhs_norm", number(r.lhs_norm)}};
}

}  // namespace thermocap
