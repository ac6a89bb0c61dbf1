#include "schottky/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "schottky/group_io.hpp"
#include "schottky/kernels.hpp"
#include "schottky/periods.hpp"
#include "schottky/qseries.hpp"
#include "schottky/torus.hpp"

namespace schottky::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::array<std::pair<Command, std::string_view>, 12> kCommands{{
    {Command::Validate, "validate"},
    {Command::Classes, "classes"},
    {Command::Fn, "fn"},
    {Command::Eta, "eta"},
    {Command::TorusDet, "torus-det"},
    {Command::TorusCheck, "torus-check"},
    {Command::Eisenstein, "eisenstein"},
    {Command::Kronecker, "kronecker"},
    {Command::Kernels, "kernels"},
    {Command::Cocycle, "cocycle"},
    {Command::Periods, "periods"},
    {Command::Sweep, "sweep"},
}};

[[noreturn]] void input_error(const std::string& what) { throw Error(ErrorKind::InvalidInput, what); }

bool is_numeric_failure(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotConverged:
    case ErrorKind::QuadratureNotConverged:
    case ErrorKind::FitResidualTooLarge:
    case ErrorKind::UnstableLimit:
    case ErrorKind::DeltaTooLarge:
    case ErrorKind::Inconclusive:
      return true;
    default:
      return false;
  }
}

Json cplx(Complex z) { return Json::array({z.real(), z.imag()}); }

Json point(const RiemannSpherePoint& p) {
  if (p.is_infinite()) return Json::array({"inf", "inf"});
  return cplx(p.value());
}

std::string word_string(std::span<const Letter> w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(w[i]);
  }
  return out;
}

Json eval_json(const KernelEval& e) {
  return Json{{"value", cplx(e.value)},
              {"tail_estimate", e.tail_estimate},
              {"shells_used", e.shells_used},
              {"converged", e.converged}};
}

/// What a command hands back: the structured result, flat rows for CSV and the summary
/// diagnostics.
struct Outcome {
  Json result = Json::object();
  std::vector<Json> rows;
  double tail = 0.0;
  bool converged = true;
  Json extra = Json::object();
};

const SchottkyGroup& need_group(const std::optional<SchottkyGroup>& group) {
  if (!group) input_error("this command needs --group");
  return *group;
}

Complex need_tau(const RunConfig& c) {
  if (!c.tau) input_error("this command needs --tau RE IM");
  if (!(c.tau->imag() > 0.0)) throw Error(ErrorKind::NotUpperHalfPlane, "Im tau must be positive");
  return *c.tau;
}

/// Uniform point of a box around the interior point, kept well inside D.
Complex sample_point(const SchottkyGroup& group, std::mt19937_64& rng) {
  const Complex centre = group.interior_point();
  const double clearance = group.clearance(centre);
  double extent = clearance;
  for (const auto& c : group.circles()) extent = std::max(extent, std::abs(c.center - centre) + c.radius);
  std::uniform_real_distribution<double> u(-extent, extent);
  for (int i = 0; i < 1000000; ++i) {
    const Complex z = centre + Complex(u(rng), u(rng));
    if (group.clearance(z) > 0.25 * clearance) return z;
  }
  return centre;
}

Complex probe_point(const RunConfig& c, const SchottkyGroup& group, std::mt19937_64& rng) {
  const Complex z = c.z ? *c.z : sample_point(group, rng);
  if (!(group.clearance(z) > 0.0)) input_error("--z must lie in the fundamental domain D");
  return z;
}

KernelOptions kernel_options(const RunConfig& c) {
  KernelOptions opts;
  opts.maxlen = c.maxlen;
  opts.tol = c.tol;
  opts.threads = c.threads;
  return opts;
}

Outcome cmd_validate(const RunConfig& c) {
  if (!c.group_path) input_error("validate needs --group");
  const GroupSpec spec = read_group_spec(*c.group_path);
  Outcome o;
  std::optional<SchottkyGroup> group;
  try {
    group = build_group(spec);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotLoxodromic && e.kind() != ErrorKind::InvalidMultiplier) throw;
    o.result = Json{{"g", spec.g}, {"ok", false}, {"loxodromic", false}, {"failures", Json::array({e.what()})}};
    o.rows.push_back(Json{{"g", spec.g}, {"ok", false}, {"loxodromic", false}});
    o.converged = false;
    o.extra["valid"] = false;
    return o;
  }
  const ValidationReport report = validate(*group);
  Json gens = Json::array();
  for (int r = 1; r <= group->genus(); ++r) {
    const auto& fd = group->fixed_data(r);
    Json row{{"letter", r},
             {"multiplier", cplx(fd.multiplier)},
             {"abs_multiplier", std::abs(fd.multiplier)},
             {"attracting", point(fd.attracting)},
             {"repelling", point(fd.repelling)}};
    gens.push_back(row);
    o.rows.push_back(row);
  }
  Json circles = Json::array();
  for (int r = 1; r <= group->genus(); ++r) {
    for (const Letter l : {r, -r}) {
      const Circle& ci = group->circle(l);
      circles.push_back(Json{{"letter", l}, {"center", cplx(ci.center)}, {"radius", ci.radius},
                             {"bounded", ci.orientation > 0}});
    }
  }
  const Complex ip = group->interior_point();
  Json exponent = nullptr;
  try {
    exponent = convergence_exponent_estimate(*group, ip, std::clamp(c.maxlen, 3, 8));
  } catch (const Error&) {
  }
  o.result = Json{{"g", group->genus()},
                  {"ok", report.ok()},
                  {"loxodromic", report.loxodromic},
                  {"disjoint", report.disjoint},
                  {"marginal", report.marginal},
                  {"pairing", report.pairing},
                  {"normalized", report.normalized},
                  {"failures", report.failures},
                  {"generators", gens},
                  {"circles", circles},
                  {"interior_point", cplx(ip)},
                  {"exponent_estimate", exponent}};
  o.converged = report.ok();
  o.extra["valid"] = report.ok();
  return o;
}

Outcome cmd_classes(const RunConfig& c, const SchottkyGroup& group) {
  Outcome o;
  Json rows = Json::array();
  for (const auto& cls : primitive_conjugacy_classes(group.genus(), c.maxlen)) {
    const Complex q = group.evaluate(cls.representative).multiplier();
    Json row{{"word", word_string(cls.representative)},
             {"length", cls.representative.size()},
             {"multiplier", cplx(q)},
             {"abs_multiplier", std::abs(q)}};
    rows.push_back(row);
    o.rows.push_back(row);
  }
  o.result = Json{{"count", rows.size()}, {"classes", rows}};
  return o;
}

Outcome cmd_fn(const RunConfig& c, const SchottkyGroup& group) {
  const ProductSpec spec{c.n, c.maxlen, c.tol, c.threads};
  const SeriesResult f = f_n(group, spec);
  const SeriesResult lf = log_f0(group, spec);
  Outcome o;
  o.result = Json{{"n", c.n},
                  {"value", cplx(f.value)},
                  {"log_f0", cplx(lf.value)},
                  {"tail_estimate", f.tail_estimate},
                  {"shells_used", f.shells_used},
                  {"converged", f.converged}};
  o.rows.push_back(o.result);
  o.tail = f.tail_estimate;
  o.converged = f.converged;
  return o;
}

Outcome cmd_eta(const RunConfig& c) {
  const Complex tau = need_tau(c);
  const Complex eta = dedekind_eta(tau);
  Outcome o;
  o.result = Json{{"tau", cplx(tau)}, {"eta", cplx(eta)}, {"abs_eta", std::abs(eta)}};
  o.rows.push_back(o.result);
  return o;
}

Outcome cmd_torus_det(const RunConfig& c) {
  const Complex tau = need_tau(c);
  const double closed = torus_det(tau);
  const double spectral = torus_det_spectral(tau);
  Outcome o;
  o.result = Json{{"tau", cplx(tau)},
                  {"det_closed_form", closed},
                  {"det_spectral", spectral},
                  {"relative_difference", std::abs(spectral - closed) / closed},
                  {"liouville_action", torus_liouville_action(tau)}};
  o.rows.push_back(o.result);
  return o;
}

Outcome cmd_torus_check(const RunConfig& c) {
  const Complex tau = need_tau(c);
  const double residual = torus_factorization_residual(tau);
  Outcome o;
  o.result = Json{{"tau", cplx(tau)},
                  {"det", torus_det(tau)},
                  {"torus_f", cplx(torus_f(std::exp(2.0 * kPi * kI * tau)))},
                  {"residual", residual}};
  o.rows.push_back(o.result);
  o.converged = residual < 1e-12;
  return o;
}

Outcome cmd_eisenstein(const RunConfig& c) {
  const Complex tau = need_tau(c);
  if (!c.s) input_error("eisenstein needs --s");
  Outcome o;
  o.result = Json{{"tau", cplx(tau)},
                  {"s", *c.s},
                  {"value", eisenstein(tau, *c.s)},
                  {"completed", eisenstein_completed(tau, *c.s)}};
  o.rows.push_back(o.result);
  return o;
}

Outcome cmd_kronecker(const RunConfig& c) {
  const Complex tau = need_tau(c);
  const LaurentAtOne l = laurent_at_one(tau);
  const double y = tau.imag();
  const double eta4 = std::pow(std::abs(dedekind_eta(tau)), 4);
  // The displayed form with exp(2 gamma) inside the logarithm; compared for the record.
  const double literal = -kPi * std::log(4.0 * y * eta4 * std::exp(2.0 * kEulerGamma));
  Outcome o;
  o.result = Json{{"tau", cplx(tau)},
                  {"residue", l.residue},
                  {"numeric_residue", l.numeric_residue},
                  {"constant", l.constant},
                  {"numeric_constant", l.numeric_constant},
                  {"constant_deviation", std::abs(l.numeric_constant - l.constant)},
                  {"literal_constant", literal},
                  {"literal_deviation", std::abs(l.numeric_constant - literal)}};
  o.rows.push_back(o.result);
  o.converged = std::abs(l.numeric_constant - l.constant) < 1e-6 && std::abs(l.numeric_residue - kPi) < 1e-8;
  return o;
}

Outcome cmd_kernels(const RunConfig& c, const SchottkyGroup& group) {
  std::mt19937_64 rng(c.seed);
  const Complex z = probe_point(c, group, rng);
  Complex zp = sample_point(group, rng);
  while (std::abs(zp - z) < 1e-3) zp = sample_point(group, rng);
  KernelOptions opts = kernel_options(c);
  if (c.n == 1 && group.clearance(Complex(1.0)) <= 0.0) opts.a1 = sample_point(group, rng);
  const Word w = c.word.value_or(Word{1});

  const std::array<std::pair<const char*, KernelEval>, 5> evals{{
      {"bers", bers_kernel(group, c.n, z, zp, opts)},
      {"t_hat", t_hat(group, c.n, z, opts)},
      {"a_gamma_sum", a_gamma_sum(group, c.n, z, opts)},
      {"class_resummed_a_sum", class_resummed_a_sum(group, c.n, z, opts)},
      {"dq", dq_series(group, w, z, opts)},
  }};
  Outcome o;
  o.result = Json{{"n", c.n}, {"z", cplx(z)}, {"zprime", cplx(zp)}, {"word", word_string(w)}};
  o.result["a1"] = opts.a1 ? cplx(*opts.a1) : Json(nullptr);
  for (const auto& [name, e] : evals) {
    o.result[name] = eval_json(e);
    Json row{{"quantity", name}, {"z", cplx(z)}};
    row.update(eval_json(e));
    o.rows.push_back(row);
    o.tail = std::max(o.tail, e.tail_estimate);
    o.converged = o.converged && e.converged;
  }
  return o;
}

Outcome cmd_cocycle(const RunConfig& c, const SchottkyGroup& group) {
  if (c.n < 2) input_error("cocycle needs --n >= 2");
  std::mt19937_64 rng(c.seed);
  const Complex z = probe_point(c, group, rng);
  const KernelOptions opts = kernel_options(c);
  const int g = group.genus();

  Cocycle chi;
  std::vector<CocycleFit> fits;
  Outcome o;
  for (int r = 1; r <= g; ++r) {
    const Word w{r};
    fits.push_back(cocycle_from_kernel(group, c.n, z, w, opts));
    chi.generator_values.push_back(fits.back().polynomial);
    o.tail = std::max(o.tail, fits.back().tail_estimate);
  }

  // Cocycle identity on generator pairs, compared by value at the centre of the fit circle.
  const Complex probe = group.interior_point();
  std::vector<Letter> letters;
  for (int r = 1; r <= g; ++r) letters.insert(letters.end(), {r, -r});
  auto fit_for = [&](Letter r) {
    return r > 0 ? fits[r - 1] : cocycle_from_kernel(group, c.n, z, Word{r}, opts);
  };
  double identity_defect = 0.0;
  double identity_ratio = 0.0;  // worst defect / allowance
  for (const Letter r : letters) {
    const CocycleFit fr = fit_for(r);
    for (const Letter s : letters) {
      if (s == -r) continue;
      const CocycleFit fs = fit_for(s);
      const CocycleFit joint = cocycle_from_kernel(group, c.n, z, Word{r, s}, opts);
      const Polynomial rhs = act(group.generator(s), fr.polynomial, c.n) + fs.polynomial;
      const Complex expected = evaluate_polynomial(rhs, probe);
      const double defect = std::abs(evaluate_polynomial(joint.polynomial, probe) - expected);
      const double bound =
          10.0 * (joint.excess_floor + fr.excess_floor + fs.excess_floor) * std::max(1.0, std::abs(expected));
      identity_defect = std::max(identity_defect, defect);
      identity_ratio = std::max(identity_ratio, defect / bound);
    }
  }

  std::optional<Cocycle> normalized;
  if (g >= 2) normalized = normalize(chi, group, c.n);

  Json slots = Json::array();
  for (int r = 1; r <= g; ++r) {
    const CocycleFit& f = fits[r - 1];
    Json coeffs = Json::array();
    Json ncoeffs = Json::array();
    for (Eigen::Index k = 0; k < f.polynomial.size(); ++k) {
      coeffs.push_back(cplx(f.polynomial[k]));
      Json row{{"letter", r}, {"power", k}, {"coefficient", cplx(f.polynomial[k])}};
      if (normalized) {
        const Complex v = normalized->generator_values[r - 1][k];
        ncoeffs.push_back(cplx(v));
        row["normalized"] = cplx(v);
      }
      row["residual"] = f.residual;
      row["tail_estimate"] = f.tail_estimate;
      o.rows.push_back(row);
    }
    slots.push_back(Json{{"letter", r},
                         {"coefficients", coeffs},
                         {"normalized", normalized ? ncoeffs : Json(nullptr)},
                         {"residual", f.residual},
                         {"tail_estimate", f.tail_estimate},
                         {"excess", f.excess},
                         {"excess_floor", f.excess_floor}});
  }
  o.result = Json{{"n", c.n},
                  {"z", cplx(z)},
                  {"dimension", g >= 2 ? Json(tilde_dimension(g, c.n)) : Json(nullptr)},
                  {"generators", slots},
                  {"identity_defect", identity_defect},
                  {"identity_ratio", identity_ratio}};
  o.converged = o.tail <= c.tol && identity_ratio <= 1.0;
  return o;
}

Outcome cmd_periods(const RunConfig& c, const SchottkyGroup& group) {
  PeriodOptions popts;
  popts.maxlen = c.maxlen;
  popts.threads = c.threads;
  const PeriodMatrix pm = period_matrix(group, popts);
  const int g = group.genus();

  Eigen::MatrixXcd alpha(g, g);
  for (int j = 1; j <= g; ++j) {
    const AbelianDifferential phi(group, j, c.maxlen, c.tol);
    for (int k = 1; k <= g; ++k) alpha(j - 1, k - 1) = alpha_period(phi, group, k);
  }
  // The area integral only needs phi to quadrature accuracy, so it runs at a shorter truncation.
  constexpr int kGramGrid = 200;
  const int gram_maxlen = std::min(c.maxlen, 5);
  std::optional<Eigen::MatrixXcd> gram;
  try {
    gram = gram_matrix(group, gram_maxlen, kGramGrid, c.threads);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InvalidInput) throw;
  }

  auto matrix = [](const Eigen::MatrixXcd& m) {
    Json out = Json::array();
    for (Eigen::Index j = 0; j < m.rows(); ++j) {
      Json row = Json::array();
      for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(cplx(m(j, k)));
      out.push_back(row);
    }
    return out;
  };
  const double alpha_defect = (alpha - Eigen::MatrixXcd::Identity(g, g)).cwiseAbs().maxCoeff();
  Outcome o;
  o.result = Json{{"tau", matrix(pm.tau)},
                  {"alpha", matrix(alpha)},
                  {"alpha_defect", alpha_defect},
                  {"symmetry_defect", pm.symmetry_defect},
                  {"im_positive", pm.im_positive},
                  {"tail_estimate", pm.tail}};
  o.result["gram"] = gram ? matrix(*gram) : Json(nullptr);
  o.result["gram_maxlen"] = gram_maxlen;
  o.result["gram_gridsize"] = kGramGrid;
  o.result["gram_deviation"] =
      gram ? Json((*gram - Eigen::MatrixXcd(pm.tau.imag().cast<Complex>())).cwiseAbs().maxCoeff()) : Json(nullptr);
  for (int j = 0; j < g; ++j) {
    for (int k = 0; k < g; ++k) {
      Json row{{"j", j + 1}, {"k", k + 1}, {"tau", cplx(pm.tau(j, k))}, {"alpha", cplx(alpha(j, k))}};
      if (gram) row["gram"] = cplx((*gram)(j, k));
      row["tail_estimate"] = pm.tail;
      o.rows.push_back(row);
    }
  }
  o.tail = pm.tail;
  o.converged = pm.tail <= c.tol && pm.im_positive;
  return o;
}

Outcome sweep_tau(const RunConfig& c) {
  Outcome o;
  Json rows = Json::array();
  for (int iy = 0; iy <= 10; ++iy) {
    for (int ix = 0; ix <= 10; ++ix) {
      const Complex tau(-0.5 + 0.1 * ix, 0.5 + 0.25 * iy);
      Json row{{"tau", cplx(tau)},
               {"abs_eta", std::abs(dedekind_eta(tau))},
               {"det", torus_det(tau)},
               {"residual", torus_factorization_residual(tau)}};
      if (c.s) row["eisenstein"] = eisenstein(tau, *c.s);
      rows.push_back(row);
      o.rows.push_back(row);
    }
  }
  o.result = Json{{"parameter", "tau"}, {"rows", rows}};
  return o;
}

/// Multipliers scaled by t with fixed points kept; default circles are used throughout.
Outcome sweep_group(const RunConfig& c, const GroupSpec& base) {
  Outcome o;
  Json rows = Json::array();
  for (int i = 1; i <= 10; ++i) {
    const double t = i / 10.0;
    Json row{{"t", t}};
    try {
      GroupSpec spec = base;
      spec.circles.reset();
      for (auto& m : spec.generators) {
        const auto fd = m.loxodromic_data();
        m = from_fixed_data(fd.attracting, fd.repelling, t * fd.multiplier);
      }
      const SchottkyGroup group = build_group(spec);
      const ValidationReport report = validate(group);
      if (!report.ok()) throw Error(ErrorKind::InvalidInput, "scaled group fails validation");
      const SeriesResult f = f_n(group, ProductSpec{c.n, c.maxlen, c.tol, c.threads});
      row["status"] = "ok";
      row["value"] = cplx(f.value);
      row["tail_estimate"] = f.tail_estimate;
      row["converged"] = f.converged;
      o.tail = std::max(o.tail, f.tail_estimate);
      o.converged = o.converged && f.converged;
    } catch (const Error& e) {
      row["status"] = std::string(to_string(e.kind()));
      row["value"] = Json::array({nullptr, nullptr});
      row["tail_estimate"] = nullptr;
      row["converged"] = false;
    }
    rows.push_back(row);
    o.rows.push_back(row);
  }
  o.result = Json{{"parameter", "multiplier_scale"}, {"n", c.n}, {"rows", rows}};
  return o;
}

Json config_json(const RunConfig& c) {
  // Thread count and output path are left out so that outputs compare byte for byte.
  Json j{{"command", to_string(c.command)}};
  j["group"] = c.group_path ? Json(c.group_path->generic_string()) : Json(nullptr);
  j["n"] = c.n;
  j["maxlen"] = c.maxlen;
  j["tol"] = c.tol;
  j["tau"] = c.tau ? cplx(*c.tau) : Json(nullptr);
  j["s"] = c.s ? Json(*c.s) : Json(nullptr);
  j["z"] = c.z ? cplx(*c.z) : Json(nullptr);
  j["word"] = c.word ? Json(word_string(*c.word)) : Json(nullptr);
  j["seed"] = c.seed;
  j["format"] = c.format == Format::Json ? "json" : "csv";
  return j;
}

std::string csv_field(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char ch : s) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    return quoted + "\"";
  }
  return v.dump();
}

/// Flattens a row: complex pairs become *_re / *_im, other arrays are joined with ';'.
std::vector<std::pair<std::string, std::string>> flatten(const Json& row) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [key, v] : row.items()) {
    if (v.is_array() && v.size() == 2 && !v[0].is_array()) {
      out.emplace_back(key + "_re", csv_field(v[0]));
      out.emplace_back(key + "_im", csv_field(v[1]));
    } else if (v.is_array()) {
      std::string joined;
      for (std::size_t i = 0; i < v.size(); ++i) joined += (i ? ";" : "") + v[i].dump();
      out.emplace_back(key, csv_field(Json(joined)));
    } else {
      out.emplace_back(key, csv_field(v));
    }
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<Json>& rows, const RunConfig& c, double tail) {
  std::vector<std::vector<std::pair<std::string, std::string>>> flat;
  std::vector<std::string> header;
  for (const Json& row : rows) {
    Json full = row;
    full["maxlen"] = c.maxlen;
    if (!full.contains("tail_estimate")) full["tail_estimate"] = tail;
    full["seed"] = c.seed;
    flat.push_back(flatten(full));
    for (const auto& [k, v] : flat.back()) {
      if (std::find(header.begin(), header.end(), k) == header.end()) header.push_back(k);
    }
  }
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& cells : flat) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out << ',';
      const auto it = std::find_if(cells.begin(), cells.end(), [&](const auto& kv) { return kv.first == header[i]; });
      if (it != cells.end()) out << it->second;
    }
    out << '\n';
  }
}

void report_error(std::ostream& err, bool as_json, std::string_view kind, const std::string& message) {
  if (as_json) {
    err << Json{{"error", {{"kind", std::string(kind)}, {"message", message}}}}.dump() << '\n';
  } else {
    err << "error: " << message << '\n';
  }
}

Outcome dispatch(const RunConfig& c) {
  std::optional<GroupSpec> spec;
  std::optional<SchottkyGroup> group;
  if (c.command != Command::Validate && c.group_path) {
    spec = read_group_spec(*c.group_path);
    if (c.command != Command::Sweep) {
      group = build_group(*spec);
      const ValidationReport report = validate(*group);
      if (!report.ok()) {
        std::string msg = "group fails validation";
        for (const auto& f : report.failures) msg += "; " + f;
        input_error(msg);
      }
      if (c.word) {
        for (const Letter r : *c.word) {
          if (std::abs(r) > group->genus()) input_error("--word letter out of range");
        }
      }
    }
  }
  switch (c.command) {
    case Command::Validate: return cmd_validate(c);
    case Command::Classes: return cmd_classes(c, need_group(group));
    case Command::Fn: return cmd_fn(c, need_group(group));
    case Command::Eta: return cmd_eta(c);
    case Command::TorusDet: return cmd_torus_det(c);
    case Command::TorusCheck: return cmd_torus_check(c);
    case Command::Eisenstein: return cmd_eisenstein(c);
    case Command::Kronecker: return cmd_kronecker(c);
    case Command::Kernels: return cmd_kernels(c, need_group(group));
    case Command::Cocycle: return cmd_cocycle(c, need_group(group));
    case Command::Periods: return cmd_periods(c, need_group(group));
    case Command::Sweep: return spec ? sweep_group(c, *spec) : sweep_tau(c);
  }
  input_error("unknown command");
}

}  // namespace

std::string_view to_string(Command c) {
  for (const auto& [cmd, name] : kCommands) {
    if (cmd == c) return name;
  }
  return "unknown";
}

std::optional<Command> command_from_string(std::string_view name) {
  for (const auto& [cmd, n] : kCommands) {
    if (n == name) return cmd;
  }
  return std::nullopt;
}

Word parse_word(std::string_view text) {
  Word w;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    const std::string_view item = text.substr(pos, end - pos);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size() || value == 0) {
      input_error("--word must be a comma separated list of nonzero integers");
    }
    w.push_back(value);
    pos = end + 1;
  }
  const Word reduced = reduce(w);
  if (reduced.empty()) input_error("--word reduces to the identity");
  return reduced;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (!(config.tol > 0.0)) input_error("--tol must be positive");
    if (config.maxlen < 1) input_error("--maxlen must be at least 1");
    if (config.threads < 1) input_error("--threads must be at least 1");
    if (config.n < 1) input_error("--n must be at least 1");

    const Outcome o = dispatch(config);
    if (config.format == Format::Csv) {
      write_csv(out, o.rows, config, o.tail);
    } else {
      Json diagnostics{{"maxlen", config.maxlen}, {"tail_estimate", o.tail}, {"seed", config.seed},
                       {"converged", o.converged}};
      diagnostics.update(o.extra);
      out << Json{{"config", config_json(config)}, {"result", o.result}, {"diagnostics", diagnostics}}.dump(2)
          << '\n';
    }
    if (o.extra.contains("valid") && !o.extra["valid"].get<bool>()) return kExitInputError;
    return o.converged ? kExitOk : kExitNotConverged;
  } catch (const Error& e) {
    report_error(err, config.errors_json, to_string(e.kind()), e.what());
    return is_numeric_failure(e.kind()) ? kExitNotConverged : kExitInputError;
  } catch (const std::exception& e) {
    report_error(err, config.errors_json, "InvalidInput", e.what());
    return kExitInputError;
  }
}

int run(const RunConfig& config) {
  if (!config.output) return run(config, std::cout, std::cerr);
  std::ostringstream buffer;
  const int code = run(config, buffer, std::cerr);
  std::ofstream file(*config.output, std::ios::binary);
  if (!file) {
    report_error(std::cerr, config.errors_json, "InvalidInput", "cannot write " + config.output->string());
    return kExitInputError;
  }
  file << buffer.str();
  return code;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const bool errors_json = std::any_of(argv + 1, argv + argc, [](const char* a) { return std::string_view(a) == "--errors-json"; });

  CLI::App app{"Schottky groups, Poincare series and genus-1 spectral identities"};
  std::vector<std::string> names;
  for (const auto& [cmd, name] : kCommands) names.emplace_back(name);

  RunConfig config;
  std::string command;
  std::string group;
  std::vector<double> tau;
  std::vector<double> z;
  double s = 0.0;
  std::string word;
  std::string output;
  std::string format = "json";

  app.add_option("command", command, "Subcommand")->required()->check(CLI::IsMember(names));
  auto* group_opt = app.add_option("--group", group, "Group file (JSON)");
  app.add_option("--n", config.n, "Weight n");
  app.add_option("--maxlen", config.maxlen, "Word-length truncation");
  app.add_option("--tol", config.tol, "Tail tolerance");
  auto* tau_opt = app.add_option("--tau", tau, "Modulus tau as RE IM")->expected(2);
  auto* s_opt = app.add_option("--s", s, "Eisenstein exponent");
  auto* z_opt = app.add_option("--z", z, "Probe point as RE IM")->expected(2);
  auto* word_opt = app.add_option("--word", word, "Group element as comma separated letters");
  app.add_option("--seed", config.seed, "Seed for sampled points");
  app.add_option("--threads", config.threads, "Worker threads");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  auto* output_opt = app.add_option("--output", output, "Output file (default stdout)");
  app.add_flag("--errors-json", config.errors_json, "Report errors as JSON on stderr");

  try {
    app.parse(argc, argv);
    config.command = *command_from_string(command);
    if (*group_opt) config.group_path = group;
    if (*tau_opt) config.tau = Complex(tau[0], tau[1]);
    if (*s_opt) config.s = s;
    if (*z_opt) config.z = Complex(z[0], z[1]);
    if (*word_opt) config.word = parse_word(word);
    if (*output_opt) config.output = output;
    config.format = format == "csv" ? Format::Csv : Format::Json;
  } catch (const CLI::Success& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, errors_json, "InvalidInput", e.what());
    return kExitInputError;
  } catch (const Error& e) {
    report_error(err, errors_json, to_string(e.kind()), e.what());
    return kExitInputError;
  }
  if (!config.output) return run(config, out, err);
  return run(config);
}

}  // namespace schottky::cli
