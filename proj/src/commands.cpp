#include "tmclab/commands.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>

#include "tmclab/calculus.hpp"
#include "tmclab/errors.hpp"
#include "tmclab/fredholm.hpp"

namespace tmc {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string spectrum_csv(const SingularSpectrum& s) {
  std::ostringstream os;
  os << "index,value,multiplicity\n";
  std::uint64_t index = 1;
  for (const SpectrumLevel& l : s.levels()) {
    os << index << ',' << fmt17(l.value) << ',' << l.multiplicity << '\n';
    index += l.multiplicity;
  }
  return os.str();
}

std::vector<BlockSpectrum> parallel_block_spectra(const TransitionMatrix& m, const Function& a, const Function& b,
                                                  Index n_min, Index n_max, const SpectraOptions& opt, int jobs) {
  if (jobs <= 1) return block_spectra(m, a, b, n_min, n_max, opt);
  std::vector<BlockSpectrum> out(static_cast<std::size_t>(std::max<Index>(0, n_max - n_min + 1)));
  std::vector<std::future<void>> workers;
  for (int w = 0; w < jobs; ++w)
    workers.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = static_cast<std::size_t>(w); i < out.size(); i += static_cast<std::size_t>(jobs))
        out[i] = block_spectrum(m, a, b, n_min + static_cast<Index>(i), opt);
    }));
  for (auto& f : workers) f.get();
  return out;
}

namespace {

json header(const Scenario& sc, const char* command) {
  return {{"command", command}, {"scenario", sc.name}, {"scenario_hash", sc.hash}, {"tool_version", kToolVersion}};
}

json fit_json(const DecayFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}, {"samples", f.samples}};
}

json check_json(const PropertyCheck& c) {
  return {{"name", c.name},
          {"checked", c.checked},
          {"violations", c.violations},
          {"first_counterexample", c.first_counterexample}};
}

json audit_json(const AuditReport& r) {
  json checks = json::array();
  for (const PropertyCheck& c : r.checks) checks.push_back(check_json(c));
  return {{"checks", checks}, {"violations", r.violations()}};
}

AuditInput audit_input(const Scenario& sc) {
  return {sc.matrix, sc.p, sc.q, sc.core_bound, sc.samples, sc.seed};
}

}  // namespace

SpectrumAnalysis analyze_spectrum(const Scenario& sc, const Function& a, const Function& b, CommutatorKind kind,
                                  Index n_min, Index n_max, const std::vector<double>& p_grid, int jobs) {
  SpectrumAnalysis s;
  s.kind = kind;
  s.n_min = n_min;
  s.n_max = n_max;
  s.entropy = entropy(sc.matrix);
  s.beta = kind == CommutatorKind::Plain ? sc.metric.kappa : sc.metric.kappa * sc.metric.kappa;
  // both factors of the mixed commutator spread support, so its rank grows like e^{2hn}
  const double rank_exponent = kind == CommutatorKind::Plain ? s.entropy : 2.0 * s.entropy;
  s.threshold = rank_exponent / std::log(s.beta);
  s.predicted_slope = -std::log(s.beta) / rank_exponent;
  SpectraOptions opt{kind};
  opt.cap = sc.basis_cap;
  s.blocks = parallel_block_spectra(sc.matrix, a, b, n_min, n_max, opt, jobs);

  std::vector<BlockSpectrum> trusted;
  for (const BlockSpectrum& blk : s.blocks) {
    if (blk.trusted)
      trusted.push_back(blk);
    else
      s.untrusted.push_back(blk.n);
  }
  s.merged = merged_spectrum(trusted);

  // zero blocks below the first nonzero one
  std::vector<const BlockSpectrum*> nonzero;
  for (const BlockSpectrum& blk : trusted)
    if (blk.rank > 0) nonzero.push_back(&blk);
  if (!nonzero.empty()) {
    s.first_nonzero = nonzero.front()->n;
    for (const BlockSpectrum& blk : trusted)
      if (blk.n < *s.first_nonzero) s.zero_witnesses.push_back(blk.n);
  }

  std::vector<double> ns, log_norm, log_rank;
  for (const BlockSpectrum* blk : nonzero) {
    ns.push_back(static_cast<double>(blk->n));
    log_norm.push_back(std::log(blk->norm));
    log_rank.push_back(std::log(static_cast<double>(blk->rank)));
  }
  if (ns.size() >= 2) {
    s.norm_fit = fit_line(ns, log_norm);
    s.rank_fit = fit_line(ns, log_rank);
  }

  // rank(R_n) <= C e^{rank_rate n}: C from the first half, checked on all
  s.rank_rate = rank_exponent + 0.05;
  for (std::size_t i = 0; i < (nonzero.size() + 1) / 2; ++i)
    s.rank_C = std::max(s.rank_C, static_cast<double>(nonzero[i]->rank) *
                                      std::exp(-s.rank_rate * static_cast<double>(nonzero[i]->n)));
  for (const BlockSpectrum* blk : nonzero)
    if (static_cast<double>(blk->rank) > s.rank_C * std::exp(s.rank_rate * static_cast<double>(blk->n)) * (1 + 1e-12))
      s.rank_bound_failures.push_back(blk->n);
  s.rank_bound_holds = !nonzero.empty() && s.rank_bound_failures.empty();

  // the singular value schedule with C2 = max ||R_n|| beta^n
  if (!nonzero.empty()) {
    double c2 = 0.0;
    for (const BlockSpectrum* blk : nonzero) c2 = std::max(c2, blk->norm * std::pow(s.beta, static_cast<double>(blk->n)));
    s.schedule = decay_bound_schedule(s.rank_C, std::exp(s.rank_rate), c2, s.beta, *s.first_nonzero, n_max);
    s.schedule_holds = true;
    for (const auto& [m, bound] : s.schedule.schedule)
      if (s.merged.at(m) > bound * (1 + 1e-12)) s.schedule_holds = false;
  }

  if (s.merged.size() >= 10) {
    try {
      s.exponent_fit = fit_decay_exponent(s.merged, 1, s.merged.size());
    } catch (const Error&) {
    }
  }
  for (double p : p_grid) s.verdicts.push_back(summability_verdict(s.merged, p));
  return s;
}

json analysis_to_json(const SpectrumAnalysis& s) {
  json blocks = json::array();
  for (const BlockSpectrum& b : s.blocks)
    blocks.push_back({{"n", b.n},
                      {"trusted", b.trusted},
                      {"method", b.method},
                      {"columns", b.columns},
                      {"rank", b.rank},
                      {"norm", b.norm},
                      {"note", b.note}});
  json verdicts = json::array();
  for (const SummabilityVerdict& v : s.verdicts)
    verdicts.push_back({{"p", v.p},
                        {"verdict", verdict_name(v.verdict)},
                        {"partial_sum", static_cast<double>(v.total)},
                        {"final_relative_increment", v.final_relative_increment}});
  json schedule = json::array();
  for (const auto& [m, bound] : s.schedule.schedule) schedule.push_back({m, bound});
  return {
      {"kind", s.kind == CommutatorKind::Plain ? "plain" : "mixed"},
      {"window", {s.n_min, s.n_max}},
      {"entropy", s.entropy},
      {"beta", s.beta},
      {"threshold_p", s.threshold},
      {"predicted_slope", s.predicted_slope},
      {"untrusted_blocks", s.untrusted},
      {"spectrum_size", s.merged.size()},
      {"spectrum_levels", s.merged.levels().size()},
      {"certificates",
       {{"first_nonzero_block", s.first_nonzero ? json(*s.first_nonzero) : json(nullptr)},
        {"zero_blocks_below", s.zero_witnesses},
        {"norm_fit", fit_json(s.norm_fit)},
        {"rank_fit", fit_json(s.rank_fit)},
        {"rank_bound", {{"rate", s.rank_rate}, {"C", s.rank_C}, {"holds", s.rank_bound_holds},
                        {"failures", s.rank_bound_failures}}},
        {"schedule", {{"C1", s.schedule.C1}, {"alpha", s.schedule.alpha}, {"C2", s.schedule.C2},
                      {"beta", s.schedule.beta}, {"n0", s.schedule.n0}, {"exponent", s.schedule.exponent},
                      {"holds", s.schedule_holds}, {"bounds", schedule}}}}},
      {"exponent_fit", s.exponent_fit ? fit_json(*s.exponent_fit) : json(nullptr)},
      {"verdicts", verdicts},
      {"blocks", blocks},
  };
}

// ------------------------------------------------------------ commands

CommandResult cmd_validate(const Scenario& sc) {
  CommandResult out;
  out.report = header(sc, "validate");
  const double h = entropy(sc.matrix);
  const auto points = enumerate_homoclinic(sc.matrix, sc.p, sc.q, sc.core_bound);
  out.report["alphabet"] = sc.matrix.size();
  out.report["kappa"] = sc.metric.kappa;
  out.report["entropy"] = h;
  out.report["perron_root"] = std::exp(h);
  out.report["dimension"] = hausdorff_dimension(sc.matrix, sc.metric);
  out.report["threshold_p"] = h / std::log(sc.metric.kappa);
  out.report["orbit_P"] = sc.p.cycle();
  out.report["orbit_Q"] = sc.q.cycle();
  out.report["core_bound"] = sc.core_bound;
  out.report["homoclinic_points"] = points.size();
  out.report["window"] = {sc.window_lo, sc.window_hi};
  json fns = json::object();
  for (const auto& [name, f] : sc.functions)
    fns[name] = {{"side", side_name(f.side)}, {"terms", f.terms.size()}};
  out.report["functions"] = fns;
  return out;
}

CommandResult cmd_metric_audit(const Scenario& sc) {
  CommandResult out;
  out.report = header(sc, "metric-audit");
  const AuditInput in = audit_input(sc);
  const AuditReport st = structure_audit(in), dy = dynamics_audit(in);
  out.report["samples"] = sc.samples;
  out.report["structure"] = audit_json(st);
  out.report["dynamics"] = audit_json(dy);
  out.report["failures"] = st.violations() + dy.violations();
  out.exit_code = st.ok() && dy.ok() ? 0 : 1;
  return out;
}

CommandResult cmd_auf_audit(const Scenario& sc) {
  CommandResult out;
  out.report = header(sc, "auf-audit");
  const AufAudit a = auf_audit(audit_input(sc), 200, sc.samples);
  out.report["sample_size"] = a.sample_size;
  out.report["audit"] = audit_json(a.report);
  const DiameterReport& d = a.diameter;
  out.report["diameter"] = {{"ks", d.ks},
                            {"max_chain_distance", d.max_d},
                            {"sizes", d.sizes},
                            {"slope", d.slope},
                            {"base", d.base},
                            {"predicted_base", d.predicted_base},
                            {"gamma_prime", d.gamma_prime},
                            {"within_tolerance", d.within_tolerance}};
  std::ostringstream csv;
  csv << "k,max_chain_distance\n";
  for (std::size_t i = 0; i < d.ks.size(); ++i) csv << d.ks[i] << ',' << fmt17(d.max_d[i]) << '\n';
  out.files["diameter.csv"] = csv.str();
  out.exit_code = a.report.ok() && d.within_tolerance ? 0 : 1;
  return out;
}

CommandResult cmd_spectrum(const Scenario& sc, int jobs) {
  CommandResult out;
  out.report = header(sc, "spectrum");
  out.report["a"] = sc.a_name;
  out.report["b"] = sc.b_name;
  const SpectrumAnalysis s = analyze_spectrum(sc, sc.function(sc.a_name), sc.function(sc.b_name), sc.kind,
                                              sc.window_lo, sc.window_hi, sc.p_grid, jobs);
  out.report["analysis"] = analysis_to_json(s);
  out.files["spectrum.csv"] = spectrum_csv(s.merged);
  std::ostringstream blocks;
  blocks << "n,trusted,method,columns,rank,norm\n";
  for (const BlockSpectrum& b : s.blocks)
    blocks << b.n << ',' << b.trusted << ',' << b.method << ',' << b.columns << ',' << b.rank << ',' << fmt17(b.norm)
           << '\n';
  out.files["blocks.csv"] = blocks.str();
  json manifest{{"window", {s.n_min, s.n_max}}, {"basis_cap", sc.basis_cap}, {"untrusted", s.untrusted}};
  out.files["manifest.json"] = manifest.dump(2) + "\n";
  // only a window without any trusted block is a resource failure
  if (!s.untrusted.empty() && s.untrusted.size() == s.blocks.size()) out.exit_code = 3;
  return out;
}

namespace {

json rows_json(const std::vector<SummabilityRow>& rows) {
  json t = json::array();
  for (const SummabilityRow& r : rows)
    t.push_back({{"func_id", r.func_id}, {"p", r.p}, {"q1", r.q1}, {"q2", r.q2}, {"q3", r.q3},
                 {"verdict", verdict_name(r.verdict)}});
  return t;
}

double max_abs(const Eigen::MatrixXcd& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

Eigen::MatrixXcd random_matrix(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
  return a;
}

// Resolvent identity, contour against series exponential, and both corner cases
// on seeded random matrices.
json calculus_checks(std::uint64_t seed, bool& ok) {
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXcd s = random_matrix(5, rng), t = random_matrix(5, rng);
  const Eigen::VectorXcd ev = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(s, false).eigenvalues();
  const double radius = ev.cwiseAbs().maxCoeff();
  const double resolvent_residual = resolvent_commutator_check(s, t, 2.0 * radius).residual;
  const Eigen::MatrixXcd e = random_matrix(6, rng) * 0.5;
  const Eigen::MatrixXcd series = exp_series(e);
  const Circle c = default_contour(e, 256);
  const double exp_gap = max_abs(contour_calculus(e, [](Complex z) { return std::exp(z); }, c) - series) / max_abs(series);
  const CommutatorBound bound = contour_commutator_bound(s, t, [](Complex z) { return z * z; }, default_contour(s), 1.0);

  // corner of rank 3 inside 6 dimensions with spectrum near [1, 2.5]
  const Eigen::Index d = 6, r = 3;
  const Eigen::MatrixXcd w = Eigen::HouseholderQR<Eigen::MatrixXcd>(random_matrix(d, rng)).householderQ();
  Eigen::MatrixXcd p0 = Eigen::MatrixXcd::Zero(d, d), b0 = Eigen::MatrixXcd::Zero(d, d);
  p0.topLeftCorner(r, r).setIdentity();
  const Eigen::MatrixXcd k = Eigen::HouseholderQR<Eigen::MatrixXcd>(random_matrix(r, rng)).householderQ();
  b0.topLeftCorner(r, r) = k * Eigen::Vector3cd(1.0, 1.75, 2.5).asDiagonal() * k.adjoint();
  const Eigen::MatrixXcd p = w * p0 * w.adjoint();
  const Eigen::MatrixXcd b = p * (w * b0 * w.adjoint()) * p;
  const CornerCheck enclosed = corner_calculus_check(p, b, [](Complex z) { return z * z; }, Circle{1.25, 2.5, 256},
                                                     CornerCase::ZeroEnclosed);
  const CornerCheck separated = corner_calculus_check(p, b, [](Complex z) { return 1.0 / z; },
                                                      Circle{1.75, 1.25, 256}, CornerCase::ZeroSeparated);
  ok = ok && resolvent_residual < 1e-10 && exp_gap < 1e-8 && bound.direct <= bound.bound &&
       enclosed.calculus_residual < 1e-9 && enclosed.resolvent_residual < 1e-9 &&
       separated.calculus_residual < 1e-9 && separated.resolvent_residual < 1e-9;
  return {{"resolvent_identity_residual", resolvent_residual},
          {"contour_exp_vs_series", exp_gap},
          {"contour_nodes", c.nodes},
          {"square_commutator_bound", {{"p", bound.p}, {"direct", bound.direct}, {"bound", bound.bound}}},
          {"corner_zero_enclosed", {{"calculus", enclosed.calculus_residual}, {"resolvent", enclosed.resolvent_residual}}},
          {"corner_zero_separated",
           {{"calculus", separated.calculus_residual}, {"resolvent", separated.resolvent_residual}}}};
}

}  // namespace

CommandResult cmd_fredholm(const Scenario& sc, int jobs) {
  CommandResult out;
  out.report = header(sc, "fredholm");
  const Function& a = sc.function(sc.a_name);
  const Function& b = sc.function(sc.b_name);
  const Function& e = sc.function(sc.e_name);
  bool ok = true;
  const Index lo = sc.fredholm_lo, hi = sc.fredholm_hi;
  out.report["window"] = {lo, hi};

  // twisted commutators of the extension generators
  json kpw = json::array();
  Index margin = 0;
  for (auto [j, jp] : {std::pair<Index, Index>{0, 0}, {1, 0}, {0, 1}, {2, -1}, {-1, 2}}) {
    BasisRegistry basis(sc.basis_cap * 8);
    seed_kpw_basis(sc.matrix, a, b, lo, hi, jp, basis);
    const KpwCommutator k = kpw_commutator(a, j, b, jp, lo, hi, basis);
    margin = std::max(margin, k.margin);
    ok = ok && k.spectrum_gap < 1e-10;
    kpw.push_back({{"j", j}, {"j_prime", jp}, {"margin", k.margin}, {"rows", k.rows}, {"excluded", k.excluded},
                   {"spectrum_size", k.spectrum.size()}, {"spectrum_gap", k.spectrum_gap},
                   {"basis_size", basis.size()}});
  }
  out.report["margin"] = margin;
  out.report["kpw"] = kpw;

  // odd module from the unit-space projection e
  BasisRegistry basis(sc.basis_cap);
  for (const Point& x : CommutatorAssembler(sc.matrix, e, b).columns(basis.cap())) basis.insert(x);
  for (const Term& t : e.terms) basis.insert(t.set.anchor.second);
  for (const Point& x : enumerate_homoclinic(sc.matrix, sc.p, sc.q, std::min(sc.core_bound, 3))) basis.insert(x);
  if (!close_basis({b, e}, basis)) throw Error(Errc::BasisCapExceeded, "module basis does not close under the cap");
  const auto rep = [&basis](const Function& f) { return dense_representation(f, basis); };
  const Eigen::MatrixXcd pe = rep(e);
  const FredholmModule odd = make_odd_module(pe, rep);
  const Eigen::Index dim = odd.dim();
  const bool involution = max_abs(odd.F * odd.F - Eigen::MatrixXcd::Identity(dim, dim)) == 0.0 &&
                          max_abs(odd.F.adjoint() - odd.F) == 0.0;
  const std::vector<SummabilityRow> odd_rows = summability_report(odd, {{sc.b_name, b}}, sc.p_grid);
  const SingularSpectrum r0 = block_spectrum(sc.matrix, e, b, 0, {CommutatorKind::Plain, sc.basis_cap}).spectrum;
  double doubling_gap = 0.0;
  bool exact_zero = true;
  for (const SummabilityRow& r : odd_rows) {
    doubling_gap = std::max(doubling_gap, std::abs(r.q3 - 2.0 * schatten_norm(r0, r.p)));
    exact_zero = exact_zero && r.q1 == 0.0 && r.q2 == 0.0;
  }
  ok = ok && involution && exact_zero && doubling_gap < 1e-10;
  out.report["odd_module"] = {{"dimension", dim},
                              {"F_involution_exact", involution},
                              {"q1_q2_exactly_zero", exact_zero},
                              {"doubling_gap", doubling_gap}};

  // even module: a cyclic permutation of the support of e
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < dim; ++i)
    if (pe(i, i) == 1.0) support.push_back(i);
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t i = 0; i < support.size(); ++i) v(support[(i + 1) % support.size()], support[i]) = 1.0;
  const FredholmModule even = make_even_module(v, pe, rep);
  const double unitary_defect = max_abs(even.F.adjoint() * even.F - Eigen::MatrixXcd::Identity(2 * dim, 2 * dim));
  ok = ok && unitary_defect <= 1e-10;
  const std::vector<SummabilityRow> even_rows = summability_report(even, {{sc.b_name, b}}, sc.p_grid);
  out.report["even_module"] = {{"dimension", even.dim()}, {"corner_rank", support.size()},
                               {"unitary_defect", unitary_defect}, {"table", rows_json(even_rows)}};

  // commutator table over the scenario window and the verdict flip
  const SpectrumAnalysis s = analyze_spectrum(sc, a, b, CommutatorKind::Plain, sc.window_lo, sc.window_hi, sc.p_grid, jobs);
  const std::string cid = "[" + sc.a_name + "," + sc.b_name + "]";
  std::vector<SummabilityRow> table = odd_rows;
  for (const SummabilityRow& r : summability_report(cid, s.merged, sc.p_grid)) table.push_back(r);
  out.report["table"] = rows_json(table);
  std::optional<double> last_div, first_conv;
  for (const SummabilityVerdict& v : s.verdicts) {
    if (v.verdict == Verdict::DivergentTrend && !first_conv) last_div = v.p;
    if (v.verdict == Verdict::Convergent && !first_conv) first_conv = v.p;
  }
  const bool flip = last_div && first_conv && *last_div >= 0.8 * s.threshold && *first_conv <= 1.2 * s.threshold;
  const bool brackets = last_div && first_conv && *last_div < s.threshold && s.threshold < *first_conv;
  out.report["verdict_flip"] = {{"threshold_p", s.threshold},
                                {"brackets_threshold", brackets},
                                {"last_divergent_p", last_div ? json(*last_div) : json(nullptr)},
                                {"first_convergent_p", first_conv ? json(*first_conv) : json(nullptr)},
                                {"within_20_percent", flip}};

  // pairs whose commutator norms do not decay on the fredholm window
  json candidates = json::array();
  for (const auto& [fn, f] : sc.functions)
    for (const auto& [gn, g] : sc.functions) {
      if (f.side != Side::Stable || g.side != Side::Unstable) continue;
      std::vector<double> ns, logs;
      for (const BlockSpectrum& blk : block_spectra(sc.matrix, f, g, lo, hi, {CommutatorKind::Plain, sc.basis_cap}))
        if (blk.trusted && blk.rank > 0) {
          ns.push_back(static_cast<double>(blk.n));
          logs.push_back(std::log(blk.norm));
        }
      if (ns.size() >= 3 && fit_line(ns, logs).slope > -0.1)
        candidates.push_back({{"a", fn}, {"b", gn}, {"nonzero_blocks", ns.size()}});
    }
  out.report["slow_decay_candidates"] = candidates;

  out.report["calculus"] = calculus_checks(sc.seed, ok);
  out.exit_code = ok ? 0 : 1;
  return out;
}

CommandResult cmd_report_all(const Scenario& sc, int jobs) {
  CommandResult out;
  out.report = header(sc, "report-all");
  const std::pair<const char*, CommandResult> parts[] = {
      {"validate", cmd_validate(sc)},       {"metric-audit", cmd_metric_audit(sc)},
      {"auf-audit", cmd_auf_audit(sc)},     {"spectrum", cmd_spectrum(sc, jobs)},
      {"fredholm", cmd_fredholm(sc, jobs)}};
  json codes = json::object();
  for (const auto& [name, r] : parts) {
    out.report[name] = r.report;
    codes[name] = r.exit_code;
    out.exit_code = std::max(out.exit_code, r.exit_code);
    for (const auto& [file, text] : r.files) out.files[std::string(name) + "_" + file] = text;
  }
  out.report["exit_codes"] = codes;
  return out;
}

}  // namespace tmc
