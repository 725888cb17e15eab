#include "rigidlab/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "rigidlab/errors.hpp"

namespace rigidlab {

using nlohmann::json;

const char* to_string(Suite s) {
  switch (s) {
    case Suite::hodge: return "hodge";
    case Suite::rigidity: return "rigidity";
    case Suite::korn: return "korn";
    case Suite::counterexample2d: return "counterexample2d";
    case Suite::whitney: return "whitney";
    case Suite::refine: return "refine";
  }
  return "rigidity";
}

const char* csv_header() { return "suite,case,n,N,theorem,lhs,rhs_elastic,rhs_incompat,ratio,fitted_parameters"; }

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

int line_of_key(const std::string& text, const std::string& key) {
  const std::size_t pos = text.find("\"" + key + "\"");
  return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

Suite suite_from_string(const std::string& s, int line, const std::string& field) {
  for (Suite q : {Suite::hodge, Suite::rigidity, Suite::korn, Suite::counterexample2d, Suite::whitney, Suite::refine})
    if (s == to_string(q)) return q;
  throw ParseError("unknown suite " + s, line, field);
}

bool needs_cases(Suite s) { return s == Suite::hodge || s == Suite::rigidity || s == Suite::korn || s == Suite::refine; }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json matrix_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (int j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

std::vector<double> fitted_parameters(const InequalityReport& r) {
  std::vector<double> p;
  if (r.fitted.size() == 0) return p;
  const auto a = r.theorem == Theorem::rigidity ? parameters_from_rotation(r.fitted) : parameters_from_skew(r.fitted);
  for (int q = 0; q < skew_parameter_count(r.n); ++q) p.push_back(a[q]);
  return p;
}

std::string join_params(const std::vector<double>& p) {
  std::string s;
  for (std::size_t q = 0; q < p.size(); ++q) s += (q ? ";" : "") + fmt(p[q]);
  return s;
}

std::string now_iso() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Job {
  std::function<json()> run;
  json identity;
};

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed config: ") + e.what(), line_of_offset(text, e.byte), "");
  }
  if (!j.is_object()) throw ParseError("config must be an object", 1, "");
  ExperimentConfig cfg;
  auto need_array = [&](const char* key) -> const json& {
    if (!j.contains(key)) throw ParseError(std::string("missing field ") + key, 1, key);
    const json& a = j.at(key);
    if (!a.is_array()) throw ParseError(std::string(key) + " must be an array", line_of_key(text, key), key);
    return a;
  };

  const json& suites = need_array("suites");
  if (suites.empty()) throw ParseError("no suites selected", line_of_key(text, "suites"), "suites");
  for (std::size_t q = 0; q < suites.size(); ++q) {
    const std::string field = "suites[" + std::to_string(q) + "]";
    if (!suites[q].is_string()) throw ParseError("suite must be a string", line_of_key(text, "suites"), field);
    cfg.suites.push_back(suite_from_string(suites[q].get<std::string>(), line_of_key(text, "suites"), field));
  }

  const json& res = need_array("resolutions");
  if (res.empty()) throw ParseError("no resolutions", line_of_key(text, "resolutions"), "resolutions");
  for (std::size_t q = 0; q < res.size(); ++q) {
    const std::string field = "resolutions[" + std::to_string(q) + "]";
    if (!res[q].is_number_integer() || res[q].get<int>() < 4)
      throw ParseError("resolution must be an integer >= 4", line_of_key(text, "resolutions"), field);
    const int v = res[q].get<int>();
    if (!cfg.resolutions.empty() && v <= cfg.resolutions.back())
      throw ParseError("resolutions must be strictly increasing", line_of_key(text, "resolutions"), field);
    cfg.resolutions.push_back(v);
  }

  if (j.contains("cases")) {
    const json& cases = need_array("cases");
    for (std::size_t q = 0; q < cases.size(); ++q) {
      const std::string field = "cases[" + std::to_string(q) + "]";
      try {
        cfg.cases.push_back(case_from_json(cases[q], field));
      } catch (const ParseError& e) {
        const std::string key = e.field().substr(e.field().rfind('.') + 1);
        throw ParseError(e.what(), line_of_key(text, key), e.field());
      }
      if (cfg.cases.back().id.empty()) cfg.cases.back().id = "case-" + std::to_string(q);
    }
  }
  if (j.contains("corpus")) {
    const json& c = j.at("corpus");
    if (!c.is_object()) throw ParseError("corpus must be an object", line_of_key(text, "corpus"), "corpus");
    try {
      cfg.corpus_dim = c.value("dim", 3);
      cfg.corpus_seed = c.value("seed", std::uint64_t{0});
      cfg.corpus_linear = c.value("linear", false);
    } catch (const json::exception& e) {
      throw ParseError(e.what(), line_of_key(text, "corpus"), "corpus");
    }
    if (cfg.corpus_dim != 2 && cfg.corpus_dim != 3)
      throw ParseError("corpus dim must be 2 or 3", line_of_key(text, "corpus"), "corpus.dim");
  }
  bool cases_needed = false;
  for (Suite s : cfg.suites) cases_needed = cases_needed || needs_cases(s);
  if (cases_needed && cfg.cases.empty() && !cfg.corpus_seed)
    throw ParseError("selected suites need at least one case", line_of_key(text, "cases"), "cases");

  if (j.contains("domains")) {
    const json& d = need_array("domains");
    cfg.domains.clear();
    for (std::size_t q = 0; q < d.size(); ++q) {
      const std::string field = "domains[" + std::to_string(q) + "]";
      if (!d[q].is_string()) throw ParseError("domain must be a string", line_of_key(text, "domains"), field);
      const std::string name = d[q].get<std::string>();
      if (name != "cube" && name != "square" && name != "lshape" && name != "ball")
        throw ParseError("unknown domain " + name, line_of_key(text, "domains"), field);
      cfg.domains.push_back(name);
    }
  }
  if (j.contains("whitney_dim")) {
    const json& d = j.at("whitney_dim");
    if (!d.is_number_integer() || (d.get<int>() != 2 && d.get<int>() != 3))
      throw ParseError("whitney_dim must be 2 or 3", line_of_key(text, "whitney_dim"), "whitney_dim");
    cfg.whitney_dim = d.get<int>();
  }
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) throw ParseError("tolerances must be an object", line_of_key(text, "tolerances"), "tolerances");
    for (const auto& [key, ptr] : {std::pair<const char*, double*>{"solver", &cfg.solver_tolerance},
                                   std::pair<const char*, double*>{"check", &cfg.check_tolerance}}) {
      if (!t.contains(key)) continue;
      if (!t.at(key).is_number() || !(t.at(key).get<double>() > 0.0))
        throw ParseError("tolerance must be a positive number", line_of_key(text, key),
                         std::string("tolerances.") + key);
      *ptr = t.at(key).get<double>();
    }
  }
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string())
      throw ParseError("output_dir must be a string", line_of_key(text, "output_dir"), "output_dir");
    cfg.output_dir = j.at("output_dir").get<std::string>();
  }
  if (j.contains("refine")) {
    const json& r = j.at("refine");
    if (!r.is_object()) throw ParseError("refine must be an object", line_of_key(text, "refine"), "refine");
    if (r.contains("metric")) {
      if (!r.at("metric").is_string()) throw ParseError("metric must be a string", line_of_key(text, "metric"), "refine.metric");
      cfg.refine_metric = r.at("metric").get<std::string>();
      const std::string& m = cfg.refine_metric;
      if (m != "rigidity_ratio" && m != "korn_ratio" && m != "lemma_bb_ratio" && m != "div_curl_ratio")
        throw ParseError("unknown metric " + m, line_of_key(text, "metric"), "refine.metric");
    }
    if (r.contains("log_fit")) {
      if (!r.at("log_fit").is_boolean())
        throw ParseError("log_fit must be a boolean", line_of_key(text, "log_fit"), "refine.log_fit");
      cfg.refine_log_fit = r.at("log_fit").get<bool>();
    }
  }
  for (Suite s : cfg.suites)
    if (s == Suite::refine && cfg.resolutions.size() < 3)
      throw ParseError("refine needs at least three resolutions", line_of_key(text, "resolutions"), "resolutions");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

AffineFit fit_affine(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("affine fit needs two or more points");
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t q = 0; q < x.size(); ++q) {
    sx += x[q];
    sy += y[q];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t q = 0; q < x.size(); ++q) {
    sxx += (x[q] - mx) * (x[q] - mx);
    sxy += (x[q] - mx) * (y[q] - my);
    syy += (y[q] - my) * (y[q] - my);
  }
  AffineFit f;
  if (sxx == 0.0) throw InputError("affine fit needs distinct abscissae");
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

double evaluate_metric(const CaseSpec& spec, int resolution, const std::string& metric) {
  const GeneratedCase g = generate(spec, resolution);
  if (metric == "rigidity_ratio") return rigidity_report(g.beta, g.measure).ratio;
  if (metric == "korn_ratio") return korn_report(g.beta, g.measure).ratio;
  if (metric == "lemma_bb_ratio") return lemma_bb_ratio(hodge_split(g.beta).residual);
  if (metric == "div_curl_ratio") {
    const DivCurlSolution z = solve_div_curl(DivCurlProblem{g.measure});
    return lp_norm(z.field, NormSpec::critical(spec.dim)) / total_variation(g.measure, g.measure.domain());
  }
  throw InputError("unknown metric " + metric);
}

RefineTable refine_study(const CaseSpec& spec, const std::vector<int>& resolutions, const std::string& metric,
                         bool log_fit) {
  if (resolutions.size() < 3) throw InputError("refinement study needs at least three resolutions");
  RefineTable t;
  t.metric = metric;
  t.resolutions = resolutions;
  for (int n : resolutions) t.values.push_back(evaluate_metric(spec, n, metric));
  for (std::size_t q = 0; q + 1 < t.values.size(); ++q) {
    const double a = t.values[q], b = t.values[q + 1];
    t.drift_percent.push_back(a == b ? 0.0 : 100.0 * std::abs(b - a) / std::abs(a));
  }
  if (log_fit) {
    std::vector<double> x, y;
    for (std::size_t q = 0; q < resolutions.size(); ++q) {
      x.push_back(std::log(static_cast<double>(resolutions[q])));
      y.push_back(t.values[q] * t.values[q]);
    }
    t.log_fit = fit_affine(x, y);
  }
  return t;
}

namespace {

json theorem_record(Suite suite, const CaseSpec& spec, int N, const InequalityReport& r) {
  json rec{{"suite", to_string(suite)},
           {"case", spec.id},
           {"kind", to_string(spec.kind)},
           {"n", r.n},
           {"N", N},
           {"theorem", to_string(r.theorem)},
           {"exponent", r.exponent},
           {"lhs", r.lhs},
           {"rhs_elastic", r.rhs_elastic},
           {"rhs_incompat", r.rhs_incompat},
           {"ratio", std::isfinite(r.ratio) ? json(r.ratio) : json("inf")},
           {"fitted", matrix_json(r.fitted)},
           {"fitted_parameters", fitted_parameters(r)},
           {"consistency", r.consistency},
           {"ambiguous", r.ambiguous}};
  json checks;
  checks["ratio_finite"] = std::isfinite(r.ratio) && r.ratio >= 0.0;
  if (r.theorem == Theorem::rigidity) {
    const int n = r.n;
    const double orth = (r.fitted.transpose() * r.fitted - Mat::Identity(n, n)).norm();
    checks["rotation"] = orth <= 1e-10 && std::abs(r.fitted.determinant() - 1.0) <= 1e-10;
  } else {
    checks["antisymmetric"] = (r.fitted + r.fitted.transpose()).norm() == 0.0;
  }
  rec["checks"] = checks;
  return rec;
}

json hodge_record(const CaseSpec& spec, int N, const ExperimentConfig& cfg) {
  const GeneratedCase g = generate(spec, N);
  NeumannOptions opts;
  opts.tolerance = cfg.solver_tolerance;
  const HodgeSplit h = hodge_split(g.beta, opts);
  json solver = json::array();
  for (const auto& d : h.diagnostics)
    solver.push_back({{"method", d.method},
                      {"iterations", d.iterations},
                      {"final_residual", d.final_residual},
                      {"compatibility_residual", d.compatibility_residual},
                      {"residual_history", d.residual_history}});
  json rec{{"suite", "hodge"},
           {"case", spec.id},
           {"kind", to_string(spec.kind)},
           {"n", spec.dim},
           {"N", N},
           {"divergence", h.certified.divergence},
           {"normal_trace", h.certified.normal_trace},
           {"curl_transfer", h.certified.curl_transfer},
           {"solver", solver}};
  rec["checks"] = {{"divergence", h.certified.divergence <= cfg.check_tolerance},
                   {"normal_trace", h.certified.normal_trace <= cfg.check_tolerance},
                   {"curl_transfer", h.certified.curl_transfer <= 1e-12}};
  return rec;
}

json whitney_record(const std::string& domain, int dim, int N) {
  const DomainPtr dom = Domain::named(domain, dim, N);
  const WhitneyCover cover = whitney_cover(dom);
  const CoverCheck c = check_cover(cover);
  const PartitionOfUnity pou = partition_of_unity(cover);
  json rec{{"suite", "whitney"},
           {"case", domain},
           {"n", dim},
           {"N", N},
           {"cubes", cover.cubes.size()},
           {"max_multiplicity", c.max_multiplicity},
           {"max_neighbor_ratio", c.max_neighbor_ratio},
           {"uncovered_fraction", cover.uncovered_fraction},
           {"pou_sum_defect", pou.sum_defect},
           {"pou_gradient_sum_defect", pou.gradient_sum_defect},
           {"pou_gradient_bound", pou.gradient_bound}};
  rec["checks"] = {{"chain", c.chain},
                   {"distance_window", c.distance_window},
                   {"neighbor_ratio", c.max_neighbor_ratio <= 4.0},
                   {"partition_sum", pou.sum_defect <= 1e-12},
                   {"partition_gradient_sum", pou.gradient_sum_defect <= 1e-12},
                   {"partition_gradient_bound", pou.gradient_bound <= partition_gradient_constant}};
  return rec;
}

json counterexample_record(int N) {
  const DomainPtr dom = Domain::unit_cube(2, N);
  const GeneratedCase g = gen_point_dislocation_2d(dom, {1.0, 0.0}, {0.5, 0.5, 0.0});
  const HodgeSplit h = hodge_split(g.beta);
  const double ratio = lemma_bb_ratio(h.residual);
  return json{{"suite", "counterexample2d"}, {"case", "point-2d"}, {"n", 2},       {"N", N},
              {"metric", "lemma_bb_ratio"},  {"value", ratio},      {"checks", json::object()}};
}

std::string csv_rows(const json& rec) {
  const std::string suite = rec.at("suite");
  std::ostringstream os;
  auto num = [&](const char* key) -> std::string {
    if (!rec.contains(key)) return "";
    const json& v = rec.at(key);
    return v.is_number() ? fmt(v.get<double>()) : v.get<std::string>();
  };
  const std::string head = suite + "," + rec.value("case", std::string()) + "," +
                           std::to_string(rec.value("n", 0)) + ",";
  if (rec.contains("error")) {
    os << head << rec.value("N", 0) << ",error,,,,,\n";
    return os.str();
  }
  if (suite == "rigidity" || suite == "korn") {
    std::vector<double> p = rec.at("fitted_parameters").get<std::vector<double>>();
    os << head << rec.at("N").get<int>() << "," << rec.at("theorem").get<std::string>() << "," << num("lhs") << ","
       << num("rhs_elastic") << "," << num("rhs_incompat") << "," << num("ratio") << "," << join_params(p) << "\n";
  } else if (suite == "hodge") {
    const double worst = std::max({rec.at("divergence").get<double>(), rec.at("normal_trace").get<double>(),
                                   rec.at("curl_transfer").get<double>()});
    os << head << rec.at("N").get<int>() << ",hodge_residual,,,," << fmt(worst) << ",\n";
  } else if (suite == "whitney") {
    os << head << rec.at("N").get<int>() << ",pou_gradient_bound,,,," << num("pou_gradient_bound") << ",\n";
  } else if (suite == "counterexample2d") {
    os << head << rec.at("N").get<int>() << ",lemma_bb_ratio,,,," << num("value") << ",\n";
  } else if (suite == "refine") {
    const auto res = rec.at("resolutions").get<std::vector<int>>();
    const auto vals = rec.at("values").get<std::vector<double>>();
    for (std::size_t q = 0; q < res.size(); ++q)
      os << head << res[q] << "," << rec.at("metric").get<std::string>() << ",,,," << fmt(vals[q]) << ",\n";
  }
  return os.str();
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg_in, const RunOptions& opts) {
  ExperimentConfig cfg = cfg_in;
  const std::string started = now_iso();
  std::vector<CaseSpec> cases = cfg.cases;
  std::optional<std::uint64_t> corpus_seed = cfg.corpus_seed;
  if (opts.seed) corpus_seed = *opts.seed;
  if (corpus_seed) {
    auto corpus = standard_corpus(cfg.corpus_dim, *corpus_seed, cfg.corpus_linear);
    cases.insert(cases.end(), corpus.begin(), corpus.end());
  }

  std::vector<Job> jobs;
  for (Suite s : cfg.suites) {
    switch (s) {
      case Suite::rigidity:
      case Suite::korn:
        for (const auto& c : cases)
          for (int N : cfg.resolutions)
            jobs.push_back({[s, c, N, &cfg] {
                              const GeneratedCase g = generate(c, N);
                              ReportOptions ro;
                              ro.consistency_tolerance = cfg.check_tolerance;
                              const InequalityReport r =
                                  s == Suite::rigidity ? rigidity_report(g.beta, g.measure, ro) : korn_report(g.beta, g.measure, ro);
                              return theorem_record(s, c, N, r);
                            },
                            {{"suite", to_string(s)}, {"case", c.id}, {"n", c.dim}, {"N", N}}});
        break;
      case Suite::hodge:
        for (const auto& c : cases)
          for (int N : cfg.resolutions)
            jobs.push_back({[c, N, &cfg] { return hodge_record(c, N, cfg); },
                            {{"suite", "hodge"}, {"case", c.id}, {"n", c.dim}, {"N", N}}});
        break;
      case Suite::whitney:
        for (const auto& d : cfg.domains)
          for (int N : cfg.resolutions)
            jobs.push_back({[d, N, &cfg] { return whitney_record(d, cfg.whitney_dim, N); },
                            {{"suite", "whitney"}, {"case", d}, {"n", cfg.whitney_dim}, {"N", N}}});
        break;
      case Suite::counterexample2d:
        for (int N : cfg.resolutions)
          jobs.push_back({[N] { return counterexample_record(N); },
                          {{"suite", "counterexample2d"}, {"case", "point-2d"}, {"n", 2}, {"N", N}}});
        break;
      case Suite::refine:
        for (const auto& c : cases)
          jobs.push_back({[c, &cfg] {
                            const RefineTable t = refine_study(c, cfg.resolutions, cfg.refine_metric, cfg.refine_log_fit);
                            json rec{{"suite", "refine"},       {"case", c.id},          {"n", c.dim},
                                     {"metric", t.metric},      {"resolutions", t.resolutions},
                                     {"values", t.values},      {"drift_percent", t.drift_percent},
                                     {"checks", json::object()}};
                            if (t.log_fit)
                              rec["log_fit"] = {{"slope", t.log_fit->slope},
                                                {"intercept", t.log_fit->intercept},
                                                {"r2", t.log_fit->r2}};
                            return rec;
                          },
                          {{"suite", "refine"}, {"case", c.id}, {"n", c.dim}}});
        break;
    }
  }

  std::vector<json> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t q = next.fetch_add(1);
      if (q >= jobs.size()) return;
      try {
        results[q] = jobs[q].run();
      } catch (const std::exception& e) {
        json rec = jobs[q].identity;
        rec["error"] = e.what();
        results[q] = rec;
      }
    }
  };
  const int threads = std::max(1, std::min<int>(opts.threads, static_cast<int>(std::max<std::size_t>(jobs.size(), 1))));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  RunResult out;
  json failures = json::array();
  int checks = 0;
  json constants = json::object();
  json reports = json::array();
  std::vector<double> ce_values;
  std::vector<int> ce_res;
  for (const auto& rec : results) {
    if (rec.contains("error")) {
      failures.push_back(rec.value("suite", std::string()) + "/" + rec.value("case", std::string()) + ": " +
                         rec.at("error").get<std::string>());
      ++checks;
    } else {
      for (const auto& [name, ok] : rec.at("checks").items()) {
        ++checks;
        if (!ok.get<bool>())
          failures.push_back(rec.at("suite").get<std::string>() + "/" + rec.at("case").get<std::string>() + "/N=" +
                             std::to_string(rec.value("N", 0)) + ": " + name);
      }
      const std::string suite = rec.at("suite");
      if ((suite == "rigidity" || suite == "korn") && rec.at("ratio").is_number()) {
        const std::string key = suite + "/n=" + std::to_string(rec.at("n").get<int>()) + "/N=" +
                                std::to_string(rec.at("N").get<int>());
        const double v = rec.at("ratio").get<double>();
        if (!constants.contains(key) || constants[key].get<double>() < v) constants[key] = v;
      }
      if (suite == "rigidity" || suite == "korn")
        reports.push_back({{"suite", suite},
                           {"case", rec.at("case")},
                           {"N", rec.at("N")},
                           {"lhs", rec.at("lhs")},
                           {"ratio", rec.at("ratio")}});
      if (suite == "counterexample2d") {
        ce_values.push_back(rec.at("value").get<double>());
        ce_res.push_back(rec.at("N").get<int>());
      }
    }
    out.records.push_back(rec);
  }
  out.summary["empirical_constants"] = constants;
  out.summary["reports"] = reports;
  if (!ce_values.empty()) {
    bool increasing = true;
    for (std::size_t q = 1; q < ce_values.size(); ++q) increasing = increasing && ce_values[q] > ce_values[q - 1];
    json ce{{"resolutions", ce_res}, {"ratios", ce_values}, {"strictly_increasing", increasing}};
    if (ce_values.size() >= 2) {
      std::vector<double> x, y;
      for (std::size_t q = 0; q < ce_values.size(); ++q) {
        x.push_back(std::log(static_cast<double>(ce_res[q])));
        y.push_back(ce_values[q] * ce_values[q]);
      }
      const AffineFit f = fit_affine(x, y);
      ce["log_fit"] = {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
    }
    ++checks;
    if (!increasing) failures.push_back("counterexample2d: ratio not strictly increasing");
    out.summary["counterexample2d"] = ce;
  }
  out.exit_status = failures.empty() ? 0 : 1;
  out.summary["checks"] = {{"total", checks}, {"failed", failures.size()}};
  out.summary["failures"] = failures;
  out.summary["exit_status"] = out.exit_status;
  out.summary["tolerances"] = {{"solver", cfg.solver_tolerance}, {"check", cfg.check_tolerance}};

  std::ostringstream csv;
  csv << csv_header() << "\n";
  for (const auto& rec : out.records) csv << csv_rows(rec);
  out.csv = csv.str();

  if (opts.write_files) {
    std::string dir = opts.out_dir;
    if (dir.empty()) dir = cfg.output_dir;
    if (dir.empty()) {
      const char* env = std::getenv("RIGIDLAB_OUT");
      dir = env && *env ? env : "rigidlab-out";
    }
    std::filesystem::create_directories(dir);
    {
      std::ofstream f(dir + "/records.jsonl");
      for (const auto& rec : out.records) f << rec.dump() << "\n";
    }
    std::ofstream(dir + "/table.csv") << out.csv;
    std::ofstream(dir + "/summary.json") << out.summary.dump(2) << "\n";
    json meta{{"started", started},
              {"finished", now_iso()},
              {"threads", threads},
              {"jobs", jobs.size()},
              {"output_dir", dir}};
    if (corpus_seed) meta["corpus_seed"] = *corpus_seed;
    std::ofstream(dir + "/metadata.json") << meta.dump(2) << "\n";
  }
  return out;
}

}  // namespace rigidlab
