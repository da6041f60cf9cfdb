#include "ahe/scenario.hpp"

#include <filesystem>
#include <fstream>

namespace ahe {

Task task_from_string(const std::string& s) {
  if (s == "check-manifold") return Task::CheckManifold;
  if (s == "degree") return Task::Degree;
  if (s == "classify") return Task::Classify;
  if (s == "hn") return Task::HN;
  if (s == "socle") return Task::Socle;
  if (s == "he-solve") return Task::HESolve;
  if (s == "bogomolov") return Task::Bogomolov;
  if (s == "principal-classify") return Task::PrincipalClassify;
  if (s == "principal-hn") return Task::PrincipalHN;
  if (s == "principal-socle") return Task::PrincipalSocle;
  if (s == "principal-he") return Task::PrincipalHE;
  if (s == "oracle") return Task::Oracle;
  fail("ParseError", "unknown task: " + s);
}

std::string to_string(Task t) {
  switch (t) {
    case Task::CheckManifold: return "check-manifold";
    case Task::Degree: return "degree";
    case Task::Classify: return "classify";
    case Task::HN: return "hn";
    case Task::Socle: return "socle";
    case Task::HESolve: return "he-solve";
    case Task::Bogomolov: return "bogomolov";
    case Task::PrincipalClassify: return "principal-classify";
    case Task::PrincipalHN: return "principal-hn";
    case Task::PrincipalSocle: return "principal-socle";
    case Task::PrincipalHE: return "principal-he";
    case Task::Oracle: return "oracle";
  }
  return "unknown";
}

MatrixXcd parse_matrix(const Json& j, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows * cols)
    fail("ParseError", "matrix must be a row-major array of length rows*cols");
  MatrixXcd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int c = 0; c < cols; ++c) {
      const Json& e = j[i * cols + c];
      if (e.is_number()) {
        m(i, c) = cplx(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2) {
        m(i, c) = cplx(e[0].get<double>(), e[1].get<double>());
      } else {
        fail("ParseError", "matrix entry must be a number or [re, im]");
      }
    }
  return m;
}

Json dump_matrix(const MatrixXcd& m) {
  Json out = Json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      if (std::abs(m(i, j).imag()) < 1e-14)
        out.push_back(m(i, j).real());
      else
        out.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    }
  return out;
}

Json conventions_block() {
  Json c;
  c["c1"] = "c1(h) = -d(dbar(log det H)); no 2*pi or 1/2 factors";
  c["c2"] = "c2(h) = (tr R ^ tr R - tr(R ^ R)) / 2, R = dbar(H^{-1} d H)";
  c["dbar_sign"] = "dbar inserts into the second index group with sign (-1)^p";
  c["einstein_constant"] = "lambda = n deg(V) / (rank Vol), Vol = integral of omega^n / nu";
  c["degree_normalization"] = "degrees defined up to one global positive constant";
  c["quadrature"] = "uniform-grid mean times unit fundamental-domain volume";
  return c;
}

DegreeFunctional Scenario::degree_functional() const {
  if (numeric_degree) {
    if (!manifold || !metric) fail("ValidationError", "numeric degree needs a manifold and metric");
    return DegreeFunctional::numeric(*manifold, *metric);
  }
  return DegreeFunctional::abstract_weights(weights);
}

namespace {

std::uint64_t hash_json(const Json& j) { return fnv1a(j.dump()); }

std::shared_ptr<AffineManifold> build_manifold(const Json& j, int grid) {
  std::string kind = j.value("kind", "torus");
  int dim = j.at("dim").get<int>();
  if (kind == "torus" && !j.contains("generators")) {
    return std::make_shared<AffineManifold>(AffineManifold::torus(dim, grid));
  }
  if (kind == "heisenberg") {
    if (dim != 3) fail("ValidationError", "heisenberg manifold has dimension 3");
    return std::make_shared<AffineManifold>(AffineManifold::heisenberg(grid));
  }
  std::vector<AffineMap> gens;
  for (const Json& gj : j.at("generators")) {
    AffineMap g;
    g.A = parse_matrix(gj.at("A"), dim, dim).real();
    const Json& bj = gj.at("b");
    if (!bj.is_array() || static_cast<int>(bj.size()) != dim)
      fail("ParseError", "generator translation must have length dim");
    g.b.resize(dim);
    for (int i = 0; i < dim; ++i) g.b(i) = bj[i].get<double>();
    gens.push_back(std::move(g));
  }
  std::vector<Word> relators;
  if (j.contains("relators")) {
    for (const Json& w : j.at("relators")) {
      Word word;
      for (const Json& l : w) word.push_back(l.get<int>());
      relators.push_back(word);
    }
  } else if (kind == "torus") {
    relators = commutator_relators(static_cast<int>(gens.size()));
  }
  ManifoldKind mk = kind == "torus" ? ManifoldKind::Torus : ManifoldKind::TwistedQuotient;
  return std::make_shared<AffineManifold>(dim, mk, std::move(gens), std::move(relators), grid);
}

MetricField build_metric(const Json& j, const AffineManifold& m) {
  std::string type = j.value("type", "constant");
  int n = m.dim();
  if (type == "constant") {
    MatrixXd g = j.contains("matrix") ? parse_matrix(j.at("matrix"), n, n).real()
                                      : MatrixXd(MatrixXd::Identity(n, n));
    return MetricField::constant(m, g);
  }
  if (type == "expression") {
    const Json& entries = j.at("entries");
    if (static_cast<int>(entries.size()) != n) fail("ParseError", "metric entries must be n rows");
    std::vector<std::vector<Expr>> ex(n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(entries[i].size()) != n) fail("ParseError", "metric entries must be n x n");
      for (int c = 0; c < n; ++c) ex[i].push_back(Expr::parse(entries[i][c].get<std::string>(), n));
    }
    return MetricField::from_expressions(m, ex);
  }
  fail("ParseError", "metric type must be constant or expression");
}

std::vector<MatrixXcd> build_generators(const Json& j, int rank, int count) {
  if (static_cast<int>(j.size()) != count)
    fail("ValidationError", "generator count mismatch between group and bundle");
  std::vector<MatrixXcd> gens;
  for (const Json& gj : j) gens.push_back(parse_matrix(gj, rank, rank));
  return gens;
}

}  // namespace

Scenario parse_scenario(const Json& doc, std::optional<int> grid_override,
                        std::optional<std::uint64_t> seed_override) {
  Scenario s;
  if (doc.contains("params")) {
    const Json& p = doc.at("params");
    s.params.grid = p.value("grid", 64);
    s.params.dt = p.value("dt", 0.0);
    s.params.max_steps = p.value("max_steps", tol::flow_max_steps);
    s.params.residual_tol = p.value("tol", tol::flow_residual);
    s.params.cond_limit = p.value("cond_limit", tol::flow_cond_limit);
    s.params.seed = p.value("seed", static_cast<std::uint64_t>(0x5eedu));
    s.params.metric_samples = p.value("metric_samples", 3);
  }
  if (grid_override) s.params.grid = *grid_override;
  if (seed_override) s.params.seed = *seed_override;

  s.task = task_from_string(doc.at("task").get<std::string>());

  int generator_count = -1;
  if (doc.contains("manifold")) {
    s.manifold = build_manifold(doc.at("manifold"), s.params.grid);
    generator_count = s.manifold->generator_count();
    if (doc.contains("metric"))
      s.metric.emplace(build_metric(doc.at("metric"), *s.manifold));
    else
      s.metric.emplace(MetricField::constant(*s.manifold, MatrixXd::Identity(s.manifold->dim(),
                                                                             s.manifold->dim())));
  }

  std::vector<Word> synthetic_relators;
  int synthetic_count = 0;
  if (doc.contains("group")) {
    const Json& gj = doc.at("group");
    synthetic_count = gj.at("generators").get<int>();
    if (gj.contains("relators"))
      for (const Json& w : gj.at("relators")) {
        Word word;
        for (const Json& l : w) word.push_back(l.get<int>());
        synthetic_relators.push_back(word);
      }
    generator_count = synthetic_count;
  }

  if (doc.contains("bundle")) {
    const Json& bj = doc.at("bundle");
    Field f = bj.value("field", "C") == "R" ? Field::Real : Field::Complex;
    int rank = bj.at("rank").get<int>();
    if (generator_count < 0) fail("ValidationError", "bundle requires a manifold or group section");
    auto gens = build_generators(bj.at("generators"), rank, generator_count);
    if (s.manifold)
      s.bundle.emplace(s.manifold.get(), f, std::move(gens));
    else
      s.bundle.emplace(synthetic_count, synthetic_relators, f, std::move(gens));
    s.bundle->validate();
  }

  if (doc.contains("principal")) {
    const Json& pj = doc.at("principal");
    ReductiveGroupSpec spec =
        ReductiveGroupSpec::make(group_family_from_string(pj.at("family").get<std::string>()),
                                 pj.at("size").get<int>());
    if (generator_count < 0) fail("ValidationError", "principal bundle requires a manifold or group section");
    auto gens = build_generators(pj.at("generators"), spec.defining_size(), generator_count);
    if (s.manifold)
      s.principal.emplace(s.manifold.get(), spec, std::move(gens));
    else
      s.principal.emplace(synthetic_count, synthetic_relators, spec, std::move(gens));
    s.principal->validate();
  }

  const Json& dj = doc.contains("degree") ? doc.at("degree") : Json::object();
  std::string mode = dj.is_object() ? dj.value("mode", "abstract") : "abstract";
  if (mode == "numeric") {
    s.numeric_degree = true;
    if (!s.manifold) fail("ValidationError", "numeric degree mode requires a manifold");
  } else {
    s.numeric_degree = false;
    if (generator_count < 0) fail("ValidationError", "abstract degree mode requires generators");
    s.weights = VectorXd::Zero(generator_count);
    if (dj.contains("weights")) {
      const Json& w = dj.at("weights");
      if (static_cast<int>(w.size()) != generator_count)
        fail("ValidationError", "weight count must match the generator count");
      for (int i = 0; i < generator_count; ++i) s.weights(i) = w[i].get<double>();
    } else {
      s.weights.setOnes();
    }
  }

  // Mode consistency: flows and the inequality need a numeric-consistent setup.
  if ((s.task == Task::HESolve || s.task == Task::Bogomolov || s.task == Task::PrincipalHE) &&
      !s.manifold)
    fail("ValidationError", "this task needs a manifold (numeric-consistent setup)");

  Json canonical = doc;
  canonical["params"]["grid"] = s.params.grid;
  canonical["params"]["seed"] = s.params.seed;
  s.hash = hash_json(canonical);
  return s;
}

Scenario load_scenario(const std::string& path, std::optional<int> grid_override,
                       std::optional<std::uint64_t> seed_override) {
  std::ifstream f(path);
  if (!f) fail("ParseError", "cannot open scenario file: " + path);
  Json doc;
  try {
    doc = Json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    fail("ParseError", std::string("scenario JSON: ") + e.what());
  }
  return parse_scenario(doc, grid_override, seed_override);
}

namespace {

Json filtration_json(const Filtration& f) {
  Json out;
  out["kind"] = f.kind == FiltrationKind::HarderNarasimhan ? "harder-narasimhan"
                : f.kind == FiltrationKind::Socle          ? "socle"
                                                           : "jordan-holder-like";
  out["length"] = f.length();
  Json steps = Json::array();
  for (const auto& st : f.steps) {
    Json sj;
    sj["rank"] = st.rank;
    sj["quotient_slope"] = st.quotient_slope;
    sj["basis"] = dump_matrix(st.basis);
    steps.push_back(sj);
  }
  out["steps"] = steps;
  out["certification"] = to_string(f.status);
  return out;
}

Json classification_json(const Classification& c) {
  Json out;
  out["verdict"] = to_string(c.verdict);
  out["slope"] = c.slope;
  out["delta0"] = c.delta0;
  out["certification"] = to_string(c.status);
  out["slope_tie_tolerance"] = slope_tie_tol(c.delta0);
  return out;
}

Json flow_json(const FlowReport& r) {
  Json out;
  out["verdict"] = to_string(r.verdict);
  out["steps"] = r.steps;
  out["time"] = r.time;
  out["initial_residual"] = r.initial_residual;
  out["final_residual"] = r.final_residual;
  out["residual_tolerance"] = tol::flow_residual;
  out["condition_ratio"] = r.condition_ratio;
  out["lambda"] = r.lambda;
  out["equivariance_residual"] = r.equivariance_residual;
  out["energy"] = r.energy;
  out["step_unstable_events"] = r.step_unstable;
  if (r.destabilizing) {
    Json d;
    d["basis"] = dump_matrix(r.destabilizing->basis);
    d["alignment_residual"] = r.destabilizing->alignment_residual;
    d["matched_invariant"] = dump_matrix(r.destabilizing->matched_invariant);
    out["destabilizing_candidate"] = d;
  }
  return out;
}

Json bogomolov_json(const BogomolovReport& r) {
  Json out;
  out["value"] = r.value;
  out["samples"] = r.samples;
  out["spread"] = r.spread;
  out["astheno_residual"] = r.astheno_residual;
  out["pointwise_min"] = r.pointwise_min;
  out["c1sq_integral"] = r.c1sq_integral;
  out["pass"] = r.pass;
  out["tolerance"] = 1e-6;
  return out;
}

Json subalgebra_json(const InvariantSubalgebraReport& r) {
  Json out;
  out["middle_term"] = dump_matrix(r.middle_term);
  out["middle_dim"] = static_cast<int>(r.middle_term.cols());
  out["filtration"] = filtration_json(r.filtration);
  out["length"] = r.length;
  out["length_odd"] = r.length_odd;
  out["invariance_residual"] = r.invariance_residual;
  out["bracket_closure_residual"] = r.bracket_closure_residual;
  out["borel_candidate_dim"] = r.borel_candidate_dim;
  out["borel_expected_dim"] = r.borel_expected_dim;
  out["certificates_pass"] = r.certificates_pass;
  out["certification"] = to_string(r.status);
  return out;
}

void write_trace_csv(const std::string& path, const std::vector<FlowTraceRow>& trace) {
  std::ofstream f(path);
  f << "step,t,residual,min_eig,max_eig,energy\n";
  f.precision(17);
  for (const auto& row : trace)
    f << row.step << "," << row.time << "," << row.residual << "," << row.min_eig << ","
      << row.max_eig << "," << row.energy << "\n";
}

}  // namespace

Json run_scenario(const Scenario& s, const std::string& out_dir, bool resume) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  Json rep;
  char hashbuf[32];
  std::snprintf(hashbuf, sizeof(hashbuf), "%016llx", static_cast<unsigned long long>(s.hash));
  rep["scenario_hash"] = std::string(hashbuf);
  rep["task"] = to_string(s.task);
  rep["grid"] = s.params.grid;
  rep["seed"] = s.params.seed;

  auto need_bundle = [&]() -> const Monodromy& {
    if (!s.bundle) fail("ValidationError", "task needs a bundle section");
    return *s.bundle;
  };
  auto need_principal = [&]() -> const PrincipalBundle& {
    if (!s.principal) fail("ValidationError", "task needs a principal section");
    return *s.principal;
  };
  auto need_manifold = [&]() -> const AffineManifold& {
    if (!s.manifold) fail("ValidationError", "task needs a manifold section");
    return *s.manifold;
  };

  switch (s.task) {
    case Task::CheckManifold: {
      const AffineManifold& m = need_manifold();
      ValidationReport v = m.validate();
      Json mv;
      mv["valid"] = v.valid;
      mv["det_deviation"] = v.det_deviation;
      mv["relation_residual"] = v.relation_residual;
      mv["tolerance"] = tol::special_det;
      rep["manifold"] = mv;
      if (s.metric) {
        Json gm;
        gm["min_eigenvalue"] = s.metric->min_eigenvalue();
        gm["equivariance_residual"] = s.metric->equivariance_residual();
        gm["gauduchon_residual"] = check_gauduchon(m, *s.metric);
        gm["astheno_residual"] = check_astheno(m, *s.metric);
        gm["tolerance"] = tol::gauduchon_default;
        rep["metric"] = gm;
      }
      break;
    }
    case Task::Degree: {
      const Monodromy& v = need_bundle();
      DegreeFunctional d = s.degree_functional();
      double deg = d.degree(v);
      rep["degree"] = deg;
      rep["slope"] = deg / v.rank();
      rep["mode"] = s.numeric_degree ? "numeric" : "abstract";
      rep["tolerance_context"] = s.numeric_degree ? "numeric degree, grid-dependent, |.| <= 1e-6 at N=64"
                                                  : "abstract degree, exact up to roundoff";
      break;
    }
    case Task::Classify: {
      const Monodromy& v = need_bundle();
      DegreeFunctional d = s.degree_functional();
      rep["classification"] = classification_json(classify(v, d, s.params.seed));
      break;
    }
    case Task::HN: {
      const Monodromy& v = need_bundle();
      DegreeFunctional d = s.degree_functional();
      rep["filtration"] = filtration_json(hn_filtration(v, d, s.params.seed));
      break;
    }
    case Task::Socle: {
      const Monodromy& v = need_bundle();
      DegreeFunctional d = s.degree_functional();
      MatrixXcd soc = socle(v, d, s.params.seed);
      rep["socle_rank"] = static_cast<int>(soc.cols());
      rep["socle_basis"] = dump_matrix(soc);
      rep["filtration"] = filtration_json(socle_filtration(v, d, s.params.seed));
      break;
    }
    case Task::HESolve: {
      const Monodromy& v = need_bundle();
      const AffineManifold& m = need_manifold();
      DegreeFunctional d = s.degree_functional();
      FlowParams fp;
      fp.dt = s.params.dt;
      fp.max_steps = s.params.max_steps;
      fp.residual_tol = s.params.residual_tol;
      fp.cond_limit = s.params.cond_limit;

      std::string ckpath = (fs::path(out_dir) / "checkpoint.bin").string();
      FlowReport fr;
      bool resumed = false;
      if (resume) {
        auto cp = load_checkpoint(ckpath);
        if (cp && cp->scenario_key == s.hash && cp->rank == v.rank() &&
            cp->npoints == m.npoints()) {
          HermitianMetricField h(v);
          for (long pt = 0; pt < m.npoints(); ++pt)
            h.at(pt) = Eigen::Map<const MatrixXcd>(&cp->data[pt * cp->rank * cp->rank], cp->rank,
                                                   cp->rank);
          fp.max_steps = std::max(0, s.params.max_steps - cp->steps);
          fr = flow_resume(v, d, *s.metric, h, cp->steps, cp->time, fp);
          resumed = true;
        }
      }
      if (!resumed) {
        HermitianMetricField h0 = synthesize_admissible_metric(v);
        fr = flow_run(v, d, *s.metric, h0, fp);
      }
      rep["flow"] = flow_json(fr);
      rep["resumed"] = resumed;
      std::string trace_path = (fs::path(out_dir) / "trace.csv").string();
      write_trace_csv(trace_path, fr.trace);
      rep["artifacts"]["trace_csv"] = trace_path;
      if (fr.metric) {
        save_checkpoint(ckpath, s.hash, fr.steps, fr.time, *fr.metric);
        rep["artifacts"]["checkpoint"] = ckpath;
      }
      if (fr.verdict == FlowVerdict::Converged) {
        MatrixXcd flat = flat_section_space(v);
        if (flat.cols() > 0) {
          double worst = 0.0;
          for (int c = 0; c < flat.cols(); ++c)
            worst = std::max(worst, flat_section_parallel_check(v, *fr.metric, flat.col(c)));
          rep["flat_section_residual"] = worst;
          rep["flat_section_tolerance"] = 1e-5;
        }
      }
      break;
    }
    case Task::Bogomolov: {
      const Monodromy& v = need_bundle();
      DegreeFunctional d = s.degree_functional();
      BogomolovReport br =
          bogomolov_value(v, *s.metric, nullptr, d, s.params.metric_samples, s.params.seed);
      rep["bogomolov"] = bogomolov_json(br);
      rep["graded_sum"] = bogomolov_graded_sum(v, *s.metric, d, s.params.seed);
      break;
    }
    case Task::PrincipalClassify: {
      const PrincipalBundle& e = need_principal();
      DegreeFunctional d = s.degree_functional();
      rep["ad_classification"] = classification_json(classify(ad_bundle(e), d, s.params.seed));
      rep["semistable"] = is_semistable_principal(e, d, s.params.seed);
      rep["polystable"] = is_polystable_principal(e, d, s.params.seed);
      if (e.spec().is_real()) {
        RealComplexEquivalence eq = equivalence_check(e, d, s.params.seed);
        Json ej;
        ej["semistable_real"] = eq.semistable_real;
        ej["semistable_complex"] = eq.semistable_complex;
        ej["polystable_real"] = eq.polystable_real;
        ej["polystable_complex"] = eq.polystable_complex;
        ej["conjugation_invariance"] = eq.conjugation_invariance;
        ej["consistent"] = eq.consistent;
        rep["real_complex_equivalence"] = ej;
      }
      break;
    }
    case Task::PrincipalHN: {
      const PrincipalBundle& e = need_principal();
      DegreeFunctional d = s.degree_functional();
      rep["hn_reduction"] = subalgebra_json(hn_reduction(e, d, s.params.seed));
      break;
    }
    case Task::PrincipalSocle: {
      const PrincipalBundle& e = need_principal();
      DegreeFunctional d = s.degree_functional();
      rep["socle_reduction"] = subalgebra_json(socle_reduction(e, d, s.params.seed));
      break;
    }
    case Task::PrincipalHE: {
      const PrincipalBundle& e = need_principal();
      FlowParams fp;
      fp.dt = s.params.dt;
      fp.max_steps = s.params.max_steps;
      fp.residual_tol = s.params.residual_tol;
      fp.cond_limit = s.params.cond_limit;
      HEPrincipalReport hr = he_structure_principal(e, *s.metric, fp, s.params.seed);
      Json hj;
      hj["ad_flow"] = flow_json(hr.ad_flow);
      if (hr.defining_flow) hj["defining_flow"] = flow_json(*hr.defining_flow);
      hj["centrality_residual"] = hr.centrality_residual;
      hj["trace_constancy"] = hr.trace_constancy;
      hj["bracket_residual"] = hr.bracket_residual;
      hj["conjugation_residual"] = hr.conjugation_residual;
      hj["pass"] = hr.pass;
      hj["tolerance"] = 1e-5;
      rep["principal_he"] = hj;
      std::string trace_path = (fs::path(out_dir) / "trace.csv").string();
      write_trace_csv(trace_path, hr.ad_flow.trace);
      rep["artifacts"]["trace_csv"] = trace_path;
      break;
    }
    case Task::Oracle: {
      const Monodromy& v = need_bundle();
      DegreeFunctional d = s.degree_functional();
      OracleReport orep = oracle_analyze(v, d);
      Json oj;
      oj["subspace_count"] = static_cast<int>(orep.subspaces.size());
      oj["delta0"] = orep.delta0;
      oj["max_destabilizing_rank"] = static_cast<int>(orep.max_destabilizing.cols());
      oj["hn_ranks"] = orep.hn_ranks;
      oj["hn_slopes"] = orep.hn_slopes;
      oj["verdict"] = to_string(orep.verdict);
      if (orep.socle_basis.cols() > 0) oj["socle_rank"] = static_cast<int>(orep.socle_basis.cols());
      rep["oracle"] = oj;

      // Diff against the main path.
      Classification main_cl = classify(v, d, s.params.seed);
      Filtration main_hn = hn_filtration(v, d, s.params.seed);
      Json match;
      match["verdict_agrees"] = to_string(main_cl.verdict) == to_string(orep.verdict);
      bool ranks_agree = main_hn.length() == static_cast<int>(orep.hn_ranks.size());
      double worst_angle = 0.0;
      if (ranks_agree) {
        for (int i = 0; i < main_hn.length(); ++i) {
          ranks_agree = ranks_agree && main_hn.steps[i].rank == orep.hn_ranks[i];
          if (ranks_agree)
            worst_angle = std::max(
                worst_angle, principal_angle_distance(main_hn.steps[i].basis, orep.hn_bases[i]));
        }
      }
      match["hn_ranks_agree"] = ranks_agree;
      match["hn_max_principal_angle"] = worst_angle;
      match["hn_angle_tolerance"] = tol::subspace_match;
      rep["main_path_match"] = match;
      break;
    }
  }

  rep["conventions"] = conventions_block();

  std::ofstream rf(fs::path(out_dir) / "report.json");
  rf << rep.dump(2) << "\n";
  return rep;
}

}  // namespace ahe
