// podsurf: generate -> train -> predict -> evaluate -> optimize.
//
// Exit codes: 0 success, 2 usage error, 1 runtime error. Every error is one
// line on stderr starting with error[Code]:.

#include "podsurf/error.hpp"
#include "podsurf/io.hpp"
#include "podsurf/study.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace podsurf;

namespace {

// Value-level parse failures (unknown FOM id, bad regressor spec) count as
// usage errors, not runtime failures.
template <class F>
auto as_usage(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    fail(ErrorCode::Usage, e.what());
  }
}

std::uint64_t default_seed() {
  const char* env = std::getenv("PODSURF_SEED");
  if (env == nullptr || *env == '\0') return 42;
  std::uint64_t v = 0;
  const std::string s(env);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    fail(ErrorCode::Usage, "PODSURF_SEED is not an unsigned integer: '" + s + "'");
  return v;
}

ParameterSpace parse_bounds(const std::string& text) {
  // "lo:hi,lo:hi,..."
  std::vector<Bound> bounds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) fail(ErrorCode::Usage, "bound '" + item + "' is not lo:hi");
    const auto lo = io::parse_csv_row(item.substr(0, colon));
    const auto hi = io::parse_csv_row(item.substr(colon + 1));
    if (lo.size() != 1 || hi.size() != 1) fail(ErrorCode::Usage, "bound '" + item + "' is not lo:hi");
    bounds.push_back({lo[0], hi[0]});
  }
  return ParameterSpace(bounds);
}

std::string format_row(const Eigen::VectorXd& v) {
  std::string line;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) line += ',';
    line += io::format_double(v[i]);
  }
  return line;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string fom;
  std::size_t count = 0;
  std::string strategy = "random";
  std::string field;
  std::string out = "snapshots.psnp";
};

int run_generate(const GenerateArgs& a, std::uint64_t seed) {
  if (a.count == 0) fail(ErrorCode::Usage, "--count must be >= 1");
  const FomProblem fom(as_usage([&] { return parse_fom_id(a.fom); }));
  const auto strategy = as_usage([&] { return parse_strategy(a.strategy); });
  const std::string field = a.field.empty() ? fom.primary_field() : a.field;
  if (std::find(fom.field_names().begin(), fom.field_names().end(), field) == fom.field_names().end())
    fail(ErrorCode::Usage, "FOM " + a.fom + " has no field '" + field + "'");

  const auto params = sample_space(fom.space(), strategy, a.count, seed);
  const auto snaps = generate_snapshots(fom, params);
  const auto& sm = snaps.at(field);
  write_snapshots(sm, a.out);
  std::cout << "N=" << sm.n_dof() << " n=" << sm.n_snap() << " p=" << sm.n_params() << "\n";
  return 0;
}

struct TrainArgs {
  std::string snapshots;
  std::optional<std::size_t> rank;
  std::optional<double> energy;
  std::string regressor = "gpr";
  std::string fom;
  std::string bounds;
  bool center = false;
  std::string out = "model.json";
};

int run_train(const TrainArgs& a, std::uint64_t seed) {
  Truncation trunc;
  if (a.rank) {
    if (*a.rank == 0) fail(ErrorCode::Usage, "--rank must be >= 1");
    trunc = RankTruncation{*a.rank};
  } else if (a.energy) {
    if (!(*a.energy > 0.0 && *a.energy <= 1.0)) fail(ErrorCode::Usage, "--energy must be in (0, 1]");
    trunc = EnergyTruncation{*a.energy};
  } else {
    fail(ErrorCode::Usage, "one of --rank or --energy is required");
  }

  FitConfig cfg;
  cfg.regressor = as_usage([&] { return parse_regressor_spec(a.regressor); });
  cfg.pod.center = a.center;
  cfg.seed = seed;
  if (auto* g = std::get_if<GprConfig>(&cfg.regressor)) g->seed = seed;

  const auto sm = read_snapshots(a.snapshots);
  ParameterSpace space;
  if (!a.fom.empty())
    space = FomProblem(as_usage([&] { return parse_fom_id(a.fom); })).space();
  else if (!a.bounds.empty())
    space = as_usage([&] { return parse_bounds(a.bounds); });
  else
    space = ParameterSpace::bounding_box(sm.params);

  const auto rom = fit(sm, space, trunc, cfg);
  save_model(rom, a.out);
  std::cout << "rank=" << rom.rank() << " regressor=" << a.regressor << " n_train=" << sm.n_snap()
            << "\n";
  return 0;
}

struct PredictArgs {
  std::string model;
  std::vector<double> mu;
  std::string batch;
  std::string out;
};

int run_predict(const PredictArgs& a) {
  if (a.mu.empty() == a.batch.empty()) fail(ErrorCode::Usage, "give exactly one of --mu or --batch");
  const auto rom = load_model(a.model);
  const auto p = rom.n_params();

  std::vector<ParameterPoint> points;
  auto add = [&](const std::vector<double>& v, const std::string& where) {
    if (v.size() != p)
      fail(ErrorCode::Usage, where + " has " + std::to_string(v.size()) + " values, model expects " +
                                 std::to_string(p));
    points.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(p)));
  };
  if (!a.mu.empty()) {
    add(a.mu, "--mu");
  } else {
    std::stringstream ss(io::read_file(a.batch));
    std::string line;
    for (std::size_t no = 1; std::getline(ss, line); ++no) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      add(as_usage([&] { return io::parse_csv_row(line); }), a.batch + ":" + std::to_string(no));
    }
    if (points.empty()) fail(ErrorCode::Usage, "batch file " + a.batch + " has no parameter rows");
  }

  // Column j is one query: p parameter rows, then the N field rows.
  Eigen::MatrixXd table(static_cast<Eigen::Index>(p + rom.n_dof()),
                        static_cast<Eigen::Index>(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j) {
    const auto r = infer(rom, points[j]);
    if (r.extrapolated) std::cerr << "warning: query " << j << " lies outside the parameter space\n";
    const auto col = static_cast<Eigen::Index>(j);
    table.col(col).head(static_cast<Eigen::Index>(p)) = points[j];
    table.col(col).tail(static_cast<Eigen::Index>(rom.n_dof())) = r.field;
  }
  std::string text;
  for (Eigen::Index i = 0; i < table.rows(); ++i) text += format_row(table.row(i).transpose()) + "\n";
  if (a.out.empty())
    std::cout << text;
  else
    io::write_file_atomic(a.out, text);
  return 0;
}

struct EvaluateArgs {
  std::string fom;
  std::vector<std::size_t> counts;
  std::size_t modes = 12;
  std::vector<std::string> regressors{"gpr"};
  std::size_t n_test = 20;
  std::string strategy = "random";
  bool center = false;
  std::string out;
};

int run_evaluate(const EvaluateArgs& a, std::uint64_t seed) {
  const FomProblem fom(as_usage([&] { return parse_fom_id(a.fom); }));
  if (a.modes == 0) fail(ErrorCode::Usage, "--modes must be >= 1");
  StudyConfig cfg;
  cfg.snapshot_counts = a.counts;
  cfg.truncation = RankTruncation{a.modes};
  cfg.regressors.clear();
  for (const auto& r : a.regressors) {
    auto spec = as_usage([&] { return parse_regressor_spec(r); });
    if (auto* g = std::get_if<GprConfig>(&spec)) g->seed = seed;
    cfg.regressors.push_back(spec);
  }
  cfg.n_test = a.n_test;
  cfg.seed = seed;
  cfg.strategy = as_usage([&] { return parse_strategy(a.strategy); });
  cfg.pod.center = a.center;

  const auto csv = convergence_study(fom, cfg).to_csv();
  if (a.out.empty())
    std::cout << csv;
  else
    io::write_file_atomic(a.out, csv);
  return 0;
}

struct OptimizeArgs {
  std::string model;
  std::string fom;
  std::string self_test;
  GaConfig ga;
  std::string out;
};

int run_optimize(OptimizeArgs a, std::uint64_t seed) {
  a.ga.seed = seed;
  as_usage([&] { a.ga.validate(); return 0; });

  GaResult ga;
  std::optional<double> fom_value;
  if (!a.self_test.empty()) {
    if (a.self_test != "sphere") fail(ErrorCode::Usage, "unknown self-test '" + a.self_test + "'");
    const ParameterSpace cube(std::vector<Bound>(6, Bound{-1.0, 1.0}));
    ga = ga_optimize([](const ParameterPoint& x) { return x.squaredNorm(); }, cube, a.ga);
  } else {
    if (a.model.empty() && a.fom.empty())
      fail(ErrorCode::Usage, "give --model (with --fom ffd-drag), --fom ffd-drag or --self-test sphere");
    const FomProblem fom(as_usage([&] { return parse_fom_id(a.fom.empty() ? "ffd-drag" : a.fom); }));
    if (fom.id() != FomId::FfdDrag) fail(ErrorCode::Usage, "optimize supports only --fom ffd-drag");
    if (!a.model.empty()) {
      const auto r = optimize_shape(fom, load_model(a.model), a.ga);
      ga = r.ga;
      fom_value = r.fom_value;
    } else {
      ga = ga_optimize([&](const ParameterPoint& mu) { return fom.drag_objective(mu); }, fom.space(),
                       a.ga);
    }
  }

  std::cout << "best_value=" << io::format_double(ga.best_value) << "\n";
  if (fom_value) std::cout << "fom_value=" << io::format_double(*fom_value) << "\n";
  std::cout << "best=" << format_row(ga.best) << "\n";
  std::cout << "evaluations=" << ga.evaluations << "\n";
  if (!a.out.empty()) io::write_file_atomic(a.out, history_csv(ga));
  return 0;
}

int report(const Error& e) {
  std::cerr << "error[" << to_string(e.code()) << "]: " << e.what() << "\n";
  return e.code() == ErrorCode::Usage ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"POD surrogate models: generate, train, predict, evaluate, optimize"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed_flag;
  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed_flag, "random seed (default $PODSURF_SEED or 42)");
  };

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "sample a FOM and write a snapshot file");
  g->add_option("--fom", gen.fom, "poiseuille | heat2d | gaussian-bump | ffd-drag")->required();
  g->add_option("--count", gen.count, "number of snapshots")->required();
  g->add_option("--strategy", gen.strategy, "random | vertices-plus-random | grid:AxB");
  g->add_option("--field", gen.field, "field to store (default: the FOM's first field)");
  g->add_option("-o,--output", gen.out, "snapshot file");
  add_seed(g);

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "fit a POD + regression model");
  t->add_option("snapshots", tr.snapshots, "snapshot file")->required();
  auto* rank_opt = t->add_option("--rank", tr.rank, "number of POD modes");
  t->add_option("--energy", tr.energy, "retained energy fraction")->excludes(rank_opt);
  t->add_option("--regressor", tr.regressor, "gpr | gpr:optimized-noise | rbf:S | rbf-tps:S | linear");
  auto* fom_opt = t->add_option("--fom", tr.fom, "take parameter bounds from this FOM");
  t->add_option("--bounds", tr.bounds, "parameter bounds lo:hi,lo:hi,...")->excludes(fom_opt);
  t->add_flag("--center", tr.center, "subtract the snapshot mean before POD");
  t->add_option("-o,--output", tr.out, "model file");
  add_seed(t);

  PredictArgs pr;
  auto* p = app.add_subcommand("predict", "evaluate a trained model");
  p->add_option("model", pr.model, "model file")->required();
  auto* mu_opt = p->add_option("--mu", pr.mu, "one parameter point");
  p->add_option("--batch", pr.batch, "CSV file, one parameter point per row")->excludes(mu_opt);
  p->add_option("-o,--output", pr.out, "output CSV (default stdout)");

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "convergence study against the FOM");
  e->add_option("--fom", ev.fom, "FOM id")->required();
  e->add_option("--counts", ev.counts, "training snapshot counts, e.g. 2,4,8,16")
      ->delimiter(',')
      ->required();
  e->add_option("--modes", ev.modes, "POD rank cap");
  e->add_option("--regressors", ev.regressors, "comma-separated regressor specs")->delimiter(',');
  e->add_option("--n-test", ev.n_test, "number of test parameters");
  e->add_option("--strategy", ev.strategy, "training sampling strategy");
  e->add_flag("--center", ev.center, "subtract the snapshot mean before POD");
  e->add_option("-o,--output", ev.out, "report CSV (default stdout)");
  add_seed(e);

  OptimizeArgs op;
  auto* o = app.add_subcommand("optimize", "genetic-algorithm search");
  o->add_option("--model", op.model, "ROM over the ffd-drag resistance field");
  o->add_option("--fom", op.fom, "ffd-drag");
  o->add_option("--self-test", op.self_test, "sphere");
  o->add_option("--population", op.ga.population);
  o->add_option("--generations", op.ga.generations);
  o->add_option("--tournament", op.ga.tournament_size);
  o->add_option("--crossover", op.ga.crossover_rate);
  o->add_option("--mutation", op.ga.mutation_rate);
  o->add_option("--sigma", op.ga.mutation_sigma, "mutation step as a fraction of each range");
  o->add_option("-o,--output", op.out, "generation history CSV");
  add_seed(o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& h) {
    return app.exit(h);
  } catch (const CLI::CallForAllHelp& h) {
    return app.exit(h);
  } catch (const CLI::ParseError& pe) {
    std::cerr << "error[Usage]: " << pe.what() << "\n";
    return 2;
  }

  try {
    const std::uint64_t seed = seed_flag ? *seed_flag : default_seed();
    if (g->parsed()) return run_generate(gen, seed);
    if (t->parsed()) return run_train(tr, seed);
    if (p->parsed()) return run_predict(pr);
    if (e->parsed()) return run_evaluate(ev, seed);
    return run_optimize(op, seed);
  } catch (const Error& err) {
    return report(err);
  } catch (const std::exception& ex) {
    std::cerr << "error[Internal]: " << ex.what() << "\n";
    return 1;
  }
}
