#include "minnorm/cli.hpp"

#include <CLI11.hpp>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "minnorm/classify.hpp"
#include "minnorm/cost.hpp"
#include "minnorm/errors.hpp"
#include "minnorm/oracle.hpp"
#include "minnorm/partition.hpp"
#include "minnorm/recovery.hpp"
#include "minnorm/train.hpp"

namespace minnorm::cli {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  std::size_t used = 0;
  try {
    out = std::stod(t, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == t.size();
}

}  // namespace

Dataset read_dataset_csv(std::istream& in, const std::string& source) {
  std::vector<Point> pts;
  std::string line;
  std::size_t lineno = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto comma = t.find(',');
    std::ostringstream where;
    where << source << ":" << lineno;
    if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos)
      throw InputError(where.str() + ": expected two comma-separated columns");
    double x = 0.0, y = 0.0;
    const bool ok = parse_double(t.substr(0, comma), x) && parse_double(t.substr(comma + 1), y);
    if (!ok) {
      if (first_content) {
        first_content = false;
        continue;  // header row
      }
      throw InputError(where.str() + ": malformed number");
    }
    first_content = false;
    pts.push_back({x, y});
  }
  if (pts.empty()) throw InputError(source + ": no data rows");
  try {
    return Dataset(std::move(pts));
  } catch (const InputError& e) {
    throw InputError(source + ": " + e.what());
  }
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  return read_dataset_csv(in, path);
}

std::string dataset_hash(const Dataset& d) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xFFu;
      h *= 1099511628211ULL;
    }
  };
  for (const auto& p : d.points()) {
    mix(p.x);
    mix(p.y);
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

json function_to_json(const PiecewiseLinearFn& f) {
  json kinks = json::array();
  for (const auto& k : f.kinks()) kinks.push_back({{"a", k.amplitude}, {"tau", k.location}});
  return {{"a0", f.a0()}, {"b0", f.b0()}, {"kinks", kinks}};
}

PiecewiseLinearFn function_from_json(const json& j) {
  try {
    std::vector<Kink> kinks;
    for (const auto& k : j.at("kinks")) kinks.push_back({k.at("a").get<double>(), k.at("tau").get<double>()});
    return {j.at("a0").get<double>(), j.at("b0").get<double>(), std::move(kinks)};
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed function object: ") + e.what());
  }
}

json estimator_document(const Dataset& d, const Solution& s, const DPConfig& cfg) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["function"] = function_to_json(s.f);
  doc["cost"] = s.cost;
  doc["slopes"] = s.slopes;
  doc["cost_trace"] = s.cost_trace;
  doc["metadata"] = {
      {"dataset_hash", dataset_hash(d)},
      {"config",
       {{"grid_points", cfg.grid_points},
        {"refine_rounds", cfg.refine_rounds},
        {"refine_shrink", cfg.refine_shrink},
        {"tol", cfg.tol},
        {"polish_sweeps", cfg.polish_sweeps}}},
      {"tool_version", kToolVersion},
      {"domain", {d.x(0), d.x(d.size() - 1)}},
      {"n", d.size()}};
  return doc;
}

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

void emit(const json& j, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw InputError("cannot write " + out_path);
  f << j.dump(2) << "\n";
}

// Appends --key=value for config entries the chosen subcommand knows and the
// command line does not already set.
std::vector<std::string> apply_config(CLI::App& app, std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return args;
  CLI::App* sub = nullptr;
  for (std::size_t i = 1; i < args.size() && sub == nullptr; ++i) {
    for (auto* s : app.get_subcommands({})) {
      if (s->get_name() == args[i]) sub = s;
    }
  }
  if (sub == nullptr) return args;
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw InputError(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    const std::string flag = "--" + key;
    if (sub->get_option_no_throw(flag) == nullptr) continue;
    bool given = false;
    for (const auto& a : args) given |= a == flag || a.rfind(flag + "=", 0) == 0;
    if (!given) args.push_back(flag + "=" + value);
  }
  return args;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimal-norm ReLU interpolation of univariate data", "minnorm1d"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string data, out_path, from;
  DPConfig dp;
  double tol = 1e-9;

  auto* solve = app.add_subcommand("solve", "Minimal-norm interpolator (JSON estimator document)");
  solve->add_option("data", data, "CSV with x,y columns")->required();
  solve->add_option("--grid", dp.grid_points, "Slope grid points per index")->capture_default_str();
  solve->add_option("--refine", dp.refine_rounds, "Refinement rounds")->capture_default_str();
  solve->add_option("--shrink", dp.refine_shrink, "Grid contraction per round")->capture_default_str();
  solve->add_option("--polish", dp.polish_sweeps, "Coordinate polish sweeps")->capture_default_str();
  solve->add_option("--tol", dp.tol, "Equality tolerance")->capture_default_str();
  solve->add_option("--out", out_path, "Output file (default stdout)");

  auto* cost = app.add_subcommand("cost", "Costs of a stored estimator");
  cost->add_option("--from", from, "Estimator JSON")->required();

  auto* part = app.add_subcommand("partition", "Convexity blocks of the data");
  part->add_option("data", data)->required();
  part->add_option("--tol", tol)->capture_default_str();

  bool construct = false;
  auto* sparsest = app.add_subcommand("sparsest", "Minimal kink count of an interpolator");
  sparsest->add_option("data", data)->required();
  sparsest->add_option("--tol", tol)->capture_default_str();
  sparsest->add_flag("--construct", construct, "Print a sparsest interpolator as JSON instead");

  auto* check = app.add_subcommand("check", "Block-length check and sparse-recovery verdict");
  check->add_option("data", data)->required();
  check->add_option("--tol", tol)->capture_default_str();

  MarginConfig mc;
  auto* margin = app.add_subcommand("margin", "Max-margin classifier for labels in {-1,1}");
  margin->add_option("data", data)->required();
  margin->add_option("--margin", mc.margin)->capture_default_str();
  margin->add_option("--grid", mc.grid, "Candidate locations per kink")->capture_default_str();
  margin->add_option("--refine", mc.refine_rounds)->capture_default_str();
  margin->add_option("--out", out_path);

  TrainConfig tc;
  double kink_tol = 0.02, merge_gap = 0.0;
  auto* train = app.add_subcommand("train", "Gradient-descent training of a ReLU network");
  train->add_option("data", data)->required();
  train->add_option("--width", tc.m)->capture_default_str();
  train->add_option("--lambda", tc.lambda)->capture_default_str();
  train->add_flag("--penalize-biases,!--no-penalize-biases", tc.penalize_biases)->capture_default_str();
  train->add_flag("--skip,!--no-skip", tc.skip_connection)->capture_default_str();
  train->add_option("--lr", tc.learning_rate)->capture_default_str();
  train->add_option("--steps", tc.steps)->capture_default_str();
  train->add_option("--seed", tc.seed)->capture_default_str();
  train->add_option("--init-std", tc.init_std, "Initialisation std (0 selects width^-1/4)")->capture_default_str();
  train->add_option("--kink-tol", kink_tol, "Mass fraction for effective kinks")->capture_default_str();
  train->add_option("--merge-gap", merge_gap, "Merge distance for effective kinks")->capture_default_str();
  train->add_option("--out", out_path);

  OracleConfig oc;
  auto* oracle = app.add_subcommand("oracle", "Cross-validation report of the solver against oracles");
  oracle->add_option("data", data)->required();
  oracle->add_option("--grid", dp.grid_points)->capture_default_str();
  oracle->add_option("--refine", dp.refine_rounds)->capture_default_str();
  oracle->add_option("--resolution", oc.fine_resolution)->capture_default_str();
  oracle->add_option("--max-iters", oc.max_iters)->capture_default_str();
  oracle->add_option("--gap-tol", oc.gap_tol)->capture_default_str();

  std::size_t points = 201;
  double lo = NAN, hi = NAN;
  auto* sample = app.add_subcommand("sample", "x,f(x) CSV on a uniform grid");
  sample->add_option("data", data, "CSV to solve (alternative to --from)");
  sample->add_option("--from", from, "Estimator JSON");
  sample->add_option("--points", points)->capture_default_str();
  sample->add_option("--lo", lo);
  sample->add_option("--hi", hi);
  sample->add_option("--grid", dp.grid_points)->capture_default_str();
  sample->add_option("--refine", dp.refine_rounds)->capture_default_str();

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = apply_config(app, std::move(args));
    std::vector<const char*> cargs;
    for (const auto& a : args) cargs.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return 0;
    } catch (const CLI::CallForVersion&) {
      out << kToolVersion << "\n";
      return 0;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << "\n";
      return 2;
    }

    if (solve->parsed()) {
      const Dataset d = load_dataset(data);
      const Solution s = solve_min_norm(d, dp);
      emit(estimator_document(d, s, dp), out_path, out);
    } else if (cost->parsed()) {
      const json doc = load_json(from);
      if (!doc.contains("function")) throw InputError(from + ": missing function");
      const PiecewiseLinearFn f = function_from_json(doc["function"]);
      json r{{"weighted_tv_cost", weighted_tv_cost(f)}, {"no_skip_cost", no_skip_cost(f)}, {"kinks", f.kink_count()}};
      if (doc.contains("cost")) r["stored_cost"] = doc["cost"];
      out << r.dump(2) << "\n";
    } else if (part->parsed()) {
      const Dataset d = load_dataset(data);
      const Partition p = build_partition(d, tol);
      json blocks = json::array();
      for (std::size_t k = 0; k < p.block_count(); ++k)
        blocks.push_back({{"start", p.breakpoints[k]}, {"end", p.breakpoints[k + 1]}, {"tag", to_string(p.tags[k])}});
      out << json{{"breakpoints", p.breakpoints}, {"blocks", blocks}, {"assumption1", check_assumption1(d, tol)}}.dump(2)
          << "\n";
    } else if (sparsest->parsed()) {
      const Dataset d = load_dataset(data);
      if (construct) {
        out << function_to_json(construct_sparsest(d, tol)).dump(2) << "\n";
      } else {
        out << sparsest_count(d, tol) << "\n";
      }
    } else if (check->parsed()) {
      const Dataset d = load_dataset(data);
      const RecoveryVerdict v = predict_recovery(d, tol);
      json blocks = json::array();
      for (std::size_t k = 0; k < v.partition.block_count(); ++k) {
        json b{{"start", v.partition.breakpoints[k]},
               {"end", v.partition.breakpoints[k + 1]},
               {"tag", to_string(v.partition.tags[k])},
               {"verdict", to_string(v.blocks[k])}};
        if (v.blocks[k] == Verdict::ConditionalHolds || v.blocks[k] == Verdict::ConditionalFails) {
          const SixPointTerms t = six_point_terms(d, k, tol);
          b["lhs"] = t.lhs;
          b["rhs"] = t.rhs;
        }
        blocks.push_back(b);
      }
      out << json{{"assumption1", check_assumption1(d, tol)},
                  {"sparsest_count", sparsest_count(d, tol)},
                  {"verdict", to_string(v.overall)},
                  {"blocks", blocks}}
                 .dump(2)
          << "\n";
    } else if (margin->parsed()) {
      const Dataset d = load_dataset(data);
      const MarginSolution s = max_margin_solve(d, mc);
      emit(json{{"function", function_to_json(s.f)},
                {"cost", s.cost},
                {"kinks", s.f.kink_count()},
                {"label_blocks", margin_partition(d).size()},
                {"sparsest_count", margin_sparsest_count(d)},
                {"min_slack", s.min_slack},
                {"margin", mc.margin}},
           out_path, out);
    } else if (train->parsed()) {
      const Dataset d = load_dataset(data);
      const TrainResult r = train_network(d, tc);
      auto loss_json = [](const LossBreakdown& l) {
        return json{{"data", l.data}, {"reg_a", l.reg_a}, {"reg_w", l.reg_w}, {"reg_b", l.reg_b}, {"total", l.total}};
      };
      const NeuronScatter sc = neuron_scatter(r.params);
      json neurons = json::array();
      for (const auto& [pos, a] : sc.neurons) neurons.push_back({pos, a});
      json doc{{"config",
                {{"width", tc.m},
                 {"lambda", tc.lambda},
                 {"penalize_biases", tc.penalize_biases},
                 {"skip", tc.skip_connection},
                 {"lr", tc.learning_rate},
                 {"steps", tc.steps},
                 {"seed", tc.seed},
                 {"init_std", tc.effective_init_std()}}},
               {"initial_loss", loss_json(r.initial)},
               {"final_loss", loss_json(r.final)},
               {"final_learning_rate", r.final_learning_rate},
               {"effective_kinks", effective_kink_count(r.params, d, kink_tol, merge_gap)},
               {"neurons", neurons},
               {"degenerate_neurons", sc.degenerate},
               {"params", {{"a", r.params.a}, {"w", r.params.w}, {"b", r.params.b}}}};
      if (tc.skip_connection) doc["params"]["skip"] = {r.params.a0, r.params.b0};
      doc["metadata"] = {{"dataset_hash", dataset_hash(d)}, {"tool_version", kToolVersion}};
      emit(doc, out_path, out);
    } else if (oracle->parsed()) {
      const Dataset d = load_dataset(data);
      json r{{"n", d.size()}};
      const Solution s = solve_min_norm(d, dp);
      r["dp"] = {{"cost", s.cost}, {"kinks", s.f.kink_count()}};
      r["sparsest_count"] = sparsest_count(d);
      bool converged = true;
      if (d.size() >= 3) {
        const OracleResult b = box_convex_solve(d, oc);
        converged = b.converged;
        r["box"] = {{"cost", b.cost}, {"gap", b.gap}, {"iterations", b.iterations}, {"converged", b.converged}};
      }
      if (d.size() <= 12) {
        const OracleResult g = fine_grid_solve(d, oc.fine_resolution);
        r["fine_grid"] = {{"cost", g.cost}, {"resolution", oc.fine_resolution}};
      }
      if (d.size() <= 8) {
        const KinkSearchResult k = brute_force_min_kinks(d, oc);
        r["brute_force_min_kinks"] = {{"kinks", k.kinks}, {"exhausted", k.exhausted}};
      }
      out << r.dump(2) << "\n";
      if (!converged) {
        err << "warning: box oracle did not reach its duality-gap tolerance\n";
        return 3;
      }
    } else if (sample->parsed()) {
      PiecewiseLinearFn f;
      double dlo = 0.0, dhi = 1.0;
      if (!from.empty()) {
        const json doc = load_json(from);
        f = function_from_json(doc.at("function"));
        if (doc.contains("metadata") && doc["metadata"].contains("domain")) {
          dlo = doc["metadata"]["domain"][0].get<double>();
          dhi = doc["metadata"]["domain"][1].get<double>();
        }
      } else if (!data.empty()) {
        const Dataset d = load_dataset(data);
        f = solve_min_norm(d, dp).f;
        dlo = d.x(0);
        dhi = d.x(d.size() - 1);
      } else {
        throw InputError("sample needs a data file or --from");
      }
      const double pad = 0.1 * (dhi - dlo > 0 ? dhi - dlo : 1.0);
      const double a = std::isnan(lo) ? dlo - pad : lo;
      const double b = std::isnan(hi) ? dhi + pad : hi;
      if (points < 2) throw InputError("--points must be at least 2");
      out << "x,f\n" << std::setprecision(17);
      for (std::size_t i = 0; i < points; ++i) {
        const double x = a + (b - a) * double(i) / double(points - 1);
        out << x << "," << f(x) << "\n";
      }
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace minnorm::cli
