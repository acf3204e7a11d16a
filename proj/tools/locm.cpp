// locm: command-line pipeline over the locm library.
//
// Every command reads its inputs from, and writes its artifacts to, the run
// directory given by `out`. Each command also writes manifest.<command>.json.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "locm/eval/http_client.hpp"
#include "locm/locm.hpp"

namespace fs = std::filesystem;
using namespace locm;

namespace {

constexpr const char* kToolVersion = "locm 1.0.0";

enum Exit { kOk = 0, kValidation = 1, kConfig = 2, kIo = 3 };

struct Context {
  RunConfig config;
  fs::path out;
  std::map<std::string, std::string> inputs;  // role -> sha256

  fs::path at(const std::string& name) const { return out / name; }

  // Reads a run artifact, naming the command that produces it when missing.
  std::string input(const std::string& role, const fs::path& path, const std::string& producer) {
    if (!fs::exists(path))
      throw Error(ErrorCode::IoError, path.string() + " not found; run `locm " + producer + "` first");
    auto text = read_file(path.string());
    inputs[role] = sha256_hex(text);
    return text;
  }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

void write_manifest(const Context& ctx, const std::string& command) {
  Json inputs = Json::object();
  for (const auto& [role, digest] : ctx.inputs) inputs[role] = digest;
  write_json(ctx.at("manifest." + command + ".json"), Json{{"command", command},
                                                            {"config_digest", ctx.config.digest()},
                                                            {"seed", ctx.config.seed()},
                                                            {"inputs", inputs},
                                                            {"tool_version", kToolVersion}});
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (line.find_first_not_of(" \t\r") != std::string::npos) out.push_back(line);
  return out;
}

std::vector<ReasoningInstance> read_scored(Context& ctx) {
  std::vector<ReasoningInstance> out;
  for (const auto& line : lines_of(ctx.input("scored", ctx.at("scored.jsonl"), "score")))
    out.push_back(instance_from_json(Json::parse(line)));
  return out;
}

std::vector<EvalRecord> read_records(Context& ctx) {
  std::vector<EvalRecord> out;
  for (const auto& line : lines_of(ctx.input("records", ctx.at("records.jsonl"), "eval")))
    out.push_back(record_from_json(Json::parse(line)));
  return out;
}

IngestResult ingest_corpus(Context& ctx) {
  const auto& path = ctx.config.get("corpus");
  if (path.empty()) throw Error(ErrorCode::ConfigError, "no corpus given (set corpus=PATH)");
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open corpus " + path);
  ctx.inputs["corpus"] = file_sha256(path);
  return ingest_stream(in, ctx.config.strictness());
}

void print_rejects(const std::vector<Reject>& rejects) {
  for (const auto& r : rejects)
    std::cout << "line " << r.line << ": " << r.code << ": " << (r.id.empty() ? "" : r.id + ": ") << r.message
              << '\n';
}

// -- commands ---------------------------------------------------------------

int cmd_validate(Context& ctx) {
  ctx.config.set("strictness", "strict");
  auto result = ingest_corpus(ctx);
  print_rejects(result.rejects);
  std::cout << result.instances.size() << " valid, " << result.rejects.size() << " rejected\n";
  return result.rejects.empty() ? kOk : kValidation;
}

int cmd_ingest(Context& ctx) {
  auto result = ingest_corpus(ctx);
  std::ostringstream os;
  write_jsonl(os, result.instances);
  write_text(ctx.at("ingested.jsonl"), os.str());
  std::string rejects;
  for (const auto& r : result.rejects) rejects += Json(r).dump() + "\n";
  write_text(ctx.at("rejects.jsonl"), rejects);
  write_manifest(ctx, "ingest");
  print_rejects(result.rejects);
  std::cout << result.instances.size() << " ingested, " << result.rejects.size() << " rejected\n";
  return kOk;
}

int cmd_score(Context& ctx) {
  auto result = ingest_corpus(ctx);
  print_rejects(result.rejects);
  const auto weights = ctx.config.weights();
  const auto transform = ctx.config.transform();
  std::ostringstream scored, scores;
  int failures = 0;
  for (auto& inst : result.instances) {
    try {
      auto profile = profile_instance(inst);
      auto score = locm::locm(profile, weights, transform);
      inst.score = score;
      Json rec{{"id", inst.id}};
      rec.update(score_record(score, profile));
      rec["hopless"] = is_hopless(inst);
      scored << Json(inst).dump() << '\n';
      scores << rec.dump() << '\n';
    } catch (const Error& e) {
      ++failures;
      std::cout << inst.id << ": " << e.what() << '\n';
    }
  }
  write_text(ctx.at("scored.jsonl"), scored.str());
  write_text(ctx.at("scores.jsonl"), scores.str());
  write_manifest(ctx, "score");
  std::cout << result.instances.size() - static_cast<std::size_t>(failures) << " scored\n";
  return failures == 0 ? kOk : kValidation;
}

std::vector<CriticalInterval> intervals_for_stratify(Context& ctx, const std::string& path_opt,
                                                     const std::string& curve_name) {
  fs::path path = path_opt.empty() ? ctx.at("intervals.json") : fs::path(path_opt);
  auto j = Json::parse(ctx.input("intervals", path, "detect"));
  if (j.is_array()) return intervals_from_json(j);
  if (j.contains("curves")) {
    for (const auto& c : j.at("curves"))
      if (curve_name.empty() || c.at("name") == curve_name) return intervals_from_json(c.at("intervals"));
    throw Error(ErrorCode::InvalidArgument, "no curve named '" + curve_name + "' in " + path.string());
  }
  return intervals_from_json(j);
}

int cmd_stratify(Context& ctx, const std::string& intervals_path, const std::string& curve_name) {
  auto instances = read_scored(ctx);
  auto intervals = intervals_for_stratify(ctx, intervals_path, curve_name);
  auto pool = stratify(instances, intervals, ctx.config.hard_bound());
  write_json(ctx.at("pool.json"), pool);
  write_manifest(ctx, "stratify");
  std::cout << "easy " << pool.easy.size() << ", medium " << pool.medium.size() << ", hard " << pool.hard.size()
            << '\n';
  return kOk;
}

int cmd_eval(Context& ctx) {
  auto instances = read_scored(ctx);
  const auto& cfg = ctx.config;
  eval::EvalOptions options;
  options.mode = cfg.mode();
  options.parallelism = cfg.integer("eval.parallelism");
  options.decoding.max_tokens = cfg.integer("eval.max_tokens");
  options.retry.max_attempts = cfg.integer("eval.retries");
  std::unique_ptr<eval::ResponseCache> cache;
  if (!cfg.get("eval.cache_dir").empty()) {
    cache = std::make_unique<eval::ResponseCache>(cfg.get("eval.cache_dir"));
    options.cache = cache.get();
  }

  std::unique_ptr<eval::ModelClient> client;
  if (cfg.get("eval.client") == "http") {
    client = std::make_unique<eval::HttpChatClient>(eval::HttpClientConfig::from_env());
  } else {
    auto sim = std::make_unique<eval::SimulatedClient>(eval::SimulatedClient::Params{
        cfg.get("eval.sim_model"), cfg.seed(), cfg.number("eval.sim_peak"), cfg.number("eval.sim_center"),
        cfg.number("eval.sim_scale")});
    for (const auto& inst : instances) sim->add(inst, options.mode);
    client = std::move(sim);
  }

  auto records = eval::run_eval(instances, *client, options);
  std::string text;
  int failed = 0, correct = 0;
  for (const auto& r : records) {
    text += Json(r).dump() + "\n";
    failed += r.failed;
    correct += r.correct;
  }
  write_text(ctx.at("records.jsonl"), text);
  write_manifest(ctx, "eval");
  std::cout << records.size() << " records, " << correct << " correct, " << failed << " failed\n";
  return failed == 0 ? kOk : kIo;
}

Json curves_document(const std::vector<std::pair<std::string, AccuracyCurve>>& curves) {
  Json list = Json::array();
  for (const auto& [name, curve] : curves) {
    Json c{{"name", name}};
    c.update(curve_to_json(curve));
    c.erase("intervals");
    list.push_back(std::move(c));
  }
  return Json{{"curves", list}};
}

int cmd_curve(Context& ctx, const std::string& table) {
  std::vector<std::pair<std::string, AccuracyCurve>> curves;
  if (!table.empty()) {
    auto rows = parse_accuracy_table(ctx.input("table", table, "curve"));
    for (const auto& row : rows) {
      std::vector<double> edges;
      auto binning = ctx.config.binning();
      if (auto* e = std::get_if<Edges>(&binning))
        edges = e->edges;
      else
        for (std::size_t i = 0; i <= row.accuracy.size(); ++i) edges.push_back(0.5 + static_cast<double>(i));
      curves.emplace_back(row.name, curve_from_accuracies(edges, row.accuracy));
    }
  } else {
    auto records = read_records(ctx);
    std::map<std::string, std::vector<EvalRecord>> groups;
    for (const auto& r : records) groups[r.model_id + "/" + std::string(to_string(r.prompt_mode))].push_back(r);
    for (const auto& [name, group] : groups) curves.emplace_back(name, bin_curve(group, ctx.config.binning()));
  }
  auto doc = curves_document(curves);
  write_json(ctx.at("curves.json"), doc);
  std::string csv;
  for (const auto& [name, curve] : curves) csv += "# curve " + name + "\n" + curve_to_csv(curve);
  write_text(ctx.at("curves.csv"), csv);
  write_manifest(ctx, "curve");
  std::cout << curves.size() << " curves\n";
  return kOk;
}

std::vector<std::pair<std::string, AccuracyCurve>> read_curves(Context& ctx) {
  auto doc = Json::parse(ctx.input("curves", ctx.at("curves.json"), "curve"));
  std::vector<std::pair<std::string, AccuracyCurve>> out;
  for (const auto& c : doc.at("curves")) out.emplace_back(c.at("name").get<std::string>(), curve_from_json(c));
  return out;
}

int cmd_detect(Context& ctx) {
  auto curves = read_curves(ctx);
  auto params = ctx.config.detector();
  Json list = Json::array();
  std::string csv = "curve,k,tau_min,tau_max,drop\n";
  for (const auto& [name, curve] : curves) {
    auto intervals = detect_intervals(curve, params);
    auto conv = baseline_convergence(curve, params.baseline_eps);
    Json convergence{{"converged", conv.converged}};
    convergence["first_bin"] = conv.first_bin ? Json(*conv.first_bin + 1) : Json(nullptr);
    list.push_back(Json{{"name", name}, {"intervals", intervals}, {"baseline_convergence", convergence}});
    for (const auto& ci : intervals)
      csv += name + "," + std::to_string(ci.k) + "," + format_fixed(ci.tau_min) + "," + format_fixed(ci.tau_max) +
             "," + format_fixed(ci.drop) + "\n";
    std::cout << name << ": " << intervals.size() << " interval(s)"
              << (conv.converged ? ", converges from bin " + std::to_string(*conv.first_bin + 1) : "") << '\n';
  }
  write_json(ctx.at("intervals.json"), Json{{"detector",
                                             {{"drop_delta", params.drop_delta},
                                              {"plateau_eps", params.plateau_eps},
                                              {"baseline_eps", params.baseline_eps}}},
                                            {"curves", list}});
  write_text(ctx.at("intervals.csv"), csv);
  write_manifest(ctx, "detect");
  return kOk;
}

int cmd_correlate(Context& ctx) {
  auto records = read_records(ctx);
  const auto weights = ctx.config.weights();
  Json summary = Json::object();

  auto sweep = transform_sweep(records);
  Json rows = Json::array();
  for (const auto& row : sweep.rows)
    rows.push_back(Json{{"transform", to_string(row.transform)}, {"definition", definition_of(row.transform)},
                        {"r", round3(row.result.r)}, {"n", row.result.n}});
  summary["transforms"] = rows;
  write_text(ctx.at("transforms.csv"), report::transform_csv(sweep));
  write_text(ctx.at("transforms.md"), report::transform_markdown(sweep));

  bool have_profiles = std::all_of(records.begin(), records.end(), [](const EvalRecord& r) { return r.profile || r.failed; });
  if (have_profiles) {
    auto ablations = ablation_sweep(records, weights);
    summary["ablations"] = ablations;
    write_text(ctx.at("ablations.csv"), report::ablation_csv(ablations));
    write_text(ctx.at("ablations.md"), report::ablation_markdown(ablations));
  }

  auto strata = control_variate(records, ctx.config.premise_intervals(), EqualWidth{ctx.config.integer("analytics.locm_bins")});
  summary["control_variate"] = strata;
  write_text(ctx.at("control_variate.csv"), report::control_variate_csv(strata));
  write_text(ctx.at("control_variate.md"), report::control_variate_markdown(strata));

  auto effort = effort_analysis(records, ctx.config.binning("analytics.length_bins"));
  summary["effort"] = effort;
  write_text(ctx.at("effort.csv"), report::effort_csv(effort));
  write_text(ctx.at("effort.md"), report::effort_markdown(effort));

  summary["weights"] = weights.values();
  write_json(ctx.at("analytics.json"), summary);
  write_manifest(ctx, "correlate");
  std::cout << report::transform_markdown(sweep);
  return kOk;
}

int cmd_curriculum(Context& ctx) {
  const auto& cfg = ctx.config;
  auto pool = pool_from_json(Json::parse(ctx.input("pool", ctx.at("pool.json"), "stratify")));
  auto split = split_holdout(pools_from(pool), cfg.number("curriculum.eval_fraction"), cfg.seed());
  if (split.eval.empty()) throw Error(ErrorCode::EmptyPool, "held-out evaluation split is empty");

  SimulatedTrainer trainer;
  trainer.forgetting = cfg.number("curriculum.forgetting");
  trainer.noise = cfg.number("curriculum.noise");
  trainer.seed = cfg.seed();

  // Stage 1: pick theta_MIX on the interpolation path.
  ExampleSet finetune;
  for (const auto& set : split.train.by_regime) finetune.insert(finetune.end(), set.begin(), set.end());
  SweepParams sp;
  sp.finetune_steps = cfg.integer("curriculum.finetune_steps");
  sp.batch_size = cfg.integer("curriculum.batch_size");
  sp.eta = cfg.number("curriculum.eta");
  sp.seed = cfg.seed();
  ParameterVector theta_nl{cfg.numbers("curriculum.theta_nl"), "NL"};
  ParameterVector theta_fol{cfg.numbers("curriculum.theta_fol"), "FOL"};
  auto sweep = lambda_sweep(theta_nl, theta_fol, cfg.numbers("curriculum.lambdas"), trainer, finetune, split.eval, sp);
  std::string sweep_csv = "lambda,accuracy,error\n";
  for (const auto& row : sweep.rows)
    sweep_csv += format_fixed(row.lambda, 2) + "," + (row.accuracy ? format_fixed(*row.accuracy, 6) : "") + "," +
                 row.error + "\n";
  write_text(ctx.at("lambda_sweep.csv"), sweep_csv);

  // Stage 2: complexity-aware curriculum from theta_MIX, plus the exclusive arm.
  CurriculumParams cp;
  cp.epsilon = cfg.number("curriculum.epsilon");
  cp.eta = sp.eta;
  cp.batch_size = sp.batch_size;
  cp.max_steps_per_stage = cfg.integer("curriculum.max_steps");
  cp.seed = cfg.seed();
  auto start = trainer.from_parameters(sweep.theta_mix);
  auto result = run_curriculum(split.train, start, trainer, split.eval, cp);
  auto exclusive = run_stage_exclusive(split.train, start, trainer, split.eval, cp);
  for (const auto& w : result.progress.warnings) std::cerr << "warning: " << w << '\n';

  std::string history;
  for (const auto& h : result.progress.history) history += Json(h).dump() + "\n";
  write_text(ctx.at("history.jsonl"), history);
  auto theta = trainer.to_parameters(result.state);
  theta.tag = "theta_star";
  write_json(ctx.at("theta.json"), theta);
  write_json(ctx.at("curriculum.json"),
             Json{{"best_lambda", sweep.best_lambda},
                  {"theta_mix", sweep.theta_mix},
                  {"initial_accuracy", round3(result.progress.initial_accuracy)},
                  {"final_accuracy", round3(result.progress.final_accuracy)},
                  {"exclusive_final_accuracy", round3(exclusive.progress.final_accuracy)},
                  {"steps", result.progress.history.size()},
                  {"warnings", result.progress.warnings},
                  {"eval_size", split.eval.size()}});
  write_manifest(ctx, "curriculum");
  std::cout << "best lambda " << sweep.best_lambda << ", accuracy " << format_fixed(result.progress.initial_accuracy)
            << " -> " << format_fixed(result.progress.final_accuracy) << " (exclusive arm "
            << format_fixed(exclusive.progress.final_accuracy) << ")\n";
  return kOk;
}

std::string slug(const std::string& name) {
  std::string out;
  for (char c : name) out += std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ? c : '_';
  return out;
}

int cmd_report(Context& ctx) {
  auto curves = read_curves(ctx);
  auto detected = Json::parse(ctx.input("intervals", ctx.at("intervals.json"), "detect"));
  std::map<std::string, std::vector<CriticalInterval>> by_name;
  for (const auto& c : detected.at("curves")) by_name[c.at("name")] = intervals_from_json(c.at("intervals"));

  std::string md = "# LoCM report\n\n## Accuracy by complexity bin\n\n";
  std::vector<report::NamedCurve> named;
  for (const auto& [name, curve] : curves) named.push_back({name, curve});
  md += report::curves_markdown(named);
  md += "\n## Critical intervals\n\n| Curve | k | tau_min | tau_max | drop |\n|---|---:|---:|---:|---:|\n";
  for (const auto& [name, curve] : curves) {
    const auto& intervals = by_name[name];
    write_text(ctx.at("curve_" + slug(name) + ".svg"), report::curve_svg(curve, intervals, name));
    for (const auto& ci : intervals)
      md += "| " + name + " | " + std::to_string(ci.k) + " | " + format_fixed(ci.tau_min, 2) + " | " +
            format_fixed(ci.tau_max, 2) + " | " + format_fixed(ci.drop) + " |\n";
  }
  for (const auto& [file, heading] : std::vector<std::pair<std::string, std::string>>{
           {"transforms.md", "Transforms"},
           {"ablations.md", "Operator ablations"},
           {"control_variate.md", "Accuracy within premise-count strata"},
           {"effort.md", "Completion length"}}) {
    if (fs::exists(ctx.at(file))) md += "\n## " + heading + "\n\n" + ctx.input(file, ctx.at(file), "correlate");
  }
  write_text(ctx.at("report.md"), md);
  write_manifest(ctx, "report");
  std::cout << "wrote report.md and " << curves.size() << " SVG chart(s)\n";
  return kOk;
}

int cmd_generate(Context& ctx, int n, const std::string& path) {
  synthetic::Rng rng(ctx.config.seed());
  std::vector<ReasoningInstance> instances;
  for (int i = 0; i < n; ++i) instances.push_back(synthetic::random_instance(rng, "gen-" + std::to_string(i)));
  std::ostringstream os;
  write_jsonl(os, instances);
  write_text(path, os.str());
  std::cout << "wrote " << n << " instances to " << path << '\n';
  return kOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError: return kConfig;
    case ErrorCode::IoError:
    case ErrorCode::TransportError: return kIo;
    default: return kValidation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LoCM toolkit: FOL validation, complexity scoring, phase-transition analysis and curricula"};
  app.require_subcommand(1);
  std::string config_file, out_dir, corpus;
  std::vector<std::string> overrides;
  app.add_option("-c,--config", config_file, "key=value config file");
  app.add_option("--set", overrides, "override a config key (key=value), repeatable");
  app.add_option("-o,--out", out_dir, "run output directory (config key out)");
  app.add_option("--corpus", corpus, "corpus path (config key corpus)");

  auto* validate = app.add_subcommand("validate", "strictly validate every FOL field of a corpus");
  auto* ingest = app.add_subcommand("ingest", "ingest a corpus, keeping rejects aside");
  auto* score = app.add_subcommand("score", "attach LoCM scores: scored.jsonl, scores.jsonl");
  auto* stratify_cmd = app.add_subcommand("stratify", "split scored instances into Easy/Medium/Hard: pool.json");
  std::string intervals_path, curve_name;
  stratify_cmd->add_option("--intervals", intervals_path, "intervals JSON (default: <out>/intervals.json)");
  stratify_cmd->add_option("--curve", curve_name, "curve whose intervals to use (default: first)");
  auto* curve = app.add_subcommand("curve", "bin evaluation records into accuracy curves");
  std::string table;
  curve->add_option("--table", table, "build curves from a per-bin accuracy CSV instead of records");
  auto* detect = app.add_subcommand("detect", "detect critical intervals on every curve");
  auto* correlate = app.add_subcommand("correlate", "transform, ablation, control-variate and effort analyses");
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a model over the scored corpus: records.jsonl");
  auto* curriculum = app.add_subcommand("curriculum", "run both curriculum stages on the simulated trainer");
  auto* report_cmd = app.add_subcommand("report", "render SVG curves and markdown tables");
  auto* generate = app.add_subcommand("generate", "write a seeded synthetic corpus");
  int gen_n = 200;
  std::string gen_path;
  generate->add_option("-n,--count", gen_n, "number of instances")->check(CLI::PositiveNumber);
  generate->add_option("path", gen_path, "output JSONL path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    Context ctx;
    if (!config_file.empty()) ctx.config.load_file(config_file);
    for (const auto& o : overrides) ctx.config.set_assignment(o);
    if (!out_dir.empty()) ctx.config.set("out", out_dir);
    if (!corpus.empty()) ctx.config.set("corpus", corpus);
    ctx.config.validate();
    ctx.out = ctx.config.get("out");
    fs::create_directories(ctx.out);

    if (*validate) return cmd_validate(ctx);
    if (*ingest) return cmd_ingest(ctx);
    if (*score) return cmd_score(ctx);
    if (*stratify_cmd) return cmd_stratify(ctx, intervals_path, curve_name);
    if (*curve) return cmd_curve(ctx, table);
    if (*detect) return cmd_detect(ctx);
    if (*correlate) return cmd_correlate(ctx);
    if (*eval_cmd) return cmd_eval(ctx);
    if (*curriculum) return cmd_curriculum(ctx);
    if (*report_cmd) return cmd_report(ctx);
    if (*generate) return cmd_generate(ctx, gen_n, gen_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const Json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << '\n';
    return kValidation;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }
  return kOk;
}
