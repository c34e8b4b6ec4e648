#include "edurec/cli.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "edurec/analytics.hpp"
#include "edurec/gcn.hpp"
#include "edurec/generator.hpp"
#include "edurec/groups.hpp"
#include "edurec/io.hpp"
#include "edurec/report.hpp"

namespace edurec {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

struct CommonOptions {
  fs::path in;
  fs::path out = ".";
  std::uint64_t seed = kDefaultSeed;
  std::size_t min_courses = kEligibleMinCourses;
  std::size_t max_violations = 0;
  std::size_t max_malformed = 100;
  bool raw_engagement = false;
};

struct GenerateOptions {
  GeneratorConfig config;
  std::vector<double> career_coupling;
  bool graphml = false;
};

struct AnalyzeOptions {
  std::string dim = "category";
  std::string scenario = "FF";
  int k = 3;
};

struct TrainOptions {
  fs::path model;
  TrainConfig config;
  std::string optimizer = "adam";
};

struct RecommendOptions {
  fs::path model;
  std::size_t top_n = 10;
  std::vector<std::string> students;
};

struct GroupOptions {
  fs::path model;
  std::size_t group_size = kDefaultGroupSize;
  std::string dim = "category";
  int k = 3;
};

struct CohortOptions {
  std::string career = "all";
  std::string dim = "category";
  std::string scenario = "FF";
  int k = 3;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig: return kExitUsage;
    case ErrorCode::FileNotFound:
    case ErrorCode::IoError: return kExitIo;
    case ErrorCode::MalformedLine:
    case ErrorCode::DuplicateId:
    case ErrorCode::MissingAttr:
    case ErrorCode::NegativeNumericAttr:
    case ErrorCode::UnknownEndpoint:
    case ErrorCode::SignatureMismatch:
    case ErrorCode::DuplicateEdge:
    case ErrorCode::UnknownKind: return kExitSchema;
    case ErrorCode::DimMismatch: return kExitModelMismatch;
    case ErrorCode::EmptyCohort:
    case ErrorCode::TooFewPoints: return kExitEmptyCohort;
    default: return kExitFailure;
  }
}

HeteroGraph load_graph(const CommonOptions& common, RunManifest& manifest, std::ostream& err) {
  const auto nodes = common.in / "nodes.jsonl";
  const auto edges = common.in / "edges.jsonl";
  auto loaded = load_jsonl(nodes, edges, {common.max_malformed});
  manifest.inputs.push_back(nodes);
  manifest.inputs.push_back(edges);
  const auto& violations = loaded.report.violations;
  if (violations.size() > common.max_violations) {
    for (std::size_t i = 0; i < violations.size() && i < 10; ++i)
      err << "violation: " << to_string(violations[i].rule) << " " << violations[i].subject << ": "
          << violations[i].detail << "\n";
    throw Error(ErrorCode::MalformedLine, std::to_string(violations.size()) + " schema violations exceed threshold " +
                                              std::to_string(common.max_violations));
  }
  return std::move(loaded.graph);
}

void finish(RunManifest& manifest, const CommonOptions& common, Stopwatch& total) {
  manifest.timings["total_seconds"] = total.lap();
  write_json(common.out / "manifest.json", manifest.to_json());
}

std::vector<PreferenceDimension> dims_of(const std::string& text) {
  if (text == "all") return {kAllDimensions.begin(), kAllDimensions.end()};
  return {*parse_dimension(text)};
}

std::vector<IndicatorScenario> scenarios_of(const std::string& text) {
  if (text == "all") return {kAllScenarios.begin(), kAllScenarios.end()};
  return {*parse_scenario(text)};
}

// DegenerateTable (an expected cell below 1) is a property of the data, not a
// failed run: the report records it and the command carries on.
json association_or_error(const std::function<AssociationResult()>& compute, PreferenceDimension dim,
                          IndicatorScenario scenario, int k, std::size_t n) {
  try {
    return association_json(compute());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateTable) throw;
    return {{"schema_version", kReportSchemaVersion},
            {"dimension", to_string(dim)},
            {"scenario", to_string(scenario)},
            {"engagement_components", scenario_component_names(scenario)},
            {"k", k},
            {"n", n},
            {"chi2", nullptr},
            {"dof", nullptr},
            {"p", nullptr},
            {"rand", nullptr},
            {"pearson", json::object()},
            {"error", e.what()}};
  }
}

int cmd_generate(const CommonOptions& common, GenerateOptions opts, std::ostream& out) {
  Stopwatch total;
  auto& config = opts.config;
  config.seed = common.seed;
  if (!opts.career_coupling.empty()) {
    if (opts.career_coupling.size() != 3)
      throw Error(ErrorCode::InvalidConfig, "--career-coupling takes 3 values (student professional other)");
    config.career_coupling = std::array<double, 3>{opts.career_coupling[0], opts.career_coupling[1],
                                                   opts.career_coupling[2]};
  }
  config.validate();
  fs::create_directories(common.out);

  RunManifest manifest;
  manifest.command = "generate";
  manifest.seed = config.seed;
  manifest.config = {{"students", config.n_students},
                     {"courses", config.n_courses},
                     {"teachers", config.n_teachers},
                     {"schools", config.n_schools},
                     {"categories", config.n_categories},
                     {"majors", config.n_majors},
                     {"courses_min", config.courses_min},
                     {"courses_max", config.courses_max},
                     {"pref_strength", config.preference_strength},
                     {"coupling", config.engagement_coupling},
                     {"career_coupling", opts.career_coupling},
                     {"seed", config.seed}};
  Stopwatch step;
  const auto graph = generate_synthetic(config);
  manifest.timings["generate_seconds"] = step.lap();
  const auto nodes = common.out / "nodes.jsonl";
  const auto edges = common.out / "edges.jsonl";
  save_jsonl(graph, nodes, edges);
  manifest.outputs = {nodes, edges};
  if (opts.graphml) {
    const auto path = common.out / "graph.graphml";
    export_graphml(graph, path);
    manifest.outputs.push_back(path);
  }
  manifest.timings["write_seconds"] = step.lap();
  finish(manifest, common, total);
  const auto counts = graph.counts_by_kind();
  out << "generated " << counts.total_nodes() << " nodes, " << counts.total_edges() << " edges into "
      << common.out.string() << "\n";
  return kExitOk;
}

int cmd_analyze(const CommonOptions& common, const AnalyzeOptions& opts, std::ostream& out, std::ostream& err) {
  Stopwatch total;
  RunManifest manifest;
  manifest.command = "analyze";
  manifest.seed = common.seed;
  manifest.config = {{"in", common.in.generic_string()}, {"dim", opts.dim},   {"scenario", opts.scenario},
                     {"k", opts.k},                      {"seed", common.seed}, {"min_courses", common.min_courses},
                     {"raw_engagement", common.raw_engagement}};
  const auto graph = load_graph(common, manifest, err);
  fs::create_directories(common.out);

  const auto dims = dims_of(opts.dim);
  const auto scenarios = scenarios_of(opts.scenario);
  const bool single = dims.size() == 1 && scenarios.size() == 1;
  const AssociationOptions aopts{opts.k, common.seed, common.min_courses, !common.raw_engagement};
  if (opts.k < 2) throw Error(ErrorCode::InvalidConfig, "--k must be >= 2");

  const auto eligible = eligible_students(graph, common.min_courses);
  if (eligible.empty()) throw Error(ErrorCode::EmptyCohort, "no student has " + std::to_string(common.min_courses) + "+ courses");

  json grid = json::object();
  for (auto dim : dims) {
    const auto features = preference_features(graph, eligible, dim);
    const auto clusters = kmeans(standardize_columns(features.values), opts.k, common.seed);
    for (auto scenario : scenarios) {
      const fs::path dir =
          single ? common.out : common.out / (std::string(to_string(dim)) + "_" + std::string(to_string(scenario)));
      fs::create_directories(dir);
      const json doc = association_or_error(
          [&] { return association_for(graph, eligible, dim, scenario, aopts); }, dim, scenario, opts.k, eligible.size());
      grid[std::string(to_string(dim))][std::string(to_string(scenario))] = doc["p"];
      write_json(dir / "association.json", doc);
      write_text(dir / "features.csv", features_csv(features, clusters.assignments));
      write_text(dir / "scatter.svg",
                 scatter_svg(features, clusters.assignments,
                             std::string(to_string(dim)) + " preference clusters (k=" + std::to_string(opts.k) + ")"));
      manifest.outputs.push_back(dir / "association.json");
      manifest.outputs.push_back(dir / "features.csv");
      manifest.outputs.push_back(dir / "scatter.svg");
      out << to_string(dim) << " " << to_string(scenario) << " p=" << doc["p"].dump() << " rand=" << doc["rand"].dump()
          << "\n";
    }
  }
  if (!single) {
    std::string csv = "dimension";
    for (auto s : scenarios) csv += "," + std::string(to_string(s));
    csv += "\n";
    for (auto d : dims) {
      csv += std::string(to_string(d));
      for (auto s : scenarios) csv += "," + grid[std::string(to_string(d))][std::string(to_string(s))].dump();
      csv += "\n";
    }
    write_text(common.out / "p_values.csv", csv);
    manifest.outputs.push_back(common.out / "p_values.csv");
  }
  finish(manifest, common, total);
  return kExitOk;
}

int cmd_train(const CommonOptions& common, TrainOptions opts, std::ostream& out, std::ostream& err) {
  Stopwatch total;
  opts.config.seed = common.seed;
  opts.config.optimizer = opts.optimizer == "gd" ? Optimizer::GradientDescent : Optimizer::Adam;
  opts.config.validate();
  RunManifest manifest;
  manifest.command = "train";
  manifest.seed = common.seed;
  manifest.config = {{"in", common.in.generic_string()},
                     {"epochs", opts.config.epochs},
                     {"lr", opts.config.learning_rate},
                     {"negatives", opts.config.negatives},
                     {"hidden", opts.config.hidden},
                     {"embed", opts.config.embed},
                     {"free_dim", opts.config.free_dim},
                     {"optimizer", opts.optimizer},
                     {"seed", common.seed}};
  const auto graph = load_graph(common, manifest, err);
  fs::create_directories(common.out);
  const auto model_path = opts.model.empty() ? common.out / "model.json" : opts.model;

  Stopwatch step;
  const auto view = build_view(graph);
  const auto result = train(view, opts.config);
  manifest.timings["train_seconds"] = step.lap();
  save_checkpoint(result.model, model_path);
  std::string csv = "epoch,loss\n";
  for (std::size_t i = 0; i < result.loss_curve.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", result.loss_curve[i]);
    csv += std::to_string(i + 1) + "," + buf + "\n";
  }
  write_text(common.out / "loss_curve.csv", csv);
  manifest.outputs = {model_path, common.out / "loss_curve.csv"};
  finish(manifest, common, total);
  out << "trained " << opts.config.epochs << " epochs, loss " << result.loss_curve.front() << " -> "
      << result.loss_curve.back() << "\n";
  return kExitOk;
}

struct LoadedModel {
  GraphView view;
  GcnModel model;
  DenseMatrix embeddings;
};

LoadedModel load_model(const HeteroGraph& graph, const fs::path& path, RunManifest& manifest) {
  LoadedModel m{build_view(graph), load_checkpoint(path), {}};
  manifest.inputs.push_back(path);
  check_compatible(m.model, m.view);
  m.embeddings = forward(m.model, m.view);
  return m;
}

int cmd_recommend(const CommonOptions& common, const RecommendOptions& opts, std::ostream& out, std::ostream& err) {
  Stopwatch total;
  if (opts.top_n < 1) throw Error(ErrorCode::InvalidConfig, "--top-n must be >= 1");
  RunManifest manifest;
  manifest.command = "recommend";
  manifest.seed = common.seed;
  manifest.config = {{"in", common.in.generic_string()}, {"model", opts.model.generic_string()},
                     {"top_n", opts.top_n},              {"students", opts.students}};
  const auto graph = load_graph(common, manifest, err);
  const auto loaded = load_model(graph, opts.model, manifest);
  fs::create_directories(common.out);

  std::vector<std::string> students = opts.students;
  if (students.empty())
    for (auto h : graph.nodes_of_kind(NodeKind::Student)) students.push_back(graph.node(h).id);
  std::vector<Recommendation> recs;
  for (const auto& s : students) recs.push_back(recommend(loaded.embeddings, loaded.view, graph, s, opts.top_n));
  write_json(common.out / "recommendations.json", recommendations_json(recs, opts.top_n));
  manifest.outputs = {common.out / "recommendations.json"};
  finish(manifest, common, total);
  out << "recommended top-" << opts.top_n << " courses for " << recs.size() << " students\n";
  return kExitOk;
}

int cmd_group(const CommonOptions& common, const GroupOptions& opts, std::ostream& out, std::ostream& err) {
  Stopwatch total;
  if (opts.group_size < 2) throw Error(ErrorCode::InvalidConfig, "--group-size must be >= 2");
  RunManifest manifest;
  manifest.command = "group";
  manifest.seed = common.seed;
  manifest.config = {{"in", common.in.generic_string()},
                     {"model", opts.model.generic_string()},
                     {"group_size", opts.group_size},
                     {"dim", opts.dim},
                     {"k", opts.k},
                     {"seed", common.seed},
                     {"min_courses", common.min_courses}};
  const auto graph = load_graph(common, manifest, err);
  const auto loaded = load_model(graph, opts.model, manifest);
  fs::create_directories(common.out);

  const auto eligible = eligible_students(graph, common.min_courses);
  if (eligible.empty()) throw Error(ErrorCode::EmptyCohort, "no eligible students to group");
  const auto features = preference_features(graph, eligible, *parse_dimension(opts.dim));
  const auto clusters = kmeans(standardize_columns(features.values), opts.k, common.seed);
  ClusterAssignments assignment;
  EmbeddingTable embeddings;
  for (std::size_t i = 0; i < features.ids.size(); ++i) {
    assignment[features.ids[i]] = clusters.assignments[i];
    embeddings[features.ids[i]] = loaded.embeddings.row(loaded.view.row(features.ids[i])).transpose();
  }
  const auto report = group_report(form_groups(assignment, embeddings, opts.group_size));
  write_json(common.out / "groups.json", groups_json(report));
  manifest.outputs = {common.out / "groups.json"};
  finish(manifest, common, total);
  out << report.groups.size() << " groups over " << report.students << " students, mean cohesion "
      << report.mean_cohesion << "\n";
  return kExitOk;
}

int cmd_cohort(const CommonOptions& common, const CohortOptions& opts, std::ostream& out, std::ostream& err) {
  Stopwatch total;
  RunManifest manifest;
  manifest.command = "cohort";
  manifest.seed = common.seed;
  manifest.config = {{"in", common.in.generic_string()}, {"career", opts.career},  {"dim", opts.dim},
                     {"scenario", opts.scenario},        {"k", opts.k},            {"seed", common.seed},
                     {"min_courses", common.min_courses}, {"raw_engagement", common.raw_engagement}};
  const auto graph = load_graph(common, manifest, err);
  fs::create_directories(common.out);

  std::vector<std::string> careers;
  if (opts.career == "all") careers.assign(kCareerLabels.begin(), kCareerLabels.end());
  else careers.push_back(opts.career);
  const auto dim = *parse_dimension(opts.dim);
  const auto scenario = *parse_scenario(opts.scenario);
  for (const auto& career : careers) {
    const auto members = cohort_members(graph, career, common.min_courses);
    if (members.empty()) throw Error(ErrorCode::EmptyCohort, "no eligible students with career '" + career + "'");
    auto doc = association_or_error(
        [&] { return cohort_association(graph, career, dim, scenario, {opts.k, common.seed, common.min_courses, !common.raw_engagement}); },
        dim, scenario, opts.k, members.size());
    doc["career"] = career;
    const auto path = common.out / ("cohort_" + career + ".json");
    write_json(path, doc);
    manifest.outputs.push_back(path);
    out << career << " n=" << members.size() << " chi2=" << doc["chi2"].dump() << " p=" << doc["p"].dump()
        << " rand=" << doc["rand"].dump() << "\n";
  }
  finish(manifest, common, total);
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonOptions& common, bool needs_input) {
  if (needs_input)
    cmd->add_option("--in", common.in, "Directory holding nodes.jsonl and edges.jsonl")->required();
  cmd->add_option("--out", common.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", common.seed, "Seed for every random draw")->envname("EDUREC_SEED")->capture_default_str();
  if (needs_input) {
    cmd->add_option("--max-violations", common.max_violations, "Schema violations tolerated on load")
        ->capture_default_str();
    cmd->add_option("--max-malformed", common.max_malformed, "Malformed lines tolerated before aborting")
        ->capture_default_str();
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"edurec: MOOC course-preference analytics and graph-based recommendation"};
  app.set_config("--config", "", "TOML/INI file with one key per flag; flags override it");
  app.require_subcommand(1);

  const std::vector<std::string> dim_names = {"school", "category", "teacher"};
  const std::vector<std::string> dim_or_all = {"school", "category", "teacher", "all"};
  const std::vector<std::string> scenario_names = {"FF", "FT", "TF", "TT"};
  const std::vector<std::string> scenario_or_all = {"FF", "FT", "TF", "TT", "all"};

  CommonOptions common;
  std::function<int()> action;

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic MOOC graph as JSONL");
  add_common(generate, common, false);
  generate->add_option("--students", gen.config.n_students)->capture_default_str()->check(CLI::PositiveNumber);
  generate->add_option("--courses", gen.config.n_courses)->capture_default_str()->check(CLI::PositiveNumber);
  generate->add_option("--teachers", gen.config.n_teachers)->capture_default_str()->check(CLI::PositiveNumber);
  generate->add_option("--schools", gen.config.n_schools)->capture_default_str()->check(CLI::PositiveNumber);
  generate->add_option("--categories", gen.config.n_categories)->capture_default_str()->check(CLI::PositiveNumber);
  generate->add_option("--majors", gen.config.n_majors)->capture_default_str()->check(CLI::PositiveNumber);
  generate->add_option("--courses-min", gen.config.courses_min, "Fewest courses per student")->capture_default_str();
  generate->add_option("--courses-max", gen.config.courses_max, "Most courses per student")->capture_default_str();
  generate->add_option("--pref-strength", gen.config.preference_strength)
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  generate->add_option("--coupling", gen.config.engagement_coupling)->capture_default_str()->check(CLI::Range(-1.0, 1.0));
  generate->add_option("--career-coupling", gen.career_coupling, "Coupling per career: student professional other")
      ->expected(3)
      ->check(CLI::Range(-1.0, 1.0));
  generate->add_flag("--graphml", gen.graphml, "Also export graph.graphml");
  generate->callback([&] { action = [&] { return cmd_generate(common, gen, out); }; });

  AnalyzeOptions an;
  auto* analyze = app.add_subcommand("analyze", "Preference/engagement association report");
  add_common(analyze, common, true);
  analyze->add_option("--dim", an.dim)->capture_default_str()->check(CLI::IsMember(dim_or_all));
  analyze->add_option("--scenario", an.scenario)->capture_default_str()->check(CLI::IsMember(scenario_or_all));
  analyze->add_option("--k", an.k)->capture_default_str()->check(CLI::Range(2, 64));
  analyze->add_option("--min-courses", common.min_courses, "Eligibility threshold")->capture_default_str();
  analyze->add_flag("--raw-engagement", common.raw_engagement, "Cluster engagement without the log1p transform");
  analyze->callback([&] { action = [&] { return cmd_analyze(common, an, out, err); }; });

  TrainOptions tr;
  auto* trainc = app.add_subcommand("train", "Train the GCN link scorer");
  add_common(trainc, common, true);
  trainc->add_option("--model", tr.model, "Checkpoint path (default <out>/model.json)");
  trainc->add_option("--epochs", tr.config.epochs)->capture_default_str()->check(CLI::PositiveNumber);
  trainc->add_option("--lr", tr.config.learning_rate)->capture_default_str()->check(CLI::NonNegativeNumber);
  trainc->add_option("--negatives", tr.config.negatives)->capture_default_str()->check(CLI::PositiveNumber);
  trainc->add_option("--hidden", tr.config.hidden)->capture_default_str()->check(CLI::PositiveNumber);
  trainc->add_option("--embed", tr.config.embed)->capture_default_str()->check(CLI::PositiveNumber);
  trainc->add_option("--free-dim", tr.config.free_dim, "Trainable input embedding width")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  trainc->add_option("--optimizer", tr.optimizer)->capture_default_str()->check(CLI::IsMember({"adam", "gd"}));
  trainc->callback([&] { action = [&] { return cmd_train(common, tr, out, err); }; });

  RecommendOptions rc;
  auto* recommendc = app.add_subcommand("recommend", "Top-n unenrolled courses per student");
  add_common(recommendc, common, true);
  recommendc->add_option("--model", rc.model)->required();
  recommendc->add_option("--top-n", rc.top_n)->capture_default_str()->check(CLI::PositiveNumber);
  recommendc->add_option("--student", rc.students, "Student id (repeatable; default all)");
  recommendc->callback([&] { action = [&] { return cmd_recommend(common, rc, out, err); }; });

  GroupOptions gr;
  auto* groupc = app.add_subcommand("group", "Study groups inside preference clusters");
  add_common(groupc, common, true);
  groupc->add_option("--model", gr.model)->required();
  groupc->add_option("--group-size", gr.group_size)->capture_default_str();
  groupc->add_option("--dim", gr.dim)->capture_default_str()->check(CLI::IsMember(dim_names));
  groupc->add_option("--k", gr.k)->capture_default_str()->check(CLI::Range(1, 64));
  groupc->add_option("--min-courses", common.min_courses, "Eligibility threshold")->capture_default_str();
  groupc->callback([&] { action = [&] { return cmd_group(common, gr, out, err); }; });

  CohortOptions co;
  auto* cohort = app.add_subcommand("cohort", "Association per occupational cohort");
  add_common(cohort, common, true);
  cohort->add_option("--career", co.career)
      ->capture_default_str()
      ->check(CLI::IsMember({"student", "professional", "other", "all"}));
  cohort->add_option("--dim", co.dim)->capture_default_str()->check(CLI::IsMember(dim_names));
  cohort->add_option("--scenario", co.scenario)->capture_default_str()->check(CLI::IsMember(scenario_names));
  cohort->add_option("--k", co.k)->capture_default_str()->check(CLI::Range(2, 64));
  cohort->add_option("--min-courses", common.min_courses, "Eligibility threshold")->capture_default_str();
  cohort->add_flag("--raw-engagement", common.raw_engagement, "Cluster engagement without the log1p transform");
  cohort->callback([&] { action = [&] { return cmd_cohort(common, co, out, err); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace edurec
