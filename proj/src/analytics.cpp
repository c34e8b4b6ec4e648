#include "edurec/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace edurec {

namespace {

void require_frozen(const HeteroGraph& graph) {
  if (!graph.frozen()) throw Error(ErrorCode::GraphNotFrozen, "analytics require a frozen graph");
}

NodeHandle student_handle(const HeteroGraph& graph, std::string_view student) {
  const auto h = graph.handle(student);
  if (graph.node(h).kind != NodeKind::Student)
    throw Error(ErrorCode::UnknownNode, std::string(student) + " is not a Student");
  return h;
}

}  // namespace

std::string_view to_string(PreferenceDimension dim) {
  switch (dim) {
    case PreferenceDimension::School: return "school";
    case PreferenceDimension::Category: return "category";
    case PreferenceDimension::Teacher: return "teacher";
  }
  return "?";
}

std::string_view to_string(IndicatorScenario scenario) {
  switch (scenario) {
    case IndicatorScenario::FF: return "FF";
    case IndicatorScenario::FT: return "FT";
    case IndicatorScenario::TF: return "TF";
    case IndicatorScenario::TT: return "TT";
  }
  return "?";
}

std::optional<PreferenceDimension> parse_dimension(std::string_view text) {
  for (auto d : kAllDimensions)
    if (to_string(d) == text) return d;
  return std::nullopt;
}

std::optional<IndicatorScenario> parse_scenario(std::string_view text) {
  for (auto s : kAllScenarios)
    if (to_string(s) == text) return s;
  return std::nullopt;
}

std::vector<PathStep> path_schema(PreferenceDimension dim) {
  switch (dim) {
    case PreferenceDimension::School: return {{EdgeKind::Learn, Direction::Out}, {EdgeKind::BelongTo, Direction::Out}};
    case PreferenceDimension::Category: return {{EdgeKind::Learn, Direction::Out}, {EdgeKind::Belong, Direction::Out}};
    case PreferenceDimension::Teacher: return {{EdgeKind::Learn, Direction::Out}, {EdgeKind::Teach, Direction::In}};
  }
  return {};
}

std::vector<std::string> eligible_students(const HeteroGraph& graph, std::size_t min_courses) {
  require_frozen(graph);
  std::vector<std::string> out;
  for (auto h : graph.nodes_of_kind(NodeKind::Student))
    if (graph.degree(h, EdgeKind::Learn, Direction::Out) >= min_courses) out.push_back(graph.node(h).id);
  return out;
}

std::size_t PreferenceProfile::total() const {
  std::size_t t = 0;
  for (const auto& [_, c] : counts) t += c;
  return t;
}

PreferenceProfile summarize_counts(std::string student, PreferenceDimension dim, TerminalCounts counts) {
  PreferenceProfile p;
  p.student = std::move(student);
  p.dimension = dim;
  p.counts = std::move(counts);

  std::size_t total = 0, top = 0, terms = 0;
  for (const auto& [id, c] : p.counts) {
    if (c == 0) continue;
    ++terms;
    total += c;
    if (c > top) {  // map order makes the first maximum the lowest id
      top = c;
      p.top_terminal = id;
    }
  }
  if (total == 0) return p;
  p.top_share = static_cast<double>(top) / static_cast<double>(total);
  const double mean = static_cast<double>(total) / static_cast<double>(terms);
  double ss = 0;
  for (const auto& [_, c] : p.counts)
    if (c > 0) ss += (static_cast<double>(c) - mean) * (static_cast<double>(c) - mean);
  p.variance = ss / static_cast<double>(terms);
  return p;
}

PreferenceProfile preference_profile(const HeteroGraph& graph, std::string_view student, PreferenceDimension dim) {
  require_frozen(graph);
  student_handle(graph, student);
  const auto schema = path_schema(dim);
  return summarize_counts(std::string(student), dim, graph.dfs_collect(student, schema));
}

FeatureMatrix preference_features(std::span<const PreferenceProfile> profiles) {
  if (profiles.empty()) throw Error(ErrorCode::EmptyCohort, "no profiles to featurize");
  std::vector<std::size_t> order(profiles.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return profiles[a].student < profiles[b].student; });
  FeatureMatrix f;
  f.values.resize(static_cast<Eigen::Index>(profiles.size()), 2);
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto& p = profiles[order[r]];
    f.ids.push_back(p.student);
    f.values(static_cast<Eigen::Index>(r), 0) = p.variance;
    f.values(static_cast<Eigen::Index>(r), 1) = p.top_share;
  }
  return f;
}

FeatureMatrix preference_features(const HeteroGraph& graph, std::span<const std::string> students,
                                  PreferenceDimension dim) {
  std::vector<PreferenceProfile> profiles;
  profiles.reserve(students.size());
  for (const auto& s : students) profiles.push_back(preference_profile(graph, s, dim));
  return preference_features(profiles);
}

std::size_t scenario_arity(IndicatorScenario scenario) {
  return scenario == IndicatorScenario::FF || scenario == IndicatorScenario::TF ? 2 : 1;
}

std::vector<std::string> scenario_component_names(IndicatorScenario scenario) {
  const bool total = scenario == IndicatorScenario::FF || scenario == IndicatorScenario::FT;
  std::vector<std::string> names{total ? "hours_total" : "hours_per_course"};
  if (scenario_arity(scenario) == 2) names.emplace_back("likes");
  return names;
}

EngagementVector engagement_vector(const HeteroGraph& graph, std::string_view student, IndicatorScenario scenario) {
  const auto h = student_handle(graph, student);
  const auto& rec = graph.node(h);
  const double hours = rec.number("learning_time");
  const auto courses = graph.degree(h, EdgeKind::Learn, Direction::Out);

  EngagementVector v;
  v.student = rec.id;
  v.scenario = scenario;
  switch (scenario) {
    case IndicatorScenario::FF:
    case IndicatorScenario::FT: v.components.push_back(hours); break;
    case IndicatorScenario::TF:
    case IndicatorScenario::TT:
      v.components.push_back(courses == 0 ? 0.0 : hours / static_cast<double>(courses));
      break;
  }
  if (scenario_arity(scenario) == 2) v.components.push_back(rec.number("likes"));
  return v;
}

AssociationResult association_for(const HeteroGraph& graph, std::vector<std::string> students,
                                  PreferenceDimension dim, IndicatorScenario scenario,
                                  const AssociationOptions& options) {
  require_frozen(graph);
  if (options.k < 2) throw Error(ErrorCode::TooFewClusters, "association needs k >= 2 (dof would be 0)");
  if (students.empty()) throw Error(ErrorCode::EmptyCohort, "no students to analyse");
  std::sort(students.begin(), students.end());
  if (students.size() < static_cast<std::size_t>(options.k))
    throw Error(ErrorCode::TooFewPoints,
                std::to_string(students.size()) + " students for k=" + std::to_string(options.k));

  AssociationResult r;
  r.dimension = dim;
  r.scenario = scenario;
  r.k = options.k;
  r.n = students.size();
  r.features = preference_features(graph, students, dim);

  const auto arity = scenario_arity(scenario);
  PointMatrix engagement(static_cast<Eigen::Index>(students.size()), static_cast<Eigen::Index>(arity));
  for (std::size_t i = 0; i < students.size(); ++i) {
    const auto v = engagement_vector(graph, students[i], scenario);
    for (std::size_t j = 0; j < arity; ++j)
      engagement(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v.components[j];
  }
  PointMatrix engagement_space = engagement;
  if (options.log_engagement) engagement_space = engagement.array().log1p().matrix();

  r.preference_clusters = kmeans(standardize_columns(r.features.values), options.k, options.seed);
  r.engagement_clusters = kmeans(standardize_columns(engagement_space), options.k, options.seed);

  ContingencyTable joint(static_cast<std::size_t>(options.k), static_cast<std::size_t>(options.k));
  for (std::size_t i = 0; i < students.size(); ++i)
    ++joint.at(static_cast<std::size_t>(r.preference_clusters.assignments[i]),
               static_cast<std::size_t>(r.engagement_clusters.assignments[i]));
  r.chi = chi_square_independence(joint.compact());
  r.rand = rand_index(r.preference_clusters.assignments, r.engagement_clusters.assignments);

  const auto names = scenario_component_names(scenario);
  std::vector<double> top_share(students.size());
  for (std::size_t i = 0; i < students.size(); ++i) top_share[i] = r.features.values(static_cast<Eigen::Index>(i), 1);
  for (std::size_t j = 0; j < arity; ++j) {
    std::vector<double> comp(students.size());
    for (std::size_t i = 0; i < students.size(); ++i) comp[i] = engagement(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    try {
      r.pearson["top_share~" + names[j]] = pearson(top_share, comp);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroVariance && e.code() != ErrorCode::TooFewItems) throw;
      r.pearson["top_share~" + names[j]] = std::nullopt;
    }
  }
  return r;
}

AssociationResult preference_engagement_association(const HeteroGraph& graph, PreferenceDimension dim,
                                                    IndicatorScenario scenario, const AssociationOptions& options) {
  if (options.k < 2) throw Error(ErrorCode::TooFewClusters, "association needs k >= 2 (dof would be 0)");
  auto students = eligible_students(graph, options.min_courses);
  if (students.empty()) throw Error(ErrorCode::EmptyCohort, "no eligible students");
  return association_for(graph, std::move(students), dim, scenario, options);
}

std::vector<std::string> cohort_members(const HeteroGraph& graph, std::string_view career, std::size_t min_courses) {
  std::vector<std::string> out;
  for (const auto& id : eligible_students(graph, min_courses)) {
    const auto h = graph.handle(id);
    for (auto e : graph.incident(h, EdgeKind::WorkIn, Direction::Out)) {
      if (graph.node(graph.edges()[e].tail).text("name") == career) {
        out.push_back(id);
        break;
      }
    }
  }
  return out;
}

AssociationResult cohort_association(const HeteroGraph& graph, std::string_view career, PreferenceDimension dim,
                                     IndicatorScenario scenario, const AssociationOptions& options) {
  auto members = cohort_members(graph, career, options.min_courses);
  if (members.empty()) throw Error(ErrorCode::EmptyCohort, "no eligible students with career '" + std::string(career) + "'");
  return association_for(graph, std::move(members), dim, scenario, options);
}

}  // namespace edurec
