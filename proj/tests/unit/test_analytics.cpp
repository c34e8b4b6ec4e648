#include <doctest.h>

#include <algorithm>
#include <set>

#include "edurec/analytics.hpp"
#include "edurec/generator.hpp"
#include "fixtures.hpp"

using namespace edurec;
using namespace edurec::testing;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

// Students "s<n>" with n Learn edges each, drawn from a shared pool of courses.
HeteroGraph enrollment_fixture(std::initializer_list<int> course_counts) {
  HeteroGraph g;
  g.add_node(named("cat", NodeKind::Category));
  const int pool = std::max(course_counts);
  for (int c = 0; c < pool; ++c) {
    g.add_node(course("c" + std::to_string(100 + c)));
    g.add_edge(EdgeKind::Belong, "c" + std::to_string(100 + c), "cat");
  }
  for (int n : course_counts) {
    const auto id = "s" + std::to_string(n);
    g.add_node(student(id, n, 1));
    for (int c = 0; c < n; ++c) g.add_edge(EdgeKind::Learn, id, "c" + std::to_string(100 + c));
  }
  g.freeze();
  return g;
}

// One student: 30 hours, 5 likes, courses A1..A3 in category A and B1 in B.
HeteroGraph profile_fixture() {
  HeteroGraph g;
  g.add_node(named("A", NodeKind::Category));
  g.add_node(named("B", NodeKind::Category));
  g.add_node(named("mono", NodeKind::Category));
  g.add_node(student("s", 30, 5));
  g.add_node(student("mono-student", 8, 0));
  g.add_node(student("idle", 4, 2));
  for (auto c : {"A1", "A2", "A3", "B1", "M1", "M2", "M3", "M4"}) g.add_node(course(c));
  for (auto c : {"A1", "A2", "A3"}) g.add_edge(EdgeKind::Belong, c, "A");
  g.add_edge(EdgeKind::Belong, "B1", "B");
  for (auto c : {"M1", "M2", "M3", "M4"}) {
    g.add_edge(EdgeKind::Belong, c, "mono");
    g.add_edge(EdgeKind::Learn, "mono-student", c);
  }
  for (auto c : {"A1", "A2", "B1"}) g.add_edge(EdgeKind::Learn, "s", c);
  g.freeze();
  return g;
}

GeneratorConfig cohort_config(std::uint64_t seed) {
  GeneratorConfig c;
  c.n_students = 900;
  c.n_courses = 900;
  c.n_teachers = 270;
  c.n_schools = 30;
  c.n_categories = 12;
  c.n_majors = 20;
  c.career_shares = {1.0, 1.0, 1.0};
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("eligibility boundary sits at 27 courses") {
  const auto g = enrollment_fixture({26, 27, 28});
  CHECK(eligible_students(g) == std::vector<std::string>{"s27", "s28"});
  CHECK(eligible_students(g, 26) == std::vector<std::string>{"s26", "s27", "s28"});

  HeteroGraph empty;
  empty.freeze();
  CHECK(eligible_students(empty).empty());

  HeteroGraph open;
  CHECK(code_of([&] { eligible_students(open); }) == ErrorCode::GraphNotFrozen);
}

TEST_CASE("preference profile from a graph") {
  const auto g = profile_fixture();
  const auto p = preference_profile(g, "s", PreferenceDimension::Category);
  CHECK(p.counts == TerminalCounts{{"A", 2}, {"B", 1}});
  CHECK(p.total() == 3);
  CHECK(p.top_terminal == "A");
  CHECK(p.top_share == doctest::Approx(2.0 / 3.0));

  const auto mono = preference_profile(g, "mono-student", PreferenceDimension::Category);
  CHECK(mono.top_share == 1.0);
  CHECK(mono.variance == 0.0);

  const auto idle = preference_profile(g, "idle", PreferenceDimension::Category);
  CHECK(idle.counts.empty());
  CHECK(idle.top_share == 0.0);
  CHECK(idle.variance == 0.0);

  CHECK(code_of([&] { preference_profile(g, "ghost", PreferenceDimension::Category); }) == ErrorCode::UnknownNode);
}

TEST_CASE("summarised counts {A:3, B:1}") {
  const auto p = summarize_counts("s", PreferenceDimension::Category, {{"A", 3}, {"B", 1}});
  CHECK(p.top_share == doctest::Approx(0.75));
  CHECK(p.variance == doctest::Approx(1.0));

  const std::vector<PreferenceProfile> one{p};
  const auto f = preference_features(one);
  REQUIRE(f.values.rows() == 1);
  CHECK(f.values(0, 0) == doctest::Approx(1.0));
  CHECK(f.values(0, 1) == doctest::Approx(0.75));

  const auto tie = summarize_counts("s", PreferenceDimension::Category, {{"Z", 2}, {"A", 2}});
  CHECK(tie.top_terminal == "A");

  CHECK(code_of([] { preference_features(std::span<const PreferenceProfile>{}); }) == ErrorCode::EmptyCohort);
}

TEST_CASE("feature rows follow sorted student ids") {
  std::vector<PreferenceProfile> ps{summarize_counts("b", PreferenceDimension::School, {{"x", 1}}),
                                    summarize_counts("a", PreferenceDimension::School, {{"x", 1}, {"y", 3}})};
  const auto f = preference_features(ps);
  CHECK(f.ids == std::vector<std::string>{"a", "b"});
  CHECK(f.values(0, 1) == doctest::Approx(0.75));
}

TEST_CASE("path schemas per dimension") {
  CHECK(path_schema(PreferenceDimension::Category)[1].kind == EdgeKind::Belong);
  CHECK(path_schema(PreferenceDimension::School)[1].kind == EdgeKind::BelongTo);
  CHECK(path_schema(PreferenceDimension::Teacher)[1].kind == EdgeKind::Teach);
  CHECK(path_schema(PreferenceDimension::Teacher)[1].direction == Direction::In);
}

TEST_CASE("engagement vectors per scenario") {
  HeteroGraph g;
  g.add_node(student("s", 30, 5));
  g.add_node(student("none", 12, 2));
  for (auto c : {"c1", "c2", "c3"}) {
    g.add_node(course(c));
    g.add_edge(EdgeKind::Learn, "s", c);
  }
  g.freeze();
  CHECK(engagement_vector(g, "s", IndicatorScenario::TF).components == std::vector<double>{10.0, 5.0});
  CHECK(engagement_vector(g, "s", IndicatorScenario::FT).components == std::vector<double>{30.0});
  CHECK(engagement_vector(g, "s", IndicatorScenario::FF).components == std::vector<double>{30.0, 5.0});
  CHECK(engagement_vector(g, "s", IndicatorScenario::TT).components == std::vector<double>{10.0});
  CHECK(engagement_vector(g, "none", IndicatorScenario::TT).components == std::vector<double>{0.0});
  for (auto sc : kAllScenarios) {
    CHECK(engagement_vector(g, "s", sc).components.size() == scenario_arity(sc));
    CHECK(scenario_component_names(sc).size() == scenario_arity(sc));
  }
  CHECK(code_of([&] { engagement_vector(g, "ghost", IndicatorScenario::FF); }) == ErrorCode::UnknownNode);
}

TEST_CASE("association on generated data") {
  GeneratorConfig c;
  c.n_students = 400;
  c.n_courses = 400;
  c.n_teachers = 120;
  c.n_schools = 20;
  c.n_categories = 10;
  c.n_majors = 10;
  c.engagement_coupling = 1.0;
  c.seed = 8;
  const auto g = generate_synthetic(c);

  const auto r = preference_engagement_association(g, PreferenceDimension::Category, IndicatorScenario::FF);
  CHECK(r.n == eligible_students(g).size());
  CHECK(r.k == 3);
  CHECK(r.chi.p_value < 0.05);
  CHECK(r.rand > 0.0);
  CHECK(r.rand <= 1.0);
  CHECK(r.pearson.count("top_share~hours_total") == 1);
  CHECK(r.pearson.count("top_share~likes") == 1);
  CHECK(r.chi.table.total() == static_cast<std::int64_t>(r.n));

  const auto again = preference_engagement_association(g, PreferenceDimension::Category, IndicatorScenario::FF);
  CHECK(again.chi.statistic == r.chi.statistic);

  const auto ft = preference_engagement_association(g, PreferenceDimension::School, IndicatorScenario::FT);
  CHECK(ft.pearson.size() == 1);

  CHECK(code_of([&] {
          preference_engagement_association(g, PreferenceDimension::Category, IndicatorScenario::FF, {.k = 1});
        }) == ErrorCode::TooFewClusters);
  CHECK(code_of([&] {
          preference_engagement_association(g, PreferenceDimension::Category, IndicatorScenario::FF,
                                            {.min_courses = 1000});
        }) == ErrorCode::EmptyCohort);
}

TEST_CASE("cohorts partition the eligible set") {
  GeneratorConfig c;
  c.n_students = 300;
  c.n_courses = 300;
  c.n_teachers = 90;
  c.n_schools = 10;
  c.n_categories = 8;
  c.n_majors = 6;
  c.seed = 4;
  const auto g = generate_synthetic(c);
  std::set<std::string> seen;
  std::size_t total = 0;
  for (auto label : kCareerLabels) {
    const auto members = cohort_members(g, label);
    total += members.size();
    seen.insert(members.begin(), members.end());
  }
  const auto eligible = eligible_students(g);
  CHECK(total == eligible.size());
  CHECK(seen == std::set<std::string>(eligible.begin(), eligible.end()));
  CHECK(code_of([&] {
          cohort_association(g, "astronaut", PreferenceDimension::Category, IndicatorScenario::FF);
        }) == ErrorCode::EmptyCohort);
}

TEST_CASE("a two-student cohort") {
  HeteroGraph g;
  for (auto label : kCareerLabels) g.add_node({career_id(label), NodeKind::Career, {{"name", std::string(label)}}});
  g.add_node(named("cat", NodeKind::Category));
  for (int c = 0; c < 27; ++c) {
    g.add_node(course("c" + std::to_string(c)));
    g.add_edge(EdgeKind::Belong, "c" + std::to_string(c), "cat");
  }
  for (int s = 0; s < 2; ++s) {
    const auto id = "o" + std::to_string(s);
    g.add_node(student(id, 10.0 + 40 * s, 3.0 * s));
    g.add_edge(EdgeKind::WorkIn, id, career_id("other"));
    for (int c = 0; c < 27 - s; ++c) g.add_edge(EdgeKind::Learn, id, "c" + std::to_string(c));
  }
  // s1 has 26 courses; add one more so both qualify.
  g.add_node(course("extra"));
  g.add_node(named("cat2", NodeKind::Category));
  g.add_edge(EdgeKind::Belong, "extra", "cat2");
  g.add_edge(EdgeKind::Learn, "o1", "extra");
  g.freeze();

  REQUIRE(cohort_members(g, "other").size() == 2);
  CHECK(code_of([&] {
          cohort_association(g, "other", PreferenceDimension::Category, IndicatorScenario::FF, {.k = 3});
        }) == ErrorCode::TooFewPoints);
  // k = 2 clusters fine, but every expected cell is 0.5, below the floor of 1.
  CHECK(code_of([&] {
          cohort_association(g, "other", PreferenceDimension::Category, IndicatorScenario::FF, {.k = 2});
        }) == ErrorCode::DegenerateTable);
}

TEST_CASE("cohort chi-square follows the injected coupling order") {
  // Equal-sized cohorts, coupling student 0 < other 0.5 < professional 1. A run whose
  // table falls under the expected-count floor is left out of that cohort's mean.
  constexpr int kSeeds = 20;
  std::array<double, 3> sum_chi{};
  std::array<int, 3> valid{};
  for (int s = 0; s < kSeeds; ++s) {
    auto c = cohort_config(700 + static_cast<std::uint64_t>(s));
    c.career_coupling = std::array<double, 3>{0.0, 1.0, 0.5};
    const auto g = generate_synthetic(c);
    for (std::size_t i = 0; i < kCareerLabels.size(); ++i) {
      try {
        const auto r = cohort_association(g, kCareerLabels[i], PreferenceDimension::Category, IndicatorScenario::FF,
                                          {.k = 3, .seed = static_cast<std::uint64_t>(s)});
        sum_chi[i] += r.chi.statistic;
        ++valid[i];
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateTable) throw;
      }
    }
  }
  std::array<double, 3> mean_chi{};
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(valid[i] >= 18);
    mean_chi[i] = sum_chi[i] / valid[i];
  }
  MESSAGE("mean chi2 student / professional / other: " << mean_chi[0] << " / " << mean_chi[1] << " / "
                                                        << mean_chi[2]);
  CHECK(mean_chi[1] > mean_chi[2]);
  CHECK(mean_chi[2] > mean_chi[0]);
}
