#pragma once

// Course-selection preference profiles, engagement indicators and the
// preference <-> engagement association battery.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edurec/graph.hpp"
#include "edurec/kmeans.hpp"
#include "edurec/stats.hpp"

namespace edurec {

enum class PreferenceDimension : std::uint8_t { School, Category, Teacher };
inline constexpr std::array<PreferenceDimension, 3> kAllDimensions = {
    PreferenceDimension::School, PreferenceDimension::Category, PreferenceDimension::Teacher};

// FF: total hours + likes, FT: total hours, TF: average hours + likes, TT: average hours.
enum class IndicatorScenario : std::uint8_t { FF, FT, TF, TT };
inline constexpr std::array<IndicatorScenario, 4> kAllScenarios = {
    IndicatorScenario::FF, IndicatorScenario::FT, IndicatorScenario::TF, IndicatorScenario::TT};

std::string_view to_string(PreferenceDimension dim);
std::string_view to_string(IndicatorScenario scenario);
std::optional<PreferenceDimension> parse_dimension(std::string_view text);  // lower case
std::optional<IndicatorScenario> parse_scenario(std::string_view text);

// Traversal from a student to the dimension's terminal entity.
std::vector<PathStep> path_schema(PreferenceDimension dim);

inline constexpr std::size_t kEligibleMinCourses = 27;

// Students with at least min_courses Learn edges, sorted by id.
std::vector<std::string> eligible_students(const HeteroGraph& graph, std::size_t min_courses = kEligibleMinCourses);

struct PreferenceProfile {
  std::string student;
  PreferenceDimension dimension = PreferenceDimension::Category;
  TerminalCounts counts;
  double variance = 0;   // population variance of the non-zero terminal counts
  double top_share = 0;  // max count / total, 0 when there are no paths
  std::string top_terminal;  // lowest id among the maxima
  std::size_t total() const;
};

PreferenceProfile preference_profile(const HeteroGraph& graph, std::string_view student, PreferenceDimension dim);

// Summarises raw counts the same way preference_profile does.
PreferenceProfile summarize_counts(std::string student, PreferenceDimension dim, TerminalCounts counts);

struct FeatureMatrix {
  std::vector<std::string> ids;  // row order, sorted
  PointMatrix values;            // n x 2: variance, top_share
};

// Throws EmptyCohort on no profiles. Rows are sorted by student id.
FeatureMatrix preference_features(std::span<const PreferenceProfile> profiles);
FeatureMatrix preference_features(const HeteroGraph& graph, std::span<const std::string> students,
                                  PreferenceDimension dim);

struct EngagementVector {
  std::string student;
  IndicatorScenario scenario = IndicatorScenario::FF;
  std::vector<double> components;  // hours (total or per course), then likes when the scenario uses them
};

std::size_t scenario_arity(IndicatorScenario scenario);
std::vector<std::string> scenario_component_names(IndicatorScenario scenario);

EngagementVector engagement_vector(const HeteroGraph& graph, std::string_view student, IndicatorScenario scenario);

struct AssociationOptions {
  int k = 3;
  std::uint64_t seed = 0;
  std::size_t min_courses = kEligibleMinCourses;
  // Cluster log1p(engagement) rather than raw values.
  bool log_engagement = true;
};

struct AssociationResult {
  PreferenceDimension dimension = PreferenceDimension::Category;
  IndicatorScenario scenario = IndicatorScenario::FF;
  int k = 3;
  std::size_t n = 0;
  ChiSquareResult chi;
  double rand = 0;
  // top_share against each engagement component; nullopt on zero variance
  std::map<std::string, std::optional<double>> pearson;
  FeatureMatrix features;  // unstandardised preference features
  ClusterModel preference_clusters;
  ClusterModel engagement_clusters;
};

// Clusters z-scored preference features and z-scored (log1p) engagement
// vectors with the same k, then tests the k x k joint label table. Empty clusters are
// dropped from the table before testing.
AssociationResult preference_engagement_association(const HeteroGraph& graph, PreferenceDimension dim,
                                                    IndicatorScenario scenario, const AssociationOptions& options = {});

// Same computation over an explicit student list (sorted internally).
AssociationResult association_for(const HeteroGraph& graph, std::vector<std::string> students,
                                  PreferenceDimension dim, IndicatorScenario scenario, const AssociationOptions& options);

// Eligible students whose WorkIn career node is named `career`.
std::vector<std::string> cohort_members(const HeteroGraph& graph, std::string_view career,
                                        std::size_t min_courses = kEligibleMinCourses);

// Throws EmptyCohort when no eligible student has the career.
AssociationResult cohort_association(const HeteroGraph& graph, std::string_view career, PreferenceDimension dim,
                                     IndicatorScenario scenario, const AssociationOptions& options = {});

}  // namespace edurec
