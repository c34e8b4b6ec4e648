#include "edurec/generator.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "edurec/random.hpp"

namespace edurec {

namespace {

constexpr std::array<std::string_view, 27> kCategoryNames = {
    "Electronics",   "Civil Engineer",     "Medicine",          "Math",          "Management",
    "Engineering",   "National Boutique",  "Foreign Languages", "Agriculture",   "Arts & Culture",
    "Histories",     "Bio & Life Sci",     "Communication",     "Science",       "Law",
    "Art & Design",  "Literature",         "General Studies",   "Computer",      "Economics",
    "Psychology",    "Philosophy",         "Test",              "Education",     "Foundation",
    "Physics",       "Chemistry"};

constexpr std::array<std::string_view, 3> kTeacherTitles = {"Professor", "Associate Professor", "Lecturer"};

constexpr double kHoursLogMean = 4.0;  // ~55 h total
constexpr double kHoursLogSd = 0.5;
constexpr double kLikesLogMean = 3.0;  // ~20 likes
constexpr double kLikesLogSd = 0.5;
constexpr double kResponseLogMean = 2.3;
constexpr double kResponseLogSd = 0.5;
constexpr double kFavouriteBoost = 2.0;
constexpr double kSecondTeacherProb = 0.2;

std::string padded(std::string_view prefix, std::size_t i, std::size_t n) {
  std::size_t width = 6;
  for (std::size_t m = n; m >= 1000000; m /= 10) ++width;
  std::string digits = std::to_string(i);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return std::string(prefix) + ":" + digits;
}

std::string category_name(std::size_t i) {
  if (i < kCategoryNames.size()) return std::string(kCategoryNames[i]);
  return std::string(kCategoryNames[i % kCategoryNames.size()]) + " " + std::to_string(i / kCategoryNames.size() + 1);
}

struct CourseDraft {
  std::size_t category;
  std::size_t school;
  std::vector<std::size_t> teachers;
  std::size_t electors = 0;
};

struct StudentDraft {
  std::size_t career;
  std::size_t major;
  std::size_t fav_category;
  std::size_t fav_school;
  std::size_t fav_teacher;
  double concentration;
  std::vector<std::size_t> courses;
  double learning_time = 0;
  double likes = 0;
  double response = 0;
};

}  // namespace

void GeneratorConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidConfig, why); };
  if (n_students < 1 || n_courses < 1 || n_teachers < 1 || n_schools < 1 || n_categories < 1 || n_majors < 1)
    fail("all counts must be >= 1");
  if (courses_min > courses_max) fail("courses_min > courses_max");
  if (courses_max > n_courses) fail("courses_max exceeds n_courses");
  if (!(preference_strength >= 0.0 && preference_strength <= 1.0)) fail("preference_strength must be in [0,1]");
  if (!(engagement_coupling >= -1.0 && engagement_coupling <= 1.0)) fail("engagement_coupling must be in [-1,1]");
  double share_sum = 0;
  for (double s : career_shares) {
    if (!(s >= 0.0) || !std::isfinite(s)) fail("career shares must be >= 0");
    share_sum += s;
  }
  if (!(share_sum > 0)) fail("career shares sum to zero");
  if (career_coupling)
    for (double c : *career_coupling)
      if (!(c >= -1.0 && c <= 1.0)) fail("career coupling must be in [-1,1]");
}

std::string student_id(std::size_t i, std::size_t n) { return padded("student", i, n); }
std::string course_id(std::size_t i, std::size_t n) { return padded("course", i, n); }
std::string career_id(std::string_view label) { return "career:" + std::string(label); }

HeteroGraph generate_synthetic(const GeneratorConfig& config) {
  config.validate();
  Rng rng(config.seed);

  // Courses: categories round-robin so every category holds n_courses / n_categories courses.
  std::vector<std::vector<std::size_t>> teachers_by_category(config.n_categories);
  for (std::size_t t = 0; t < config.n_teachers; ++t) teachers_by_category[t % config.n_categories].push_back(t);

  std::vector<CourseDraft> courses(config.n_courses);
  std::vector<std::vector<std::size_t>> courses_by_category(config.n_categories);
  for (std::size_t c = 0; c < config.n_courses; ++c) {
    auto& draft = courses[c];
    draft.category = c % config.n_categories;
    draft.school = rng.below(config.n_schools);
    const auto& pool = teachers_by_category[draft.category];
    auto pick_teacher = [&] {
      return pool.empty() ? rng.below(config.n_teachers) : pool[rng.below(pool.size())];
    };
    draft.teachers.push_back(pick_teacher());
    if (rng.bernoulli(kSecondTeacherProb)) {
      const auto second = pick_teacher();
      if (second != draft.teachers.front()) draft.teachers.push_back(second);
    }
    courses_by_category[draft.category].push_back(c);
  }

  std::vector<std::size_t> teacher_school(config.n_teachers, config.n_schools);
  for (const auto& draft : courses)
    for (auto t : draft.teachers)
      if (teacher_school[t] == config.n_schools) teacher_school[t] = draft.school;
  for (auto& s : teacher_school)
    if (s == config.n_schools) s = rng.below(config.n_schools);

  std::array<double, 3> cumulative{};
  {
    double total = config.career_shares[0] + config.career_shares[1] + config.career_shares[2];
    double acc = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      acc += config.career_shares[i] / total;
      cumulative[i] = acc;
    }
  }

  std::vector<StudentDraft> students(config.n_students);
  std::vector<char> taken(config.n_courses, 0);
  for (auto& s : students) {
    const double u = rng.uniform();
    s.career = u < cumulative[0] ? 0 : (u < cumulative[1] ? 1 : 2);
    s.major = rng.below(config.n_majors);
    s.fav_category = rng.below(config.n_categories);
    s.fav_school = rng.below(config.n_schools);
    const auto& tpool = teachers_by_category[s.fav_category];
    s.fav_teacher = tpool.empty() ? rng.below(config.n_teachers) : tpool[rng.below(tpool.size())];
    const double v = rng.uniform(0.25, 4.0);
    s.concentration = config.preference_strength <= 0.0 ? 0.0 : std::pow(config.preference_strength, v);

    const auto m = static_cast<std::size_t>(
        rng.between(static_cast<std::int64_t>(config.courses_min), static_cast<std::int64_t>(config.courses_max)));
    const auto& pool = courses_by_category[s.fav_category];
    std::size_t from_pool = 0;
    auto weight = [&](std::size_t c) {
      const auto& d = courses[c];
      double w = 1.0;
      if (d.school == s.fav_school) w += kFavouriteBoost;
      if (std::find(d.teachers.begin(), d.teachers.end(), s.fav_teacher) != d.teachers.end()) w += kFavouriteBoost;
      return w;
    };
    constexpr double kMaxWeight = 1.0 + 2 * kFavouriteBoost;
    while (s.courses.size() < m) {
      std::size_t pick;
      if (from_pool < pool.size() && rng.bernoulli(s.concentration)) {
        // weighted draw from the favourite pool by rejection
        do {
          pick = pool[rng.below(pool.size())];
        } while (taken[pick] || !rng.bernoulli(weight(pick) / kMaxWeight));
      } else {
        do {
          pick = rng.below(config.n_courses);
        } while (taken[pick]);
      }
      taken[pick] = 1;
      if (courses[pick].category == s.fav_category) ++from_pool;
      s.courses.push_back(pick);
    }
    for (auto c : s.courses) {
      taken[c] = 0;
      ++courses[c].electors;
    }
    std::sort(s.courses.begin(), s.courses.end());
  }

  // Realised category top share, standardised across students.
  std::vector<double> top_share(students.size(), 0.0);
  {
    std::vector<std::size_t> per_category(config.n_categories, 0);
    for (std::size_t i = 0; i < students.size(); ++i) {
      const auto& s = students[i];
      if (s.courses.empty()) continue;
      std::fill(per_category.begin(), per_category.end(), 0);
      for (auto c : s.courses) ++per_category[courses[c].category];
      top_share[i] = static_cast<double>(*std::max_element(per_category.begin(), per_category.end())) /
                     static_cast<double>(s.courses.size());
    }
  }
  double mean = 0, sq = 0;
  for (double t : top_share) mean += t;
  mean /= static_cast<double>(top_share.size());
  for (double t : top_share) sq += (t - mean) * (t - mean);
  const double sd = std::sqrt(sq / static_cast<double>(top_share.size()));

  for (std::size_t i = 0; i < students.size(); ++i) {
    auto& s = students[i];
    const double z = sd > 0 ? (top_share[i] - mean) / sd : 0.0;
    const double coupling = config.career_coupling ? (*config.career_coupling)[s.career] : config.engagement_coupling;
    const double shift = coupling * z;
    s.learning_time = std::exp(kHoursLogMean + kHoursLogSd * (rng.normal() + shift));
    s.likes = std::round(std::exp(kLikesLogMean + kLikesLogSd * (rng.normal() + shift)));
    s.response = std::round(std::exp(kResponseLogMean + kResponseLogSd * rng.normal()));
  }

  HeteroGraph g;
  for (std::size_t i = 0; i < config.n_categories; ++i)
    g.add_node({padded("category", i, config.n_categories), NodeKind::Category, {{"name", category_name(i)}}});
  for (std::size_t i = 0; i < config.n_schools; ++i)
    g.add_node({padded("school", i, config.n_schools), NodeKind::School, {{"name", "School " + std::to_string(i)}}});
  for (auto label : kCareerLabels) g.add_node({career_id(label), NodeKind::Career, {{"name", std::string(label)}}});
  for (std::size_t i = 0; i < config.n_majors; ++i)
    g.add_node({padded("major", i, config.n_majors), NodeKind::Major, {{"name", "Major " + std::to_string(i)}}});

  std::vector<NodeHandle> course_h(config.n_courses), teacher_h(config.n_teachers);
  for (std::size_t c = 0; c < config.n_courses; ++c) {
    const auto id = course_id(c, config.n_courses);
    course_h[c] = g.add_node({id, NodeKind::Course,
                              {{"name", "Course " + std::to_string(c)},
                               {"id", std::to_string(c)},
                               {"url", "https://mooc.example/course/" + std::to_string(c)},
                               {"num", static_cast<double>(courses[c].electors)}}});
  }
  for (std::size_t t = 0; t < config.n_teachers; ++t) {
    teacher_h[t] = g.add_node({padded("teacher", t, config.n_teachers), NodeKind::Teacher,
                               {{"name", "Teacher " + std::to_string(t)},
                                {"id", std::to_string(t)},
                                {"career", std::string(kTeacherTitles[t % kTeacherTitles.size()])}}});
  }
  std::vector<NodeHandle> student_h(config.n_students);
  for (std::size_t i = 0; i < config.n_students; ++i) {
    const auto& s = students[i];
    student_h[i] = g.add_node({student_id(i, config.n_students), NodeKind::Student,
                               {{"name", "Student " + std::to_string(i)},
                                {"id", std::to_string(i)},
                                {"url", "https://mooc.example/user/" + std::to_string(i)},
                                {"learning_time", s.learning_time},
                                {"response", s.response},
                                {"likes", s.likes}}});
  }

  auto category_h = [&](std::size_t i) { return g.handle(padded("category", i, config.n_categories)); };
  auto school_h = [&](std::size_t i) { return g.handle(padded("school", i, config.n_schools)); };
  for (std::size_t c = 0; c < config.n_courses; ++c) {
    g.add_edge(EdgeKind::Belong, course_h[c], category_h(courses[c].category));
    g.add_edge(EdgeKind::BelongTo, course_h[c], school_h(courses[c].school));
    for (auto t : courses[c].teachers) g.add_edge(EdgeKind::Teach, teacher_h[t], course_h[c]);
  }
  for (std::size_t t = 0; t < config.n_teachers; ++t)
    g.add_edge(EdgeKind::TeachIn, teacher_h[t], school_h(teacher_school[t]));
  for (std::size_t i = 0; i < config.n_students; ++i) {
    const auto& s = students[i];
    g.add_edge(EdgeKind::WorkIn, student_h[i], g.handle(career_id(kCareerLabels[s.career])));
    g.add_edge(EdgeKind::LearnIn, student_h[i], school_h(s.fav_school));
    g.add_edge(EdgeKind::MajorIn, student_h[i], g.handle(padded("major", s.major, config.n_majors)));
    for (auto c : s.courses) g.add_edge(EdgeKind::Learn, student_h[i], course_h[c]);
  }
  g.freeze();
  return g;
}

}  // namespace edurec
