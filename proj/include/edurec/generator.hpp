#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "edurec/graph.hpp"

namespace edurec {

inline constexpr std::array<std::string_view, 3> kCareerLabels = {"student", "professional", "other"};

// Defaults follow the node counts of the source platform's graph.
struct GeneratorConfig {
  std::size_t n_students = 6363;
  std::size_t n_courses = 24703;
  std::size_t n_teachers = 39554;
  std::size_t n_schools = 1196;
  std::size_t n_categories = 32;
  std::size_t n_majors = 360;
  std::size_t courses_min = 20;
  std::size_t courses_max = 45;
  std::array<double, 3> career_shares = {0.6, 0.3, 0.1};
  // 0 = uniform course choice, 1 = every course from the student's favourite category.
  double preference_strength = 0.6;
  // Log-scale shift of engagement per unit z-score of category top share.
  double engagement_coupling = 0.5;
  // Per-career coupling (student, professional, other); overrides engagement_coupling when set.
  std::optional<std::array<double, 3>> career_coupling;
  std::uint64_t seed = 42;

  void validate() const;  // throws InvalidConfig
};

// Latent-preference generator. Every student draws a favourite category, school
// and teacher. Each course pick comes from the favourite category with
// probability rho = strength^v, v ~ U(0.25, 4) per student (rho is 1 for every
// student at strength 1 and 0 at strength 0), weighted toward the favourite
// school and teacher; otherwise uniformly from all courses. Engagement is
// log-normal, shifted by coupling times the z-score of the realised category
// top share. Output is frozen and a pure function of the config.
HeteroGraph generate_synthetic(const GeneratorConfig& config);

std::string student_id(std::size_t i, std::size_t n);
std::string course_id(std::size_t i, std::size_t n);
std::string career_id(std::string_view label);

}  // namespace edurec
