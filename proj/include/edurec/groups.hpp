#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace edurec {

using EmbeddingTable = std::map<std::string, Eigen::VectorXd>;
using ClusterAssignments = std::map<std::string, int>;

inline constexpr std::size_t kDefaultGroupSize = 4;

struct StudyGroup {
  std::vector<std::string> members;  // in the order they joined
  int cluster = 0;
  double cohesion = 1.0;  // 1.0 for a single-member group
};

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Mean pairwise cosine. Throws SingletonGroup (< 2 members), ZeroNormEmbedding.
double cohesion(std::span<const std::string> members, const EmbeddingTable& embeddings);

// Greedy grouping inside each cluster: the unassigned student with the largest
// embedding norm opens a group, then the cluster-mate with the highest mean
// cosine to the current members joins until the group has `group_size`
// members. A tail of group_size - 1 forms its own group; shorter tails join the
// cluster's last group. Ties go to the lowest id. Throws GroupSizeTooSmall
// (< 2), UnknownNode for a student without an embedding, ZeroNormEmbedding.
std::vector<StudyGroup> form_groups(const ClusterAssignments& clusters, const EmbeddingTable& embeddings,
                                    std::size_t group_size = kDefaultGroupSize);

// Same group sizes per cluster as form_groups but random membership.
std::vector<StudyGroup> random_groups(const ClusterAssignments& clusters, const EmbeddingTable& embeddings,
                                      std::size_t group_size, std::uint64_t seed);

struct GroupReport {
  std::vector<StudyGroup> groups;  // cohesion descending
  double mean_cohesion = 0;
  std::size_t students = 0;
};

GroupReport group_report(std::vector<StudyGroup> groups);

}  // namespace edurec
