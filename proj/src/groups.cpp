#include "edurec/groups.hpp"

#include <algorithm>
#include <cmath>

#include "edurec/error.hpp"
#include "edurec/random.hpp"

namespace edurec {

namespace {

const Eigen::VectorXd& embedding_of(const EmbeddingTable& embeddings, const std::string& id) {
  auto it = embeddings.find(id);
  if (it == embeddings.end()) throw Error(ErrorCode::UnknownNode, id + " has no embedding");
  if (it->second.norm() == 0.0) throw Error(ErrorCode::ZeroNormEmbedding, id);
  return it->second;
}

std::map<int, std::vector<std::string>> members_by_cluster(const ClusterAssignments& clusters) {
  std::map<int, std::vector<std::string>> out;
  for (const auto& [id, c] : clusters) out[c].push_back(id);  // ids arrive sorted
  return out;
}

// Sizes of the groups a cluster of n members is cut into.
std::vector<std::size_t> group_sizes(std::size_t n, std::size_t g) {
  std::vector<std::size_t> sizes(n / g, g);
  const std::size_t tail = n % g;
  if (tail == 0) return sizes;
  if (tail == g - 1 || sizes.empty()) sizes.push_back(tail);
  else sizes.back() += tail;
  return sizes;
}

double group_cohesion(const std::vector<std::string>& members, const EmbeddingTable& embeddings) {
  return members.size() < 2 ? 1.0 : cohesion(members, embeddings);
}

}  // namespace

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::ZeroNormEmbedding, "cosine of a zero vector");
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

double cohesion(std::span<const std::string> members, const EmbeddingTable& embeddings) {
  if (members.size() < 2) throw Error(ErrorCode::SingletonGroup, "cohesion needs at least two members");
  double sum = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      sum += cosine(embedding_of(embeddings, members[i]), embedding_of(embeddings, members[j]));
      ++pairs;
    }
  return sum / static_cast<double>(pairs);
}

std::vector<StudyGroup> form_groups(const ClusterAssignments& clusters, const EmbeddingTable& embeddings,
                                    std::size_t group_size) {
  if (group_size < 2) throw Error(ErrorCode::GroupSizeTooSmall, "group size must be >= 2");
  std::vector<StudyGroup> out;
  for (const auto& [cluster, ids] : members_by_cluster(clusters)) {
    const std::size_t n = ids.size();
    std::vector<Eigen::VectorXd> unit(n);
    std::vector<double> norm(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& e = embedding_of(embeddings, ids[i]);
      norm[i] = e.norm();
      unit[i] = e / norm[i];
    }
    std::vector<char> used(n, 0);
    for (const std::size_t size : group_sizes(n, group_size)) {
      std::size_t seed = n;
      for (std::size_t i = 0; i < n; ++i)
        if (!used[i] && (seed == n || norm[i] > norm[seed])) seed = i;
      std::vector<std::size_t> current{seed};
      used[seed] = 1;
      // running sum of cosines to current members, per candidate
      std::vector<double> affinity(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) affinity[i] = unit[i].dot(unit[seed]);
      while (current.size() < size) {
        std::size_t best = n;
        for (std::size_t i = 0; i < n; ++i)
          if (!used[i] && (best == n || affinity[i] > affinity[best])) best = i;
        used[best] = 1;
        current.push_back(best);
        for (std::size_t i = 0; i < n; ++i) affinity[i] += unit[i].dot(unit[best]);
      }
      StudyGroup group;
      group.cluster = cluster;
      for (auto i : current) group.members.push_back(ids[i]);
      group.cohesion = group_cohesion(group.members, embeddings);
      out.push_back(std::move(group));
    }
  }
  return out;
}

std::vector<StudyGroup> random_groups(const ClusterAssignments& clusters, const EmbeddingTable& embeddings,
                                      std::size_t group_size, std::uint64_t seed) {
  if (group_size < 2) throw Error(ErrorCode::GroupSizeTooSmall, "group size must be >= 2");
  Rng rng(seed);
  std::vector<StudyGroup> out;
  for (auto [cluster, ids] : members_by_cluster(clusters)) {
    for (std::size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[rng.below(i)]);
    std::size_t next = 0;
    for (const std::size_t size : group_sizes(ids.size(), group_size)) {
      StudyGroup group;
      group.cluster = cluster;
      group.members.assign(ids.begin() + static_cast<std::ptrdiff_t>(next),
                           ids.begin() + static_cast<std::ptrdiff_t>(next + size));
      next += size;
      group.cohesion = group_cohesion(group.members, embeddings);
      out.push_back(std::move(group));
    }
  }
  return out;
}

GroupReport group_report(std::vector<StudyGroup> groups) {
  GroupReport r;
  std::stable_sort(groups.begin(), groups.end(),
                   [](const StudyGroup& a, const StudyGroup& b) { return a.cohesion > b.cohesion; });
  double sum = 0;
  for (const auto& g : groups) {
    sum += g.cohesion;
    r.students += g.members.size();
  }
  r.mean_cohesion = groups.empty() ? 0.0 : sum / static_cast<double>(groups.size());
  r.groups = std::move(groups);
  return r;
}

}  // namespace edurec
