#pragma once

// Small graph builders and a scratch directory shared by the test binaries.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include "edurec/graph.hpp"

namespace edurec::testing {

inline NodeRecord student(std::string id, double hours = 0, double likes = 0, double response = 0) {
  return {std::move(id), NodeKind::Student, {{"learning_time", hours}, {"likes", likes}, {"response", response}}};
}

inline NodeRecord course(std::string id, double num = 0) {
  return {std::move(id), NodeKind::Course, {{"num", num}, {"name", "Course"}}};
}

inline NodeRecord teacher(std::string id) { return {std::move(id), NodeKind::Teacher, {{"name", "T"}}}; }

inline NodeRecord named(std::string id, NodeKind kind) { return {id, kind, {{"name", id}}}; }

// Random student/course/teacher graph with at most 30 view nodes.
inline HeteroGraph small_graph(std::uint64_t seed, int students = 8, int courses = 10, int teachers = 4) {
  std::mt19937_64 rng(seed);
  HeteroGraph g;
  std::uniform_real_distribution<double> u(0, 50);
  for (int s = 0; s < students; ++s) g.add_node(student("s" + std::to_string(s), u(rng), std::floor(u(rng))));
  for (int c = 0; c < courses; ++c) g.add_node(course("c" + std::to_string(c), std::floor(u(rng))));
  for (int t = 0; t < teachers; ++t) g.add_node(teacher("t" + std::to_string(t)));
  g.add_node(named("school", NodeKind::School));
  std::bernoulli_distribution coin(0.3);
  for (int s = 0; s < students; ++s) {
    g.add_edge(EdgeKind::Learn, "s" + std::to_string(s), "c" + std::to_string(s % courses));
    for (int c = 0; c < courses; ++c)
      if (c != s % courses && coin(rng)) g.add_edge(EdgeKind::Learn, "s" + std::to_string(s), "c" + std::to_string(c));
  }
  for (int c = 0; c < courses; ++c) g.add_edge(EdgeKind::Teach, "t" + std::to_string(c % teachers), "c" + std::to_string(c));
  g.freeze();
  return g;
}

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("edurec_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

}  // namespace edurec::testing
