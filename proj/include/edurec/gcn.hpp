#pragma once

// Two-layer graph convolutional network over the student / course / teacher
// subgraph, trained as a link scorer on Learn edges.
//
//   X = [F | P]                   F: fixed node features, P: free input embeddings
//   E = A * relu(A * X * W1) * W2  A = D^-1/2 (A + I) D^-1/2 over Learn + Teach
//   score(s, c) = <E_s, E_c>
//
// Loss is the pairwise logistic ranking loss averaged over (student, positive
// course, sampled negative course) triples.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "edurec/graph.hpp"

namespace edurec {

// Row-major so per-node rows are contiguous for the sparse products and triple loops.
using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

inline constexpr int kFixedFeatureDim = 6;  // one-hot kind (3) + learning_time, likes, num

struct GraphView {
  std::vector<std::string> ids;  // row order: students, courses, teachers; each sorted by id
  std::vector<NodeKind> kinds;
  std::unordered_map<std::string, int> row_of;
  SparseMatrix adjacency;     // normalized, with self loops
  DenseMatrix features;       // n x kFixedFeatureDim
  std::vector<std::pair<int, int>> learn_edges;  // (student row, course row)
  std::vector<int> course_rows;                  // ascending by id
  std::vector<std::vector<int>> enrolled;        // per row, sorted course rows (students only)

  int size() const { return static_cast<int>(ids.size()); }
  int row(std::string_view id) const;  // throws UnknownNode

  // Same view with row i moved to position perm[i].
  GraphView permuted(std::span<const int> perm) const;
};

// Throws EmptyGraph when the graph has no Student, Course or Teacher node.
GraphView build_view(const HeteroGraph& graph);

struct GcnModel {
  DenseMatrix w1;        // (kFixedFeatureDim + free_dim) x hidden
  DenseMatrix w2;        // hidden x embed
  DenseMatrix free;      // n x free_dim, rows aligned with node_ids
  std::vector<std::string> node_ids;
  std::uint64_t seed = 0;

  int input_dim() const { return static_cast<int>(w1.rows()); }
  int hidden_dim() const { return static_cast<int>(w1.cols()); }
  int embed_dim() const { return static_cast<int>(w2.cols()); }
  int free_dim() const { return static_cast<int>(free.cols()); }
};

enum class Optimizer { GradientDescent, Adam };

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 0.05;
  int negatives = 1;
  std::uint64_t seed = 0;
  int hidden = 32;
  int embed = 16;
  int free_dim = 16;
  Optimizer optimizer = Optimizer::Adam;

  void validate() const;  // throws InvalidConfig
};

struct Triple {
  int student;
  int positive;
  int negative;
};

// Glorot-uniform weights and free embeddings drawn from the seed.
GcnModel init_model(const GraphView& view, int free_dim, int hidden, int embed, std::uint64_t seed);

// Throws DimMismatch when model and view disagree.
void check_compatible(const GcnModel& model, const GraphView& view);

DenseMatrix forward(const GcnModel& model, const GraphView& view);

struct Gradients {
  DenseMatrix w1, w2, free;
};

double ranking_loss(const DenseMatrix& embeddings, std::span<const Triple> triples);
double loss_and_gradients(const GcnModel& model, const GraphView& view, std::span<const Triple> triples,
                          Gradients* grads);

// Uniform negatives from courses the student has not taken; students enrolled
// everywhere contribute no triples.
std::vector<Triple> sample_triples(const GraphView& view, int negatives, std::uint64_t seed);

struct TrainResult {
  GcnModel model;
  std::vector<double> loss_curve;  // per epoch, before that epoch's update
};

// Throws NoPositives when the view has no Learn edge.
TrainResult train(const GraphView& view, const TrainConfig& config);

// Max over every parameter of |analytic - numeric| / max(|analytic|, |numeric|, 1e-8),
// numeric from central differences.
double grad_check(const GraphView& view, const GcnModel& model, std::span<const Triple> triples,
                  double epsilon = 1e-5);

double score(const DenseMatrix& embeddings, const GraphView& view, std::string_view student, std::string_view course);
double score(const GcnModel& model, const GraphView& view, std::string_view student, std::string_view course);

struct Recommendation {
  std::string student;
  std::vector<std::pair<std::string, double>> ranked;  // score descending, ties by course id
};

Recommendation recommend(const DenseMatrix& embeddings, const GraphView& view, const HeteroGraph& graph,
                         std::string_view student, std::size_t n);
Recommendation recommend(const GcnModel& model, const GraphView& view, const HeteroGraph& graph,
                         std::string_view student, std::size_t n);

// JSON checkpoint: schema_version, dims, seed, node ids and row-major weights.
void save_checkpoint(const GcnModel& model, const std::filesystem::path& path);
GcnModel load_checkpoint(const std::filesystem::path& path);

}  // namespace edurec
