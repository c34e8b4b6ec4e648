#include "edurec/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "edurec/random.hpp"

namespace edurec {

namespace {

constexpr int kCheckpointVersion = 1;
constexpr std::uint64_t kNegativeStream = 0x9e3779b97f4a7c15ull;

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void glorot(DenseMatrix& m, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.uniform(-bound, bound);
}

DenseMatrix input_matrix(const GcnModel& model, const GraphView& view) {
  DenseMatrix x(view.size(), model.input_dim());
  x.leftCols(kFixedFeatureDim) = view.features;
  if (model.free_dim() > 0) x.rightCols(model.free_dim()) = model.free;
  return x;
}

struct ForwardCache {
  DenseMatrix ax;  // A X
  DenseMatrix z1;  // A X W1
  DenseMatrix h;   // relu(z1)
  DenseMatrix m;   // A h
  DenseMatrix e;   // m W2
};

ForwardCache run_forward(const GcnModel& model, const GraphView& view) {
  ForwardCache c;
  c.ax = view.adjacency * input_matrix(model, view);
  c.z1 = c.ax * model.w1;
  c.h = c.z1.cwiseMax(0.0);
  c.m = view.adjacency * c.h;
  c.e = c.m * model.w2;
  return c;
}

bool is_enrolled(const GraphView& view, int student_row, int course_row) {
  const auto& e = view.enrolled[static_cast<std::size_t>(student_row)];
  return std::binary_search(e.begin(), e.end(), course_row);
}

struct AdamState {
  DenseMatrix m, v;
  explicit AdamState(const DenseMatrix& like) : m(DenseMatrix::Zero(like.rows(), like.cols())), v(m) {}
  void step(DenseMatrix& param, const DenseMatrix& grad, double lr, int t) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    m = b1 * m + (1 - b1) * grad;
    v = b2 * v + (1 - b2) * grad.cwiseProduct(grad);
    const double c1 = 1 - std::pow(b1, t), c2 = 1 - std::pow(b2, t);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  }
};

nlohmann::json to_json_array(const DenseMatrix& m) {
  auto arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) arr.push_back(m(i, j));
  return arr;
}

DenseMatrix from_json_array(const nlohmann::json& arr, Eigen::Index rows, Eigen::Index cols, std::string_view name) {
  if (!arr.is_array() || arr.size() != static_cast<std::size_t>(rows * cols))
    throw Error(ErrorCode::DimMismatch, std::string(name) + " has " + std::to_string(arr.size()) +
                                            " values, expected " + std::to_string(rows * cols));
  DenseMatrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = arr[k++].get<double>();
  return m;
}

}  // namespace

int GraphView::row(std::string_view id) const {
  auto it = row_of.find(std::string(id));
  if (it == row_of.end()) throw Error(ErrorCode::UnknownNode, std::string(id) + " is not in the view");
  return it->second;
}

GraphView build_view(const HeteroGraph& graph) {
  GraphView v;
  std::vector<NodeHandle> handles;
  for (auto kind : {NodeKind::Student, NodeKind::Course, NodeKind::Teacher})
    for (auto h : graph.nodes_of_kind(kind)) handles.push_back(h);
  if (handles.empty()) throw Error(ErrorCode::EmptyGraph, "no student, course or teacher nodes");

  const int n = static_cast<int>(handles.size());
  std::unordered_map<std::uint32_t, int> row_of_handle;
  for (int r = 0; r < n; ++r) {
    const auto& rec = graph.node(handles[static_cast<std::size_t>(r)]);
    v.ids.push_back(rec.id);
    v.kinds.push_back(rec.kind);
    v.row_of.emplace(rec.id, r);
    row_of_handle.emplace(handles[static_cast<std::size_t>(r)].value, r);
    if (rec.kind == NodeKind::Course) v.course_rows.push_back(r);
  }

  // Undirected neighbour lists over Learn and Teach.
  std::vector<std::vector<int>> nbrs(static_cast<std::size_t>(n));
  v.enrolled.resize(static_cast<std::size_t>(n));
  for (const auto& e : graph.edges()) {
    if (e.kind != EdgeKind::Learn && e.kind != EdgeKind::Teach) continue;
    const int a = row_of_handle.at(e.head.value);
    const int b = row_of_handle.at(e.tail.value);
    nbrs[static_cast<std::size_t>(a)].push_back(b);
    nbrs[static_cast<std::size_t>(b)].push_back(a);
    if (e.kind == EdgeKind::Learn) {
      v.learn_edges.emplace_back(a, b);
      v.enrolled[static_cast<std::size_t>(a)].push_back(b);
    }
  }
  for (auto& e : v.enrolled) std::sort(e.begin(), e.end());
  std::sort(v.learn_edges.begin(), v.learn_edges.end());

  std::vector<double> inv_sqrt_deg(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    inv_sqrt_deg[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(static_cast<double>(nbrs[static_cast<std::size_t>(i)].size() + 1));
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < n; ++i) {
    const double di = inv_sqrt_deg[static_cast<std::size_t>(i)];
    trips.emplace_back(i, i, di * di);
    for (int j : nbrs[static_cast<std::size_t>(i)]) trips.emplace_back(i, j, di * inv_sqrt_deg[static_cast<std::size_t>(j)]);
  }
  v.adjacency.resize(n, n);
  v.adjacency.setFromTriplets(trips.begin(), trips.end());

  double max_time = 0, max_likes = 0, max_num = 0;
  for (int r = 0; r < n; ++r) {
    const auto& rec = graph.node(handles[static_cast<std::size_t>(r)]);
    max_time = std::max(max_time, rec.kind == NodeKind::Student ? rec.number("learning_time") : 0.0);
    max_likes = std::max(max_likes, rec.kind == NodeKind::Student ? rec.number("likes") : 0.0);
    max_num = std::max(max_num, rec.kind == NodeKind::Course ? rec.number("num") : 0.0);
  }
  auto scaled = [](double x, double max) { return max > 0 ? x / max : 0.0; };
  v.features = DenseMatrix::Zero(n, kFixedFeatureDim);
  for (int r = 0; r < n; ++r) {
    const auto& rec = graph.node(handles[static_cast<std::size_t>(r)]);
    switch (rec.kind) {
      case NodeKind::Student:
        v.features(r, 0) = 1;
        v.features(r, 3) = scaled(rec.number("learning_time"), max_time);
        v.features(r, 4) = scaled(rec.number("likes"), max_likes);
        break;
      case NodeKind::Course:
        v.features(r, 1) = 1;
        v.features(r, 5) = scaled(rec.number("num"), max_num);
        break;
      default: v.features(r, 2) = 1;
    }
  }
  return v;
}

GraphView GraphView::permuted(std::span<const int> perm) const {
  const int n = size();
  if (static_cast<int>(perm.size()) != n) throw Error(ErrorCode::DimMismatch, "permutation size");
  GraphView out;
  out.ids.resize(static_cast<std::size_t>(n));
  out.kinds.resize(static_cast<std::size_t>(n));
  out.features.resize(n, features.cols());
  out.enrolled.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int p = perm[static_cast<std::size_t>(i)];
    out.ids[static_cast<std::size_t>(p)] = ids[static_cast<std::size_t>(i)];
    out.kinds[static_cast<std::size_t>(p)] = kinds[static_cast<std::size_t>(i)];
    out.features.row(p) = features.row(i);
    out.row_of[ids[static_cast<std::size_t>(i)]] = p;
    auto& e = out.enrolled[static_cast<std::size_t>(p)];
    for (int c : enrolled[static_cast<std::size_t>(i)]) e.push_back(perm[static_cast<std::size_t>(c)]);
    std::sort(e.begin(), e.end());
  }
  for (auto [s, c] : learn_edges) out.learn_edges.emplace_back(perm[static_cast<std::size_t>(s)], perm[static_cast<std::size_t>(c)]);
  std::sort(out.learn_edges.begin(), out.learn_edges.end());
  for (int c : course_rows) out.course_rows.push_back(perm[static_cast<std::size_t>(c)]);
  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < adjacency.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(adjacency, k); it; ++it)
      trips.emplace_back(perm[static_cast<std::size_t>(it.row())], perm[static_cast<std::size_t>(it.col())], it.value());
  out.adjacency.resize(n, n);
  out.adjacency.setFromTriplets(trips.begin(), trips.end());
  return out;
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidConfig, why); };
  if (epochs < 1) fail("epochs must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) fail("learning rate must be >= 0");
  if (negatives < 1) fail("negatives must be >= 1");
  if (hidden < 1 || embed < 1 || free_dim < 0) fail("layer dims must be positive");
}

GcnModel init_model(const GraphView& view, int free_dim, int hidden, int embed, std::uint64_t seed) {
  Rng rng(seed);
  GcnModel m;
  m.seed = seed;
  m.node_ids = view.ids;
  m.w1.resize(kFixedFeatureDim + free_dim, hidden);
  m.w2.resize(hidden, embed);
  glorot(m.w1, rng);
  glorot(m.w2, rng);
  m.free.resize(view.size(), free_dim);
  if (free_dim > 0) glorot(m.free, rng);
  return m;
}

void check_compatible(const GcnModel& model, const GraphView& view) {
  if (model.input_dim() != kFixedFeatureDim + model.free_dim())
    throw Error(ErrorCode::DimMismatch, "W1 rows " + std::to_string(model.input_dim()) + " != features " +
                                            std::to_string(kFixedFeatureDim + model.free_dim()));
  if (model.w2.rows() != model.w1.cols()) throw Error(ErrorCode::DimMismatch, "W2 rows != W1 cols");
  if (model.free.rows() != view.size() || static_cast<int>(model.node_ids.size()) != view.size())
    throw Error(ErrorCode::DimMismatch, "model covers " + std::to_string(model.node_ids.size()) + " nodes, view has " +
                                            std::to_string(view.size()));
  if (model.node_ids != view.ids) throw Error(ErrorCode::DimMismatch, "model node order differs from the view");
  if (view.features.cols() != kFixedFeatureDim) throw Error(ErrorCode::DimMismatch, "view feature width");
}

DenseMatrix forward(const GcnModel& model, const GraphView& view) {
  check_compatible(model, view);
  return run_forward(model, view).e;
}

double ranking_loss(const DenseMatrix& e, std::span<const Triple> triples) {
  if (triples.empty()) return 0.0;
  double total = 0;
  for (const auto& t : triples) {
    const double diff = e.row(t.student).dot(e.row(t.positive) - e.row(t.negative));
    total += softplus(-diff);
  }
  return total / static_cast<double>(triples.size());
}

double loss_and_gradients(const GcnModel& model, const GraphView& view, std::span<const Triple> triples,
                          Gradients* grads) {
  check_compatible(model, view);
  const auto c = run_forward(model, view);
  if (!grads) return ranking_loss(c.e, triples);

  DenseMatrix ge = DenseMatrix::Zero(c.e.rows(), c.e.cols());
  const double inv_n = triples.empty() ? 0.0 : 1.0 / static_cast<double>(triples.size());
  double total = 0;
  Eigen::RowVectorXd delta(c.e.cols());
  for (const auto& t : triples) {
    delta = c.e.row(t.positive) - c.e.row(t.negative);
    const double diff = c.e.row(t.student).dot(delta);
    total += softplus(-diff);
    const double g = -sigmoid(-diff) * inv_n;  // d softplus(-diff) / d diff
    ge.row(t.student) += g * delta;
    ge.row(t.positive) += g * c.e.row(t.student);
    ge.row(t.negative) -= g * c.e.row(t.student);
  }
  grads->w2 = c.m.transpose() * ge;
  const DenseMatrix gm = ge * model.w2.transpose();
  DenseMatrix gz1 = view.adjacency * gm;  // A is symmetric
  gz1 = gz1.cwiseProduct((c.z1.array() > 0.0).cast<double>().matrix());
  grads->w1 = c.ax.transpose() * gz1;
  if (model.free_dim() > 0) {
    grads->free = view.adjacency * (gz1 * model.w1.bottomRows(model.free_dim()).transpose());
  } else {
    grads->free.resize(view.size(), 0);
  }
  return total * inv_n;
}

std::vector<Triple> sample_triples(const GraphView& view, int negatives, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Triple> out;
  out.reserve(view.learn_edges.size() * static_cast<std::size_t>(negatives));
  const auto n_courses = view.course_rows.size();
  for (auto [s, c] : view.learn_edges) {
    if (view.enrolled[static_cast<std::size_t>(s)].size() >= n_courses) continue;
    for (int k = 0; k < negatives; ++k) {
      int neg;
      do {
        neg = view.course_rows[rng.below(n_courses)];
      } while (is_enrolled(view, s, neg));
      out.push_back({s, c, neg});
    }
  }
  return out;
}

TrainResult train(const GraphView& view, const TrainConfig& config) {
  config.validate();
  if (view.learn_edges.empty()) throw Error(ErrorCode::NoPositives, "view has no Learn edges");
  TrainResult result{init_model(view, config.free_dim, config.hidden, config.embed, config.seed), {}};
  auto& model = result.model;

  AdamState s1(model.w1), s2(model.w2), sf(model.free);
  Rng epoch_seeds(config.seed ^ kNegativeStream);
  Gradients g;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto triples = sample_triples(view, config.negatives, epoch_seeds.bits());
    const double loss = loss_and_gradients(model, view, triples, &g);
    result.loss_curve.push_back(loss);
    if (config.learning_rate == 0.0) continue;
    if (config.optimizer == Optimizer::Adam) {
      s1.step(model.w1, g.w1, config.learning_rate, epoch);
      s2.step(model.w2, g.w2, config.learning_rate, epoch);
      if (model.free_dim() > 0) sf.step(model.free, g.free, config.learning_rate, epoch);
    } else {
      model.w1 -= config.learning_rate * g.w1;
      model.w2 -= config.learning_rate * g.w2;
      if (model.free_dim() > 0) model.free -= config.learning_rate * g.free;
    }
  }
  return result;
}

double grad_check(const GraphView& view, const GcnModel& model, std::span<const Triple> triples, double epsilon) {
  Gradients analytic;
  loss_and_gradients(model, view, triples, &analytic);
  GcnModel probe = model;
  double worst = 0;
  auto sweep = [&](DenseMatrix GcnModel::*param, const DenseMatrix& grad) {
    DenseMatrix& p = probe.*param;
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      for (Eigen::Index j = 0; j < p.cols(); ++j) {
        const double orig = p(i, j);
        p(i, j) = orig + epsilon;
        const double up = loss_and_gradients(probe, view, triples, nullptr);
        p(i, j) = orig - epsilon;
        const double down = loss_and_gradients(probe, view, triples, nullptr);
        p(i, j) = orig;
        const double numeric = (up - down) / (2 * epsilon);
        const double a = grad(i, j);
        const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-8});
        worst = std::max(worst, std::fabs(a - numeric) / denom);
      }
  };
  sweep(&GcnModel::w1, analytic.w1);
  sweep(&GcnModel::w2, analytic.w2);
  if (model.free_dim() > 0) sweep(&GcnModel::free, analytic.free);
  return worst;
}

double score(const DenseMatrix& embeddings, const GraphView& view, std::string_view student, std::string_view course) {
  return embeddings.row(view.row(student)).dot(embeddings.row(view.row(course)));
}

double score(const GcnModel& model, const GraphView& view, std::string_view student, std::string_view course) {
  return score(forward(model, view), view, student, course);
}

Recommendation recommend(const DenseMatrix& embeddings, const GraphView& view, const HeteroGraph& graph,
                         std::string_view student, std::size_t n) {
  const int srow = view.row(student);
  if (view.kinds[static_cast<std::size_t>(srow)] != NodeKind::Student)
    throw Error(ErrorCode::UnknownNode, std::string(student) + " is not a Student");
  const auto sh = graph.handle(student);
  std::vector<int> taken;
  for (auto e : graph.incident(sh, EdgeKind::Learn, Direction::Out))
    taken.push_back(view.row(graph.node(graph.edges()[e].tail).id));
  std::sort(taken.begin(), taken.end());

  Recommendation rec{std::string(student), {}};
  std::vector<std::pair<double, int>> cands;
  for (int c : view.course_rows)
    if (!std::binary_search(taken.begin(), taken.end(), c))
      cands.emplace_back(embeddings.row(srow).dot(embeddings.row(c)), c);
  std::sort(cands.begin(), cands.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return view.ids[static_cast<std::size_t>(a.second)] < view.ids[static_cast<std::size_t>(b.second)];
  });
  if (cands.size() > n) cands.resize(n);
  for (auto [s, c] : cands) rec.ranked.emplace_back(view.ids[static_cast<std::size_t>(c)], s);
  return rec;
}

Recommendation recommend(const GcnModel& model, const GraphView& view, const HeteroGraph& graph,
                         std::string_view student, std::size_t n) {
  return recommend(forward(model, view), view, graph, student, n);
}

void save_checkpoint(const GcnModel& model, const std::filesystem::path& path) {
  nlohmann::json j{{"schema_version", kCheckpointVersion},
                   {"format", "edurec-gcn"},
                   {"feature_dim", kFixedFeatureDim},
                   {"free_dim", model.free_dim()},
                   {"hidden", model.hidden_dim()},
                   {"embed", model.embed_dim()},
                   {"seed", model.seed},
                   {"nodes", model.node_ids},
                   {"w1", to_json_array(model.w1)},
                   {"w2", to_json_array(model.w2)},
                   {"free", to_json_array(model.free)}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump() << "\n";
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

GcnModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedLine, path.string() + ": " + e.what());
  }
  try {
    if (j.at("schema_version").get<int>() != kCheckpointVersion)
      throw Error(ErrorCode::DimMismatch, "unsupported checkpoint version");
    if (j.at("feature_dim").get<int>() != kFixedFeatureDim)
      throw Error(ErrorCode::DimMismatch, "checkpoint feature_dim differs from this build");
    const int free_dim = j.at("free_dim").get<int>();
    const int hidden = j.at("hidden").get<int>();
    const int embed = j.at("embed").get<int>();
    if (free_dim < 0 || hidden < 1 || embed < 1) throw Error(ErrorCode::DimMismatch, "invalid checkpoint dims");
    GcnModel m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.node_ids = j.at("nodes").get<std::vector<std::string>>();
    const auto n = static_cast<Eigen::Index>(m.node_ids.size());
    m.w1 = from_json_array(j.at("w1"), kFixedFeatureDim + free_dim, hidden, "w1");
    m.w2 = from_json_array(j.at("w2"), hidden, embed, "w2");
    m.free = from_json_array(j.at("free"), n, free_dim, "free");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedLine, path.string() + ": " + e.what());
  }
}

}  // namespace edurec
