#include "shotfusion/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "shotfusion/signal.hpp"

namespace shotfusion {

int DecisionTree::predict(const FeatureVector& x) const {
  if (nodes.empty()) throw Error("empty tree");
  std::size_t at = 0;
  for (std::size_t steps = 0; steps <= nodes.size(); ++steps) {
    const Node& n = nodes[at];
    if (n.is_leaf()) return n.leaf_class;
    at = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                       : n.right);
  }
  throw Error("cyclic tree");
}

namespace {

constexpr std::size_t kFeaturesPerSplit = 2;  // round(sqrt(5))

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double gini(std::size_t pos, std::size_t total) {
  if (total == 0) return 0.0;
  const double p = static_cast<double>(pos) / static_cast<double>(total);
  return 2.0 * p * (1.0 - p);
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<LabeledCandidate>& samples, std::mt19937_64& rng)
      : samples_(samples), rng_(rng) {}

  DecisionTree build(std::vector<std::size_t> rows) {
    tree_.nodes.clear();
    grow(rows);
    return std::move(tree_);
  }

 private:
  const FeatureVector& x(std::size_t row) const { return samples_[row].candidate.features; }
  bool y(std::size_t row) const { return samples_[row].shot; }

  int make_leaf(std::size_t pos, std::size_t total) {
    DecisionTree::Node leaf;
    leaf.leaf_class = 2 * pos > total ? 1 : 0;
    tree_.nodes.push_back(leaf);
    return static_cast<int>(tree_.nodes.size() - 1);
  }

  Split best_split(std::vector<std::size_t>& rows, std::size_t pos) {
    std::array<std::size_t, kFeatureCount> features{};
    std::iota(features.begin(), features.end(), 0);
    std::shuffle(features.begin(), features.end(), rng_);

    const std::size_t total = rows.size();
    Split best;
    best.impurity = std::numeric_limits<double>::infinity();
    // Keep drawing features past the per-split quota until a valid partition
    // exists, so a node only stays impure when all features are constant.
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      if (f >= kFeaturesPerSplit && best.feature >= 0) break;
      const std::size_t feature = features[f];
      std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
        return x(a)[feature] < x(b)[feature] || (x(a)[feature] == x(b)[feature] && a < b);
      });
      std::size_t left_pos = 0;
      for (std::size_t i = 0; i + 1 < total; ++i) {
        left_pos += y(rows[i]) ? 1 : 0;
        const double here = x(rows[i])[feature];
        const double next = x(rows[i + 1])[feature];
        if (!(next > here)) continue;
        const std::size_t left_n = i + 1;
        const std::size_t right_n = total - left_n;
        const double impurity =
            (static_cast<double>(left_n) * gini(left_pos, left_n) +
             static_cast<double>(right_n) * gini(pos - left_pos, right_n)) /
            static_cast<double>(total);
        if (impurity < best.impurity) {
          best.feature = static_cast<int>(feature);
          best.threshold = here + 0.5 * (next - here);
          if (!(best.threshold < next)) best.threshold = here;
          best.impurity = impurity;
        }
      }
    }
    return best;
  }

  int grow(std::vector<std::size_t>& rows) {
    std::size_t pos = 0;
    for (std::size_t r : rows) pos += y(r) ? 1 : 0;
    if (rows.size() < 2 || pos == 0 || pos == rows.size()) return make_leaf(pos, rows.size());

    const Split split = best_split(rows, pos);
    if (split.feature < 0) return make_leaf(pos, rows.size());

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) {
      (x(r)[static_cast<std::size_t>(split.feature)] <= split.threshold ? left : right)
          .push_back(r);
    }
    const int index = static_cast<int>(tree_.nodes.size());
    DecisionTree::Node node;
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.leaf_class = 2 * pos > rows.size() ? 1 : 0;
    tree_.nodes.push_back(node);
    const int l = grow(left);
    const int r = grow(right);
    tree_.nodes[static_cast<std::size_t>(index)].left = l;
    tree_.nodes[static_cast<std::size_t>(index)].right = r;
    return index;
  }

  const std::vector<LabeledCandidate>& samples_;
  std::mt19937_64& rng_;
  DecisionTree tree_;
};

}  // namespace

ForestModel train_forest(const std::vector<LabeledCandidate>& samples, std::size_t tree_count,
                         std::uint64_t seed) {
  if (tree_count == 0) throw Error("invalid tree count");
  const auto positives = std::count_if(samples.begin(), samples.end(),
                                       [](const LabeledCandidate& s) { return s.shot; });
  if (positives == 0 || positives == static_cast<long>(samples.size())) {
    throw Error("degenerate training set");
  }
  for (const auto& s : samples) {
    for (double v : s.candidate.features) {
      if (!std::isfinite(v)) throw Error("non-finite feature");
    }
  }

  ForestModel model;
  model.seed = seed;
  model.trees.reserve(tree_count);
  for (std::size_t t = 0; t < tree_count; ++t) {
    // Per-tree streams derive from the root seed so trees are independent
    // of build order.
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(t)));
    std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
    std::vector<std::size_t> rows(samples.size());
    for (auto& r : rows) r = pick(rng);
    TreeBuilder builder(samples, rng);
    model.trees.push_back(builder.build(std::move(rows)));
  }
  return model;
}

Classification classify(const ForestModel& model, const FeatureVector& features) {
  if (model.trees.empty()) throw Error("empty forest");
  std::size_t votes = 0;
  for (const auto& tree : model.trees) votes += tree.predict(features) == 1 ? 1 : 0;
  const double score = static_cast<double>(votes) / static_cast<double>(model.trees.size());
  return {2 * votes > model.trees.size(), score};
}

Classification classify(const ForestModel& model, const Candidate& c) {
  return classify(model, c.features);
}

void check_model(const ForestModel& model) {
  if (model.trees.empty()) throw Error("empty forest");
  for (const auto& tree : model.trees) {
    if (tree.nodes.empty()) throw Error("empty tree");
    const int n = static_cast<int>(tree.nodes.size());
    for (const auto& node : tree.nodes) {
      if (node.is_leaf()) {
        if (node.leaf_class != 0 && node.leaf_class != 1) throw Error("invalid leaf class");
        continue;
      }
      if (node.feature >= static_cast<int>(kFeatureCount)) throw Error("invalid feature index");
      if (node.left <= 0 || node.left >= n || node.right <= 0 || node.right >= n) {
        throw Error("invalid child index");
      }
      if (!std::isfinite(node.threshold)) throw Error("non-finite threshold");
    }
  }
}

}  // namespace shotfusion
