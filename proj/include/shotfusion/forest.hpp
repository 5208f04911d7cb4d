#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace shotfusion {

inline constexpr std::size_t kFeatureCount = 5;

/// Neighbourhood maxima of APF, IPF, a_rad, a_tan and w_rad, in that order.
using FeatureVector = std::array<double, kFeatureCount>;

struct Candidate {
  double time_ms = 0.0;
  FeatureVector features{};
};

struct LabeledCandidate {
  Candidate candidate;
  bool shot = false;
};

/// CART tree stored as a flat node array; node 0 is the root. Leaves have
/// feature == -1. Samples with x[feature] <= threshold go left.
struct DecisionTree {
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int leaf_class = 0;

    bool is_leaf() const { return feature < 0; }
  };

  std::vector<Node> nodes;

  int predict(const FeatureVector& x) const;
};

struct ForestModel {
  static constexpr std::size_t kDefaultTrees = 50;

  std::vector<DecisionTree> trees;
  std::uint64_t seed = 0;

  std::size_t tree_count() const { return trees.size(); }
};

struct Classification {
  bool shot = false;
  double score = 0.0;  // fraction of trees voting shot
};

/// Bootstrap-aggregated Gini CART trees, two candidate features per split,
/// grown until pure or a node holds fewer than two samples.
ForestModel train_forest(const std::vector<LabeledCandidate>& samples,
                         std::size_t tree_count = ForestModel::kDefaultTrees,
                         std::uint64_t seed = 0);

/// Majority vote; an exact tie is non-shot.
Classification classify(const ForestModel& model, const FeatureVector& features);
Classification classify(const ForestModel& model, const Candidate& c);

/// Throws unless every node index and feature index is in range.
void check_model(const ForestModel& model);

}  // namespace shotfusion
