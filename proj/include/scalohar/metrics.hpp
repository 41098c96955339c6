#pragma once

#include <cstddef>
#include <vector>

namespace scalohar {

/// confusion[i][j] = number of samples of true class i predicted as j.
using Confusion = std::vector<std::vector<std::size_t>>;

struct Metrics {
  double loss = 0.0;
  double accuracy = 0.0;
  /// Unweighted means over classes. A class with no predictions (precision)
  /// or no samples (recall) contributes 0.
  double macro_precision = 0.0;
  double macro_recall = 0.0;
};

Metrics metrics_from_confusion(const Confusion& confusion, double mean_loss);

/// Classes that were never predicted; their precision was taken as 0.
std::vector<std::size_t> classes_without_predictions(const Confusion& confusion);

}  // namespace scalohar
