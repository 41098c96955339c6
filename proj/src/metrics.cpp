#include "scalohar/metrics.hpp"

namespace scalohar {

Metrics metrics_from_confusion(const Confusion& confusion, double mean_loss) {
  Metrics m;
  m.loss = mean_loss;
  const std::size_t k = confusion.size();
  if (k == 0) return m;
  std::size_t total = 0, correct = 0;
  std::vector<std::size_t> row_sum(k, 0), col_sum(k, 0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      total += confusion[i][j];
      row_sum[i] += confusion[i][j];
      col_sum[j] += confusion[i][j];
      if (i == j) correct += confusion[i][j];
    }
  if (total == 0) return m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(total);
  double precision = 0.0, recall = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const auto tp = static_cast<double>(confusion[c][c]);
    if (col_sum[c] > 0) precision += tp / static_cast<double>(col_sum[c]);
    if (row_sum[c] > 0) recall += tp / static_cast<double>(row_sum[c]);
  }
  m.macro_precision = precision / static_cast<double>(k);
  m.macro_recall = recall / static_cast<double>(k);
  return m;
}

std::vector<std::size_t> classes_without_predictions(const Confusion& confusion) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < confusion.size(); ++j) {
    std::size_t col = 0;
    for (const auto& row : confusion) col += row[j];
    if (col == 0) out.push_back(j);
  }
  return out;
}

}  // namespace scalohar
