#include "spikegrad/gradient.hpp"

#include <algorithm>

#include "spikegrad/check.hpp"

namespace spikegrad {

void GradientReport::finalize() {
  layer_grad_norms.clear();
  layer_grad_norms.reserve(weight_grads.size());
  finite = true;
  for (const Matrix& g : weight_grads) {
    layer_grad_norms.push_back(g.norm());
    finite = finite && g.allFinite();
  }
}

double relative_deviation(const Matrix& a, const Matrix& b, double floor) {
  SG_CHECK(a.rows() == b.rows() && a.cols() == b.cols(), "relative_deviation: shape mismatch");
  const double scale =
      std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), floor});
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

double relative_deviation(const GradientReport& a, const GradientReport& b, double floor) {
  SG_CHECK(a.weight_grads.size() == b.weight_grads.size(),
           "relative_deviation: layer count mismatch");
  double worst = 0.0;
  for (std::size_t l = 0; l < a.weight_grads.size(); ++l) {
    worst = std::max(worst, relative_deviation(a.weight_grads[l], b.weight_grads[l], floor));
  }
  return worst;
}

double absolute_deviation(const GradientReport& a, const GradientReport& b) {
  SG_CHECK(a.weight_grads.size() == b.weight_grads.size(),
           "absolute_deviation: layer count mismatch");
  double worst = 0.0;
  for (std::size_t l = 0; l < a.weight_grads.size(); ++l) {
    const Matrix& x = a.weight_grads[l];
    const Matrix& y = b.weight_grads[l];
    SG_CHECK(x.rows() == y.rows() && x.cols() == y.cols(), "absolute_deviation: shape mismatch");
    worst = std::max(worst, (x - y).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace spikegrad
