#include "spikegrad/train.hpp"

#include <cmath>

#include "spikegrad/check.hpp"
#include "spikegrad/grad_bptt.hpp"
#include "spikegrad/grad_exodus.hpp"
#include "spikegrad/grad_slayer.hpp"

namespace spikegrad {

namespace {

std::pair<double, Matrix> softmax_ce(const Vector& logits, Index label) {
  SG_CHECK(label >= 0 && label < logits.size(), "cross-entropy label out of range");
  const double top = logits.maxCoeff();
  const Vector shifted = logits.array() - top;
  const Vector expv = shifted.array().exp();
  const double denom = expv.sum();
  const double loss = std::log(denom) - shifted(label);
  Matrix grad = (expv / denom).transpose();  // 1 x N row of softmax probabilities
  grad(0, label) -= 1.0;
  return {loss, grad};
}

}  // namespace

std::pair<double, LossGrad> mse_loss(const TimeSeries& output, const TimeSeries& target) {
  SG_CHECK(output.channels() == target.channels() && output.steps() == target.steps(),
           "mse_loss: output/target shape mismatch");
  const double count = static_cast<double>(output.channels() * output.steps());
  const Matrix diff = output.values - target.values;
  const double loss = diff.squaredNorm() / count;
  LossGrad grad{LossGradKind::FilteredOutput, TimeSeries(2.0 / count * diff, output.dt)};
  return {loss, std::move(grad)};
}

std::pair<double, LossGrad> ce_sum_over_time(const TimeSeries& output, Index label) {
  const Vector logits = output.values.rowwise().sum();
  auto [loss, logit_grad] = softmax_ce(logits, label);
  Matrix grad(output.channels(), output.steps());
  for (Index n = 0; n < output.steps(); ++n) grad.col(n) = logit_grad.transpose();
  return {loss, LossGrad{LossGradKind::FilteredOutput, TimeSeries(std::move(grad), output.dt)}};
}

std::pair<double, LossGrad> ce_max_over_time(const TimeSeries& output, Index label) {
  const Index neurons = output.channels();
  Vector logits(neurons);
  std::vector<Index> argmax(static_cast<std::size_t>(neurons), 0);
  for (Index i = 0; i < neurons; ++i) {
    double best = output.values(i, 0);
    Index best_n = 0;
    for (Index n = 1; n < output.steps(); ++n) {
      if (output.values(i, n) > best) {  // strict: earliest index wins ties
        best = output.values(i, n);
        best_n = n;
      }
    }
    logits(i) = best;
    argmax[static_cast<std::size_t>(i)] = best_n;
  }
  auto [loss, logit_grad] = softmax_ce(logits, label);
  Matrix grad = Matrix::Zero(neurons, output.steps());
  for (Index i = 0; i < neurons; ++i) {
    grad(i, argmax[static_cast<std::size_t>(i)]) = logit_grad(0, i);
  }
  return {loss, LossGrad{LossGradKind::FilteredOutput, TimeSeries(std::move(grad), output.dt)}};
}

std::pair<double, LossGrad> LossSpec::evaluate(const TimeSeries& output_signal) const {
  std::pair<double, LossGrad> result;
  switch (kind) {
    case LossKind::Mse:
      result = mse_loss(output_signal, target);
      break;
    case LossKind::CeSumOverTime:
      result = ce_sum_over_time(output_signal, label);
      break;
    case LossKind::CeMaxOverTime:
      result = ce_max_over_time(output_signal, label);
      break;
  }
  result.second.kind = signal;
  return result;
}

TimeSeries loss_input_signal(const Network& net, const NetworkTrace& trace, LossGradKind kind) {
  if (kind == LossGradKind::FilteredOutput) return network_output(net, trace);
  const SpikeTrain& s = trace.layers.back().s;
  return TimeSeries(s.bits, s.dt);
}

std::pair<double, LossGrad> evaluate_network_loss(const Network& net, const NetworkTrace& trace,
                                                  const LossSpec& loss) {
  return loss.evaluate(loss_input_signal(net, trace, loss.signal));
}

AdamState AdamState::init(const Network& net, const AdamParams& params) {
  AdamState state;
  state.params = params;
  state.m.reserve(net.size());
  state.v.reserve(net.size());
  for (const DenseLayer& layer : net) {
    state.m.push_back(Matrix::Zero(layer.weights.rows(), layer.weights.cols()));
    state.v.push_back(Matrix::Zero(layer.weights.rows(), layer.weights.cols()));
  }
  return state;
}

bool adam_step(AdamState& state, const GradientReport& grads, Network& net) {
  SG_CHECK(grads.weight_grads.size() == net.size(), "adam_step: report/network layer mismatch");
  SG_CHECK(state.m.size() == net.size(), "adam_step: state/network layer mismatch");
  for (std::size_t l = 0; l < net.size(); ++l) {
    const Matrix& g = grads.weight_grads[l];
    SG_CHECK(g.rows() == net[l].weights.rows() && g.cols() == net[l].weights.cols(),
             "adam_step: gradient shape mismatch");
    if (!g.allFinite()) return false;
  }
  const AdamParams& p = state.params;
  state.step_count += 1;
  const double bc1 = 1.0 - std::pow(p.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(p.beta2, static_cast<double>(state.step_count));
  for (std::size_t l = 0; l < net.size(); ++l) {
    const Matrix& g = grads.weight_grads[l];
    state.m[l] = p.beta1 * state.m[l] + (1.0 - p.beta1) * g;
    state.v[l] = p.beta2 * state.v[l] + (1.0 - p.beta2) * g.cwiseProduct(g);
    const Matrix m_hat = state.m[l] / bc1;
    const Matrix v_hat = state.v[l] / bc2;
    net[l].weights -=
        p.lr * (m_hat.array() / (v_hat.array().sqrt() + p.eps_hat)).matrix();
  }
  return true;
}

const char* engine_name(Engine engine) {
  switch (engine) {
    case Engine::Exodus: return "exodus";
    case Engine::Slayer: return "slayer";
    case Engine::Bptt: return "bptt";
  }
  return "unknown";
}

GradientReport backward_dispatch(Engine engine, const Network& net, const NetworkTrace& traces,
                                 const LossGrad& loss_grad, bool keep_signals) {
  switch (engine) {
    case Engine::Exodus:
      return backward_network_exodus(net, traces, loss_grad, keep_signals);
    case Engine::Slayer:
      return backward_network_slayer(net, traces, loss_grad, keep_signals);
    case Engine::Bptt:
      return backward_network_bptt(net, traces, loss_grad, {}, keep_signals);
  }
  SG_CHECK(false, "unknown engine");
  return {};
}

std::vector<EpochRecord> train_loop(Network& net, const std::vector<Sample>& data, Engine engine,
                                    const TrainOptions& options) {
  SG_CHECK(options.epochs >= 0, "train_loop: epochs must be non-negative");
  SG_CHECK(options.batch_size >= 1, "train_loop: batch size must be positive");
  SG_CHECK(!data.empty() || options.epochs == 0, "train_loop: empty dataset");

  AdamState state = AdamState::init(net, options.adam);
  std::vector<EpochRecord> history;
  history.reserve(static_cast<std::size_t>(options.epochs));

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    EpochRecord record;
    double loss_sum = 0.0;
    std::size_t cursor = 0;
    while (cursor < data.size()) {
      const std::size_t batch_end =
          std::min(data.size(), cursor + static_cast<std::size_t>(options.batch_size));
      GradientReport batch_grads;
      for (std::size_t k = cursor; k < batch_end; ++k) {
        const Sample& sample = data[k];
        NetworkTrace trace = forward_network(net, sample.input, options.mode);
        auto [loss, loss_grad] = evaluate_network_loss(net, trace, sample.loss);
        loss_sum += loss;
        GradientReport grads = backward_dispatch(engine, net, trace, loss_grad);
        if (batch_grads.weight_grads.empty()) {
          batch_grads = std::move(grads);
        } else {
          for (std::size_t l = 0; l < net.size(); ++l) {
            batch_grads.weight_grads[l] += grads.weight_grads[l];
          }
        }
      }
      batch_grads.finalize();
      if (!adam_step(state, batch_grads, net)) record.skipped_nonfinite = true;
      record.grad_norms = batch_grads.layer_grad_norms;
      cursor = batch_end;
    }
    record.loss = loss_sum / static_cast<double>(data.size());
    history.push_back(std::move(record));
  }
  return history;
}

}  // namespace spikegrad
