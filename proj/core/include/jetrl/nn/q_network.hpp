#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "jetrl/nn/dense_net.hpp"
#include "jetrl/nn/dueling_head.hpp"

namespace jetrl::nn {

struct QTape {
  Tape plain;
  DuelingTape dueling;
  std::span<const double> q;
};

/// The Q-function approximator used by agents: either a plain dense net
/// with one linear output per action, or a dueling head. Parameters are
/// exposed as one flat vector (for dueling: trunk | value | advantage) so
/// optimizers and target updates do not care which form is inside.
class QNetwork {
 public:
  QNetwork() = default;
  explicit QNetwork(DenseNet net);
  explicit QNetwork(DuelingHead head);

  static QNetwork plain(std::size_t in_dim, std::span<const std::size_t> hidden,
                        std::size_t n_actions, std::uint64_t seed);
  static QNetwork dueling(std::size_t in_dim,
                          std::span<const std::size_t> trunk_hidden,
                          std::size_t stream_hidden, std::size_t n_actions,
                          std::uint64_t seed);

  bool is_dueling() const { return std::holds_alternative<DuelingHead>(impl_); }
  const DenseNet& dense() const { return std::get<DenseNet>(impl_); }
  const DuelingHead& head() const { return std::get<DuelingHead>(impl_); }

  std::size_t input_dim() const;
  std::size_t n_actions() const;
  std::size_t param_count() const;

  std::vector<double> params() const;
  void params_into(std::span<double> out) const;
  void set_params(std::span<const double> values);

  /// Same architecture (kind and every layer spec).
  bool same_shape(const QNetwork& other) const;

  std::vector<double> q_values(std::span<const double> x) const;
  void forward(std::span<const double> x, QTape& tape) const;
  void backward_accumulate(const QTape& tape, std::span<const double> dL_dq,
                           std::span<double> grad) const;

  bool operator==(const QNetwork&) const = default;

 private:
  std::variant<DenseNet, DuelingHead> impl_;
};

}  // namespace jetrl::nn
