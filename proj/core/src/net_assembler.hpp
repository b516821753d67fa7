#pragma once

#include <utility>
#include <vector>

#include "symkor/sqrelu_net.hpp"

namespace symkor::detail {

/// Affine form over the signals of the most recently closed layer (the
/// network inputs before any layer is closed).
struct Affine {
  std::vector<std::pair<int, double>> terms;
  double c = 0.0;

  static Affine unit(int k, double s = 1.0) { return {{{k, s}}, 0.0}; }
  static Affine constant(double c) { return {{}, c}; }
  Affine& add(const Affine& o, double s = 1.0);
};

/// Builds a SqReluNet one hidden layer at a time. Neurons are appended to the
/// open layer; close_layer() makes them the current signals.
class Assembler {
 public:
  explicit Assembler(int input_dim);

  int add_neuron(const Affine& pre, bool probe = false);
  void close_layer();
  int depth() const { return static_cast<int>(layers_.size()); }
  SqReluNet finish(const std::vector<Affine>& outputs);

 private:
  int input_dim_;
  int current_width_;
  std::vector<Layer> layers_;
  std::vector<Affine> pending_;
  std::vector<Probe> probes_;
};

/// (sigma(x + y) - sigma(x) - sigma(y)) / 2 for x, y >= 0. Three neurons.
Affine product_block(Assembler& a, const Affine& x, const Affine& y);
/// (sigma(x + 1) - sigma(x)) / 2 - 1/2 for x >= 0. Two neurons.
Affine identity_block(Assembler& a, const Affine& x);

/// Runs several product trees of equal arity side by side, closing
/// floor(log2 d) + 1 layers. Returns one form per tree over the last layer.
std::vector<Affine> product_trees(Assembler& a, const std::vector<std::vector<Affine>>& inputs);

}  // namespace symkor::detail
