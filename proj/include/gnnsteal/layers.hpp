#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gnnsteal/random.hpp"
#include "gnnsteal/tensor.hpp"

namespace gnnsteal {

enum class LayerKind { sage, gat, gin, dense };

const char* to_string(LayerKind kind);
LayerKind parse_layer_kind(std::string_view text);

/// Parameters of one layer. Gradients use the same container (see zeros_like).
///
/// sage:  out = mean(h_v, h_u for u in N(v)) W + b
/// gin:   out = ((1 + eps) h_v + sum h_u) W + b
/// gat:   per head z, g = h W^z; alpha_vu = softmax_u LeakyReLU(a_src . g_u + a_dst . g_v);
///        out_z = sum alpha_vu g_u; heads concatenated or averaged, then + b
/// dense: out = h W + b
struct LayerParams {
  LayerKind kind = LayerKind::dense;
  std::size_t in_width = 0;
  std::size_t out_width = 0;
  std::size_t heads = 1;
  bool concat_heads = false;

  Matrix weight;    // in x out, or in x (heads * head_width) for gat
  Matrix bias;      // 1 x out
  Matrix attn_src;  // heads x head_width (gat)
  Matrix attn_dst;  // heads x head_width (gat)
  Matrix epsilon;   // 1 x 1 (gin)

  std::size_t head_width() const;
  double eps() const { return epsilon.size() ? epsilon(0, 0) : 0.0; }

  /// Every trainable tensor, in a fixed order; empty tensors are skipped.
  std::vector<Matrix*> tensors();
  std::vector<const Matrix*> tensors() const;
  std::vector<std::string> tensor_names() const;

  LayerParams zeros_like() const;
};

/// Glorot-uniform weights, zero biases, eps = 0.
LayerParams make_layer(LayerKind kind, std::size_t in_width, std::size_t out_width, std::size_t heads,
                       bool concat_heads, Rng& rng);

/// One message-passing step. Destination i is also source row i; `neighbors` holds source rows.
struct Block {
  std::size_t num_src = 0;
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> neighbors;

  std::size_t num_dst() const { return offsets.size() - 1; }
  std::span<const std::size_t> neighbors_of(std::size_t dst) const {
    return {neighbors.data() + offsets[dst], offsets[dst + 1] - offsets[dst]};
  }
};

/// Intermediate values kept by layer_forward for layer_backward.
struct LayerCache {
  Matrix aggregate;                       // sage/gin
  Matrix projected;                       // gat: num_src x (heads * head_width)
  std::vector<std::size_t> att_offsets;   // gat: neighbourhoods after the self-loop fallback
  std::vector<std::size_t> att_neighbors;
  Matrix score;                           // gat: heads x edges, before LeakyReLU
  Matrix alpha;                           // gat: heads x edges
};

inline constexpr double kLeakySlope = 0.2;

/// Applies a layer to a block. Dense layers ignore the block and map every input row.
Matrix layer_forward(const LayerParams& params, const Block& block, const Matrix& input,
                     LayerCache* cache = nullptr);

/// Accumulates parameter gradients into `grads` and returns d loss / d input.
Matrix layer_backward(const LayerParams& params, const Block& block, const Matrix& input,
                      const LayerCache& cache, const Matrix& d_output, LayerParams& grads);

/// Node-wise form: one destination with its self vector and neighbour vectors.
RowVector layer_forward(const LayerParams& params, const RowVector& h_self,
                        const std::vector<RowVector>& h_neighbors);

}  // namespace gnnsteal
