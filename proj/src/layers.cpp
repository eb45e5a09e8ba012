#include "gnnsteal/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gnnsteal/errors.hpp"

namespace gnnsteal {

const char* to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::sage: return "sage";
    case LayerKind::gat: return "gat";
    case LayerKind::gin: return "gin";
    case LayerKind::dense: return "dense";
  }
  return "?";
}

LayerKind parse_layer_kind(std::string_view text) {
  if (text == "sage") return LayerKind::sage;
  if (text == "gat") return LayerKind::gat;
  if (text == "gin") return LayerKind::gin;
  if (text == "dense") return LayerKind::dense;
  throw InvalidArgument("unknown layer kind '" + std::string(text) + "' (expected sage, gat, gin)");
}

std::size_t LayerParams::head_width() const {
  if (kind != LayerKind::gat) return out_width;
  return concat_heads ? out_width / heads : out_width;
}

std::vector<Matrix*> LayerParams::tensors() {
  std::vector<Matrix*> out;
  for (Matrix* m : {&weight, &bias, &attn_src, &attn_dst, &epsilon})
    if (m->size()) out.push_back(m);
  return out;
}

std::vector<const Matrix*> LayerParams::tensors() const {
  std::vector<const Matrix*> out;
  for (const Matrix* m : {&weight, &bias, &attn_src, &attn_dst, &epsilon})
    if (m->size()) out.push_back(m);
  return out;
}

std::vector<std::string> LayerParams::tensor_names() const {
  std::vector<std::string> out;
  const std::pair<const Matrix*, const char*> named[] = {
      {&weight, "weight"}, {&bias, "bias"}, {&attn_src, "attn_src"}, {&attn_dst, "attn_dst"}, {&epsilon, "epsilon"}};
  for (const auto& [m, name] : named)
    if (m->size()) out.emplace_back(name);
  return out;
}

LayerParams LayerParams::zeros_like() const {
  LayerParams z = *this;
  for (Matrix* m : z.tensors()) m->setZero();
  return z;
}

namespace {

void glorot(Matrix& m, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
}

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check_input(const LayerParams& p, const Block& block, const Matrix& input) {
  if (static_cast<std::size_t>(input.cols()) != p.in_width) {
    throw InvalidArgument(std::string(to_string(p.kind)) + " layer expects width " + std::to_string(p.in_width) +
                          ", got " + std::to_string(input.cols()));
  }
  if (p.kind != LayerKind::dense && static_cast<std::size_t>(input.rows()) != block.num_src) {
    throw InvalidArgument("layer input has " + std::to_string(input.rows()) + " rows, block expects " +
                          std::to_string(block.num_src));
  }
}

}  // namespace

LayerParams make_layer(LayerKind kind, std::size_t in_width, std::size_t out_width, std::size_t heads,
                       bool concat_heads, Rng& rng) {
  if (in_width == 0 || out_width == 0) throw InvalidArgument("layer widths must be positive");
  LayerParams p;
  p.kind = kind;
  p.in_width = in_width;
  p.out_width = out_width;
  if (kind == LayerKind::gat) {
    if (heads == 0) throw InvalidArgument("gat layer needs at least one head");
    if (concat_heads && out_width % heads != 0) {
      throw InvalidArgument("gat width " + std::to_string(out_width) + " not divisible by " + std::to_string(heads) +
                            " heads");
    }
    p.heads = heads;
    p.concat_heads = concat_heads;
    const std::size_t hw = p.head_width();
    p.weight.resize(idx(in_width), idx(heads * hw));
    glorot(p.weight, in_width, heads * hw, rng);
    p.attn_src.resize(idx(heads), idx(hw));
    p.attn_dst.resize(idx(heads), idx(hw));
    glorot(p.attn_src, hw, 1, rng);
    glorot(p.attn_dst, hw, 1, rng);
  } else {
    p.weight.resize(idx(in_width), idx(out_width));
    glorot(p.weight, in_width, out_width, rng);
  }
  if (kind == LayerKind::gin) p.epsilon = Matrix::Zero(1, 1);
  p.bias = Matrix::Zero(1, idx(out_width));
  return p;
}

Matrix layer_forward(const LayerParams& p, const Block& block, const Matrix& input, LayerCache* cache) {
  check_input(p, block, input);
  if (p.kind == LayerKind::dense) {
    Matrix out = input * p.weight;
    out.rowwise() += p.bias.row(0);
    return out;
  }

  const std::size_t n_dst = block.num_dst();
  if (p.kind == LayerKind::sage || p.kind == LayerKind::gin) {
    Matrix agg(idx(n_dst), input.cols());
    const double self_weight = p.kind == LayerKind::gin ? 1.0 + p.eps() : 1.0;
    for (std::size_t i = 0; i < n_dst; ++i) {
      auto row = agg.row(idx(i));
      row = self_weight * input.row(idx(i));
      const auto nb = block.neighbors_of(i);
      for (std::size_t u : nb) row += input.row(idx(u));
      if (p.kind == LayerKind::sage) row /= static_cast<double>(nb.size() + 1);
    }
    Matrix out = agg * p.weight;
    out.rowwise() += p.bias.row(0);
    if (cache) cache->aggregate = std::move(agg);
    return out;
  }

  // gat
  const std::size_t heads = p.heads;
  const std::size_t hw = p.head_width();
  const Matrix g = input * p.weight;
  std::vector<std::size_t> offsets(n_dst + 1, 0);
  std::vector<std::size_t> nbrs;
  nbrs.reserve(block.neighbors.size() + n_dst);
  for (std::size_t i = 0; i < n_dst; ++i) {
    const auto nb = block.neighbors_of(i);
    if (nb.empty()) {
      nbrs.push_back(i);
    } else {
      nbrs.insert(nbrs.end(), nb.begin(), nb.end());
    }
    offsets[i + 1] = nbrs.size();
  }
  const auto n_edges = idx(nbrs.size());
  Matrix score(idx(heads), n_edges);
  Matrix alpha(idx(heads), n_edges);
  // Per-node halves of the attention logit.
  Matrix src_term(idx(block.num_src), idx(heads));
  Matrix dst_term(idx(n_dst), idx(heads));
  for (std::size_t z = 0; z < heads; ++z) {
    const auto gz = g.middleCols(idx(z * hw), idx(hw));
    src_term.col(idx(z)) = gz * p.attn_src.row(idx(z)).transpose();
    dst_term.col(idx(z)) = gz.topRows(idx(n_dst)) * p.attn_dst.row(idx(z)).transpose();
  }

  const std::size_t full = p.concat_heads ? heads * hw : hw;
  Matrix out = Matrix::Zero(idx(n_dst), idx(full));
  const double head_scale = p.concat_heads ? 1.0 : 1.0 / static_cast<double>(heads);
  for (std::size_t i = 0; i < n_dst; ++i) {
    const std::size_t begin = offsets[i], end = offsets[i + 1];
    for (std::size_t z = 0; z < heads; ++z) {
      double max_e = -std::numeric_limits<double>::infinity();
      for (std::size_t e = begin; e < end; ++e) {
        const double s = src_term(idx(nbrs[e]), idx(z)) + dst_term(idx(i), idx(z));
        score(idx(z), idx(e)) = s;
        const double act = s > 0 ? s : kLeakySlope * s;
        alpha(idx(z), idx(e)) = act;
        max_e = std::max(max_e, act);
      }
      double total = 0.0;
      for (std::size_t e = begin; e < end; ++e) {
        const double w = std::exp(alpha(idx(z), idx(e)) - max_e);
        alpha(idx(z), idx(e)) = w;
        total += w;
      }
      const Eigen::Index col = p.concat_heads ? idx(z * hw) : 0;
      for (std::size_t e = begin; e < end; ++e) {
        alpha(idx(z), idx(e)) /= total;
        out.row(idx(i)).segment(col, idx(hw)) +=
            head_scale * alpha(idx(z), idx(e)) * g.row(idx(nbrs[e])).segment(idx(z * hw), idx(hw));
      }
    }
  }
  out.rowwise() += p.bias.row(0);
  if (cache) {
    cache->projected = g;
    cache->att_offsets = std::move(offsets);
    cache->att_neighbors = std::move(nbrs);
    cache->score = std::move(score);
    cache->alpha = std::move(alpha);
  }
  return out;
}

Matrix layer_backward(const LayerParams& p, const Block& block, const Matrix& input, const LayerCache& cache,
                      const Matrix& d_output, LayerParams& grads) {
  grads.bias.row(0) += d_output.colwise().sum();
  if (p.kind == LayerKind::dense) {
    grads.weight.noalias() += input.transpose() * d_output;
    return d_output * p.weight.transpose();
  }

  const std::size_t n_dst = block.num_dst();
  Matrix d_input = Matrix::Zero(input.rows(), input.cols());
  if (p.kind == LayerKind::sage || p.kind == LayerKind::gin) {
    grads.weight.noalias() += cache.aggregate.transpose() * d_output;
    const Matrix d_agg = d_output * p.weight.transpose();
    const double self_weight = p.kind == LayerKind::gin ? 1.0 + p.eps() : 1.0;
    double d_eps = 0.0;
    for (std::size_t i = 0; i < n_dst; ++i) {
      const auto nb = block.neighbors_of(i);
      const double scale = p.kind == LayerKind::sage ? 1.0 / static_cast<double>(nb.size() + 1) : 1.0;
      const auto d_row = d_agg.row(idx(i));
      d_input.row(idx(i)) += (self_weight * scale) * d_row;
      for (std::size_t u : nb) d_input.row(idx(u)) += scale * d_row;
      if (p.kind == LayerKind::gin) d_eps += d_row.dot(input.row(idx(i)));
    }
    if (p.kind == LayerKind::gin) grads.epsilon(0, 0) += d_eps;
    return d_input;
  }

  // gat
  const std::size_t heads = p.heads;
  const std::size_t hw = p.head_width();
  const Matrix& g = cache.projected;
  const auto& offsets = cache.att_offsets;
  const auto& nbrs = cache.att_neighbors;
  Matrix d_g = Matrix::Zero(g.rows(), g.cols());
  const double head_scale = p.concat_heads ? 1.0 : 1.0 / static_cast<double>(heads);
  std::vector<double> d_alpha;
  for (std::size_t i = 0; i < n_dst; ++i) {
    const std::size_t begin = offsets[i], end = offsets[i + 1];
    for (std::size_t z = 0; z < heads; ++z) {
      const Eigen::Index col = p.concat_heads ? idx(z * hw) : 0;
      const RowVector d_out_z = head_scale * d_output.row(idx(i)).segment(col, idx(hw));
      const auto gz_cols = idx(z * hw);
      d_alpha.assign(end - begin, 0.0);
      double weighted = 0.0;
      for (std::size_t e = begin; e < end; ++e) {
        const double a = cache.alpha(idx(z), idx(e));
        const double da = d_out_z.dot(g.row(idx(nbrs[e])).segment(gz_cols, idx(hw)));
        d_alpha[e - begin] = da;
        weighted += a * da;
        d_g.row(idx(nbrs[e])).segment(gz_cols, idx(hw)) += a * d_out_z;
      }
      for (std::size_t e = begin; e < end; ++e) {
        const double a = cache.alpha(idx(z), idx(e));
        const double s = cache.score(idx(z), idx(e));
        const double d_score = a * (d_alpha[e - begin] - weighted) * (s > 0 ? 1.0 : kLeakySlope);
        const std::size_t u = nbrs[e];
        grads.attn_src.row(idx(z)) += d_score * g.row(idx(u)).segment(gz_cols, idx(hw));
        grads.attn_dst.row(idx(z)) += d_score * g.row(idx(i)).segment(gz_cols, idx(hw));
        d_g.row(idx(u)).segment(gz_cols, idx(hw)) += d_score * p.attn_src.row(idx(z));
        d_g.row(idx(i)).segment(gz_cols, idx(hw)) += d_score * p.attn_dst.row(idx(z));
      }
    }
  }
  grads.weight.noalias() += input.transpose() * d_g;
  d_input.noalias() += d_g * p.weight.transpose();
  return d_input;
}

RowVector layer_forward(const LayerParams& params, const RowVector& h_self, const std::vector<RowVector>& h_neighbors) {
  Matrix input(idx(h_neighbors.size() + 1), h_self.size());
  input.row(0) = h_self;
  Block block;
  block.num_src = h_neighbors.size() + 1;
  for (std::size_t j = 0; j < h_neighbors.size(); ++j) {
    if (h_neighbors[j].size() != h_self.size()) {
      throw InvalidArgument("neighbour vector " + std::to_string(j) + " has width " +
                            std::to_string(h_neighbors[j].size()) + ", expected " + std::to_string(h_self.size()));
    }
    input.row(idx(j + 1)) = h_neighbors[j];
    block.neighbors.push_back(j + 1);
  }
  block.offsets.push_back(block.neighbors.size());
  const Matrix out = layer_forward(params, block, params.kind == LayerKind::dense ? Matrix(input.topRows(1)) : input);
  return out.row(0);
}

}  // namespace gnnsteal
