// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#include "genefx/nn.hpp"

#include <cmath>

#include "gemm.hpp"
#include "genefx/rng.hpp"
#include "op_util.hpp"

namespace genefx {

using detail::grad_of;
using detail::Node;

void ConvSpec::validate() const {
  if (k % 2 == 0) throw ConfigError("ConvSpec: kernel size must be odd, got " + std::to_string(k));
  if (c_in == 0 || c_out == 0) throw ConfigError("ConvSpec: channel counts must be positive");
}

namespace {

// col[(c·k + i)·k + j][y·W + x] = img[c][y + i - pad][x + j - pad], zero outside.
template <typename T>
void im2col(const T* img, std::size_t c, std::size_t h, std::size_t w, std::size_t k, T* col) {
  const long pad = static_cast<long>((k - 1) / 2);
  const std::size_t hw = h * w;
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        T* dst = col + ((ch * k + i) * k + j) * hw;
        for (std::size_t y = 0; y < h; ++y) {
          const long sy = static_cast<long>(y) + static_cast<long>(i) - pad;
          if (sy < 0 || sy >= static_cast<long>(h)) {
            std::fill_n(dst + y * w, w, T{0});
            continue;
          }
          const T* src = img + (ch * h + static_cast<std::size_t>(sy)) * w;
          for (std::size_t x = 0; x < w; ++x) {
            const long sx = static_cast<long>(x) + static_cast<long>(j) - pad;
            dst[y * w + x] = (sx < 0 || sx >= static_cast<long>(w)) ? T{0} : src[sx];
          }
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const T* col, std::size_t c, std::size_t h, std::size_t w, std::size_t k,
                T* img) {
  const long pad = static_cast<long>((k - 1) / 2);
  const std::size_t hw = h * w;
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const T* src = col + ((ch * k + i) * k + j) * hw;
        for (std::size_t y = 0; y < h; ++y) {
          const long sy = static_cast<long>(y) + static_cast<long>(i) - pad;
          if (sy < 0 || sy >= static_cast<long>(h)) continue;
          T* dst = img + (ch * h + static_cast<std::size_t>(sy)) * w;
          for (std::size_t x = 0; x < w; ++x) {
            const long sx = static_cast<long>(x) + static_cast<long>(j) - pad;
            if (sx >= 0 && sx < static_cast<long>(w)) dst[sx] += src[y * w + x];
          }
        }
      }
    }
  }
}

template <typename T>
Tensor<T> conv_impl(const Tensor<T>& x, const Tensor<T>& w, bool per_sample) {
  const auto& xv = x.value();
  const auto& wv = w.value();
  const std::size_t wr = per_sample ? 5 : 4;
  if (xv.rank() != 4 || wv.rank() != wr) {
    throw DimensionError("conv2d: input " + shape_str(xv.shape()) + ", weights " +
                         shape_str(wv.shape()));
  }
  const std::size_t off = per_sample ? 1 : 0;
  const std::size_t batch = xv.dim(0), ci = xv.dim(1), h = xv.dim(2), wd = xv.dim(3);
  const std::size_t co = wv.dim(off), k = wv.dim(off + 2);
  if (wv.dim(off + 1) != ci) {
    throw DimensionError("conv2d: channel mismatch, input has " + std::to_string(ci) +
                         " channels but weights expect " + std::to_string(wv.dim(off + 1)));
  }
  if (wv.dim(off + 3) != k || k % 2 == 0) {
    throw DimensionError("conv2d: kernel must be square and odd, got " + shape_str(wv.shape()));
  }
  if (per_sample && wv.dim(0) != batch) {
    throw DimensionError("conv2d_per_sample: " + std::to_string(wv.dim(0)) +
                         " kernels for batch of " + std::to_string(batch));
  }
  const std::size_t hw = h * wd, ckk = ci * k * k, wsize = co * ckk;
  NdArray<T> out({batch, co, h, wd});
  std::vector<T> cols(batch * ckk * hw);
  for (std::size_t n = 0; n < batch; ++n) {
    T* col = cols.data() + n * ckk * hw;
    im2col(xv.data().data() + n * ci * hw, ci, h, wd, k, col);
    const T* wn = wv.data().data() + (per_sample ? n * wsize : 0);
    detail::gemm_acc(false, false, co, hw, ckk, wn, col, out.data().data() + n * co * hw);
  }
  return Tensor<T>::from_op(
      std::move(out), {x, w},
      [cols = std::move(cols), batch, ci, co, h, wd, k, hw, ckk, wsize, per_sample](Node<T>& self) {
        auto& px = *self.parents[0];
        auto& pw = *self.parents[1];
        auto* gx = grad_of(px);
        auto* gw = grad_of(pw);
        std::vector<T> gcol(gx ? ckk * hw : 0);
        for (std::size_t n = 0; n < batch; ++n) {
          const T* g = self.grad->data().data() + n * co * hw;
          const T* col = cols.data() + n * ckk * hw;
          const std::size_t woff = per_sample ? n * wsize : 0;
          if (gw) detail::gemm_acc(false, true, co, ckk, hw, g, col, gw->data().data() + woff);
          if (gx) {
            std::fill(gcol.begin(), gcol.end(), T{0});
            detail::gemm_acc(true, false, ckk, hw, co, pw.value.data().data() + woff, g,
                             gcol.data());
            col2im_add(gcol.data(), ci, h, wd, k, gx->data().data() + n * ci * hw);
          }
        }
      });
}

}  // namespace

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w) {
  return conv_impl(x, w, false);
}

template <typename T>
Tensor<T> conv2d_per_sample(const Tensor<T>& x, const Tensor<T>& w) {
  return conv_impl(x, w, true);
}

template <typename T>
Tensor<T> avg_pool2(const Tensor<T>& x) {
  const auto& xv = x.value();
  if (xv.rank() != 4 || xv.dim(2) % 2 || xv.dim(3) % 2) {
    throw DimensionError("avg_pool2: needs NCHW with even H, W; got " + shape_str(xv.shape()));
  }
  const std::size_t planes = xv.dim(0) * xv.dim(1), h = xv.dim(2), w = xv.dim(3);
  const std::size_t oh = h / 2, ow = w / 2;
  NdArray<T> out({xv.dim(0), xv.dim(1), oh, ow});
  for (std::size_t p = 0; p < planes; ++p) {
    const T* src = xv.data().data() + p * h * w;
    T* dst = out.data().data() + p * oh * ow;
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x2 = 0; x2 < ow; ++x2) {
        const T* s = src + 2 * y * w + 2 * x2;
        dst[y * ow + x2] = (s[0] + s[1] + s[w] + s[w + 1]) * T{0.25};
      }
    }
  }
  return Tensor<T>::from_op(std::move(out), {x}, [planes, h, w, oh, ow](Node<T>& self) {
    if (auto* gx = grad_of(*self.parents[0])) {
      for (std::size_t p = 0; p < planes; ++p) {
        const T* g = self.grad->data().data() + p * oh * ow;
        T* d = gx->data().data() + p * h * w;
        for (std::size_t y = 0; y < oh; ++y) {
          for (std::size_t x2 = 0; x2 < ow; ++x2) {
            const T v = g[y * ow + x2] * T{0.25};
            T* s = d + 2 * y * w + 2 * x2;
            s[0] += v;
            s[1] += v;
            s[w] += v;
            s[w + 1] += v;
          }
        }
      }
    }
  });
}

template <typename T>
Tensor<T> upsample_nearest2(const Tensor<T>& x) {
  const auto& xv = x.value();
  if (xv.rank() != 4) throw DimensionError("upsample_nearest2: expects NCHW");
  const std::size_t planes = xv.dim(0) * xv.dim(1), h = xv.dim(2), w = xv.dim(3);
  const std::size_t oh = 2 * h, ow = 2 * w;
  NdArray<T> out({xv.dim(0), xv.dim(1), oh, ow});
  for (std::size_t p = 0; p < planes; ++p) {
    const T* src = xv.data().data() + p * h * w;
    T* dst = out.data().data() + p * oh * ow;
    for (std::size_t y = 0; y < oh; ++y)
      for (std::size_t x2 = 0; x2 < ow; ++x2) dst[y * ow + x2] = src[(y / 2) * w + x2 / 2];
  }
  return Tensor<T>::from_op(std::move(out), {x}, [planes, h, w, oh, ow](Node<T>& self) {
    if (auto* gx = grad_of(*self.parents[0])) {
      for (std::size_t p = 0; p < planes; ++p) {
        const T* g = self.grad->data().data() + p * oh * ow;
        T* d = gx->data().data() + p * h * w;
        for (std::size_t y = 0; y < oh; ++y)
          for (std::size_t x2 = 0; x2 < ow; ++x2) d[(y / 2) * w + x2 / 2] += g[y * ow + x2];
      }
    }
  });
}

template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& x) {
  const auto& xv = x.value();
  if (xv.rank() != 4) throw DimensionError("global_avg_pool: expects NCHW");
  const std::size_t batch = xv.dim(0), c = xv.dim(1), hw = xv.dim(2) * xv.dim(3);
  NdArray<T> out({batch, c});
  for (std::size_t p = 0; p < batch * c; ++p) {
    double acc = 0.0;
    const T* src = xv.data().data() + p * hw;
    for (std::size_t i = 0; i < hw; ++i) acc += src[i];
    out[p] = static_cast<T>(acc / static_cast<double>(hw));
  }
  return Tensor<T>::from_op(std::move(out), {x}, [batch, c, hw](Node<T>& self) {
    if (auto* gx = grad_of(*self.parents[0])) {
      const T inv = T{1} / static_cast<T>(hw);
      for (std::size_t p = 0; p < batch * c; ++p) {
        const T g = (*self.grad)[p] * inv;
        T* d = gx->data().data() + p * hw;
        for (std::size_t i = 0; i < hw; ++i) d[i] += g;
      }
    }
  });
}

template <typename T>
NdArray<T> kaiming_uniform(const Shape& shape, std::size_t fan_in, std::uint64_t seed) {
  if (fan_in == 0) throw ConfigError("kaiming_uniform: fan_in must be positive");
  const T bound = static_cast<T>(std::sqrt(6.0 / static_cast<double>(fan_in)));
  Rng rng(seed);
  std::uniform_real_distribution<T> dist(-bound, bound);
  NdArray<T> out(shape);
  for (auto& v : out.data()) v = dist(rng);
  return out;
}

template <typename T>
Tensor<T> init_params(const ConvSpec& spec, std::uint64_t seed) {
  spec.validate();
  return Tensor<T>(kaiming_uniform<T>(spec.weight_shape(), spec.fan_in(), seed), true);
}

template <typename T>
Conv2d<T>::Conv2d(ConvSpec s, bool with_bias, std::uint64_t seed)
    : spec(s), weight(init_params<T>(s, seed)) {
  if (with_bias) bias = Tensor<T>(NdArray<T>({s.c_out}), true);
}

template <typename T>
Tensor<T> Conv2d<T>::forward(const Tensor<T>& x) const {
  auto y = conv2d(x, weight);
  return bias.defined() ? add_channel_bias(y, bias) : y;
}

template <typename T>
void Conv2d<T>::collect(const std::string& prefix, ParamList<T>& out) const {
  out.push_back({prefix + ".weight", weight});
  if (bias.defined()) out.push_back({prefix + ".bias", bias});
}

template <typename T>
LayerInfo Conv2d<T>::layer(const std::string& prefix) const {
  LayerInfo info{prefix, {prefix + ".weight"}, spec.fan_in()};
  if (bias.defined()) info.params.push_back(prefix + ".bias");
  return info;
}

template <typename T>
Mlp2<T>::Mlp2(std::size_t in, std::size_t hidden, std::size_t out, std::uint64_t seed)
    : w1(kaiming_uniform<T>({in, hidden}, in, derive_seed(seed, "w1")), true),
      b1(NdArray<T>({hidden}), true),
      w2(kaiming_uniform<T>({hidden, out}, hidden, derive_seed(seed, "w2")), true),
      b2(NdArray<T>({out}), true) {}

template <typename T>
Tensor<T> Mlp2<T>::forward(const Tensor<T>& x) const {
  if (x.value().rank() != 2 || x.dim(1) != in_dim()) {
    throw DimensionError("Mlp2: input " + shape_str(x.shape()) + " but MLP expects width " +
                         std::to_string(in_dim()));
  }
  auto h = relu(add_row_bias(matmul(x, w1), b1));
  return add_row_bias(matmul(h, w2), b2);
}

template <typename T>
void Mlp2<T>::collect(const std::string& prefix, ParamList<T>& out) const {
  out.push_back({prefix + ".w1", w1});
  out.push_back({prefix + ".b1", b1});
  out.push_back({prefix + ".w2", w2});
  out.push_back({prefix + ".b2", b2});
}

template <typename T>
AttentionBlock<T>::AttentionBlock(std::size_t channels, std::uint64_t seed)
    : q({channels, channels, 1}, true, derive_seed(seed, "q")),
      k({channels, channels, 1}, true, derive_seed(seed, "k")),
      v({channels, channels, 1}, true, derive_seed(seed, "v")),
      o({channels, channels, 1}, true, derive_seed(seed, "o")) {}

template <typename T>
AttentionResult<T> AttentionBlock<T>::forward(const Tensor<T>& x) const {
  const auto& xv = x.value();
  if (xv.rank() != 4 || xv.dim(1) != channels()) {
    throw DimensionError("attention: input " + shape_str(xv.shape()) + " for " +
                         std::to_string(channels()) + " channels");
  }
  const std::size_t h = xv.dim(2), w = xv.dim(3);
  if (h * w > kMaxPositions) {
    throw ResourceError("attention: " + std::to_string(h) + "x" + std::to_string(w) +
                        " positions exceed the dense limit of " + std::to_string(kMaxPositions));
  }
  auto qf = q.forward(x);
  auto kf = k.forward(x);
  auto vf = v.forward(x);
  const T inv_sqrt = static_cast<T>(1.0 / std::sqrt(static_cast<double>(channels())));
  auto scores = scale(bmm(nchw_to_tokens(qf), transpose_last2(nchw_to_tokens(kf))), inv_sqrt);
  auto weights = softmax_rows(scores);
  auto attended = tokens_to_nchw(bmm(weights, nchw_to_tokens(vf)), h, w);
  return {o.forward(attended), concat_channels<T>({qf, kf, vf}), weights};
}

template <typename T>
void AttentionBlock<T>::collect(const std::string& prefix, ParamList<T>& out) const {
  q.collect(prefix + ".q", out);
  k.collect(prefix + ".k", out);
  v.collect(prefix + ".v", out);
  o.collect(prefix + ".o", out);
}

template <typename T>
void AttentionBlock<T>::collect_layers(const std::string& prefix,
                                       std::vector<LayerInfo>& out) const {
  out.push_back(q.layer(prefix + ".q"));
  out.push_back(k.layer(prefix + ".k"));
  out.push_back(v.layer(prefix + ".v"));
  out.push_back(o.layer(prefix + ".o"));
}

#define GENEFX_INSTANTIATE_NN(T)                                                        \
  template Tensor<T> conv2d(const Tensor<T>&, const Tensor<T>&);                        \
  template Tensor<T> conv2d_per_sample(const Tensor<T>&, const Tensor<T>&);             \
  template Tensor<T> avg_pool2(const Tensor<T>&);                                       \
  template Tensor<T> upsample_nearest2(const Tensor<T>&);                               \
  template Tensor<T> global_avg_pool(const Tensor<T>&);                                 \
  template NdArray<T> kaiming_uniform(const Shape&, std::size_t, std::uint64_t);        \
  template Tensor<T> init_params(const ConvSpec&, std::uint64_t);                       \
  template struct Conv2d<T>;                                                            \
  template struct Mlp2<T>;                                                              \
  template struct AttentionBlock<T>;

GENEFX_INSTANTIATE_NN(float)
GENEFX_INSTANTIATE_NN(double)

}  // namespace genefx
