// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#include "genefx/ops.hpp"

#include <algorithm>
#include <cmath>

#include "gemm.hpp"
#include "op_util.hpp"

namespace genefx {

using detail::grad_of;
using detail::Node;

namespace {

template <typename T>
void require_same_shape(const char* op, const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
  }
}

}  // namespace

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape("add", a, b);
  NdArray<T> out = a.value();
  const auto& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return Tensor<T>::from_op(std::move(out), {a, b}, [](Node<T>& self) {
    for (auto& p : self.parents) {
      if (auto* g = grad_of(*p)) {
        for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += (*self.grad)[i];
      }
    }
  });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape("sub", a, b);
  NdArray<T> out = a.value();
  const auto& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return Tensor<T>::from_op(std::move(out), {a, b}, [](Node<T>& self) {
    const auto& g = *self.grad;
    if (auto* ga = grad_of(*self.parents[0])) {
      for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i];
    }
    if (auto* gb = grad_of(*self.parents[1])) {
      for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] -= g[i];
    }
  });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape("mul", a, b);
  NdArray<T> out = a.value();
  const auto& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return Tensor<T>::from_op(std::move(out), {a, b}, [](Node<T>& self) {
    const auto& g = *self.grad;
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    if (auto* ga = grad_of(pa)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * pb.value[i];
    }
    if (auto* gb = grad_of(pb)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] += g[i] * pa.value[i];
    }
  });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T s) {
  NdArray<T> out = a.value();
  for (auto& v : out.data()) v *= s;
  return Tensor<T>::from_op(std::move(out), {a}, [s](Node<T>& self) {
    if (auto* ga = grad_of(*self.parents[0])) {
      for (std::size_t i = 0; i < ga->size(); ++i) (*ga)[i] += s * (*self.grad)[i];
    }
  });
}

template <typename T>
Tensor<T> relu(const Tensor<T>& a) {
  NdArray<T> out = a.value();
  for (auto& v : out.data()) v = v > T{0} ? v : T{0};
  return Tensor<T>::from_op(std::move(out), {a}, [](Node<T>& self) {
    auto& p = *self.parents[0];
    if (auto* ga = grad_of(p)) {
      for (std::size_t i = 0; i < ga->size(); ++i) {
        if (p.value[i] > T{0}) (*ga)[i] += (*self.grad)[i];
      }
    }
  });
}

template <typename T>
Tensor<T> abs(const Tensor<T>& a) {
  NdArray<T> out = a.value();
  for (auto& v : out.data()) v = std::abs(v);
  return Tensor<T>::from_op(std::move(out), {a}, [](Node<T>& self) {
    auto& p = *self.parents[0];
    if (auto* ga = grad_of(p)) {
      for (std::size_t i = 0; i < ga->size(); ++i) {
        const T x = p.value[i];
        const T sgn = x > T{0} ? T{1} : (x < T{0} ? T{-1} : T{0});
        (*ga)[i] += sgn * (*self.grad)[i];
      }
    }
  });
}

template <typename T>
Tensor<T> square(const Tensor<T>& a) {
  NdArray<T> out = a.value();
  for (auto& v : out.data()) v = v * v;
  return Tensor<T>::from_op(std::move(out), {a}, [](Node<T>& self) {
    auto& p = *self.parents[0];
    if (auto* ga = grad_of(p)) {
      for (std::size_t i = 0; i < ga->size(); ++i) (*ga)[i] += T{2} * p.value[i] * (*self.grad)[i];
    }
  });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  double acc = 0.0;
  for (T v : a.value().data()) acc += static_cast<double>(v);
  return Tensor<T>::from_op(NdArray<T>({1}, static_cast<T>(acc)), {a}, [](Node<T>& self) {
    if (auto* ga = grad_of(*self.parents[0])) {
      const T g = (*self.grad)[0];
      for (auto& v : ga->data()) v += g;
    }
  });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& a) {
  double acc = 0.0;
  for (T v : a.value().data()) acc += static_cast<double>(v);
  const double n = static_cast<double>(a.size());
  return Tensor<T>::from_op(NdArray<T>({1}, static_cast<T>(acc / n)), {a}, [n](Node<T>& self) {
    if (auto* ga = grad_of(*self.parents[0])) {
      const T g = static_cast<T>((*self.grad)[0] / n);
      for (auto& v : ga->data()) v += g;
    }
  });
}

template <typename T>
Tensor<T> weighted_sum(const Tensor<T>& a, const NdArray<T>& w) {
  if (a.shape() != w.shape()) {
    throw DimensionError("weighted_sum: " + shape_str(a.shape()) + " vs " + shape_str(w.shape()));
  }
  double acc = 0.0;
  const auto& av = a.value();
  for (std::size_t i = 0; i < av.size(); ++i) acc += static_cast<double>(av[i]) * w[i];
  const double n = static_cast<double>(a.size());
  return Tensor<T>::from_op(NdArray<T>({1}, static_cast<T>(acc / n)), {a},
                            [w, n](Node<T>& self) {
                              if (auto* ga = grad_of(*self.parents[0])) {
                                const double g = (*self.grad)[0] / n;
                                for (std::size_t i = 0; i < ga->size(); ++i) {
                                  (*ga)[i] += static_cast<T>(g * w[i]);
                                }
                              }
                            });
}

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.value().rank() != 2 || b.value().rank() != 2 || a.dim(1) != b.dim(0)) {
    throw DimensionError("matmul: " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  NdArray<T> out({m, n});
  detail::gemm_acc(false, false, m, n, k, a.value().data().data(), b.value().data().data(),
                   out.data().data());
  return Tensor<T>::from_op(std::move(out), {a, b}, [m, n, k](Node<T>& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    const T* g = self.grad->data().data();
    if (auto* ga = grad_of(pa)) {
      // dA = G·Bᵀ
      detail::gemm_acc(false, true, m, k, n, g, pb.value.data().data(), ga->data().data());
    }
    if (auto* gb = grad_of(pb)) {
      // dB = Aᵀ·G
      detail::gemm_acc(true, false, k, n, m, pa.value.data().data(), g, gb->data().data());
    }
  });
}

template <typename T>
Tensor<T> bmm(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.value().rank() != 3 || b.value().rank() != 3 || a.dim(0) != b.dim(0) ||
      a.dim(2) != b.dim(1)) {
    throw DimensionError("bmm: " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
  }
  const std::size_t batch = a.dim(0), m = a.dim(1), k = a.dim(2), n = b.dim(2);
  NdArray<T> out({batch, m, n});
  for (std::size_t s = 0; s < batch; ++s) {
    detail::gemm_acc(false, false, m, n, k, a.value().data().data() + s * m * k,
                     b.value().data().data() + s * k * n, out.data().data() + s * m * n);
  }
  return Tensor<T>::from_op(std::move(out), {a, b}, [batch, m, n, k](Node<T>& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    auto* ga = grad_of(pa);
    auto* gb = grad_of(pb);
    for (std::size_t s = 0; s < batch; ++s) {
      const T* g = self.grad->data().data() + s * m * n;
      if (ga) {
        detail::gemm_acc(false, true, m, k, n, g, pb.value.data().data() + s * k * n,
                         ga->data().data() + s * m * k);
      }
      if (gb) {
        detail::gemm_acc(true, false, k, n, m, pa.value.data().data() + s * m * k, g,
                         gb->data().data() + s * k * n);
      }
    }
  });
}

template <typename T>
Tensor<T> transpose_last2(const Tensor<T>& a) {
  const auto& av = a.value();
  if (av.rank() < 2) throw DimensionError("transpose_last2: rank < 2");
  const std::size_t r = av.rank();
  const std::size_t rows = av.dim(r - 2), cols = av.dim(r - 1);
  const std::size_t batch = av.size() / (rows * cols);
  Shape shape = av.shape();
  std::swap(shape[r - 2], shape[r - 1]);
  NdArray<T> out(shape);
  for (std::size_t s = 0; s < batch; ++s) {
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        out[s * rows * cols + j * rows + i] = av[s * rows * cols + i * cols + j];
      }
    }
  }
  return Tensor<T>::from_op(std::move(out), {a}, [batch, rows, cols](Node<T>& self) {
    if (auto* ga = grad_of(*self.parents[0])) {
      const auto& g = *self.grad;
      for (std::size_t s = 0; s < batch; ++s) {
        for (std::size_t i = 0; i < rows; ++i) {
          for (std::size_t j = 0; j < cols; ++j) {
            (*ga)[s * rows * cols + i * cols + j] += g[s * rows * cols + j * rows + i];
          }
        }
      }
    }
  });
}

template <typename T>
Tensor<T> add_row_bias(const Tensor<T>& a, const Tensor<T>& b) {
  const auto& av = a.value();
  if (b.value().rank() != 1 || av.rank() < 1 || av.dim(av.rank() - 1) != b.dim(0)) {
    throw DimensionError("add_row_bias: " + shape_str(a.shape()) + " + " + shape_str(b.shape()));
  }
  const std::size_t n = b.dim(0);
  NdArray<T> out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i % n];
  return Tensor<T>::from_op(std::move(out), {a, b}, [n](Node<T>& self) {
    const auto& g = *self.grad;
    if (auto* ga = grad_of(*self.parents[0])) {
      for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i];
    }
    if (auto* gb = grad_of(*self.parents[1])) {
      for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i % n] += g[i];
    }
  });
}

template <typename T>
Tensor<T> add_channel_bias(const Tensor<T>& x, const Tensor<T>& b) {
  const auto& xv = x.value();
  if (xv.rank() != 4 || b.value().rank() != 1 || xv.dim(1) != b.dim(0)) {
    throw DimensionError("add_channel_bias: " + shape_str(x.shape()) + " + " +
                         shape_str(b.shape()));
  }
  const std::size_t batch = xv.dim(0), c = xv.dim(1), hw = xv.dim(2) * xv.dim(3);
  NdArray<T> out = xv;
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      T* p = out.data().data() + (n * c + ch) * hw;
      const T bias = b.value()[ch];
      for (std::size_t i = 0; i < hw; ++i) p[i] += bias;
    }
  }
  return Tensor<T>::from_op(std::move(out), {x, b}, [batch, c, hw](Node<T>& self) {
    const auto& g = *self.grad;
    if (auto* gx = grad_of(*self.parents[0])) {
      for (std::size_t i = 0; i < g.size(); ++i) (*gx)[i] += g[i];
    }
    if (auto* gb = grad_of(*self.parents[1])) {
      for (std::size_t n = 0; n < batch; ++n) {
        for (std::size_t ch = 0; ch < c; ++ch) {
          const T* p = g.data().data() + (n * c + ch) * hw;
          double acc = 0.0;
          for (std::size_t i = 0; i < hw; ++i) acc += p[i];
          (*gb)[ch] += static_cast<T>(acc);
        }
      }
    }
  });
}

template <typename T>
Tensor<T> softmax_rows(const Tensor<T>& a) {
  const auto& av = a.value();
  const std::size_t n = av.dim(av.rank() - 1);
  const std::size_t rows = av.size() / n;
  NdArray<T> out(av.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* in = av.data().data() + r * n;
    T* o = out.data().data() + r * n;
    const T mx = *std::max_element(in, in + n);
    T total{0};
    for (std::size_t j = 0; j < n; ++j) {
      o[j] = std::exp(in[j] - mx);
      total += o[j];
    }
    for (std::size_t j = 0; j < n; ++j) o[j] /= total;
  }
  auto y = out;
  return Tensor<T>::from_op(std::move(out), {a}, [y = std::move(y), rows, n](Node<T>& self) {
    if (auto* ga = grad_of(*self.parents[0])) {
      const auto& g = *self.grad;
      for (std::size_t r = 0; r < rows; ++r) {
        T dot{0};
        for (std::size_t j = 0; j < n; ++j) dot += g[r * n + j] * y[r * n + j];
        for (std::size_t j = 0; j < n; ++j) {
          (*ga)[r * n + j] += y[r * n + j] * (g[r * n + j] - dot);
        }
      }
    }
  });
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape) {
  NdArray<T> out = a.value().reshaped(std::move(shape));
  return Tensor<T>::from_op(std::move(out), {a}, [](Node<T>& self) {
    if (auto* ga = grad_of(*self.parents[0])) {
      for (std::size_t i = 0; i < ga->size(); ++i) (*ga)[i] += (*self.grad)[i];
    }
  });
}

template <typename T>
Tensor<T> concat_channels(const std::vector<Tensor<T>>& parts) {
  if (parts.empty()) throw ContractError("concat_channels: no inputs");
  const auto& first = parts.front().value();
  if (first.rank() != 4) throw DimensionError("concat_channels: expects NCHW inputs");
  const std::size_t batch = first.dim(0), hw = first.dim(2) * first.dim(3);
  std::size_t total_c = 0;
  std::vector<std::size_t> widths;
  for (const auto& p : parts) {
    const auto& v = p.value();
    if (v.rank() != 4 || v.dim(0) != batch || v.dim(2) != first.dim(2) ||
        v.dim(3) != first.dim(3)) {
      throw DimensionError("concat_channels: " + shape_str(v.shape()) + " vs " +
                           shape_str(first.shape()));
    }
    widths.push_back(v.dim(1));
    total_c += v.dim(1);
  }
  NdArray<T> out({batch, total_c, first.dim(2), first.dim(3)});
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& v = parts[k].value();
    for (std::size_t n = 0; n < batch; ++n) {
      std::copy_n(v.data().data() + n * widths[k] * hw, widths[k] * hw,
                  out.data().data() + (n * total_c + offset) * hw);
    }
    offset += widths[k];
  }
  return Tensor<T>::from_op(
      std::move(out), parts, [widths, batch, hw, total_c](Node<T>& self) {
        std::size_t off = 0;
        for (std::size_t k = 0; k < widths.size(); ++k) {
          if (auto* gk = grad_of(*self.parents[k])) {
            for (std::size_t n = 0; n < batch; ++n) {
              const T* src = self.grad->data().data() + (n * total_c + off) * hw;
              T* dst = gk->data().data() + n * widths[k] * hw;
              for (std::size_t i = 0; i < widths[k] * hw; ++i) dst[i] += src[i];
            }
          }
          off += widths[k];
        }
      });
}

template <typename T>
Tensor<T> nchw_to_tokens(const Tensor<T>& x) {
  const auto& xv = x.value();
  if (xv.rank() != 4) throw DimensionError("nchw_to_tokens: expects NCHW");
  const std::size_t batch = xv.dim(0), c = xv.dim(1), hw = xv.dim(2) * xv.dim(3);
  NdArray<T> out({batch, hw, c});
  for (std::size_t n = 0; n < batch; ++n)
    for (std::size_t ch = 0; ch < c; ++ch)
      for (std::size_t p = 0; p < hw; ++p) out[(n * hw + p) * c + ch] = xv[(n * c + ch) * hw + p];
  return Tensor<T>::from_op(std::move(out), {x}, [batch, c, hw](Node<T>& self) {
    if (auto* gx = grad_of(*self.parents[0])) {
      const auto& g = *self.grad;
      for (std::size_t n = 0; n < batch; ++n)
        for (std::size_t ch = 0; ch < c; ++ch)
          for (std::size_t p = 0; p < hw; ++p)
            (*gx)[(n * c + ch) * hw + p] += g[(n * hw + p) * c + ch];
    }
  });
}

template <typename T>
Tensor<T> tokens_to_nchw(const Tensor<T>& t, std::size_t height, std::size_t width) {
  const auto& tv = t.value();
  if (tv.rank() != 3 || tv.dim(1) != height * width) {
    throw DimensionError("tokens_to_nchw: " + shape_str(tv.shape()) + " vs " +
                         std::to_string(height) + "x" + std::to_string(width));
  }
  const std::size_t batch = tv.dim(0), c = tv.dim(2), hw = height * width;
  NdArray<T> out({batch, c, height, width});
  for (std::size_t n = 0; n < batch; ++n)
    for (std::size_t ch = 0; ch < c; ++ch)
      for (std::size_t p = 0; p < hw; ++p) out[(n * c + ch) * hw + p] = tv[(n * hw + p) * c + ch];
  return Tensor<T>::from_op(std::move(out), {t}, [batch, c, hw](Node<T>& self) {
    if (auto* gt = grad_of(*self.parents[0])) {
      const auto& g = *self.grad;
      for (std::size_t n = 0; n < batch; ++n)
        for (std::size_t ch = 0; ch < c; ++ch)
          for (std::size_t p = 0; p < hw; ++p)
            (*gt)[(n * hw + p) * c + ch] += g[(n * c + ch) * hw + p];
    }
  });
}

template <typename T>
std::vector<T> softmax(const std::vector<T>& v) {
  if (v.empty()) return {};
  const T mx = *std::max_element(v.begin(), v.end());
  std::vector<T> out(v.size());
  T total{0};
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - mx);
    total += out[i];
  }
  for (auto& o : out) o /= total;
  return out;
}

#define GENEFX_INSTANTIATE_OPS(T)                                                     \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                         \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                         \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                         \
  template Tensor<T> scale(const Tensor<T>&, T);                                      \
  template Tensor<T> relu(const Tensor<T>&);                                          \
  template Tensor<T> abs(const Tensor<T>&);                                           \
  template Tensor<T> square(const Tensor<T>&);                                        \
  template Tensor<T> sum(const Tensor<T>&);                                           \
  template Tensor<T> mean(const Tensor<T>&);                                          \
  template Tensor<T> weighted_sum(const Tensor<T>&, const NdArray<T>&);               \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&);                      \
  template Tensor<T> bmm(const Tensor<T>&, const Tensor<T>&);                         \
  template Tensor<T> transpose_last2(const Tensor<T>&);                               \
  template Tensor<T> add_row_bias(const Tensor<T>&, const Tensor<T>&);                \
  template Tensor<T> add_channel_bias(const Tensor<T>&, const Tensor<T>&);            \
  template Tensor<T> softmax_rows(const Tensor<T>&);                                  \
  template Tensor<T> reshape(const Tensor<T>&, Shape);                                \
  template Tensor<T> concat_channels(const std::vector<Tensor<T>>&);                  \
  template Tensor<T> nchw_to_tokens(const Tensor<T>&);                                \
  template Tensor<T> tokens_to_nchw(const Tensor<T>&, std::size_t, std::size_t);      \
  template std::vector<T> softmax(const std::vector<T>&);

GENEFX_INSTANTIATE_OPS(float)
GENEFX_INSTANTIATE_OPS(double)

}  // namespace genefx
