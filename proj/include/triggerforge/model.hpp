#ifndef TRIGGERFORGE_MODEL_HPP_
#define TRIGGERFORGE_MODEL_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "triggerforge/common.hpp"
#include "triggerforge/mat.hpp"
#include "triggerforge/rng.hpp"
#include "triggerforge/vocab.hpp"

namespace triggerforge::lm {

// A small pre-norm transformer decoder:
//
//   x   = tok_emb[id] + pos_emb[pos]
//   x  += attn(rmsnorm(x; g1)) per layer (causal, multi-head)
//   x  += mlp(rmsnorm(x; g2))  per layer (4x expansion, tanh-GELU)
//   f   = rmsnorm(x; gf)
//   logits = out_proj * f
//
// No biases anywhere; norms carry a gain vector only. All math is written
// out by hand (forward, KV-cache incremental decoding, and reverse-mode
// backward for both parameters and input embeddings), templated on the
// scalar type: float for the pipeline, double for oracles and gradient
// checks.

struct ModelConfig {
  int embed_dim = 64;
  int layers = 2;
  int heads = 2;
  int context_len = 64;

  void validate() const {
    if (embed_dim < 1 || layers < 0 || heads < 1 || context_len < 1)
      throw ConfigError("invalid model dimensions");
    if (embed_dim % heads != 0)
      throw ConfigError("embed_dim must be divisible by heads");
  }
};

template <typename T>
struct LayerParams {
  std::vector<T> norm1_g, norm2_g;  // E
  Mat<T> wq, wk, wv, wo;            // E x E
  Mat<T> w1;                        // 4E x E
  Mat<T> w2;                        // E x 4E
};

template <typename T>
struct ModelParams {
  Vocabulary vocab;
  ModelConfig config;
  Mat<T> tok_emb;  // V x E
  Mat<T> pos_emb;  // context_len x E
  std::vector<LayerParams<T>> layers;
  std::vector<T> final_norm_g;  // E
  Mat<T> out_proj;              // V x E

  int vocab_size() const { return static_cast<int>(vocab.size()); }
  int dim() const { return config.embed_dim; }
};

// Fixed tensor enumeration order; the optimizer and the checkpoint format
// both rely on it.
template <typename T, typename Fn>
void for_each_tensor(ModelParams<T>& m, Fn&& fn) {
  fn("tok_emb", m.tok_emb.a.data(), m.tok_emb.size());
  fn("pos_emb", m.pos_emb.a.data(), m.pos_emb.size());
  for (std::size_t i = 0; i < m.layers.size(); ++i) {
    auto& l = m.layers[i];
    std::string p = "layer" + std::to_string(i) + ".";
    fn(p + "norm1.g", l.norm1_g.data(), l.norm1_g.size());
    fn(p + "attn.wq", l.wq.a.data(), l.wq.size());
    fn(p + "attn.wk", l.wk.a.data(), l.wk.size());
    fn(p + "attn.wv", l.wv.a.data(), l.wv.size());
    fn(p + "attn.wo", l.wo.a.data(), l.wo.size());
    fn(p + "norm2.g", l.norm2_g.data(), l.norm2_g.size());
    fn(p + "mlp.w1", l.w1.a.data(), l.w1.size());
    fn(p + "mlp.w2", l.w2.a.data(), l.w2.size());
  }
  fn("final_norm.g", m.final_norm_g.data(), m.final_norm_g.size());
  fn("out_proj", m.out_proj.a.data(), m.out_proj.size());
}

template <typename T>
ModelParams<T> init_model(const Vocabulary& vocab, const ModelConfig& config,
                          std::uint64_t seed) {
  config.validate();
  const int v = static_cast<int>(vocab.size());
  const int e = config.embed_dim;
  ModelParams<T> m;
  m.vocab = vocab;
  m.config = config;
  m.tok_emb = Mat<T>(v, e);
  m.pos_emb = Mat<T>(config.context_len, e);
  m.layers.resize(config.layers);
  for (auto& l : m.layers) {
    l.norm1_g.assign(e, T(1));
    l.norm2_g.assign(e, T(1));
    l.wq = Mat<T>(e, e);
    l.wk = Mat<T>(e, e);
    l.wv = Mat<T>(e, e);
    l.wo = Mat<T>(e, e);
    l.w1 = Mat<T>(4 * e, e);
    l.w2 = Mat<T>(e, 4 * e);
  }
  m.final_norm_g.assign(e, T(1));
  m.out_proj = Mat<T>(v, e);

  rng::Stream rs(seed, 0xb71a);
  // Residual-branch outputs (wo, w2) get a 1/sqrt(2*layers) damping so the
  // stream stays well scaled at init.
  const double base = 0.02;
  const double resid =
      config.layers > 0 ? base / std::sqrt(2.0 * config.layers) : base;
  auto fill = [&](Mat<T>& w, double sd) {
    for (auto& x : w.a) x = static_cast<T>(rs.normal() * sd);
  };
  fill(m.tok_emb, base);
  fill(m.pos_emb, base);
  for (auto& l : m.layers) {
    fill(l.wq, base);
    fill(l.wk, base);
    fill(l.wv, base);
    fill(l.wo, resid);
    fill(l.w1, base);
    fill(l.w2, resid);
  }
  fill(m.out_proj, base);
  return m;
}

// --- rmsnorm / gelu -------------------------------------------------------

inline constexpr double kNormEps = 1e-5;

template <typename T>
inline T rms_inv(const T* x, int n) {
  T ms = T(0);
  for (int i = 0; i < n; ++i) ms += x[i] * x[i];
  return T(1) / std::sqrt(ms / T(n) + T(kNormEps));
}

template <typename T>
inline void rmsnorm(const T* x, const T* gain, T* y, int n, T inv_r) {
  for (int i = 0; i < n; ++i) y[i] = gain[i] * x[i] * inv_r;
}

// dL/dx for y = g * x * inv_r with inv_r = 1/sqrt(mean(x^2)+eps).
// Accumulates into dx and dgain.
template <typename T>
inline void rmsnorm_backward(const T* x, const T* gain, const T* dy, T inv_r,
                             int n, T* dx, T* dgain) {
  T s = T(0);
  for (int i = 0; i < n; ++i) s += dy[i] * gain[i] * x[i] * inv_r;
  s /= T(n);
  for (int i = 0; i < n; ++i) {
    if (dgain) dgain[i] += dy[i] * x[i] * inv_r;
    dx[i] += inv_r * (dy[i] * gain[i] - x[i] * inv_r * s);
  }
}

inline constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
inline constexpr double kGeluA = 0.044715;

template <typename T>
inline T gelu(T x) {
  T u = T(kGeluC) * (x + T(kGeluA) * x * x * x);
  return T(0.5) * x * (T(1) + std::tanh(u));
}

template <typename T>
inline T gelu_grad(T x) {
  T u = T(kGeluC) * (x + T(kGeluA) * x * x * x);
  T t = std::tanh(u);
  T du = T(kGeluC) * (T(1) + T(3) * T(kGeluA) * x * x);
  return T(0.5) * (T(1) + t) + T(0.5) * x * (T(1) - t * t) * du;
}

// --- incremental decoding -------------------------------------------------

template <typename T>
struct KvCache {
  int len = 0;
  std::vector<Mat<T>> k, v;  // per layer, capacity x E

  void init(const ModelConfig& c, int capacity) {
    len = 0;
    k.assign(c.layers, Mat<T>(capacity, c.embed_dim));
    v.assign(c.layers, Mat<T>(capacity, c.embed_dim));
  }
};

// Streams tokens through the model one position at a time. The decoder may
// sit on top of a read-only prefix cache, so many continuations can share
// one evaluated prefix (the trigger-search hot path).
template <typename T>
class Decoder {
 public:
  Decoder(const ModelParams<T>& m, const KvCache<T>* prefix, int prefix_len,
          int capacity)
      : m_(m), prefix_(prefix), prefix_len_(prefix_len) {
    if (prefix_len_ + capacity > m.config.context_len)
      throw LengthError("sequence of " + std::to_string(prefix_len_ + capacity) +
                        " tokens exceeds context length " +
                        std::to_string(m.config.context_len));
    local_.init(m.config, capacity);
    const int e = m.config.embed_dim;
    x_.assign(e, T(0));
    a_.assign(e, T(0));
    q_.assign(e, T(0));
    o_.assign(e, T(0));
    tmp_e_.assign(e, T(0));
    h1_.assign(4 * e, T(0));
    scores_.assign(m.config.context_len, T(0));
    h_final_.assign(e, T(0));
  }

  explicit Decoder(const ModelParams<T>& m, int capacity)
      : Decoder(m, nullptr, 0, capacity) {}

  int pos() const { return prefix_len_ + local_.len; }
  const KvCache<T>& cache() const { return local_; }
  const std::vector<T>& last_hidden() const { return h_final_; }

  // Appends `token` and returns the final-norm hidden state at its position.
  const std::vector<T>& step(TokenId token) {
    const int e = m_.config.embed_dim;
    const int heads = m_.config.heads;
    const int hd = e / heads;
    const T scale = T(1) / std::sqrt(T(hd));
    const int p = pos();
    if (p >= m_.config.context_len)
      throw LengthError("position " + std::to_string(p) +
                        " exceeds context length " +
                        std::to_string(m_.config.context_len));
    if (token < 0 || token >= m_.vocab_size_cached())
      throw IndexError("token id out of range: " + std::to_string(token));

    const T* te = m_.tok_emb.row(token);
    const T* pe = m_.pos_emb.row(p);
    for (int i = 0; i < e; ++i) x_[i] = te[i] + pe[i];

    for (int li = 0; li < m_.config.layers; ++li) {
      const auto& l = m_.layers[li];
      T inv_r = rms_inv(x_.data(), e);
      rmsnorm(x_.data(), l.norm1_g.data(), a_.data(), e, inv_r);

      std::fill(q_.begin(), q_.end(), T(0));
      matvec(l.wq, a_.data(), q_.data());
      T* krow = local_.k[li].row(local_.len);
      T* vrow = local_.v[li].row(local_.len);
      std::fill(krow, krow + e, T(0));
      std::fill(vrow, vrow + e, T(0));
      matvec(l.wk, a_.data(), krow);
      matvec(l.wv, a_.data(), vrow);

      const int pre_n = prefix_ ? prefix_len_ : 0;
      const int n_ctx = pre_n + local_.len + 1;
      for (int h = 0; h < heads; ++h) {
        const int off = h * hd;
        const T* qh = q_.data() + off;
        for (int u = 0; u < pre_n; ++u)
          scores_[u] = dot(qh, prefix_->k[li].row(u) + off, hd) * scale;
        for (int u = 0; u <= local_.len; ++u)
          scores_[pre_n + u] = dot(qh, local_.k[li].row(u) + off, hd) * scale;

        T mx = scores_[0];
        for (int u = 1; u < n_ctx; ++u) mx = std::max(mx, scores_[u]);
        T z = T(0);
        for (int u = 0; u < n_ctx; ++u) {
          scores_[u] = std::exp(scores_[u] - mx);
          z += scores_[u];
        }
        T* oh = o_.data() + off;
        std::fill(oh, oh + hd, T(0));
        for (int u = 0; u < pre_n; ++u)
          axpy(scores_[u] / z, prefix_->v[li].row(u) + off, oh, hd);
        for (int u = 0; u <= local_.len; ++u)
          axpy(scores_[pre_n + u] / z, local_.v[li].row(u) + off, oh, hd);
      }
      std::fill(tmp_e_.begin(), tmp_e_.end(), T(0));
      matvec(l.wo, o_.data(), tmp_e_.data());
      for (int i = 0; i < e; ++i) x_[i] += tmp_e_[i];

      inv_r = rms_inv(x_.data(), e);
      rmsnorm(x_.data(), l.norm2_g.data(), a_.data(), e, inv_r);
      std::fill(h1_.begin(), h1_.end(), T(0));
      matvec(l.w1, a_.data(), h1_.data());
      for (auto& h1 : h1_) h1 = gelu(h1);
      std::fill(tmp_e_.begin(), tmp_e_.end(), T(0));
      matvec(l.w2, h1_.data(), tmp_e_.data());
      for (int i = 0; i < e; ++i) x_[i] += tmp_e_[i];
    }
    T inv_r = rms_inv(x_.data(), e);
    rmsnorm(x_.data(), m_.final_norm_g.data(), h_final_.data(), e, inv_r);
    ++local_.len;
    return h_final_;
  }

 private:
  int vocab_size_cached() const { return m_.vocab_size(); }

  const ModelParams<T>& m_;
  const KvCache<T>* prefix_;
  int prefix_len_;
  KvCache<T> local_;
  std::vector<T> x_, a_, q_, o_, tmp_e_, h1_, scores_, h_final_;
};

// Writes the full next-token log-probability row for hidden state h.
template <typename T>
inline void logprob_row(const ModelParams<T>& m, const T* h, T* out_row) {
  const int v = m.vocab_size();
  for (int i = 0; i < v; ++i) out_row[i] = dot(m.out_proj.row(i), h, m.dim());
  log_softmax_inplace(out_row, v);
}

// log P(next | h) without materializing the row for the caller.
template <typename T>
inline T logprob_of(const ModelParams<T>& m, const T* h, TokenId next,
                    std::vector<T>& scratch) {
  const int v = m.vocab_size();
  if (next < 0 || next >= v)
    throw IndexError("token id out of range: " + std::to_string(next));
  scratch.resize(v);
  for (int i = 0; i < v; ++i) scratch[i] = dot(m.out_proj.row(i), h, m.dim());
  T target = scratch[next];
  T mx = scratch[0];
  for (int i = 1; i < v; ++i) mx = std::max(mx, scratch[i]);
  T z = T(0);
  for (int i = 0; i < v; ++i) z += std::exp(scratch[i] - mx);
  return target - (mx + std::log(z));
}

// Row i is the log-probability vector over V for position i+1 (conditioned
// on seq[0..i]). Rows exponentiate and sum to 1.
template <typename T>
Mat<T> forward_logprobs(const ModelParams<T>& m, const TokenSequence& seq) {
  if (static_cast<int>(seq.size()) > m.config.context_len)
    throw LengthError("sequence of " + std::to_string(seq.size()) +
                      " tokens exceeds context length " +
                      std::to_string(m.config.context_len));
  Mat<T> out(static_cast<int>(seq.size()), m.vocab_size());
  Decoder<T> dec(m, static_cast<int>(seq.size()));
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto& h = dec.step(seq[i]);
    logprob_row(m, h.data(), out.row(static_cast<int>(i)));
  }
  return out;
}

// A fully evaluated prefix that many continuations can be scored against.
template <typename T>
struct PrefixState {
  KvCache<T> cache;
  std::vector<T> last_hidden;
  int len = 0;
};

template <typename T>
PrefixState<T> make_prefix(const ModelParams<T>& m, const TokenSequence& prefix) {
  if (prefix.empty()) throw ValidationError("prefix must be non-empty");
  Decoder<T> dec(m, static_cast<int>(prefix.size()));
  for (TokenId id : prefix) dec.step(id);
  PrefixState<T> s;
  s.cache = dec.cache();
  s.last_hidden = dec.last_hidden();
  s.len = static_cast<int>(prefix.size());
  return s;
}

// Sum over continuation positions of log P(token | everything before it).
template <typename T>
T score_continuation(const ModelParams<T>& m, const PrefixState<T>& pre,
                     const TokenSequence& cont, std::vector<T>& scratch) {
  if (cont.empty()) return T(0);
  if (pre.len + static_cast<int>(cont.size()) > m.config.context_len)
    throw LengthError("prefix+continuation of " +
                      std::to_string(pre.len + cont.size()) +
                      " tokens exceeds context length " +
                      std::to_string(m.config.context_len));
  T total = logprob_of(m, pre.last_hidden.data(), cont[0], scratch);
  if (cont.size() == 1) return total;
  Decoder<T> dec(m, &pre.cache, pre.len, static_cast<int>(cont.size()) - 1);
  for (std::size_t i = 0; i + 1 < cont.size(); ++i) {
    const auto& h = dec.step(cont[i]);
    total += logprob_of(m, h.data(), cont[i + 1], scratch);
  }
  return total;
}

template <typename T>
T sequence_logprob(const ModelParams<T>& m, const TokenSequence& prefix,
                   const TokenSequence& cont) {
  if (cont.empty()) return T(0);
  auto pre = make_prefix(m, prefix);
  std::vector<T> scratch;
  return score_continuation(m, pre, cont, scratch);
}

}  // namespace triggerforge::lm

#endif  // TRIGGERFORGE_MODEL_HPP_
