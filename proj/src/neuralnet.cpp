// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "discgan/neuralnet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "discgan/format.hpp"

namespace discgan {

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::tanh:
      return "tanh";
    case Activation::relu:
      return "relu";
    case Activation::identity:
      return "identity";
  }
  return "identity";
}

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "relu") return Activation::relu;
  if (name == "identity") return Activation::identity;
  throw DataError("unknown activation '" + std::string(name) + "'");
}

std::size_t MlpParams::in_dim() const { return layers.empty() ? 0 : layers.front().w.cols(); }
std::size_t MlpParams::out_dim() const { return layers.empty() ? 0 : layers.back().w.rows(); }

std::size_t MlpParams::num_params() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.w.data().size() + l.b.size();
  return n;
}

void MlpParams::validate() const {
  if (layers.empty()) throw DataError("network has no layers");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const Layer& l = layers[k];
    if (l.w.empty()) throw DataError("layer " + std::to_string(k) + " has an empty weight matrix");
    if (l.b.size() != l.w.rows()) {
      throw DataError("layer " + std::to_string(k) + " bias length does not match weights");
    }
    if (k > 0 && l.w.cols() != layers[k - 1].w.rows()) {
      throw DataError("layer " + std::to_string(k) + " input dim does not chain");
    }
    for (double x : l.w.data())
      if (!std::isfinite(x)) throw DataError("non-finite weight in layer " + std::to_string(k));
    for (double x : l.b)
      if (!std::isfinite(x)) throw DataError("non-finite bias in layer " + std::to_string(k));
  }
}

double MlpParams::max_abs() const {
  double m = 0.0;
  for (const auto& l : layers) {
    for (double x : l.w.data()) m = std::max(m, std::abs(x));
    for (double x : l.b) m = std::max(m, std::abs(x));
  }
  return m;
}

double MlpParams::l2_norm() const { return norm2(flatten()); }

std::vector<double> MlpParams::flatten() const {
  std::vector<double> out;
  out.reserve(num_params());
  for (const auto& l : layers) {
    out.insert(out.end(), l.w.data().begin(), l.w.data().end());
    out.insert(out.end(), l.b.begin(), l.b.end());
  }
  return out;
}

void MlpParams::assign(std::span<const double> flat) {
  if (flat.size() != num_params()) throw DataError("flat parameter vector has wrong length");
  std::size_t pos = 0;
  for (auto& l : layers) {
    for (double& x : l.w.data()) x = flat[pos++];
    for (double& x : l.b) x = flat[pos++];
  }
}

GradBuffer GradBuffer::zeros_like(const MlpParams& net) {
  GradBuffer g;
  for (const auto& l : net.layers) {
    g.dw.emplace_back(l.w.rows(), l.w.cols());
    g.db.emplace_back(l.b.size(), 0.0);
  }
  return g;
}

std::vector<double> GradBuffer::flatten() const {
  std::vector<double> out;
  for (std::size_t k = 0; k < dw.size(); ++k) {
    out.insert(out.end(), dw[k].data().begin(), dw[k].data().end());
    out.insert(out.end(), db[k].begin(), db[k].end());
  }
  return out;
}

void GradBuffer::add(const GradBuffer& other) {
  if (other.dw.size() != dw.size()) throw DataError("gradient buffer shape mismatch");
  for (std::size_t k = 0; k < dw.size(); ++k) {
    if (other.dw[k].rows() != dw[k].rows() || other.dw[k].cols() != dw[k].cols()) {
      throw DataError("gradient buffer shape mismatch");
    }
    auto& a = dw[k].data();
    const auto& b = other.dw[k].data();
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    for (std::size_t i = 0; i < db[k].size(); ++i) db[k][i] += other.db[k][i];
  }
}

bool GradBuffer::matches(const MlpParams& net) const {
  if (dw.size() != net.layers.size() || db.size() != net.layers.size()) return false;
  for (std::size_t k = 0; k < dw.size(); ++k) {
    const auto& l = net.layers[k];
    if (dw[k].rows() != l.w.rows() || dw[k].cols() != l.w.cols() || db[k].size() != l.b.size())
      return false;
  }
  return true;
}

MlpParams init_mlp(const std::vector<std::size_t>& dims, const std::vector<Activation>& acts,
                   RngStream& rng, bool unit_ball_output) {
  if (dims.size() < 2 || acts.size() + 1 != dims.size()) {
    throw DataError("init_mlp needs one activation per layer");
  }
  MlpParams net;
  net.unit_ball_output = unit_ball_output;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    const std::size_t in = dims[k], out = dims[k + 1];
    if (in == 0 || out == 0) throw DataError("layer dimensions must be positive");
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    Layer l{Matrix(out, in), std::vector<double>(out, 0.0), acts[k]};
    for (double& x : l.w.data()) x = rng.uniform(-bound, bound);
    net.layers.push_back(std::move(l));
  }
  return net;
}

namespace {

double activate(Activation a, double z) {
  switch (a) {
    case Activation::tanh:
      return std::tanh(z);
    case Activation::relu:
      return z > 0.0 ? z : 0.0;
    case Activation::identity:
      return z;
  }
  return z;
}

// Derivative expressed through the activation output y.
double activation_slope(Activation a, double y) {
  switch (a) {
    case Activation::tanh:
      return 1.0 - y * y;
    case Activation::relu:
      return y > 0.0 ? 1.0 : 0.0;
    case Activation::identity:
      return 1.0;
  }
  return 1.0;
}

}  // namespace

ForwardResult forward(const MlpParams& net, const Matrix& x) {
  if (net.layers.empty()) throw DataError("network has no layers");
  if (x.cols() != net.in_dim()) {
    throw DataError("input has " + std::to_string(x.cols()) + " columns, network expects " +
                    std::to_string(net.in_dim()));
  }
  ForwardResult res;
  Matrix cur = x;
  for (const auto& l : net.layers) {
    const std::size_t out = l.w.rows(), in = l.w.cols();
    Matrix next(cur.rows(), out);
    for (std::size_t r = 0; r < cur.rows(); ++r) {
      auto xr = cur.row(r);
      for (std::size_t o = 0; o < out; ++o) {
        double z = l.b[o];
        for (std::size_t i = 0; i < in; ++i) z += l.w(o, i) * xr[i];
        next(r, o) = activate(l.act, z);
      }
    }
    res.tape.inputs.push_back(std::move(cur));
    res.tape.outputs.push_back(next);
    cur = std::move(next);
  }
  if (net.unit_ball_output) {
    for (std::size_t r = 0; r < cur.rows(); ++r) {
      auto row = cur.row(r);
      const double n = norm2(row);
      if (n > 1.0)
        for (double& v : row) v /= n;
    }
  }
  res.tape.final_output = cur;
  res.y = std::move(cur);
  return res;
}

Matrix predict(const MlpParams& net, const Matrix& x) { return forward(net, x).y; }

BackwardResult backward(const MlpParams& net, const Tape& tape, const Matrix& dy) {
  const std::size_t nl = net.layers.size();
  if (tape.inputs.size() != nl || tape.outputs.size() != nl) {
    throw DataError("tape does not match network");
  }
  for (std::size_t k = 0; k < nl; ++k) {
    const auto& l = net.layers[k];
    if (tape.inputs[k].cols() != l.w.cols() || tape.outputs[k].cols() != l.w.rows()) {
      throw DataError("stale tape: layer " + std::to_string(k) + " shape changed");
    }
  }
  const Matrix& y_last = tape.outputs.back();
  if (dy.rows() != y_last.rows() || dy.cols() != y_last.cols()) {
    throw DataError("output gradient shape " + shape_string(dy) + " does not match output " +
                    shape_string(y_last));
  }

  Matrix delta = dy;
  if (net.unit_ball_output) {
    // y = z / |z| when |z| > 1: dz = (dy - y (y . dy)) / |z|.
    for (std::size_t r = 0; r < delta.rows(); ++r) {
      auto z = y_last.row(r);
      const double n = norm2(z);
      if (n <= 1.0) continue;
      auto y = tape.final_output.row(r);
      auto g = delta.row(r);
      const double proj = dot(y, g);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = (g[i] - y[i] * proj) / n;
    }
  }

  BackwardResult res;
  res.grads = GradBuffer::zeros_like(net);
  for (std::size_t k = nl; k-- > 0;) {
    const auto& l = net.layers[k];
    const Matrix& in = tape.inputs[k];
    const Matrix& out = tape.outputs[k];
    const std::size_t no = l.w.rows(), ni = l.w.cols();
    Matrix dprev(in.rows(), ni);
    Matrix& dw = res.grads.dw[k];
    auto& db = res.grads.db[k];
    for (std::size_t r = 0; r < in.rows(); ++r) {
      auto xr = in.row(r);
      auto dp = dprev.row(r);
      for (std::size_t o = 0; o < no; ++o) {
        const double dz = delta(r, o) * activation_slope(l.act, out(r, o));
        if (dz == 0.0) continue;
        db[o] += dz;
        for (std::size_t i = 0; i < ni; ++i) {
          dw(o, i) += dz * xr[i];
          dp[i] += dz * l.w(o, i);
        }
      }
    }
    delta = std::move(dprev);
  }
  res.dx = std::move(delta);
  return res;
}

MlpParams clip_weights(const MlpParams& net, double c) {
  if (!(c > 0.0)) throw DataError("clip constant must be positive");
  MlpParams out = net;
  for (auto& l : out.layers) {
    for (double& x : l.w.data()) x = std::clamp(x, -c, c);
    for (double& x : l.b) x = std::clamp(x, -c, c);
  }
  return out;
}

OptimizerState make_optimizer(OptimizerKind kind, double lr, const MlpParams& net) {
  if (!(lr >= 0.0)) throw DataError("learning rate must be nonnegative");
  OptimizerState s;
  s.kind = kind;
  s.lr = lr;
  if (kind == OptimizerKind::adam) {
    s.m = GradBuffer::zeros_like(net);
    s.v = GradBuffer::zeros_like(net);
  }
  return s;
}

namespace {

template <typename Fn>
void for_each_param(MlpParams& net, const GradBuffer& g, Fn&& fn) {
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    auto& w = net.layers[k].w.data();
    for (std::size_t i = 0; i < w.size(); ++i) fn(w[i], g.dw[k].data()[i], k, false, i);
    auto& b = net.layers[k].b;
    for (std::size_t i = 0; i < b.size(); ++i) fn(b[i], g.db[k][i], k, true, i);
  }
}

}  // namespace

void apply_update(MlpParams& net, const GradBuffer& grads, OptimizerState& opt, int direction) {
  if (direction != 1 && direction != -1) throw DataError("update direction must be +1 or -1");
  if (!grads.matches(net)) throw DataError("gradient shape does not match parameters");
  const double dir = static_cast<double>(direction);
  ++opt.step;
  if (opt.kind == OptimizerKind::sgd) {
    for_each_param(net, grads, [&](double& p, double g, std::size_t, bool, std::size_t) {
      p += dir * opt.lr * g;
    });
    return;
  }
  if (!opt.m.matches(net) || !opt.v.matches(net)) {
    throw DataError("optimizer moments do not match parameters");
  }
  const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
  const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
  for_each_param(net, grads, [&](double& p, double g, std::size_t k, bool is_bias, std::size_t i) {
    double& m = is_bias ? opt.m.db[k][i] : opt.m.dw[k].data()[i];
    double& v = is_bias ? opt.v.db[k][i] : opt.v.dw[k].data()[i];
    m = opt.beta1 * m + (1.0 - opt.beta1) * g;
    v = opt.beta2 * v + (1.0 - opt.beta2) * g * g;
    const double mhat = m / bc1, vhat = v / bc2;
    p += dir * opt.lr * mhat / (std::sqrt(vhat) + opt.eps);
  });
}

std::string to_checkpoint_json(const MlpParams& net) {
  std::string s = "{\"layers\":[";
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const Layer& l = net.layers[k];
    if (k) s += ',';
    s += "{\"w\":[";
    for (std::size_t o = 0; o < l.w.rows(); ++o) {
      if (o) s += ',';
      s += '[';
      for (std::size_t i = 0; i < l.w.cols(); ++i) {
        if (i) s += ',';
        s += format_double(l.w(o, i));
      }
      s += ']';
    }
    s += "],\"b\":[";
    for (std::size_t o = 0; o < l.b.size(); ++o) {
      if (o) s += ',';
      s += format_double(l.b[o]);
    }
    s += "],\"act\":\"";
    s += activation_name(l.act);
    s += "\"}";
  }
  s += ']';
  if (net.unit_ball_output) s += ",\"unit_ball_output\":true";
  s += "}\n";
  return s;
}

MlpParams from_checkpoint_json(std::string_view text) {
  MlpParams net;
  try {
    const auto doc = nlohmann::json::parse(text);
    for (const auto& jl : doc.at("layers")) {
      const auto& jw = jl.at("w");
      const std::size_t out = jw.size();
      const std::size_t in = out == 0 ? 0 : jw.at(0).size();
      Layer l{Matrix(out, in), {}, parse_activation(jl.at("act").get<std::string>())};
      for (std::size_t o = 0; o < out; ++o) {
        if (jw.at(o).size() != in) throw DataError("ragged weight matrix in checkpoint");
        for (std::size_t i = 0; i < in; ++i) l.w(o, i) = jw.at(o).at(i).get<double>();
      }
      l.b = jl.at("b").get<std::vector<double>>();
      net.layers.push_back(std::move(l));
    }
    net.unit_ball_output = doc.value("unit_ball_output", false);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
  net.validate();
  return net;
}

void save_checkpoint(const MlpParams& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path);
  out << to_checkpoint_json(net);
}

MlpParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read checkpoint " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_checkpoint_json(ss.str());
}

}  // namespace discgan
