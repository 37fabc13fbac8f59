// Copyright 2026 The gaussmeas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Problem files and the task dispatch table behind the gaussmeas tool.
//
//   {"version": "1",
//    "entities": {"name": {"kind": "observable", ...}, ...},
//    "tasks": [{"op": "classify", "args": {"observable": "name"}, "output_name": "c"}]}
//
// Strings under entity slots (observable, state, set, members, ...) are
// references to named entities or to outputs of earlier tasks; objects there
// are inline entities.

#include <chrono>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "json_io.hpp"

namespace gaussmeas::cli {

using io::json;

enum ExitCode : int { kExitOk = 0, kExitParse = 2, kExitValidation = 3, kExitRuntime = 4 };

inline const char* kFormatVersion = "1";

/// Unresolvable reference, unknown op or malformed entity.
class ValidationError : public Error {
 public:
  using Error::Error;
};

struct RunOptions {
  std::uint64_t seed = 0;
  double tol = kDefaultTol;
  int cutoff = fock::kDefaultCutoff;
  bool timing = false;
};

struct RunResult {
  json report;
  int exit_code = kExitOk;
};

inline const std::set<std::string>& slot_keys() {
  static const std::set<std::string> keys = {
      "target", "observable", "observables", "state",  "states", "channel",
      "set",    "members",    "dilation",    "distribution", "fock", "first",
      "second", "bosonic",    "ancilla",     "base",   "sigma"};
  return keys;
}

/// Collects entity references (strings directly under slot keys).
inline void collect_refs(const json& j, bool in_slot, std::vector<std::string>& out) {
  if (j.is_string()) {
    if (in_slot) out.push_back(j.get<std::string>());
  } else if (j.is_array()) {
    for (const auto& e : j) collect_refs(e, in_slot, out);
  } else if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      collect_refs(it.value(), slot_keys().count(it.key()) > 0, out);
    }
  }
}

class Context {
 public:
  explicit Context(RunOptions options) : options_(options) {}

  const RunOptions& options() const noexcept { return options_; }
  double tol(const json& args) const {
    return args.contains("tol") ? io::decode_number(args.at("tol"), "tol") : options_.tol;
  }
  int cutoff(const json& args) const {
    return args.contains("cutoff") ? io::decode_int(args.at("cutoff"), "cutoff") : options_.cutoff;
  }

  bool has(const std::string& name) const { return entities_.count(name) > 0; }
  void define(const std::string& name, json value) { entities_[name] = std::move(value); }
  const json& lookup(const std::string& name) const {
    const auto it = entities_.find(name);
    if (it == entities_.end()) throw ValidationError("undefined entity '" + name + "'");
    return it->second;
  }

  /// The entity behind a reference or inline value.
  const json& resolve(const json& j) const { return j.is_string() ? lookup(j.get<std::string>()) : j; }

  /// Referenced entity names, transitively.
  std::vector<std::string> closure(const json& args) const {
    std::vector<std::string> pending;
    collect_refs(args, false, pending);
    std::set<std::string> seen;
    std::vector<std::string> out;
    while (!pending.empty()) {
      const std::string name = pending.back();
      pending.pop_back();
      if (!seen.insert(name).second) continue;
      out.push_back(name);
      collect_refs(lookup(name), false, pending);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // Typed decoders. Each accepts a reference or an inline entity.

  std::pair<Vector, Matrix> raw_state(const json& ref) const {
    const json& j = resolve(ref);
    if (j.contains("preset")) {
      const std::string p = io::decode_string(j.at("preset"), "state preset");
      if (p == "vacuum") {
        const int n = io::decode_int(io::field(j, "n_modes"), "n_modes");
        if (n < 1) throw DimensionError("vacuum: n_modes must be >= 1");
        return {Vector::Zero(2 * n), Matrix::Identity(2 * n, 2 * n)};
      }
      if (p == "coherent") {
        const Vector m = io::decode_vector(io::field(j, "m"), "m");
        return {m, Matrix::Identity(m.size(), m.size())};
      }
      if (p == "squeezed") {
        const GaussianState s = GaussianState::squeezed(io::decode_number(io::field(j, "r"), "r"));
        return {s.m(), s.v()};
      }
      if (p == "thermal") {
        const int n = io::decode_int(io::field(j, "n_modes"), "n_modes");
        const double nu = io::decode_number(io::field(j, "nu"), "nu");
        if (n < 1) throw DimensionError("thermal: n_modes must be >= 1");
        return {Vector::Zero(2 * n), nu * Matrix::Identity(2 * n, 2 * n)};
      }
      throw io::SchemaError("unknown state preset '" + p + "'");
    }
    const Vector m = io::decode_vector(io::field(j, "m"), "m");
    const Matrix v = io::decode_matrix(io::field(j, "v"), "v");
    if (v.rows() != m.size() || v.cols() != m.size() || m.size() % 2 != 0 || m.size() == 0) {
      throw DimensionError("state: m must lie in R^{2N} and v be 2N x 2N");
    }
    if (j.contains("n_modes") && io::decode_int(j.at("n_modes")) * 2 != m.size()) {
      throw DimensionError("state: n_modes does not match m");
    }
    return {m, v};
  }

  GaussianState state(const json& ref, double tol) const {
    auto [m, v] = raw_state(ref);
    return GaussianState(m, v, tol);
  }

  GaussianObservable observable(const json& ref) const {
    const json& j = resolve(ref);
    if (j.contains("preset")) {
      const std::string p = io::decode_string(j.at("preset"), "observable preset");
      const double noise = j.contains("noise") ? io::decode_number(j.at("noise"), "noise") : 0.0;
      if (p == "q_function") return q_function(io::decode_int(io::field(j, "n_modes"), "n_modes"));
      if (p == "rotated_quadrature") {
        return rotated_quadrature(io::decode_number(io::field(j, "theta"), "theta"), noise);
      }
      if (p == "squeezed_quadrature") {
        return squeezed_quadrature(io::decode_number(io::field(j, "theta"), "theta"),
                                   io::decode_number(io::field(j, "r"), "r"), noise);
      }
      if (p == "generalized_quadrature") {
        return generalized_quadrature(io::decode_vector(io::field(j, "a"), "a"), noise);
      }
      if (p == "covariant") {
        return covariant_observable(io::decode_matrix(io::field(j, "b0"), "b0"),
                                    io::decode_vector(io::field(j, "v0"), "v0"));
      }
      throw io::SchemaError("unknown observable preset '" + p + "'");
    }
    GaussianObservable obs(io::decode_matrix(io::field(j, "a0"), "a0"),
                           io::decode_matrix(io::field(j, "b0"), "b0"),
                           io::decode_vector(io::field(j, "v0"), "v0"));
    if (j.contains("n_modes") && io::decode_int(j.at("n_modes")) != obs.n_modes()) {
      throw DimensionError("observable: n_modes does not match a0");
    }
    if (j.contains("outcome_dim") && io::decode_int(j.at("outcome_dim")) != obs.outcome_dim()) {
      throw DimensionError("observable: outcome_dim does not match a0");
    }
    return obs;
  }

  GaussianChannel channel(const json& ref) const {
    const json& j = resolve(ref);
    if (j.contains("preset")) {
      const std::string p = io::decode_string(j.at("preset"), "channel preset");
      const int n = io::decode_int(io::field(j, "n_modes"), "n_modes");
      if (n < 1) throw DimensionError("channel preset: n_modes must be >= 1");
      if (p == "identity") return GaussianChannel::identity(n);
      if (p == "attenuator") {
        return GaussianChannel::attenuator(n, io::decode_number(io::field(j, "eta"), "eta"));
      }
      throw io::SchemaError("unknown channel preset '" + p + "'");
    }
    const Matrix a = io::decode_matrix(io::field(j, "a"), "a");
    CMatrix b;
    if (j.contains("b")) {
      b = io::decode_cmatrix(j.at("b"), "b");
    } else {
      const Matrix re = io::decode_matrix(io::field(j, "b_re"), "b_re");
      Matrix im = Matrix::Zero(re.rows(), re.cols());
      if (j.contains("b_im")) im = io::decode_matrix(j.at("b_im"), "b_im");
      if (im.rows() != re.rows() || im.cols() != re.cols()) {
        throw DimensionError("channel: b_re and b_im differ in shape");
      }
      b = CMatrix(re.rows(), re.cols());
      b.real() = re;
      b.imag() = im;
    }
    return GaussianChannel(a, b, io::decode_vector(io::field(j, "v"), "v"));
  }

  ObservableSet observable_set(const json& ref) const {
    const json& j = resolve(ref);
    ObservableSet set;
    if (j.is_array()) {
      for (const auto& m : j) set.add(observable(m));
      return set;
    }
    if (j.contains("preset")) {
      const std::string p = io::decode_string(j.at("preset"), "set preset");
      if (p != "rotated_grid") throw io::SchemaError("unknown set preset '" + p + "'");
      const int count = io::decode_int(io::field(j, "count"), "count");
      if (count < 1) throw io::SchemaError("rotated_grid: count must be >= 1");
      const double start = j.contains("start") ? io::decode_number(j.at("start")) : 0.0;
      const double stop = j.contains("stop") ? io::decode_number(j.at("stop")) : std::numbers::pi;
      for (int k = 0; k < count; ++k) set.add(rotated_quadrature(start + (stop - start) * k / count));
      return set;
    }
    const json& members = io::field(j, "members");
    if (!members.is_array()) throw io::SchemaError("set: members must be an array");
    for (const auto& m : members) set.add(observable(m));
    return set;
  }

  DilationSpec dilation(const json& ref, double tol) const {
    const json& j = resolve(ref);
    Matrix s;
    if (j.contains("s")) {
      s = io::decode_matrix(j.at("s"), "s");
    } else {
      const int total = io::decode_int(io::field(j, "total_modes"), "total_modes");
      if (total < 1) throw DimensionError("dilation: total_modes must be >= 1");
      s = Matrix::Identity(2 * total, 2 * total);
      for (const auto& op : io::field(j, "s_ops")) s = s * elementary(op, total);
    }
    Vector d = Vector::Zero(s.rows());
    if (j.contains("d")) d = io::decode_vector(j.at("d"), "d");
    std::optional<GaussianState> ancilla;
    if (j.contains("ancilla") && !j.at("ancilla").is_null()) ancilla = state(j.at("ancilla"), tol);
    return DilationSpec(s, d, ancilla, io::decode_int(io::field(j, "kept_modes"), "kept_modes"), tol);
  }

  GaussianDistribution distribution(const json& ref) const {
    const json& j = resolve(ref);
    GaussianDistribution d{io::decode_vector(io::field(j, "mean"), "mean"),
                           io::decode_matrix(io::field(j, "cov"), "cov")};
    if (d.cov.rows() != d.mean.size() || d.cov.cols() != d.mean.size()) {
      throw DimensionError("distribution: cov must be square and match mean");
    }
    return d;
  }

  fock::FockOperator fock_operator(const json& ref, int default_cutoff, double tol) const {
    const json& j = resolve(ref);
    const int cutoff = j.contains("cutoff") ? io::decode_int(j.at("cutoff"), "cutoff") : default_cutoff;
    if (cutoff < 2) throw DimensionError("fock: cutoff must be >= 2");
    if (j.contains("preset")) {
      const std::string p = io::decode_string(j.at("preset"), "fock preset");
      if (p == "vacuum") return fock::vacuum(cutoff);
      if (p == "number") return fock::number_state(io::decode_int(io::field(j, "n"), "n"), cutoff);
      if (p == "coherent") return fock::coherent(io::decode_vector(io::field(j, "m"), "m"), cutoff);
      if (p == "squeezed") return fock::squeezed_vacuum(io::decode_number(io::field(j, "r"), "r"), cutoff);
      if (p == "gaussian") return fock::gaussian_state(state(io::field(j, "state"), tol), cutoff);
      throw io::SchemaError("unknown fock preset '" + p + "'");
    }
    const CMatrix m = io::decode_cmatrix(j, "fock matrix");
    if (m.rows() != cutoff || m.cols() != cutoff) {
      throw DimensionError("fock: matrix must be cutoff x cutoff");
    }
    return {cutoff, m};
  }

  BosonicObservable bosonic(const json& ref, double tol) const {
    const json& j = resolve(ref);
    const std::string family = io::decode_string(io::field(j, "family"), "family");
    if (family == "covariant_fock") {
      return BosonicObservable(CovariantFock{fock_operator(io::field(j, "sigma"), options_.cutoff, tol)});
    }
    if (family != "smeared") throw io::SchemaError("unknown bosonic family '" + family + "'");
    const GaussianObservable base = observable(io::field(j, "base"));
    NoiseModel noise = NoNoise{};
    if (j.contains("noise")) {
      const json& nj = j.at("noise");
      const std::string kind = io::decode_string(io::field(nj, "kind"), "noise kind");
      if (kind == "gaussian") {
        noise = GaussianNoise{io::decode_matrix(io::field(nj, "c"), "c"),
                              io::decode_vector(io::field(nj, "d"), "d")};
      } else if (kind == "fejer") {
        noise = FejerNoise{io::decode_vector(io::field(nj, "widths"), "widths")};
      } else if (kind == "fejer_comb") {
        FejerComb comb;
        comb.direction = io::decode_vector(io::field(nj, "direction"), "direction");
        comb.spacing = io::decode_number(io::field(nj, "spacing"), "spacing");
        comb.width = io::decode_number(io::field(nj, "width"), "width");
        comb.decay = nj.contains("decay") ? io::decode_number(nj.at("decay"), "decay") : 0.0;
        noise = comb;
      } else if (kind != "none") {
        throw io::SchemaError("unknown noise kind '" + kind + "'");
      }
    }
    return BosonicObservable(SmearedGaussian{base, noise}, tol);
  }

  std::vector<BosonicObservable> bosonic_set(const json& ref, double tol) const {
    const json& j = resolve(ref);
    const json& members = j.is_array() ? j : io::field(j, "members");
    if (!members.is_array()) throw io::SchemaError("bosonic set: members must be an array");
    std::vector<BosonicObservable> out;
    for (const auto& m : members) out.push_back(bosonic(m, tol));
    return out;
  }

  /// Structural check of an entity by its declared kind.
  void check_entity(const json& j) const {
    const std::string kind = io::decode_string(io::field(j, "kind"), "kind");
    const double tol = options_.tol;
    if (kind == "state") {
      raw_state(j);
    } else if (kind == "observable") {
      observable(j);
    } else if (kind == "channel") {
      channel(j);
    } else if (kind == "set") {
      observable_set(j);
    } else if (kind == "dilation") {
      dilation(j, tol);
    } else if (kind == "distribution") {
      distribution(j);
    } else if (kind == "fock") {
      fock_operator(j, options_.cutoff, tol);
    } else if (kind == "bosonic") {
      bosonic(j, tol);
    } else if (kind == "bosonic_set") {
      bosonic_set(j, tol);
    } else {
      throw io::SchemaError("unknown entity kind '" + kind + "'");
    }
  }

 private:
  static Matrix elementary(const json& op, int total) {
    const std::string type = io::decode_string(io::field(op, "type"), "s_ops type");
    auto mode = [&](const char* key) {
      const int m = io::decode_int(io::field(op, key), key);
      if (m < 0 || m >= total) throw DimensionError("s_ops: mode index out of range");
      return m;
    };
    if (type == "rotation") {
      return symplectic_rotation(total, mode("mode"), io::decode_number(io::field(op, "angle"), "angle"));
    }
    if (type == "squeezer") {
      return symplectic_squeezer(total, mode("mode"), io::decode_number(io::field(op, "r"), "r"));
    }
    if (type == "beam_splitter") {
      return symplectic_beam_splitter(total, mode("i"), mode("j"),
                                      io::decode_number(io::field(op, "angle"), "angle"));
    }
    throw io::SchemaError("unknown s_ops type '" + type + "'");
  }

  RunOptions options_;
  std::map<std::string, json> entities_;
};

// Task handlers.

using Handler = std::function<json(const Context&, const json&)>;

struct OpInfo {
  std::string name;
  Handler handler;
  std::vector<std::string> library_ops;  // library operations reached
};

namespace ops {

inline std::vector<double> grid_values(const json& g) {
  const double start = io::decode_number(io::field(g, "start"), "start");
  const double stop = io::decode_number(io::field(g, "stop"), "stop");
  std::vector<double> out;
  if (g.contains("step")) {
    const double step = io::decode_number(g.at("step"), "step");
    if (!(step > 0.0)) throw io::SchemaError("grid: step must be > 0");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long k = 0; k < count; ++k) out.push_back(start + step * static_cast<double>(k));
    return out;
  }
  const int count = io::decode_int(io::field(g, "count"), "count");
  const bool endpoint = g.contains("endpoint") ? g.at("endpoint").get<bool>() : true;
  if (count < 1) throw io::SchemaError("grid: count must be >= 1");
  const double denom = endpoint ? std::max(1, count - 1) : count;
  for (int k = 0; k < count; ++k) out.push_back(start + (stop - start) * k / denom);
  return out;
}

inline std::vector<double> values_or_grid(const json& args, const char* list, const char* grid) {
  if (args.contains(list)) {
    const Vector v = io::decode_vector(args.at(list), list);
    return {v.data(), v.data() + v.size()};
  }
  if (args.contains(grid)) return grid_values(args.at(grid));
  return {};
}

inline GridSpec grid_spec(const json& args) {
  GridSpec spec;
  if (args.contains("grid")) {
    const json& g = args.at("grid");
    if (g.contains("points")) spec.points = io::decode_int(g.at("points"), "points");
    if (g.contains("range")) spec.range = io::decode_number(g.at("range"), "range");
  }
  return spec;
}

inline json witness_json(const std::optional<WitnessPair>& w) {
  if (!w) return nullptr;
  double max_diff = 0.0;
  for (const auto& obs : w->certified_against.members()) {
    const auto a = pushforward(obs, w->state_a);
    const auto b = pushforward(obs, w->state_b);
    max_diff = std::max({max_diff, detail::max_abs(Vector(a.mean - b.mean)),
                         detail::max_abs(Matrix(a.cov - b.cov))});
  }
  return {{"state_a", io::encode(w->state_a)},
          {"state_b", io::encode(w->state_b)},
          {"type", w->mean_shift ? "mean-shift" : "covariance"},
          {"max_statistics_difference", max_diff},
          {"state_distance", (w->state_a.m() - w->state_b.m()).norm() +
                                 (w->state_a.v() - w->state_b.v()).norm()}};
}

inline json classification_json(const Classification& c) {
  return {{"commutative", c.commutative},
          {"sharp", c.sharp},
          {"covariant", c.covariant},
          {"ic", c.informationally_complete}};
}

inline std::vector<Vector> standard_grid(double radius, int rings, int angles) {
  std::vector<Vector> out;
  out.push_back(Vector::Zero(2));
  for (int r = 1; r <= rings; ++r) {
    for (int a = 0; a < angles; ++a) {
      const double rad = radius * r / rings, phi = 2.0 * std::numbers::pi * a / angles;
      Vector x(2);
      x << rad * std::cos(phi), rad * std::sin(phi);
      out.push_back(x);
    }
  }
  return out;
}

inline json op_validate(const Context& ctx, const json& args) {
  const double tol = ctx.tol(args);
  const json& target = ctx.resolve(io::field(args, "target"));
  const std::string kind = io::decode_string(io::field(target, "kind"), "kind");
  json out = {{"kind", kind}};
  if (kind == "observable") {
    out.update(io::encode(validate_observable(ctx.observable(target), tol)));
  } else if (kind == "channel") {
    out.update(io::encode(validate_channel(ctx.channel(target), tol)));
  } else if (kind == "state") {
    const auto [m, v] = ctx.raw_state(target);
    const CMatrix test = detail::to_complex(v) + Complex(0.0, 1.0) * detail::to_complex(omega_for_dim(v.rows()));
    out.update(io::encode(psd_report(test, tol)));
    out["valid"] = out["valid"].get<bool>() && detail::is_symmetric(v, tol);
  } else if (kind == "fock") {
    out.update(io::encode(fock::validate_density(ctx.fock_operator(target, ctx.cutoff(args), tol))));
  } else if (kind == "dilation") {
    try {
      const auto ch = channel_from_dilation(ctx.dilation(target, tol), tol);
      out.update(io::encode(validate_channel(ch, tol)));
    } catch (const InvalidInputError& e) {
      out["valid"] = false;
      out["reason"] = e.what();
    } catch (const ConsistencyError& e) {
      out["valid"] = false;
      out["reason"] = e.what();
    }
  } else {
    throw io::SchemaError("validate: unsupported target kind '" + kind + "'");
  }
  return out;
}

inline json op_omega(const Context&, const json& args) {
  return {{"omega", io::encode(omega(io::decode_int(io::field(args, "n_modes"), "n_modes")).matrix())}};
}

inline json op_is_symplectic(const Context& ctx, const json& args) {
  const Matrix s = io::decode_matrix(io::field(args, "s"), "s");
  return {{"symplectic", is_symplectic(s, ctx.tol(args))}};
}

inline json op_psd_check(const Context& ctx, const json& args) {
  const auto r = psd_report(io::decode_cmatrix(io::field(args, "matrix"), "matrix"), ctx.tol(args));
  return {{"psd", r.valid}, {"min_eigenvalue", r.min_eigenvalue}};
}

inline json op_williamson(const Context& ctx, const json& args) {
  const auto w = williamson(io::decode_matrix(io::field(args, "b"), "b"), ctx.tol(args));
  return {{"s", io::encode(w.s)}, {"betas", w.betas}};
}

inline json op_make_state(const Context& ctx, const json& args) {
  return io::encode(make_state(io::decode_vector(io::field(args, "m"), "m"),
                               io::decode_matrix(io::field(args, "v"), "v"), ctx.tol(args)));
}

inline json op_weyl_transform(const Context& ctx, const json& args) {
  const auto s = ctx.state(io::field(args, "state"), ctx.tol(args));
  return {{"value", io::encode(weyl_transform(s, io::decode_vector(io::field(args, "x"), "x")))}};
}

inline json op_apply_channel(const Context& ctx, const json& args) {
  const double tol = ctx.tol(args);
  return io::encode(apply_channel(ctx.channel(io::field(args, "channel")),
                                  ctx.state(io::field(args, "state"), tol), tol));
}

inline json op_compose(const Context& ctx, const json& args) {
  return io::encode(compose(ctx.channel(io::field(args, "first")), ctx.channel(io::field(args, "second"))));
}

inline json op_obs_from_channel(const Context& ctx, const json& args) {
  return io::encode(observable_from_channel(ctx.channel(io::field(args, "channel"))));
}

inline json op_channel_from_obs(const Context& ctx, const json& args) {
  const double tol = ctx.tol(args);
  const auto ch = channel_from_observable(ctx.observable(io::field(args, "observable")), tol);
  json out = io::encode(ch);
  out["cp_min_eigenvalue"] = validate_channel(ch, tol).min_eigenvalue;
  return out;
}

inline json op_dilate(const Context& ctx, const json& args) {
  const double tol = ctx.tol(args);
  const auto ch = channel_from_dilation(ctx.dilation(io::field(args, "dilation"), tol), tol);
  json out = io::encode(ch);
  out["cp_min_eigenvalue"] = validate_channel(ch, tol).min_eigenvalue;
  out["homodyne_observable"] = io::encode(observable_from_channel(ch));
  return out;
}

inline json op_pushforward(const Context& ctx, const json& args) {
  return io::encode(pushforward(ctx.observable(io::field(args, "observable")),
                                ctx.state(io::field(args, "state"), ctx.tol(args))));
}

inline json op_classify(const Context& ctx, const json& args) {
  const double tol = ctx.tol(args);
  const auto obs = ctx.observable(io::field(args, "observable"));
  json out = classification_json(classify(obs, tol));
  out["valid"] = validate_observable(obs, tol).valid;
  return out;
}

inline json op_postprocess(const Context& ctx, const json& args) {
  return io::encode(linear_postprocess(ctx.observable(io::field(args, "observable")),
                                       io::decode_matrix(io::field(args, "p"), "p")));
}

inline json op_smear(const Context& ctx, const json& args) {
  return io::encode(smear(ctx.observable(io::field(args, "observable")),
                          io::decode_matrix(io::field(args, "c"), "c"),
                          io::decode_vector(io::field(args, "d"), "d"), ctx.tol(args)));
}

inline json op_marginal_direction(const Context& ctx, const json& args) {
  return {{"direction", io::encode(marginal_direction(ctx.observable(io::field(args, "observable")),
                                                      io::decode_matrix(io::field(args, "p"), "p")))}};
}

inline json op_decompose(const Context& ctx, const json& args) {
  const double tol = ctx.tol(args);
  const auto obs = ctx.observable(io::field(args, "observable"));
  const auto dec = decompose_covariant(obs, tol);
  const auto back = recompose(dec);
  const double err = std::max({detail::max_abs(Matrix(back.a0() - obs.a0())),
                               detail::max_abs(Matrix(back.b0() - obs.b0())),
                               detail::max_abs(Vector(back.v0() - obs.v0()))});
  return {{"p", io::encode(dec.p)},           {"s", io::encode(dec.s)},
          {"noise_c", io::encode(dec.noise_c)}, {"noise_d", io::encode(dec.noise_d)},
          {"betas", dec.betas},               {"recomposition_max_error", err}};
}

inline json op_ic_single(const Context& ctx, const json& args) {
  const double tol = ctx.tol(args);
  const auto obs = ctx.observable(io::field(args, "observable"));
  return {{"ic", ic_single(obs, tol)}, {"rank", detail::numerical_rank(obs.a0(), tol)},
          {"required_rank", 2 * obs.n_modes()}};
}

inline json op_ic_set(const Context& ctx, const json& args) {
  const double tol = ctx.tol(args);
  const auto set = ctx.observable_set(io::field(args, "set"));
  const bool ic = ic_finite_set(set, tol);
  const auto span = subspace_union_span(set, tol);
  return {{"ic", ic},
          {"members", set.size()},
          {"span_dim", span.dimension},
          {"witness", witness_json(ic ? std::nullopt : gaussian_witness(set, tol))}};
}

inline json op_subspace_span(const Context& ctx, const json& args) {
  const auto span = subspace_union_span(ctx.observable_set(io::field(args, "set")), ctx.tol(args));
  return {{"span_dim", span.dimension}, {"basis", io::encode(span.basis)}};
}

inline json op_witness(const Context& ctx, const json& args) {
  const double tol = ctx.tol(args);
  return {{"witness", witness_json(gaussian_witness(ctx.observable_set(io::field(args, "set")), tol))}};
}

inline DirectionSample directions_from(const json& args) {
  if (args.contains("directions")) {
    DirectionSample out;
    for (const auto& d : args.at("directions")) out.add(io::decode_vector(d, "direction"));
    return out;
  }
  const auto kind = parse_family_kind(io::decode_string(io::field(args, "family"), "family"));
  return family_directions(kind, values_or_grid(args, "thetas", "theta_grid"),
                           values_or_grid(args, "rs", "r_grid"));
}

inline json op_family_directions(const Context&, const json& args) {
  const auto sample = directions_from(args);
  json dirs = json::array();
  for (const auto& d : sample.directions()) dirs.push_back(io::encode(d));
  return {{"directions", dirs}};
}

inline json op_coverage(const Context&, const json& args) {
  const auto sample = directions_from(args);
  const std::size_t probes = args.contains("probe_grid_size")
                                 ? args.at("probe_grid_size").get<std::size_t>()
                                 : kDefaultProbeGrid;
  return {{"covering_radius", direction_coverage(sample, probes)},
          {"sample_size", sample.size()},
          {"dim", sample.dim()}};
}

inline GaussianDistribution distribution_arg(const Context& ctx, const json& args) {
  if (args.contains("distribution")) return ctx.distribution(args.at("distribution"));
  return pushforward(ctx.observable(io::field(args, "observable")),
                     ctx.state(io::field(args, "state"), ctx.tol(args)));
}

inline json op_sample(const Context& ctx, const json& args) {
  const auto dist = distribution_arg(ctx, args);
  const auto count = io::field(args, "count").get<std::size_t>();
  if (count < 2 || count > 10'000'000) throw io::SchemaError("sample: count must lie in [2, 1e7]");
  const std::uint64_t seed = args.contains("seed") ? args.at("seed").get<std::uint64_t>() : ctx.options().seed;
  const Matrix samples = sample_outcomes(dist, count, seed);
  json out = io::encode(empirical_distribution(samples));
  out["count"] = count;
  out["seed"] = seed;
  out["source_mean"] = io::encode(dist.mean);
  out["source_cov"] = io::encode(dist.cov);
  if (args.contains("include_samples") && args.at("include_samples").get<bool>()) {
    out["samples"] = io::encode(samples);
  }
  return out;
}

inline json op_reconstruct(const Context& ctx, const json& args) {
  const double tol = ctx.tol(args);
  std::vector<Observation> data;
  for (const auto& o : io::field(args, "observations")) {
    data.push_back({ctx.observable(io::field(o, "observable")), ctx.distribution(io::field(o, "distribution"))});
  }
  const auto rec = reconstruct_gaussian(data, tol);
  json out = {{"m", io::encode(rec.m)},
              {"v", io::encode(rec.v)},
              {"n_modes", rec.m.size() / 2},
              {"residual", rec.residual},
              {"rank", rec.rank},
              {"unknowns", rec.unknowns},
              {"nullspace_dim", rec.nullspace_dim},
              {"closed_form", rec.closed_form},
              {"physical", rec.state.has_value()},
              {"min_eigenvalue", rec.min_eigenvalue}};
  if (rec.state) out["kind"] = "state";
  return out;
}

inline json op_bosonic_probe(const Context& ctx, const json& args) {
  const double tol = ctx.tol(args);
  const GridSpec spec = grid_spec(args);
  const double threshold = args.contains("threshold") ? io::decode_number(args.at("threshold"))
                                                      : kDefaultZeroThreshold;
  if (args.contains("set")) {
    const auto v = ic_bosonic_verdict(ctx.bosonic_set(args.at("set"), tol), spec, threshold, tol);
    return {{"verdict", v.verdict()},
            {"ic_consistent", v.ic_consistent},
            {"evidence", {{"kind", v.evidence_kind},
                          {"hole_radius", std::isinf(v.hole_radius) ? json("inf") : json(v.hole_radius)},
                          {"hole_center", io::encode(v.hole_center)}}},
            {"grid", {{"points", spec.points}, {"range", spec.range}, {"spacing", v.spacing}}},
            {"covered_fraction", v.covered_fraction},
            {"full_rank_members", v.full_rank_members},
            {"skipped_members", v.skipped_members},
            {"zero_radius_range", json::array({v.zero_radius_min, v.zero_radius_max})},
            {"truncation_warning", v.truncation_warning}};
  }
  const auto probe = support_probe(ctx.bosonic(io::field(args, "bosonic"), tol), spec, threshold);
  json out = {{"grid", {{"points", spec.points}, {"range", spec.range}, {"spacing", spec.spacing()}, {"dim", probe.dim}}},
              {"threshold", threshold},
              {"nonzero_fraction", probe.nonzero_fraction},
              {"hole_radius", std::isinf(probe.hole_radius) ? json("inf") : json(probe.hole_radius)},
              {"hole_center", io::encode(probe.hole_center)},
              {"bounded_support", probe.bounded_support},
              {"zero_radius_range", json::array({probe.zero_radius_min, probe.zero_radius_max})},
              {"y_set_size", probe.y_set_sample.size()},
              {"truncation_warning", probe.truncation_warning}};
  if (args.contains("include_mask") && args.at("include_mask").get<bool>()) {
    json mask = json::array();
    for (char z : probe.zero_mask) mask.push_back(z != 0);
    out["zero_mask"] = mask;
  }
  return out;
}

inline json op_f0_eval(const Context& ctx, const json& args) {
  const auto obs = ctx.bosonic(io::field(args, "bosonic"), ctx.tol(args));
  return {{"value", io::encode(f0_eval(obs, io::decode_vector(io::field(args, "p"), "p")))},
          {"truncation_warning", obs.truncation_warning()}};
}

inline json op_ladder_ops(const Context& ctx, const json& args) {
  const int cutoff = ctx.cutoff(args);
  const auto l = fock::ladder_ops(cutoff);
  const CMatrix comm = l.q * l.p - l.p * l.q;
  const CMatrix lower = comm.topLeftCorner(cutoff - 1, cutoff - 1) -
                        Complex(0.0, 1.0) * CMatrix::Identity(cutoff - 1, cutoff - 1);
  json out = {{"cutoff", cutoff},
              {"commutator_defect_lower", detail::max_abs(lower)},
              {"commutator_last_diagonal", io::encode(comm(cutoff - 1, cutoff - 1))}};
  if (!args.contains("include_matrices") || args.at("include_matrices").get<bool>()) {
    out["a"] = io::encode(l.a);
    out["q"] = io::encode(l.q);
    out["p"] = io::encode(l.p);
  }
  return out;
}

inline json op_fock_weyl(const Context& ctx, const json& args) {
  const auto w = fock::fock_weyl_matrix(io::decode_vector(io::field(args, "x"), "x"), ctx.cutoff(args));
  json out = io::encode(w.matrix);
  out["kind"] = "operator";
  out["cutoff"] = w.cutoff;
  return out;
}

inline json oracle_json(const fock::OracleValue& v) {
  return {{"value", io::encode(v.value)},
          {"truncation_weight", v.truncation_weight},
          {"truncation_warning", v.truncation_warning}};
}

inline json op_oracle_weyl(const Context& ctx, const json& args) {
  const auto rho = ctx.fock_operator(io::field(args, "fock"), ctx.cutoff(args), ctx.tol(args));
  return oracle_json(fock::oracle_weyl_transform(rho, io::decode_vector(io::field(args, "x"), "x")));
}

inline json op_oracle_pushforward(const Context& ctx, const json& args) {
  const auto rho = ctx.fock_operator(io::field(args, "fock"), ctx.cutoff(args), ctx.tol(args));
  return oracle_json(fock::oracle_pushforward_char(ctx.observable(io::field(args, "observable")), rho,
                                                   io::decode_vector(io::field(args, "p"), "p")));
}

/// Analytic Weyl transform and pushforward characteristic functions against
/// the Fock oracle on the standard grid (|x| <= radius).
inline json op_oracle_check(const Context& ctx, const json& args) {
  const double tol = ctx.tol(args);
  const int cutoff = ctx.cutoff(args);
  const double radius = args.contains("radius") ? io::decode_number(args.at("radius")) : 2.5;
  const auto state = ctx.state(io::field(args, "state"), tol);
  if (state.n_modes() != 1) throw DimensionError("oracle-check: single-mode states only");
  const auto rho = fock::gaussian_state(state, cutoff);
  const fock::FockWeyl weyl(cutoff);
  const auto grid = standard_grid(radius, 5, 8);
  double weyl_err = 0.0;
  for (const auto& x : grid) {
    weyl_err = std::max(weyl_err, std::abs(weyl_transform(state, x) -
                                           fock::oracle_weyl_transform(rho, x, weyl).value));
  }
  json per_obs = json::array();
  double worst = weyl_err;
  if (args.contains("observables")) {
    for (const auto& ref : args.at("observables")) {
      const auto obs = ctx.observable(ref);
      const double scale = std::max(1e-12, Eigen::JacobiSVD<Matrix>(obs.a0()).singularValues()(0));
      double err = 0.0;
      for (const auto& x : grid) {
        Vector p(obs.outcome_dim());
        if (obs.outcome_dim() == 1) {
          p << x(0);
        } else if (obs.outcome_dim() == 2) {
          p = x;
        } else {
          throw DimensionError("oracle-check: observables with M <= 2 only");
        }
        p /= scale;
        err = std::max(err, std::abs(pushforward(obs, state).characteristic(p) -
                                     fock::oracle_pushforward_char(obs, rho, p, weyl).value));
      }
      worst = std::max(worst, err);
      per_obs.push_back(err);
    }
  }
  const double weight = fock::truncation_weight(rho);
  return {{"cutoff", cutoff},
          {"points", grid.size()},
          {"weyl_max_error", weyl_err},
          {"pushforward_max_errors", per_obs},
          {"max_error", worst},
          {"agree", worst <= 1e-6},
          {"truncation_weight", weight},
          {"truncation_warning", weight > fock::kTruncationWarning}};
}

}  // namespace ops

inline const std::vector<OpInfo>& dispatch_table() {
  static const std::vector<OpInfo> table = {
      {"validate", ops::op_validate,
       {"validate_observable", "validate_channel", "psd_check", "make_state"}},
      {"omega", ops::op_omega, {"omega"}},
      {"is-symplectic", ops::op_is_symplectic, {"is_symplectic"}},
      {"psd-check", ops::op_psd_check, {"psd_check"}},
      {"williamson", ops::op_williamson, {"williamson"}},
      {"make-state", ops::op_make_state, {"make_state"}},
      {"weyl-transform", ops::op_weyl_transform, {"weyl_transform"}},
      {"apply-channel", ops::op_apply_channel, {"apply_channel"}},
      {"compose", ops::op_compose, {"compose"}},
      {"obs-from-channel", ops::op_obs_from_channel, {"observable_from_channel"}},
      {"channel-from-obs", ops::op_channel_from_obs, {"channel_from_observable"}},
      {"dilate", ops::op_dilate, {"channel_from_dilation", "observable_from_channel"}},
      {"pushforward", ops::op_pushforward, {"pushforward"}},
      {"classify", ops::op_classify, {"classify"}},
      {"postprocess", ops::op_postprocess, {"linear_postprocess"}},
      {"smear", ops::op_smear, {"smear"}},
      {"marginal-direction", ops::op_marginal_direction, {"marginal_direction"}},
      {"decompose-covariant", ops::op_decompose, {"decompose_covariant"}},
      {"ic-single", ops::op_ic_single, {"ic_single"}},
      {"ic-set", ops::op_ic_set, {"ic_finite_set", "subspace_union_span", "gaussian_witness"}},
      {"subspace-span", ops::op_subspace_span, {"subspace_union_span"}},
      {"witness", ops::op_witness, {"gaussian_witness"}},
      {"family-directions", ops::op_family_directions, {"family_directions"}},
      {"coverage", ops::op_coverage, {"direction_coverage", "family_directions"}},
      {"sample", ops::op_sample, {"sample"}},
      {"reconstruct", ops::op_reconstruct, {"reconstruct_gaussian"}},
      {"bosonic-probe", ops::op_bosonic_probe, {"support_probe", "ic_bosonic_verdict"}},
      {"f0-eval", ops::op_f0_eval, {"f0_eval"}},
      {"ladder-ops", ops::op_ladder_ops, {"ladder_ops"}},
      {"fock-weyl", ops::op_fock_weyl, {"fock_weyl_matrix"}},
      {"oracle-weyl", ops::op_oracle_weyl, {"oracle_weyl_transform"}},
      {"oracle-pushforward", ops::op_oracle_pushforward, {"oracle_pushforward_char"}},
      {"oracle-check", ops::op_oracle_check, {"oracle_weyl_transform", "oracle_pushforward_char"}},
  };
  return table;
}

inline const OpInfo* find_op(const std::string& name) {
  for (const auto& op : dispatch_table()) {
    if (op.name == name) return &op;
  }
  return nullptr;
}

inline std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e)) return "validation";
  if (dynamic_cast<const io::SchemaError*>(&e)) return "schema";
  if (dynamic_cast<const DimensionError*>(&e)) return "invalid-dimension";
  if (dynamic_cast<const InvalidStateError*>(&e)) return "invalid-state";
  if (dynamic_cast<const InvalidNoiseError*>(&e)) return "invalid-noise";
  if (dynamic_cast<const InvalidInputError*>(&e)) return "invalid-input";
  if (dynamic_cast<const DecompositionError*>(&e)) return "decomposition";
  if (dynamic_cast<const NotInformationallyCompleteError*>(&e)) return "not-informationally-complete";
  if (dynamic_cast<const ConsistencyError*>(&e)) return "consistency";
  if (dynamic_cast<const nlohmann::json::exception*>(&e)) return "schema";
  return "runtime";
}

inline json error_json(const std::exception& e) {
  return {{"kind", error_kind(e)}, {"message", e.what()}};
}

inline json base_report(const RunOptions& opt) {
  return {{"format", kFormatVersion},
          {"tool", "gaussmeas"},
          {"seed", opt.seed},
          {"tol", opt.tol},
          {"cutoff", opt.cutoff},
          {"tasks", json::array()}};
}

/// Executes a parsed problem document.
inline RunResult run_problem(const json& doc, const RunOptions& opt) {
  RunResult result;
  result.report = base_report(opt);
  Context ctx(opt);
  const auto fail = [&](int code, const char* status, const json& err) {
    result.exit_code = code;
    result.report["status"] = status;
    result.report["error"] = err;
    return result;
  };

  // Validation: version, entities, ops and references.
  try {
    if (!doc.is_object()) throw io::SchemaError("problem file must be a JSON object");
    const std::string version = io::decode_string(io::field(doc, "version"), "version");
    if (version != kFormatVersion) throw ValidationError("unsupported problem version '" + version + "'");
    if (doc.contains("entities")) {
      const json& ents = doc.at("entities");
      if (!ents.is_object()) throw io::SchemaError("entities must be an object");
      for (auto it = ents.begin(); it != ents.end(); ++it) ctx.define(it.key(), it.value());
      for (auto it = ents.begin(); it != ents.end(); ++it) {
        try {
          ctx.check_entity(it.value());
        } catch (const std::exception& e) {
          throw ValidationError("entity '" + it.key() + "': " + e.what());
        }
      }
    }
    const json& tasks = io::field(doc, "tasks");
    if (!tasks.is_array()) throw io::SchemaError("tasks must be an array");
    std::set<std::string> known;
    if (doc.contains("entities")) {
      for (auto it = doc.at("entities").begin(); it != doc.at("entities").end(); ++it) known.insert(it.key());
    }
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const json& task = tasks[i];
      const std::string where = "task " + std::to_string(i);
      if (!task.is_object()) throw io::SchemaError(where + ": must be an object");
      const std::string op = io::decode_string(io::field(task, "op"), "op");
      if (!find_op(op)) throw ValidationError(where + ": unknown op '" + op + "'");
      const json args = task.value("args", json::object());
      if (!args.is_object()) throw io::SchemaError(where + ": args must be an object");
      std::vector<std::string> refs;
      collect_refs(args, false, refs);
      for (const auto& r : refs) {
        if (!known.count(r)) throw ValidationError(where + ": undefined entity '" + r + "'");
      }
      if (task.contains("output_name")) known.insert(io::decode_string(task.at("output_name"), "output_name"));
    }
  } catch (const std::exception& e) {
    return fail(kExitValidation, "validation-error", error_json(e));
  }

  // Execution.
  const json& tasks = doc.at("tasks");
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const json& task = tasks[i];
    const std::string op = task.at("op").get<std::string>();
    const json args = task.value("args", json::object());
    json entry = {{"index", i}, {"op", op}};
    if (task.contains("output_name")) entry["output_name"] = task.at("output_name");
    const auto start = std::chrono::steady_clock::now();
    try {
      json digest_src = {{"op", op}, {"args", args}, {"tol", opt.tol}, {"cutoff", opt.cutoff}, {"seed", opt.seed}};
      json refs = json::object();
      for (const auto& name : ctx.closure(args)) refs[name] = ctx.lookup(name);
      digest_src["refs"] = refs;
      entry["inputs_digest"] = io::fnv1a_hex(io::dump(digest_src, -1));
      json outputs = find_op(op)->handler(ctx, args);
      entry["status"] = "ok";
      entry["outputs"] = outputs;
      if (task.contains("output_name")) ctx.define(task.at("output_name").get<std::string>(), outputs);
    } catch (const std::exception& e) {
      entry["status"] = "error";
      entry["error"] = error_json(e);
      if (opt.timing) {
        entry["timing_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      }
      result.report["tasks"].push_back(entry);
      const std::string kind = error_kind(e);
      const bool schema = kind == "schema" || kind == "validation";
      return fail(schema ? kExitValidation : kExitRuntime, schema ? "validation-error" : "runtime-error",
                  {{"task", i}, {"kind", kind}, {"message", e.what()}});
    }
    if (opt.timing) {
      entry["timing_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    result.report["tasks"].push_back(entry);
  }
  result.report["status"] = "ok";
  result.exit_code = kExitOk;
  return result;
}

/// Parses text and runs it; syntax errors give exit code 2.
inline RunResult run_text(const std::string& text, const RunOptions& opt,
                          const std::string& single_op = "") {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    RunResult r;
    r.report = base_report(opt);
    r.report["status"] = "parse-error";
    r.report["error"] = {{"kind", "parse"}, {"message", e.what()}};
    r.exit_code = kExitParse;
    return r;
  }
  if (!single_op.empty() && doc.is_object()) {
    if (doc.contains("args")) {
      doc["tasks"] = json::array({{{"op", single_op}, {"args", doc.at("args")}}});
      if (doc.contains("output_name")) doc["tasks"][0]["output_name"] = doc.at("output_name");
    } else if (doc.contains("tasks") && doc.at("tasks").is_array()) {
      json kept = json::array();
      for (const auto& t : doc.at("tasks")) {
        if (t.is_object() && t.value("op", "") == single_op) kept.push_back(t);
      }
      doc["tasks"] = kept;
    }
    if (!doc.contains("tasks") || doc.at("tasks").empty()) {
      RunResult r;
      r.report = base_report(opt);
      r.report["status"] = "validation-error";
      r.report["error"] = {{"kind", "validation"},
                           {"message", "no args and no '" + single_op + "' task in the input"}};
      r.exit_code = kExitValidation;
      return r;
    }
    if (!doc.contains("version")) doc["version"] = kFormatVersion;
  }
  return run_problem(doc, opt);
}

}  // namespace gaussmeas::cli
