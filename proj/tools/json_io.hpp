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

// JSON encoding of library values. Matrices are row-major arrays of rows,
// complex matrices {"re": ..., "im": ...}. The writer prints every double
// with 17 significant digits so reports round-trip exactly.

#include <cinttypes>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "gaussmeas/gaussmeas.hpp"

namespace gaussmeas::io {

using json = nlohmann::json;

/// Malformed or inconsistent input document.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Writing.

inline void append_number(std::string& out, double x) {
  if (!std::isfinite(x)) {
    out += "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

inline void append_string(std::string& out, const std::string& s) {
  out += '"';
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += '"';
}

/// Deterministic serialisation; indent < 0 gives the compact form. Object
/// keys come out sorted (nlohmann's default object map).
inline void write(std::string& out, const json& j, int indent = 2, int depth = 0) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::null: out += "null"; break;
    case json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
    case json::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); break;
    case json::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); break;
    case json::value_t::number_float: append_number(out, j.get<double>()); break;
    case json::value_t::string: append_string(out, j.get<std::string>()); break;
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        break;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(j.begin(), j.end(),
                                     [](const json& e) { return e.is_structured(); });
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ',';
        if (flat) {
          if (!first && indent >= 0) out += ' ';
        } else {
          newline(depth + 1);
        }
        write(out, e, indent, depth + 1);
        first = false;
      }
      if (!flat) newline(depth);
      out += ']';
      break;
    }
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        break;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        newline(depth + 1);
        append_string(out, it.key());
        out += indent < 0 ? ":" : ": ";
        write(out, it.value(), indent, depth + 1);
        first = false;
      }
      newline(depth);
      out += '}';
      break;
    }
    default: out += "null";
  }
}

inline std::string dump(const json& j, int indent = 2) {
  std::string out;
  write(out, j, indent);
  return out;
}

/// FNV-1a, 64 bit, as 16 hex digits.
inline std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

// Encoding.

inline json encode(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline json encode(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

inline json encode(const Complex& z) { return {{"re", z.real()}, {"im", z.imag()}}; }

inline json encode(const CMatrix& m) {
  return {{"re", encode(Matrix(m.real()))}, {"im", encode(Matrix(m.imag()))}};
}

inline json encode(const GaussianState& s) {
  return {{"kind", "state"}, {"n_modes", s.n_modes()}, {"m", encode(s.m())}, {"v", encode(s.v())}};
}

inline json encode(const GaussianObservable& o) {
  return {{"kind", "observable"},    {"n_modes", o.n_modes()}, {"outcome_dim", o.outcome_dim()},
          {"a0", encode(o.a0())},    {"b0", encode(o.b0())},   {"v0", encode(o.v0())}};
}

inline json encode(const GaussianChannel& c) {
  return {{"kind", "channel"},
          {"in_modes", c.in_modes()},
          {"out_modes", c.out_modes()},
          {"a", encode(c.a())},
          {"b_re", encode(Matrix(c.b().real()))},
          {"b_im", encode(Matrix(c.b().imag()))},
          {"v", encode(c.v())}};
}

inline json encode(const GaussianDistribution& d) {
  return {{"kind", "distribution"},
          {"mean", encode(d.mean)},
          {"cov", encode(d.cov)},
          {"c", encode(Matrix(2.0 * d.cov))},
          {"d", encode(Vector(-d.mean))}};
}

inline json encode(const fock::FockOperator& f) {
  json out = encode(f.matrix);
  out["kind"] = "fock";
  out["cutoff"] = f.cutoff;
  return out;
}

inline json encode(const ValidityReport& r) {
  return {{"valid", r.valid}, {"min_eigenvalue", r.min_eigenvalue}};
}

// Decoding of plain values.

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw SchemaError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

inline double decode_number(const json& j, const char* what = "number") {
  if (!j.is_number()) throw SchemaError(std::string(what) + ": expected a number");
  return j.get<double>();
}

inline int decode_int(const json& j, const char* what = "integer") {
  if (!j.is_number_integer()) throw SchemaError(std::string(what) + ": expected an integer");
  return j.get<int>();
}

inline Vector decode_vector(const json& j, const char* what = "vector") {
  if (!j.is_array()) throw SchemaError(std::string(what) + ": expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = decode_number(j[i], what);
  return v;
}

inline Matrix decode_matrix(const json& j, const char* what = "matrix") {
  if (!j.is_array()) throw SchemaError(std::string(what) + ": expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  if (!j[0].is_array()) throw SchemaError(std::string(what) + ": expected an array of rows");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw SchemaError(std::string(what) + ": ragged rows");
    }
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = decode_number(row[static_cast<std::size_t>(k)], what);
  }
  return m;
}

/// Either a real matrix or {"re": ..., "im": ...} (im optional).
inline CMatrix decode_cmatrix(const json& j, const char* what = "complex matrix") {
  if (j.is_array()) return detail::to_complex(decode_matrix(j, what));
  const Matrix re = decode_matrix(field(j, "re"), what);
  Matrix im = Matrix::Zero(re.rows(), re.cols());
  if (j.contains("im")) im = decode_matrix(j.at("im"), what);
  if (im.rows() != re.rows() || im.cols() != re.cols()) {
    throw SchemaError(std::string(what) + ": re and im parts differ in shape");
  }
  CMatrix out(re.rows(), re.cols());
  out.real() = re;
  out.imag() = im;
  return out;
}

inline std::string decode_string(const json& j, const char* what = "string") {
  if (!j.is_string()) throw SchemaError(std::string(what) + ": expected a string");
  return j.get<std::string>();
}

}  // namespace gaussmeas::io
