#pragma once

// JSON model files. Numbers are exact rationals written as "p/q" or "p".
//
// {
//   "num_colors": 2, "state_dim": 4, "iterations": 4,
//   "init": [[1,0],[0,1],[0,0],[0,0]],
//   "recurrent_layer": {"A": [["1","0",...],...], "B": [...], "c": [...],
//                       "activations": [{"kind": "clipped_relu"}, ...]},
//   "output_coord": 3,
//   "decision": {"theta_plus": "1", "theta_minus": "0"}
// }
//
// A layered model has "layers": [ {...}, ... ] instead of "recurrent_layer".
// Polynomial activations carry "coeffs" (lowest degree first); rational ones
// carry "num" and "den".

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

#include "gc2gnn/gnn.hpp"
#include "gc2gnn/numeric.hpp"

namespace gc2gnn {

using Json = nlohmann::ordered_json;

namespace detail {

inline const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ModelError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ModelError(path + "/" + key + ": missing field '" + key + "'");
  return *it;
}

inline Rat rat_from_json(const Json& j, const std::string& path) {
  try {
    if (j.is_string()) return Rat::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rat(j.get<long>());
  } catch (const std::exception& e) {
    throw ModelError(path + ": " + e.what());
  }
  throw ModelError(path + ": expected a rational string \"p/q\" or an integer");
}

inline size_t size_from_json(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned()) throw ModelError(path + ": expected a non-negative integer");
  return j.get<size_t>();
}

inline std::vector<Rat> rat_vector(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ModelError(path + ": expected an array");
  std::vector<Rat> out;
  for (size_t i = 0; i < j.size(); ++i) out.push_back(rat_from_json(j[i], path + "/" + std::to_string(i)));
  return out;
}

inline RatMatrix rat_matrix(const Json& j, size_t rows, size_t cols, const std::string& path) {
  if (!j.is_array() || j.size() != rows)
    throw ModelError(path + ": expected " + std::to_string(rows) + " rows");
  RatMatrix m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    auto row = rat_vector(j[r], path + "/" + std::to_string(r));
    if (row.size() != cols) throw ModelError(path + "/" + std::to_string(r) + ": expected " + std::to_string(cols) + " entries");
    for (size_t c = 0; c < cols; ++c) m(r, c) = row[c];
  }
  return m;
}

inline Json rat_array(std::span<const Rat> v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(x.str());
  return a;
}

inline Json matrix_to_json(const RatMatrix& m) {
  Json rows = Json::array();
  for (size_t r = 0; r < m.rows(); ++r) rows.push_back(rat_array(m.row(r)));
  return rows;
}

}  // namespace detail

inline Json poly_to_json(const Poly& p) { return detail::rat_array(p.coeffs()); }

inline Poly poly_from_json(const Json& j, const std::string& path) { return Poly(detail::rat_vector(j, path)); }

inline Json activation_to_json(const Activation& a) {
  Json j;
  j["kind"] = to_string(a.kind());
  if (a.kind() == ActivationKind::Polynomial) j["coeffs"] = poly_to_json(a.poly());
  if (a.kind() == ActivationKind::Rational) {
    j["num"] = poly_to_json(a.rational_fn().num());
    j["den"] = poly_to_json(a.rational_fn().den());
  }
  return j;
}

inline Activation activation_from_json(const Json& j, const std::string& path) {
  const Json& kind_j = detail::field(j, "kind", path);
  if (!kind_j.is_string()) throw ModelError(path + "/kind: expected a string");
  const auto kind = kind_j.get<std::string>();
  if (kind == "relu") return Activation::relu();
  if (kind == "clipped_relu") return Activation::clipped_relu();
  if (kind == "identity") return Activation::identity();
  if (kind == "polynomial") return Activation::polynomial(poly_from_json(detail::field(j, "coeffs", path), path + "/coeffs"));
  if (kind == "rational") {
    Poly num = poly_from_json(detail::field(j, "num", path), path + "/num");
    Poly den = poly_from_json(detail::field(j, "den", path), path + "/den");
    if (den.is_zero()) throw ModelError(path + "/den: denominator is identically zero");
    try {
      return Activation::rational(RationalFn(std::move(num), std::move(den)));
    } catch (const ModelError& e) {
      throw ModelError(path + "/den: " + e.what());
    }
  }
  throw ModelError(path + "/kind: unknown activation '" + kind + "'");
}

inline Json layer_to_json(const GnnLayer& L) {
  Json j;
  j["A"] = detail::matrix_to_json(L.A);
  j["B"] = detail::matrix_to_json(L.B);
  j["c"] = detail::rat_array(L.c);
  Json acts = Json::array();
  for (const auto& a : L.activations) acts.push_back(activation_to_json(a));
  j["activations"] = std::move(acts);
  return j;
}

inline GnnLayer layer_from_json(const Json& j, size_t d, const std::string& path) {
  GnnLayer L;
  L.A = detail::rat_matrix(detail::field(j, "A", path), d, d, path + "/A");
  L.B = detail::rat_matrix(detail::field(j, "B", path), d, d, path + "/B");
  L.c = detail::rat_vector(detail::field(j, "c", path), path + "/c");
  if (L.c.size() != d) throw ModelError(path + "/c: expected " + std::to_string(d) + " entries");
  const Json& acts = detail::field(j, "activations", path);
  if (!acts.is_array() || acts.size() != d) throw ModelError(path + "/activations: expected " + std::to_string(d) + " entries");
  for (size_t i = 0; i < d; ++i) L.activations.push_back(activation_from_json(acts[i], path + "/activations/" + std::to_string(i)));
  return L;
}

inline Json model_to_json(const GnnModel& m) {
  Json j;
  j["num_colors"] = m.num_colors;
  j["state_dim"] = m.state_dim;
  j["iterations"] = m.iterations;
  Json init = Json::array();
  for (size_t r = 0; r < m.init.rows(); ++r) {
    Json row = Json::array();
    for (size_t c = 0; c < m.init.cols(); ++c) row.push_back(m.init(r, c));
    init.push_back(std::move(row));
  }
  j["init"] = std::move(init);
  if (m.recurrent) {
    j["recurrent_layer"] = layer_to_json(m.layers.front());
  } else {
    Json layers = Json::array();
    for (const auto& L : m.layers) layers.push_back(layer_to_json(L));
    j["layers"] = std::move(layers);
  }
  j["output_coord"] = m.output_coord;
  j["decision"] = {{"theta_plus", m.decision.theta_plus.str()}, {"theta_minus", m.decision.theta_minus.str()}};
  return j;
}

inline std::string save_model(const GnnModel& m) { return model_to_json(m).dump(2) + "\n"; }

inline GnnModel model_from_json(const Json& j) {
  GnnModel m;
  m.num_colors = static_cast<uint32_t>(detail::size_from_json(detail::field(j, "num_colors", ""), "/num_colors"));
  m.state_dim = detail::size_from_json(detail::field(j, "state_dim", ""), "/state_dim");
  m.iterations = detail::size_from_json(detail::field(j, "iterations", ""), "/iterations");
  const size_t d = m.state_dim;

  const Json& init = detail::field(j, "init", "");
  if (!init.is_array() || init.size() != d) throw ModelError("/init: expected " + std::to_string(d) + " rows");
  m.init = Matrix<int>(d, m.num_colors, 0);
  for (size_t r = 0; r < d; ++r) {
    const std::string rp = "/init/" + std::to_string(r);
    if (!init[r].is_array() || init[r].size() != m.num_colors)
      throw ModelError(rp + ": expected " + std::to_string(m.num_colors) + " entries");
    for (size_t c = 0; c < m.num_colors; ++c) {
      const Json& e = init[r][c];
      if (!e.is_number_integer() || (e.get<int>() != 0 && e.get<int>() != 1))
        throw ModelError(rp + "/" + std::to_string(c) + ": init entries must be 0 or 1");
      m.init(r, c) = e.get<int>();
    }
  }

  if (j.contains("recurrent_layer")) {
    m.recurrent = true;
    m.layers.push_back(layer_from_json(j["recurrent_layer"], d, "/recurrent_layer"));
  } else if (j.contains("layers")) {
    m.recurrent = false;
    const Json& layers = j["layers"];
    if (!layers.is_array()) throw ModelError("/layers: expected an array");
    for (size_t t = 0; t < layers.size(); ++t)
      m.layers.push_back(layer_from_json(layers[t], d, "/layers/" + std::to_string(t)));
  } else {
    throw ModelError("/recurrent_layer: missing field 'recurrent_layer' (or 'layers')");
  }

  m.output_coord = detail::size_from_json(detail::field(j, "output_coord", ""), "/output_coord");
  const Json& dec = detail::field(j, "decision", "");
  m.decision.theta_plus = detail::rat_from_json(detail::field(dec, "theta_plus", "/decision"), "/decision/theta_plus");
  m.decision.theta_minus = detail::rat_from_json(detail::field(dec, "theta_minus", "/decision"), "/decision/theta_minus");
  validate_model(m);
  return m;
}

inline GnnModel load_model(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError(std::string("malformed JSON: ") + e.what());
  }
  return model_from_json(j);
}

}  // namespace gc2gnn
