#pragma once

#include <fstream>

#include <json.hpp>

#include "phunmix/problem.hpp"

namespace phunmix {

/// JSON schema used for reproducible problem dumps:
///   { "m": M, "k": K,
///     "a": [[re, im], ...]   (row-major, M*K pairs),
///     "y": [[re, im], ...],  "b": [ ... ],
///     "s0": [[re, im], ...]  (optional), "n": [...] (optional),
///     "sigma_n": x (optional) }
inline nlohmann::json complex_vector_to_json(const CVec& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back({v[i].real(), v[i].imag()});
  return arr;
}

inline CVec complex_vector_from_json(const nlohmann::json& arr) {
  CVec v(arr.size());
  Index i = 0;
  for (const auto& pair : arr) v[i++] = Complex(pair.at(0).get<double>(), pair.at(1).get<double>());
  return v;
}

inline nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json j;
  j["m"] = inst.channels();
  j["k"] = inst.sources();
  nlohmann::json a = nlohmann::json::array();
  for (Index r = 0; r < inst.mixing.rows(); ++r)
    for (Index c = 0; c < inst.mixing.cols(); ++c)
      a.push_back({inst.mixing(r, c).real(), inst.mixing(r, c).imag()});
  j["a"] = std::move(a);
  j["y"] = complex_vector_to_json(inst.observation);
  j["b"] = std::vector<double>(inst.magnitudes.begin(), inst.magnitudes.end());
  if (inst.ground_truth) j["s0"] = complex_vector_to_json(*inst.ground_truth);
  if (inst.noise) j["n"] = complex_vector_to_json(*inst.noise);
  if (inst.noise_stddev) j["sigma_n"] = *inst.noise_stddev;
  return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
  Instance inst;
  const Index m = j.at("m").get<Index>();
  const Index k = j.at("k").get<Index>();
  const auto& a = j.at("a");
  if (static_cast<Index>(a.size()) != m * k)
    throw std::invalid_argument("instance json: 'a' must hold m*k entries");
  inst.mixing.resize(m, k);
  Index idx = 0;
  for (Index r = 0; r < m; ++r)
    for (Index c = 0; c < k; ++c, ++idx)
      inst.mixing(r, c) = Complex(a[idx].at(0).get<double>(), a[idx].at(1).get<double>());
  inst.observation = complex_vector_from_json(j.at("y"));
  const auto b = j.at("b").get<std::vector<double>>();
  inst.magnitudes = Eigen::Map<const RVec>(b.data(), static_cast<Index>(b.size()));
  if (j.contains("s0")) inst.ground_truth = complex_vector_from_json(j.at("s0"));
  if (j.contains("n")) inst.noise = complex_vector_from_json(j.at("n"));
  if (j.contains("sigma_n")) inst.noise_stddev = j.at("sigma_n").get<double>();
  validate_instance(inst);
  return inst;
}

inline void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << instance_to_json(inst).dump(2) << '\n';
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  nlohmann::json j;
  in >> j;
  return instance_from_json(j);
}

}  // namespace phunmix
