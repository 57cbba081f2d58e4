#pragma once

#include <cstdint>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "qconv/smallmat.hpp"
#include "qconv/states.hpp"

namespace qconv::test {

inline const nlohmann::json& oracle() {
  static const nlohmann::json data = [] {
    std::ifstream in(std::string(QCONV_TEST_DATA_DIR) + "/oracle.json");
    if (!in) throw std::runtime_error("missing tests/data/oracle.json");
    return nlohmann::json::parse(in);
  }();
  return data;
}

inline double oracle_value(const char* key) { return oracle().at(key).get<double>(); }

inline ComplexMatrix matrix_from_json(const nlohmann::json& rows) {
  ComplexMatrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = {rows[i][j][0].get<double>(), rows[i][j][1].get<double>()};
  return m;
}

inline ComplexMatrix random_hermitian(std::uint64_t seed, std::size_t dim, double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, scale);
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    m(i, i) = nd(gen);
    for (std::size_t j = i + 1; j < dim; ++j) {
      const double re = nd(gen);
      const double im = nd(gen);
      m(i, j) = {re, im};
      m(j, i) = {re, -im};
    }
  }
  return m;
}

inline ComplexMatrix pauli_x() {
  ComplexMatrix x(2);
  x(0, 1) = x(1, 0) = 1.0;
  return x;
}

inline DensityMatrix basis_projector(std::size_t k) {
  Amplitudes v{};
  v[k] = 1.0;
  return DensityMatrix::from_pure(PureState::from_amplitudes(v));
}

}  // namespace qconv::test
