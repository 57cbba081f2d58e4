#include "qconv/state_io.hpp"

#include <fstream>
#include <sstream>

#include "qconv/errors.hpp"

namespace qconv {

namespace {

Complex complex_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw DomainError("state file: complex entries must be [re, im] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

nlohmann::json complex_to_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json to_json(const DensityMatrix& rho) {
  return {{"dim", 4}, {"matrix", matrix_to_json(rho.matrix())}};
}

nlohmann::json to_json(const PureState& psi) {
  nlohmann::json v = nlohmann::json::array();
  for (const Complex& z : psi.amplitudes()) v.push_back(complex_to_json(z));
  return {{"vector", v}};
}

nlohmann::json to_json(const AnyState& s) {
  return std::visit([](const auto& x) { return to_json(x); }, s);
}

AnyState state_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DomainError("state file: top level must be an object");
  if (j.contains("vector")) {
    const auto& v = j.at("vector");
    if (!v.is_array() || v.size() != 4) throw DomainError("state file: 'vector' needs 4 entries");
    Amplitudes a;
    for (std::size_t i = 0; i < 4; ++i) a[i] = complex_from_json(v[i]);
    return PureState::from_amplitudes(a);
  }
  if (j.contains("matrix")) {
    if (j.contains("dim") && (!j.at("dim").is_number_integer() || j.at("dim").get<int>() != 4)) {
      throw DomainError("state file: only dim 4 (two qubits) is supported");
    }
    const auto& rows = j.at("matrix");
    if (!rows.is_array() || rows.size() != 4) throw DomainError("state file: 'matrix' needs 4 rows");
    ComplexMatrix m(4);
    for (std::size_t i = 0; i < 4; ++i) {
      if (!rows[i].is_array() || rows[i].size() != 4) {
        throw DomainError("state file: every matrix row needs 4 entries");
      }
      for (std::size_t k = 0; k < 4; ++k) m(i, k) = complex_from_json(rows[i][k]);
    }
    return DensityMatrix::from_matrix(m);
  }
  throw DomainError("state file: expected a 'vector' or 'matrix' field");
}

AnyState load_state_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open state file '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError("state file '" + path.string() + "': " + e.what());
  }
  return state_from_json(j);
}

void save_state_file(const std::filesystem::path& path, const AnyState& s) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write state file '" + path.string() + "'");
  out << to_json(s).dump(2) << '\n';
}

}  // namespace qconv
