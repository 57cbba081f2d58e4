#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "qconv/states.hpp"

namespace qconv {

// JSON state files.
//   mixed: {"dim": 4, "matrix": [[[re, im], ...], ...]}   (row-major)
//   pure:  {"vector": [[re, im], ...]}
// Loading re-validates every state invariant.

nlohmann::json to_json(const DensityMatrix& rho);
nlohmann::json to_json(const PureState& psi);
nlohmann::json to_json(const AnyState& s);
nlohmann::json complex_to_json(Complex z);
nlohmann::json matrix_to_json(const ComplexMatrix& m);

AnyState state_from_json(const nlohmann::json& j);
AnyState load_state_file(const std::filesystem::path& path);
void save_state_file(const std::filesystem::path& path, const AnyState& s);

}  // namespace qconv
