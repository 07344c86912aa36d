#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace trichar::cli {

inline constexpr int kPass = 0;
inline constexpr int kInputError = 1;
inline constexpr int kVerificationFailure = 2;

/// argv-style entry point; args[0] is the program name.
int run(const std::vector<std::string>& args);

/// Quick invariant checks over the whole library. `pass` is the conjunction.
nlohmann::json run_selftest(std::size_t workers, bool& pass);

}  // namespace trichar::cli
