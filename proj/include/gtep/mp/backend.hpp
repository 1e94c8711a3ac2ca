#pragma once

// Engine contract used by every model builder. Any backend that honours the
// SolveOutcome post-conditions (optimal primal, LP duals with the
// d(objective)/d(rhs) sign convention, deterministic results) can stand in for
// the built-in simplex / branch-and-bound pair.

#include <cstdlib>
#include <memory>
#include <stdexcept>
#include <string>

#include "gtep/mp/branch_and_bound.hpp"
#include "gtep/mp/program.hpp"
#include "gtep/mp/simplex.hpp"

namespace gtep::mp {

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual SolveOutcome solve_lp(const MathProgram& program) const = 0;
  [[nodiscard]] virtual SolveOutcome solve_mip(const MathProgram& program) const = 0;
};

class BuiltinBackend final : public SolverBackend {
 public:
  BuiltinBackend() = default;
  explicit BuiltinBackend(MipOptions options) : options_(options) {}

  [[nodiscard]] std::string name() const override { return "builtin"; }
  [[nodiscard]] SolveOutcome solve_lp(const MathProgram& program) const override {
    return mp::solve_lp(program, options_.lp);
  }
  [[nodiscard]] SolveOutcome solve_mip(const MathProgram& program) const override {
    return mp::solve_mip(program, options_);
  }

 private:
  MipOptions options_{};
};

inline const SolverBackend& builtin_backend() {
  static const BuiltinBackend backend;
  return backend;
}

/// Environment variable consulted by the CLI to pick an engine.
inline constexpr const char* kBackendEnv = "GTEP_BACKEND";

/// Resolves a backend by name; only "builtin" ships with the library.
inline const SolverBackend& backend_by_name(const std::string& name) {
  if (name.empty() || name == "builtin") return builtin_backend();
  throw std::invalid_argument("unknown solver backend '" + name + "'");
}

inline const SolverBackend& backend_from_env() {
  const char* v = std::getenv(kBackendEnv);
  return backend_by_name(v == nullptr ? std::string{} : std::string{v});
}

}  // namespace gtep::mp
