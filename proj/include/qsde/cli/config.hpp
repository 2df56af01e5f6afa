#pragma once

// Experiment configuration, read from JSON.
//
//   {
//     "mode": "canonical-pair",
//     "model": {"preset": "driven-qubit", "gamma": 1.0, "delta": 1.0, "drive": 2.0},
//     "dt": 1e-3, "t_max": 5.0, "n_traj": 1, "base_seed": 42,
//     "observables": ["sigma_z", {"name": "px", "matrix": [[0, 1], [1, 0]]}],
//     "output_path": "out"
//   }
//
// Matrices are arrays of rows; an entry is a number or a [re, im] pair.
// Inline models give "couplings" (list of matrices), "hamiltonian" and
// optionally "psi0". See README.md for every key.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qsde/ensemble.hpp"
#include "qsde/linalg.hpp"

namespace qsde::cli {

enum class Mode { Belavkin, Gisin, CanonicalPair, Feedback, Lindblad, DetuningSweep, Prop2Check };

std::string mode_name(Mode m);
/// Throws ConfigError naming `field` for unknown names.
Mode parse_mode(std::string_view name, const std::string& field = "mode");

class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct ModelConfig {
  std::string preset;  // empty for inline models
  double gamma = 1.0;
  double delta = 1.0;
  double drive = 2.0;  // driven-qubit
  double eps = 0.5;    // cavity-truncated
  Index levels = 4;    // cavity-truncated

  std::vector<Operator> couplings;
  Operator hamiltonian;
  StateVector psi0;
};

/// Named primitive in a network description.
struct NetworkComponent {
  std::string name;
  std::string type;  // "system", "weyl", "triple", "euclidean"
  std::vector<Operator> couplings;  // triple
  Operator hamiltonian;             // triple
  ComplexVector beta;               // weyl, euclidean
  Operator u;                       // euclidean
  double epsilon = 0.0;             // euclidean
};

/// Components listed input-first; the effective system is
/// series[last] <| ... <| series[0].
struct NetworkConfig {
  std::vector<NetworkComponent> components;
  std::vector<std::string> series;
};

struct ExperimentConfig {
  Mode mode = Mode::Belavkin;
  ModelConfig model;
  double dt = 1e-3;
  double t_max = 1.0;
  std::size_t n_traj = 1;
  std::uint64_t base_seed = 0;
  std::vector<NamedObservable> observables;
  std::string output_path = "out";

  // canonical-pair, prop2-check
  int canonical_n = 2;
  double canonical_phi = 0.0;
  int canonical_sign = 1;
  /// canonical-pair and feedback fail (exit 5) when a trajectory's max
  /// residual reaches this value.
  double residual_tolerance = 0.05;

  // detuning-sweep
  std::vector<double> omegas{10.0, 30.0, 100.0};
  double detuning_phi = 0.0;

  std::optional<NetworkConfig> network;

  bool dump_paths = false;
  bool dump_states = false;
  bool parallel = true;
};

ExperimentConfig parse_config(std::string_view text);
std::string serialize_config(const ExperimentConfig& config);

/// FNV-1a over the serialized config.
std::uint64_t config_hash(const ExperimentConfig& config);

/// Expands preset parameters into couplings, Hamiltonian and initial state.
/// Throws ConfigError("model.preset", ...) for unknown names.
void expand_preset(ModelConfig& model);

/// Effective (L, H) after applying the network, if any.
ModelSpec effective_model(const ExperimentConfig& config);

/// sigma_x, sigma_y, sigma_z, sigma_minus, sigma_plus (dim 2); a, a_dag,
/// number (any dim); identity.
Operator named_operator(std::string_view name, Index dim, const std::string& field);

}  // namespace qsde::cli
