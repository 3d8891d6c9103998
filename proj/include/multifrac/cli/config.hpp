#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "multifrac/distribution.hpp"
#include "multifrac/errors.hpp"
#include "multifrac/ifs.hpp"
#include "multifrac/multifractal.hpp"
#include "multifrac/potential.hpp"

namespace multifrac::cli {

/// Reading or writing a file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

struct Depths {
  int pressure = 8;    // locally constant approximation of geometric potentials
  int measure = 8;     // approximation depth of non-table Gibbs measures
  int staircase = 12;  // cylinder depth for staircase, theta and hoelder brackets
  int coarse = 10;     // partition depth of the coarse spectrum
};

struct RangeSettings {
  int cycle_length = 8;
  double beta_max = 20.0;
};

struct SceneConfig {
  nlohmann::json document;
  IfsSpec ifs;
  std::optional<IfsSpec> ifs_g;
  nlohmann::json potential;  // checked at parse time, built by build_psi
  BetaGrid beta_grid{-20.0, 20.0, 0.1};
  Depths depths;
  std::vector<double> q_grid{-2.0, -1.0, 0.0, 1.0, 2.0, 3.0};
  HoelderOptions radius;
  RangeSettings range;
  std::vector<double> points;
  int conjugacy_samples = 101;
  std::uint64_t seed = 0;
  std::string output_dir = ".";

  /// FNV-1a hash of the compact dump of the document, as 16 hex digits.
  std::string hash() const;
};

/// Strict schema: unknown keys and wrong types throw ValidationError.
SceneConfig parse_config(const nlohmann::json& document);
/// Throws IoError when the file cannot be read, ValidationError on bad JSON.
SceneConfig load_config(const std::string& path);

IfsSpec parse_ifs(const nlohmann::json& j, const std::string& where);

/// The psi potential of a scene. Geometric potentials refer to the systems
/// passed in; random locally constant tables are drawn from the scene seed.
Potential build_psi(const SceneConfig& config, const std::shared_ptr<const Ifs>& ifs,
                    const std::shared_ptr<const Ifs>& ifs_g);

/// Replaces every configured depth with n.
void apply_depth_override(SceneConfig& config, int n);

PressureOptions pressure_options(const SceneConfig& config);

}  // namespace multifrac::cli
