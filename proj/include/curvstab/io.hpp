#pragma once

// JSON input formats (surface description, sweep configuration) and JSON report records.

#include "curvstab/identity_checks.hpp"
#include "curvstab/polynomial_lemmas.hpp"
#include "curvstab/radial_field.hpp"
#include "curvstab/stability_lab.hpp"

#include <nlohmann/json.hpp>

#include <limits>
#include <string>

namespace curvstab {

using Json = nlohmann::ordered_json;

struct SurfaceSpec {
  RadialField field;
  bool normalize_volume = false;
};

/// {"n": int, "terms": [{"coeff": float, "exponents": [int, ...]}], "normalize_volume": bool}
/// Unknown keys and malformed entries raise ConfigError.
SurfaceSpec parse_surface(const Json& j);
Json surface_to_json(const RadialField& field, bool normalize_volume);

/// {"n", "p": [..], "families": [{"name", "terms", "eps"}], "resolution": [..], "seed"}
SweepConfig parse_sweep_config(const Json& j);
Json sweep_config_to_json(const SweepConfig& config);

/// Reads and parses a JSON file; ConfigError when it is missing or invalid.
Json read_json_file(const std::string& path);

Json to_json(const ZeroReport& report);
Json to_json(const BoundsReport& report);
Json to_json(const DeficitReport& report);
Json to_json(const IdentityResidual& residual, double slope = std::numeric_limits<double>::quiet_NaN());
Json to_json(const CenterSolve& solve);

/// Vec -> JSON array
Json vec_to_json(const Vec& v);

}  // namespace curvstab
