#pragma once

#include <json.hpp>
#include <string>

#include "fracdev/expansion.hpp"
#include "fracdev/monte_carlo.hpp"
#include "fracdev/sde_spec.hpp"

namespace fracdev::io {

/// Single JSON document of record per experiment:
/// {hurst, n, d, a, T, drift, diffusion, f, expansion:{order},
///  mc:{paths,steps,seed,scheme}, moments:{method,tol}}.
/// Unknown keys are rejected.
struct SpecDocument {
  SdeSpec spec;
  int expansion_order = 2;
  mc::McConfig mc;
  std::string moment_method = "pairing";  // or "mc"
  double moment_tol = 1e-6;
};

SpecDocument spec_from_json(const nlohmann::json& j);
SpecDocument load_spec(const std::string& path);
nlohmann::json spec_to_json(const SpecDocument& doc);

nlohmann::json slope_to_json(const mc::SlopeFit& fit);
nlohmann::json expansion_to_json(const expansion::Expansion& e);

}  // namespace fracdev::io
