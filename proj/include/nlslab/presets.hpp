#pragma once

#include <string>
#include <string_view>

#include "nlslab/nonlinearity.hpp"

namespace nlslab {

// Two-wave quadratic interaction F = conj(z1)^2 z2 with alpha = (1, 1),
// gamma = (1, kappa), beta = 0.
SystemSpec quadratic_preset(double kappa, int dim);

// Third-harmonic cubic interaction with alpha = (1, sigma), gamma = (1, 1),
// beta = (1, mu).
SystemSpec cubic_preset(double sigma, double mu, int dim);

// Scalar focusing cubic equation, F = |z|^4 / 4.
SystemSpec single_cubic_preset(int dim);

bool looks_like_preset(std::string_view text);

// Accepts `quadratic(kappa=0.5)`, `quadratic(0.5)`, `cubic(sigma=3, mu=1)`,
// `single_cubic` and similar.
SystemSpec preset_from_expression(std::string_view expr, int dim);

// A preset expression or a path to a spec file. A positive `dim_override`
// replaces the dimension read from a file.
SystemSpec load_spec(const std::string& source, int dim_override);

// Same preset family with one named parameter replaced, for sweeps.
std::string with_preset_parameter(std::string_view expr, const std::string& key, double value);

}  // namespace nlslab
