#pragma once

#include <vector>

#include "nlslab/groundstate.hpp"

namespace nlslab {

// Cell-centred radial grid r_i = (i + 1/2) h on [0, R] for radial profiles in
// any dimension. Profiles vanish beyond R.
struct RadialGrid {
  int dim = 1;
  int points = 4000;
  double radius = 40.0;

  void validate() const;
  double spacing() const { return radius / points; }
  double r(int i) const { return (i + 0.5) * spacing(); }
  // Measure of the cell [i h, (i+1) h] per unit solid angle.
  double cell_measure(int i) const;
  // (i+1)^{n-1} h^{n-1}: the area factor of the face between cells i and i+1.
  double face_area(int i) const;
  // Surface measure of the unit sphere in R^n.
  double sphere_area() const;
};

struct RadialField {
  RadialGrid grid;
  std::vector<std::vector<double>> components;
};

FunctionalValues radial_dynamic_functionals(const RadialField& u, const SystemSpec& spec);
FunctionalValues radial_functionals(const RadialField& u, const EllipticParams& params);

struct RadialGroundState {
  RadialField psi;
  EllipticParams params;
  FunctionalValues functionals;
  double residual = 0.0;
  double stabilizer = 1.0;
  int iterations = 0;
  double damping = 1.0;
  bool converged = false;
  std::string message;
};

RadialGroundState solve_radial_ground_state(const EllipticParams& params, const RadialGrid& grid,
                                            const SolverOptions& options = {});

GroundStateSummary summarize(const RadialGroundState& gs);

// a * psi(r / lambda) by linear interpolation on the same grid.
RadialField scaled_profile(const RadialField& psi, double amplitude, double dilation);

}  // namespace nlslab
