#pragma once

#include <string>
#include <vector>

#include "disloc/dislocation.hpp"
#include "disloc/geometry.hpp"
#include "disloc/quadrature.hpp"

namespace disloc {

// Radial C^2 test function amp * (1 - |p-c|^2/R^2)^3 supported on a disc.
// Its differential is hand-coded, so pairings against d(test) never involve
// numerical differentiation.
struct TestFunction {
  Point center{0.5, 0.5};
  double radius = 0.25;
  double amplitude = 1.0;

  double value(Point p) const;
  Covector gradient(Point p) const;  // exact differential of value
  double mass() const;               // plane integral: amp * pi * R^2 / 4
  Rect bbox() const;                 // support box clipped to the unit square

  // x-extent of the support slice along the horizontal line y = level;
  // empty (lo > hi) when the line misses the disc.
  void slice(double level, double& lo, double& hi) const;
};

// Compactly supported test 1-form with its exact exterior derivative.
struct TestOneForm {
  std::string id;
  CovectorField alpha;
  ScalarField d_density;  // coefficient of dx^dy in d(alpha) (exact)
  Rect support;           // bounding box of the support
  double sup_value = 0.0; // max Euclidean pointwise norm over the support

  static TestOneForm from_bumps(std::string id, std::vector<TestFunction> dx_parts,
                                std::vector<TestFunction> dy_parts);
  static TestOneForm exact(std::string id, TestFunction f);  // alpha = d(f)
};

// Deterministic families used by the experiments (fixed seed => fixed family).
std::vector<TestFunction> standard_test_functions(int count, unsigned long long seed);
std::vector<TestOneForm> standard_test_forms(int count, unsigned long long seed);

struct PairingResult {
  std::string form_id;
  std::string test_id;
  double value = 0.0;
  unsigned long long spec_hash = 0;
};

// CSV export; header row form_id,test_id,value,spec_hash, '.' decimals.
std::string pairing_csv(const std::vector<PairingResult>& rows);

// T_omega(alpha): integral of wedge(omega, alpha) over the support of alpha,
// with quadrature panels snapped to the declared cut geometry.
double pair_current(const CovectorField& omega, const CutSet& cuts,
                    const TestOneForm& alpha, const QuadratureSpec& spec,
                    Exec exec = Exec::Parallel);

// Boundary current against a test function: T_omega(d f).
double boundary_pairing(const CovectorField& omega, const CutSet& cuts,
                        const TestFunction& f, const QuadratureSpec& spec,
                        Exec exec = Exec::Parallel);

// The same boundary pairing evaluated through the jump representation:
// integral over the cut segment of f(x, 1/2) times the jump density.
double boundary_jump_sum(const DislocationForm& form, const TestFunction& f);

}  // namespace disloc
