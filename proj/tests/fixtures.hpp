// Shared fixture for the calculus, dynamics and verification tests:
// d = 1, window (-1, 1), rho = exp(-x^2/2), tau = (delta_1 + delta_2)/2.
#pragma once

#include "cpspace/verify.hpp"

namespace fixture {

using namespace cpspace;

inline IntensityDensity rho() { return IntensityDensity::gaussian({0.0}, 1.0, 1.0); }
inline Window window() { return Window::cube(1, -1.0, 1.0); }
inline MarkLaw tau() { return MarkLaw::mixture({1.0, 2.0}, {0.5, 0.5}); }

inline Model model() { return Model{rho(), window(), tau(), MarkSpaceLaw::uniform_box(Window({0.0}, {1.0})), {}}; }

inline ScalarField b0() { return ScalarField::bump({0.0}, 0.5); }
inline ScalarField bp() { return ScalarField::bump({0.3}, 0.5); }
inline ScalarField bm() { return ScalarField::bump({-0.3}, 0.5); }

inline CompactVectorField v0() { return CompactVectorField::scaled_bump({1.0}, b0()); }
inline CompactVectorField vp() { return CompactVectorField::scaled_bump({0.8}, bp()); }
inline CompactVectorField vm() { return CompactVectorField::scaled_bump({-0.6}, bm()); }

inline CylinderFunction f_tanh() { return CylinderFunction(outer::tanh_of_linear({1.0, 0.5}), {b0(), bp()}); }
inline CylinderFunction g_exp() { return CylinderFunction(outer::exp_of_linear({-0.5}), {bm()}); }
inline CylinderFunction f_lin() { return CylinderFunction(outer::linear({1.0}), {b0()}); }
inline CylinderFunction f_poly() {
  return CylinderFunction(outer::polynomial_of_linear({0.0, 1.0, 0.5}, {1.0, 1.0}), {bm(), bp()});
}

/// Three atoms, mixed marks, well inside the window.
inline MarkedConfiguration three_atoms() { return MarkedConfiguration::compound(1, {-0.2, 1.0, 0.1, 2.0, 0.35, 1.0}); }

}  // namespace fixture
