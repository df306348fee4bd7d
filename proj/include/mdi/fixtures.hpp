// Closed-form qutrit setting transforms, used as golden references by the
// self test and the test suites.

#pragma once

#include "mdi/numerics.hpp"

namespace mdi {

// Forward transform for U_{nm} (prefactor 1/3 included).
RMatrix reference_qutrit_transform(int m, int n);
// Its inverse (prefactor 3 included).
RMatrix reference_qutrit_inverse(int m, int n);

struct FixtureReport {
  int checked = 0;
  double max_forward_error = 0.0;
  double max_inverse_error = 0.0;
};

// Compares every computed qutrit transform and inverse against the references.
FixtureReport check_qutrit_fixtures();

}  // namespace mdi
