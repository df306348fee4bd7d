#include "mdi/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mdi/bases.hpp"

namespace mdi {

namespace {

struct Trig {
  double c1, s1, c2, s2;
  explicit Trig(int n) {
    const double t = 2.0 * std::numbers::pi * n / 3.0;
    c1 = std::cos(t);
    s1 = std::sin(t);
    c2 = std::cos(2.0 * t);
    s2 = std::sin(2.0 * t);
  }
};

RMatrix rows(std::initializer_list<std::initializer_list<double>> data) {
  RMatrix m = RMatrix::Zero(9, 9);
  int r = 0;
  for (const auto& row : data) {
    int c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

}  // namespace

RMatrix reference_qutrit_transform(int m, int n) {
  const Trig t(n);
  const double r3 = std::sqrt(3.0);
  RMatrix out;
  switch (m) {
    case 0:
      out = rows({{1, 0, 0, 0, 0, 0, 0, 0, 0},
                  {1, 1, 0, 0, 0, 0, 0, 0, 0},
                  {1, 0, r3 / 2, 0, 0, 0, 0, 0, 0},
                  {1, 0, 0, t.c1, 0, 0, t.s1, 0, 0},
                  {1, 0, 0, 0, t.c2, 0, 0, t.s2, 0},
                  {1, 0, 0, 0, 0, t.c1, 0, 0, t.s1},
                  {1, 0, 0, -t.s1, 0, 0, t.c1, 0, 0},
                  {1, 0, 0, 0, -t.s2, 0, 0, t.c2, 0},
                  {1, 0, 0, 0, 0, -t.s1, 0, 0, t.c1}});
      break;
    case 1:
      out = rows({{1, 0, 0, 0, 0, 0, 0, 0, 0},
                  {1, -0.5, -r3 / 2, 0, 0, 0, 0, 0, 0},
                  {1, 0.75, -r3 / 4, 0, 0, 0, 0, 0, 0},
                  {1, 0, 0, 0, t.c1, 0, 0, -t.s1, 0},
                  {1, 0, 0, 0, 0, t.c2, 0, 0, -t.s2},
                  {1, 0, 0, t.c1, 0, 0, t.s1, 0, 0},
                  {1, 0, 0, 0, -t.s1, 0, 0, -t.c1, 0},
                  {1, 0, 0, 0, 0, -t.s2, 0, 0, -t.c2},
                  {1, 0, 0, -t.s1, 0, 0, t.c1, 0, 0}});
      break;
    case 2:
      out = rows({{1, 0, 0, 0, 0, 0, 0, 0, 0},
                  {1, -0.5, r3 / 2, 0, 0, 0, 0, 0, 0},
                  {1, -0.75, -r3 / 4, 0, 0, 0, 0, 0, 0},
                  {1, 0, 0, 0, 0, t.c1, 0, 0, t.s1},
                  {1, 0, 0, t.c2, 0, 0, -t.s2, 0, 0},
                  {1, 0, 0, 0, t.c1, 0, 0, -t.s1, 0},
                  {1, 0, 0, 0, 0, -t.s1, 0, 0, t.c1},
                  {1, 0, 0, -t.s2, 0, 0, -t.c2, 0, 0},
                  {1, 0, 0, 0, -t.s1, 0, 0, -t.c1, 0}});
      break;
    default:
      throw Error(ErrorKind::Value, "reference_qutrit_transform: m must be 0, 1 or 2");
  }
  return out / 3.0;
}

RMatrix reference_qutrit_inverse(int m, int n) {
  const Trig t(n);
  const double r3 = std::sqrt(3.0);
  RMatrix out;
  switch (m) {
    case 0:
      out = rows({{1, 0, 0, 0, 0, 0, 0, 0, 0},
                  {-1, 1, 0, 0, 0, 0, 0, 0, 0},
                  {-2 / r3, 0, 2 / r3, 0, 0, 0, 0, 0, 0},
                  {-t.c1 + t.s1, 0, 0, t.c1, 0, 0, -t.s1, 0, 0},
                  {-t.c2 + t.s2, 0, 0, 0, t.c2, 0, 0, -t.s2, 0},
                  {-t.c1 + t.s1, 0, 0, 0, 0, t.c1, 0, 0, -t.s1},
                  {-t.c1 - t.s1, 0, 0, t.s1, 0, 0, t.c1, 0, 0},
                  {-t.c2 - t.s2, 0, 0, 0, t.s2, 0, 0, t.c2, 0},
                  {-t.c1 - t.s1, 0, 0, 0, 0, t.s1, 0, 0, t.c1}});
      break;
    case 1:
      out = rows({{1, 0, 0, 0, 0, 0, 0, 0, 0},
                  {-0.5, -0.5, 1, 0, 0, 0, 0, 0, 0},
                  {5 / (2 * r3), -r3 / 2, -1 / r3, 0, 0, 0, 0, 0, 0},
                  {-t.c1 + t.s1, 0, 0, 0, 0, t.c1, 0, 0, -t.s1},
                  {-t.c1 + t.s1, 0, 0, t.c1, 0, 0, -t.s1, 0, 0},
                  {-t.c2 + t.s2, 0, 0, 0, t.c2, 0, 0, -t.s2, 0},
                  {-t.c1 - t.s1, 0, 0, 0, 0, t.s1, 0, 0, t.c1},
                  {t.c1 + t.s1, 0, 0, -t.s1, 0, 0, -t.c1, 0, 0},
                  {t.c2 + t.s2, 0, 0, 0, -t.s2, 0, 0, -t.c2, 0}});
      break;
    case 2:
      out = rows({{1, 0, 0, 0, 0, 0, 0, 0, 0},
                  {1.5, -0.5, -1, 0, 0, 0, 0, 0, 0},
                  {-1 / (2 * r3), r3 / 2, -1 / r3, 0, 0, 0, 0, 0, 0},
                  {-t.c2 + t.s2, 0, 0, 0, t.c2, 0, 0, -t.s2, 0},
                  {-t.c1 + t.s1, 0, 0, 0, 0, t.c1, 0, 0, -t.s1},
                  {-t.c1 + t.s1, 0, 0, t.c1, 0, 0, -t.s1, 0, 0},
                  {t.c2 + t.s2, 0, 0, 0, -t.s2, 0, 0, -t.c2, 0},
                  {t.c1 + t.s1, 0, 0, 0, 0, -t.s1, 0, 0, -t.c1},
                  {-t.c1 - t.s1, 0, 0, t.s1, 0, 0, t.c1, 0, 0}});
      break;
    default:
      throw Error(ErrorKind::Value, "reference_qutrit_inverse: m must be 0, 1 or 2");
  }
  return out * 3.0;
}

FixtureReport check_qutrit_fixtures() {
  const auto& tk = qudit_toolkit(3);
  FixtureReport rep;
  for (int m = 0; m < 3; ++m)
    for (int n = 0; n < 3; ++n) {
      const auto& t = tk.transforms[n * 3 + m];
      rep.max_forward_error =
          std::max(rep.max_forward_error, (t.forward - reference_qutrit_transform(m, n)).cwiseAbs().maxCoeff());
      rep.max_inverse_error =
          std::max(rep.max_inverse_error, (t.inverse - reference_qutrit_inverse(m, n)).cwiseAbs().maxCoeff());
      rep.checked += 2;
    }
  return rep;
}

}  // namespace mdi
