#pragma once

#include <random>

#include "calibra/forms.hpp"

namespace testutil {

using calibra::Form;
using calibra::MultiIndex;
using calibra::OrientedPlane;
using calibra::Vec;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Vec random_vec(std::mt19937_64& g, int n) {
  std::normal_distribution<double> gauss;
  Vec v(static_cast<std::size_t>(n));
  for (double& x : v) x = gauss(g);
  return v;
}

inline OrientedPlane random_plane(std::mt19937_64& g, int n, int k) {
  for (;;) {
    std::vector<Vec> raw;
    for (int i = 0; i < k; ++i) raw.push_back(random_vec(g, n));
    try {
      return calibra::orthonormalize(raw);
    } catch (const calibra::RankDeficient&) {
    }
  }
}

inline Form random_form(std::mt19937_64& g, int n, int k) {
  std::normal_distribution<double> gauss;
  Form f(n, k);
  for (std::size_t r = 0; r < f.term_count(); ++r) f.coeff_at(r) = gauss(g);
  return f;
}

// Independent sign oracle: parity of the permutation taking `perm` to sorted
// order, by explicit inversion count.  0 if any index repeats.
inline int permutation_sign(const MultiIndex& perm) {
  int inv = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    for (std::size_t j = i + 1; j < perm.size(); ++j) {
      if (perm[i] == perm[j]) return 0;
      if (perm[i] > perm[j]) ++inv;
    }
  }
  return inv % 2 == 0 ? 1 : -1;
}

inline Vec unit(int n, int i) {  // e_i (1-based)
  Vec v(static_cast<std::size_t>(n), 0.0);
  v[static_cast<std::size_t>(i - 1)] = 1.0;
  return v;
}

}  // namespace testutil
