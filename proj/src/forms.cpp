#include "calibra/forms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>

namespace calibra {

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw AmbientMismatch("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& v) { return std::sqrt(dot(v, v)); }

Vec operator+(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw AmbientMismatch("vec add: dimension mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec operator-(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw AmbientMismatch("vec sub: dimension mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec operator*(double s, const Vec& v) {
  Vec r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = s * v[i];
  return r;
}

namespace detail {

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

// Lexicographic rank of a strictly increasing tuple with entries in 1..n.
std::size_t rank_tuple(const int* idx, int k, int n) {
  std::size_t r = 0;
  int prev = 0;
  for (int j = 0; j < k; ++j) {
    for (int v = prev + 1; v < idx[j]; ++v) {
      r += static_cast<std::size_t>(binomial(n - v, k - j - 1));
    }
    prev = idx[j];
  }
  return r;
}

void unrank_tuple(std::size_t rank, int k, int n, int* idx) {
  int v = 1;
  for (int j = 0; j < k; ++j) {
    for (;; ++v) {
      std::size_t block = static_cast<std::size_t>(binomial(n - v, k - j - 1));
      if (rank < block) break;
      rank -= block;
    }
    idx[j] = v++;
  }
}

double det_small(const double* m, int k) {
  switch (k) {
    case 0:
      return 1.0;
    case 1:
      return m[0];
    case 2:
      return m[0] * m[3] - m[1] * m[2];
    case 3:
      return m[0] * (m[4] * m[8] - m[5] * m[7]) -
             m[1] * (m[3] * m[8] - m[5] * m[6]) +
             m[2] * (m[3] * m[7] - m[4] * m[6]);
    default:
      break;
  }
  // LU with partial pivoting.
  std::array<double, 64> a;
  std::memcpy(a.data(), m, sizeof(double) * k * k);
  double det = 1.0;
  for (int c = 0; c < k; ++c) {
    int piv = c;
    for (int r = c + 1; r < k; ++r) {
      if (std::abs(a[r * k + c]) > std::abs(a[piv * k + c])) piv = r;
    }
    if (a[piv * k + c] == 0.0) return 0.0;
    if (piv != c) {
      for (int j = 0; j < k; ++j) std::swap(a[c * k + j], a[piv * k + j]);
      det = -det;
    }
    det *= a[c * k + c];
    for (int r = c + 1; r < k; ++r) {
      double f = a[r * k + c] / a[c * k + c];
      for (int j = c; j < k; ++j) a[r * k + j] -= f * a[c * k + j];
    }
  }
  return det;
}

void cofactor_small(const double* m, int k, double* cof) {
  if (k == 1) {
    cof[0] = 1.0;
    return;
  }
  std::array<double, 49> minor;
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      int t = 0;
      for (int i = 0; i < k; ++i) {
        if (i == r) continue;
        for (int j = 0; j < k; ++j) {
          if (j == c) continue;
          minor[t++] = m[i * k + j];
        }
      }
      double d = det_small(minor.data(), k - 1);
      cof[r * k + c] = ((r + c) % 2 == 0) ? d : -d;
    }
  }
}

}  // namespace detail

using detail::binomial;
using detail::rank_tuple;
using detail::unrank_tuple;

Form::Form(int n, int k) : n_(n), k_(k) {
  if (n < 1 || n > 8) throw IndexOutOfRange("Form: ambient_dim must be in [1,8]");
  if (k < 0) throw IndexOutOfRange("Form: negative degree");
  coeffs_.assign(static_cast<std::size_t>(binomial(n, k)), 0.0);
}

Form Form::make(int n, int k,
                const std::vector<std::pair<MultiIndex, double>>& terms) {
  if (n < 1 || n > 8) throw IndexOutOfRange("make_form: ambient_dim must be in [1,8]");
  if (k < 0 || k > n) throw IndexOutOfRange("make_form: degree must be in [0,n]");
  Form f(n, k);
  std::array<int, 8> idx{};
  for (const auto& [list, value] : terms) {
    if (static_cast<int>(list.size()) != k)
      throw ArityMismatch("make_form: index list length does not match degree");
    for (int i : list) {
      if (i < 1 || i > n) throw IndexOutOfRange("make_form: index out of [1,n]");
    }
    std::copy(list.begin(), list.end(), idx.begin());
    // Insertion sort, counting swaps for the sign.
    int swaps = 0;
    for (int i = 1; i < k; ++i) {
      int v = idx[i], j = i - 1;
      while (j >= 0 && idx[j] > v) {
        idx[j + 1] = idx[j];
        --j;
        ++swaps;
      }
      idx[j + 1] = v;
    }
    for (int i = 0; i + 1 < k; ++i) {
      if (idx[i] == idx[i + 1])
        throw RepeatedIndex("make_form: repeated entry in index list");
    }
    double sign = (swaps % 2 == 0) ? 1.0 : -1.0;
    f.coeffs_[rank_tuple(idx.data(), k, n)] += sign * value;
  }
  return f;
}

MultiIndex Form::index_at(std::size_t rank) const {
  MultiIndex idx(static_cast<std::size_t>(k_));
  unrank_tuple(rank, k_, n_, idx.data());
  return idx;
}

double Form::coeff(const MultiIndex& idx) const {
  if (static_cast<int>(idx.size()) != k_)
    throw ArityMismatch("coeff: index list length does not match degree");
  if (coeffs_.empty()) return 0.0;
  std::array<int, 8> s{};
  std::copy(idx.begin(), idx.end(), s.begin());
  int swaps = 0;
  for (int i = 1; i < k_; ++i) {
    int v = s[i], j = i - 1;
    while (j >= 0 && s[j] > v) {
      s[j + 1] = s[j];
      --j;
      ++swaps;
    }
    s[j + 1] = v;
  }
  for (int i = 0; i + 1 < k_; ++i) {
    if (s[i] == s[i + 1]) return 0.0;
  }
  for (int i = 0; i < k_; ++i) {
    if (s[i] < 1 || s[i] > n_) throw IndexOutOfRange("coeff: index out of [1,n]");
  }
  double c = coeffs_[rank_tuple(s.data(), k_, n_)];
  return (swaps % 2 == 0) ? c : -c;
}

Form& Form::operator+=(const Form& other) {
  if (n_ != other.n_) throw AmbientMismatch("form add: ambient mismatch");
  if (k_ != other.k_) throw DegreeMismatch("form add: degree mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

Form& Form::operator-=(const Form& other) {
  if (n_ != other.n_) throw AmbientMismatch("form sub: ambient mismatch");
  if (k_ != other.k_) throw DegreeMismatch("form sub: degree mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

Form& Form::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

bool Form::operator==(const Form& other) const {
  return n_ == other.n_ && k_ == other.k_ && coeffs_ == other.coeffs_;
}

double Form::max_abs_coeff() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

double Form::max_abs_diff(const Form& other) const {
  if (n_ != other.n_ || k_ != other.k_)
    throw DegreeMismatch("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    m = std::max(m, std::abs(coeffs_[i] - other.coeffs_[i]));
  return m;
}

Form wedge(const Form& a, const Form& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw AmbientMismatch("wedge: ambient mismatch");
  const int n = a.ambient_dim();
  const int ka = a.degree(), kb = b.degree();
  Form result(n, ka + kb);  // empty (zero) when ka+kb > n
  if (ka + kb > n) return result;

  std::array<int, 8> ia{}, ib{}, merged{};
  for (std::size_t ra = 0; ra < a.term_count(); ++ra) {
    double ca = a.coeff_at(ra);
    if (ca == 0.0) continue;
    unrank_tuple(ra, ka, n, ia.data());
    for (std::size_t rb = 0; rb < b.term_count(); ++rb) {
      double cb = b.coeff_at(rb);
      if (cb == 0.0) continue;
      unrank_tuple(rb, kb, n, ib.data());
      // Merge the two sorted tuples; count inversions (pairs j<i with
      // j from b preceding i from a in the sorted order).
      int pa = 0, pb = 0, out = 0, inversions = 0;
      bool collide = false;
      while (pa < ka && pb < kb) {
        if (ia[pa] == ib[pb]) {
          collide = true;
          break;
        }
        if (ia[pa] < ib[pb]) {
          merged[out++] = ia[pa++];
        } else {
          merged[out++] = ib[pb++];
          inversions += ka - pa;
        }
      }
      if (collide) continue;
      while (pa < ka) merged[out++] = ia[pa++];
      while (pb < kb) merged[out++] = ib[pb++];
      double sign = (inversions % 2 == 0) ? 1.0 : -1.0;
      result.coeff_at(rank_tuple(merged.data(), ka + kb, n)) += sign * ca * cb;
    }
  }
  return result;
}

Form hodge_star(const Form& a) {
  const int n = a.ambient_dim();
  const int k = a.degree();
  if (k > n) return Form(n, 0);  // star of an overflowed zero form
  Form result(n, n - k);
  std::array<int, 8> idx{}, comp{};
  for (std::size_t r = 0; r < a.term_count(); ++r) {
    double c = a.coeff_at(r);
    if (c == 0.0) continue;
    unrank_tuple(r, k, n, idx.data());
    int out = 0, p = 0;
    for (int v = 1; v <= n; ++v) {
      if (p < k && idx[p] == v) {
        ++p;
      } else {
        comp[out++] = v;
      }
    }
    // Parity of the permutation (idx, comp) relative to (1..n): count pairs
    // (i in idx, j in comp) with j < i.
    int inversions = 0;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < n - k; ++j) {
        if (comp[j] < idx[i]) ++inversions;
      }
    }
    double sign = (inversions % 2 == 0) ? 1.0 : -1.0;
    result.coeff_at(rank_tuple(comp.data(), n - k, n)) += sign * c;
  }
  return result;
}

Form contract(const Vec& v, const Form& a) {
  const int n = a.ambient_dim();
  if (static_cast<int>(v.size()) != n)
    throw AmbientMismatch("contract: vector/form ambient mismatch");
  const int k = a.degree();
  if (k == 0) throw DegreeZero("contract: cannot contract a 0-form");
  Form result(n, k - 1);
  if (k > n) return result;
  std::array<int, 8> idx{}, sub{};
  for (std::size_t r = 0; r < a.term_count(); ++r) {
    double c = a.coeff_at(r);
    if (c == 0.0) continue;
    unrank_tuple(r, k, n, idx.data());
    for (int p = 0; p < k; ++p) {
      double vi = v[idx[p] - 1];
      if (vi == 0.0) continue;
      int out = 0;
      for (int q = 0; q < k; ++q) {
        if (q != p) sub[out++] = idx[q];
      }
      double sign = (p % 2 == 0) ? 1.0 : -1.0;
      result.coeff_at(rank_tuple(sub.data(), k - 1, n)) += sign * vi * c;
    }
  }
  return result;
}

double eval(const Form& a, const std::vector<Vec>& vectors) {
  const int n = a.ambient_dim();
  const int k = a.degree();
  if (static_cast<int>(vectors.size()) != k)
    throw ArityMismatch("eval: number of vectors does not match degree");
  for (const Vec& v : vectors) {
    if (static_cast<int>(v.size()) != n)
      throw AmbientMismatch("eval: vector ambient mismatch");
  }
  if (k == 0) return a.term_count() ? a.coeff_at(0) : 0.0;
  std::array<int, 8> idx{};
  std::array<double, 64> m{};
  double total = 0.0;
  for (std::size_t r = 0; r < a.term_count(); ++r) {
    double c = a.coeff_at(r);
    if (c == 0.0) continue;
    unrank_tuple(r, k, n, idx.data());
    for (int row = 0; row < k; ++row) {
      for (int col = 0; col < k; ++col) {
        m[row * k + col] = vectors[col][idx[row] - 1];
      }
    }
    total += c * detail::det_small(m.data(), k);
  }
  return total;
}

double form_inner(const Form& a, const Form& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw AmbientMismatch("form_inner: ambient mismatch");
  if (a.degree() != b.degree()) throw DegreeMismatch("form_inner: degree mismatch");
  double s = 0.0;
  for (std::size_t r = 0; r < a.term_count(); ++r) s += a.coeff_at(r) * b.coeff_at(r);
  return s;
}

Form relabel_indices(const Form& a, int new_n, const std::vector<int>& index_map) {
  if (static_cast<int>(index_map.size()) != a.ambient_dim())
    throw AmbientMismatch("relabel_indices: map size mismatch");
  const int k = a.degree();
  std::vector<std::pair<MultiIndex, double>> terms;
  for (std::size_t r = 0; r < a.term_count(); ++r) {
    double c = a.coeff_at(r);
    if (c == 0.0) continue;
    MultiIndex idx = a.index_at(r);
    for (int& i : idx) i = index_map[static_cast<std::size_t>(i - 1)];
    terms.emplace_back(std::move(idx), c);
  }
  return Form::make(new_n, k, terms);
}

OrientedPlane OrientedPlane::from_orthonormal(int n, std::vector<Vec> basis) {
  for (const Vec& v : basis) {
    if (static_cast<int>(v.size()) != n)
      throw AmbientMismatch("OrientedPlane: basis vector ambient mismatch");
  }
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = i; j < basis.size(); ++j) {
      double want = (i == j) ? 1.0 : 0.0;
      if (std::abs(dot(basis[i], basis[j]) - want) > kOrthoTol)
        throw RankDeficient("OrientedPlane: basis not orthonormal to 1e-12");
    }
  }
  return OrientedPlane{n, static_cast<int>(basis.size()), std::move(basis)};
}

OrientedPlane orthonormalize(const std::vector<Vec>& vectors) {
  if (vectors.empty()) throw RankDeficient("orthonormalize: empty input");
  const int n = static_cast<int>(vectors.front().size());
  std::vector<Vec> basis;
  basis.reserve(vectors.size());
  for (const Vec& v : vectors) {
    if (static_cast<int>(v.size()) != n)
      throw AmbientMismatch("orthonormalize: mixed ambient dimensions");
    Vec w = v;
    for (const Vec& b : basis) {
      double p = dot(w, b);
      for (int i = 0; i < n; ++i) w[i] -= p * b[i];
    }
    // Second pass for numerical orthogonality.
    for (const Vec& b : basis) {
      double p = dot(w, b);
      for (int i = 0; i < n; ++i) w[i] -= p * b[i];
    }
    double len = norm(w);
    if (len < kRankTol)
      throw RankDeficient("orthonormalize: vectors are linearly dependent");
    for (int i = 0; i < n; ++i) w[i] /= len;
    basis.push_back(std::move(w));
  }
  return OrientedPlane{n, static_cast<int>(basis.size()), std::move(basis)};
}

OrientedPlane reverse_orientation(OrientedPlane p) {
  if (p.basis.empty()) return p;
  for (double& c : p.basis.back()) c = -c;
  return p;
}

}  // namespace calibra
