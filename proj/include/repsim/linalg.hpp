#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "repsim/pauli.hpp"
#include "repsim/state_vector.hpp"

namespace repsim {

// Dense complex matrix just large enough for few-qubit oracles
// (exact diagonalization, Trotter-step exponentials).
class Matrix {
public:
  Matrix() = default;
  explicit Matrix(size_t n) : n_(n), a_(n * n, cplx{0, 0}) {}

  static Matrix identity(size_t n) {
    Matrix m(n);
    for (size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }

  size_t size() const { return n_; }
  cplx& at(size_t r, size_t c) { return a_[r * n_ + c]; }
  const cplx& at(size_t r, size_t c) const { return a_[r * n_ + c]; }

  Matrix operator*(const Matrix& o) const {
    Matrix out(n_);
    for (size_t i = 0; i < n_; ++i)
      for (size_t k = 0; k < n_; ++k) {
        cplx v = at(i, k);
        if (v == cplx{0, 0}) continue;
        for (size_t j = 0; j < n_; ++j) out.at(i, j) += v * o.at(k, j);
      }
    return out;
  }

  Matrix adjoint() const {
    Matrix out(n_);
    for (size_t i = 0; i < n_; ++i)
      for (size_t j = 0; j < n_; ++j) out.at(j, i) = std::conj(at(i, j));
    return out;
  }

  void add_scaled(const Matrix& o, cplx w) {
    for (size_t i = 0; i < a_.size(); ++i) a_[i] += w * o.a_[i];
  }

  std::vector<cplx> apply(const std::vector<cplx>& v) const {
    std::vector<cplx> out(n_, cplx{0, 0});
    for (size_t i = 0; i < n_; ++i)
      for (size_t j = 0; j < n_; ++j) out[i] += at(i, j) * v[j];
    return out;
  }

  double max_abs() const {
    double m = 0;
    for (const auto& v : a_) m = std::max(m, std::abs(v));
    return m;
  }

private:
  size_t n_ = 0;
  std::vector<cplx> a_;
};

// n-qubit matrix representation of a Pauli string (little-endian ordering).
inline Matrix pauli_matrix(const PauliString& p, int n_qubits) {
  size_t dim = size_t{1} << n_qubits;
  Matrix m(dim);
  for (size_t col = 0; col < dim; ++col) {
    size_t row = col;
    cplx phase = p.phase();
    for (const auto& [q, l] : p.letters()) {
      size_t bit = size_t{1} << q;
      bool one = (row & bit) != 0;
      switch (l) {
        case PauliLetter::X: row ^= bit; break;
        case PauliLetter::Y: phase *= one ? cplx{0, -1} : cplx{0, 1}; row ^= bit; break;
        case PauliLetter::Z: if (one) phase = -phase; break;
        default: break;
      }
    }
    m.at(row, col) += phase;
  }
  return m;
}

struct EigenSystem {
  std::vector<double> values;          // ascending
  Matrix vectors;                      // columns are eigenvectors
};

// Cyclic Jacobi diagonalization of a Hermitian matrix. Plenty for the 4x4
// Hamiltonians and small Trotter oracles used here.
inline EigenSystem eigh(const Matrix& input, int max_sweeps = 100, double tol = 1e-13) {
  size_t n = input.size();
  Matrix a = input;
  Matrix v = Matrix::identity(n);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0;
    for (size_t p = 0; p < n; ++p)
      for (size_t q = p + 1; q < n; ++q) off += std::norm(a.at(p, q));
    if (off < tol * tol) break;

    for (size_t p = 0; p < n; ++p) {
      for (size_t q = p + 1; q < n; ++q) {
        cplx apq = a.at(p, q);
        double mag = std::abs(apq);
        if (mag < 1e-300) continue;
        double app = a.at(p, p).real();
        double aqq = a.at(q, q).real();
        cplx phase = apq / mag;
        double zeta = (aqq - app) / (2 * mag);
        double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(zeta * zeta + 1));
        double c = 1.0 / std::sqrt(t * t + 1);
        double s = t * c;
        // columns p, q rotate: new_p = c*p - s*conj(phase)*q ; new_q = s*phase*p + c*q
        for (size_t i = 0; i < n; ++i) {
          cplx aip = a.at(i, p), aiq = a.at(i, q);
          a.at(i, p) = c * aip - s * std::conj(phase) * aiq;
          a.at(i, q) = s * phase * aip + c * aiq;
          cplx vip = v.at(i, p), viq = v.at(i, q);
          v.at(i, p) = c * vip - s * std::conj(phase) * viq;
          v.at(i, q) = s * phase * vip + c * viq;
        }
        for (size_t j = 0; j < n; ++j) {
          cplx apj = a.at(p, j), aqj = a.at(q, j);
          a.at(p, j) = c * apj - s * phase * aqj;
          a.at(q, j) = s * std::conj(phase) * apj + c * aqj;
        }
      }
    }
  }

  // sort ascending by eigenvalue
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](size_t x, size_t y) { return a.at(x, x).real() < a.at(y, y).real(); });
  EigenSystem es;
  es.values.resize(n);
  es.vectors = Matrix(n);
  for (size_t k = 0; k < n; ++k) {
    es.values[k] = a.at(idx[k], idx[k]).real();
    for (size_t i = 0; i < n; ++i) es.vectors.at(i, k) = v.at(i, idx[k]);
  }
  return es;
}

// exp(-i H t) for Hermitian H via its eigendecomposition.
inline Matrix hermitian_propagator(const Matrix& h, double t) {
  EigenSystem es = eigh(h);
  size_t n = h.size();
  Matrix d(n);
  for (size_t k = 0; k < n; ++k) d.at(k, k) = std::exp(cplx{0, -es.values[k] * t});
  return es.vectors * d * es.vectors.adjoint();
}

}  // namespace repsim
