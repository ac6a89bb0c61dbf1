#include "schottky/eichler.hpp"

#include <cassert>

namespace schottky {

namespace {

Polynomial multiply(const Polynomial& lhs, const Polynomial& rhs) {
  Polynomial out = Polynomial::Zero(lhs.size() + rhs.size() - 1);
  for (Eigen::Index i = 0; i < lhs.size(); ++i) out.segment(i, rhs.size()) += lhs(i) * rhs;
  return out;
}

Polynomial linear(Complex c0, Complex c1) {
  Polynomial p(2);
  p << c0, c1;
  return p;
}

void check_degree(const Polynomial& p, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "n must be at least 1");
  if (p.size() != 2 * n - 1) throw Error(ErrorKind::InvalidInput, "polynomial must have 2n-1 coefficients");
}

void check_cocycle(const Cocycle& c, const SchottkyGroup& group, int n) {
  if (static_cast<int>(c.generator_values.size()) != group.genus()) {
    throw Error(ErrorKind::InvalidInput, "cocycle needs one polynomial per generator");
  }
  for (const auto& p : c.generator_values) check_degree(p, n);
}

}  // namespace

Complex evaluate_polynomial(const Polynomial& p, Complex z) {
  Complex acc{};
  for (Eigen::Index k = p.size() - 1; k >= 0; --k) acc = acc * z + p(k);
  return acc;
}

Polynomial act(const MoebiusMap& m, const Polynomial& p, int n) {
  check_degree(p, n);
  const int top = 2 * n - 2;
  // sum_k p_k (az+b)^k (cz+d)^{2n-2-k}
  const Polynomial num = linear(m.b(), m.a());
  const Polynomial den = linear(m.d(), m.c());
  std::vector<Polynomial> num_pow{Polynomial::Ones(1)};
  std::vector<Polynomial> den_pow{Polynomial::Ones(1)};
  for (int k = 1; k <= top; ++k) {
    num_pow.push_back(multiply(num_pow.back(), num));
    den_pow.push_back(multiply(den_pow.back(), den));
  }
  Polynomial out = Polynomial::Zero(top + 1);
  for (int k = 0; k <= top; ++k) {
    if (p(k) == Complex(0)) continue;
    out += p(k) * multiply(num_pow[k], den_pow[top - k]);
  }
  return out;
}

Polynomial extend(const Cocycle& c, std::span<const Letter> w, const SchottkyGroup& group, int n) {
  check_cocycle(c, group, n);
  const Word reduced = reduce(w);
  auto letter_value = [&](Letter r) -> Polynomial {
    const Polynomial& forward = c.generator_values[std::abs(r) - 1];
    if (r > 0) return forward;
    return -act(group.generator(r), forward, n);
  };
  Polynomial acc = Polynomial::Zero(2 * n - 1);
  for (Letter r : reduced) acc = act(group.generator(r), acc, n) + letter_value(r);
  return acc;
}

Cocycle coboundary(const Polynomial& p, const SchottkyGroup& group, int n) {
  check_degree(p, n);
  Cocycle out;
  for (int r = 1; r <= group.genus(); ++r) out.generator_values.push_back(act(group.generator(r), p, n) - p);
  return out;
}

Cocycle normalize(const Cocycle& c, const SchottkyGroup& group, int n) {
  if (n < 2 || group.genus() < 2) throw Error(ErrorKind::InvalidInput, "normalization needs n >= 2 and g >= 2");
  check_cocycle(c, group, n);
  const int dim = 2 * n - 1;
  // Conditions: coefficients k != n-1 of chi[L_1], then chi[L_2](1).
  auto conditions = [&](const Polynomial& chi1, const Polynomial& chi2) {
    Eigen::VectorXcd v(dim);
    int row = 0;
    for (int k = 0; k < dim; ++k) {
      if (k != n - 1) v(row++) = chi1(k);
    }
    v(row) = evaluate_polynomial(chi2, 1.0);
    return v;
  };
  Eigen::MatrixXcd system(dim, dim);
  for (int j = 0; j < dim; ++j) {
    const Polynomial e = Polynomial::Unit(dim, j);
    const Cocycle b = coboundary(e, group, n);
    system.col(j) = conditions(b.generator_values[0], b.generator_values[1]);
  }
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(system);
  lu.setThreshold(1e-10);
  if (lu.rank() < dim) throw Error(ErrorKind::SingularNormalization, "normalization system is rank deficient");
  const Polynomial p = lu.solve(-conditions(c.generator_values[0], c.generator_values[1]));
  Cocycle out = coboundary(p, group, n);
  for (std::size_t r = 0; r < out.generator_values.size(); ++r) out.generator_values[r] += c.generator_values[r];
  return out;
}

std::vector<Cocycle> normalized_basis(int g, int n) {
  if (n < 2 || g < 2) throw Error(ErrorKind::InvalidInput, "basis needs n >= 2 and g >= 2");
  const int dim = 2 * n - 1;
  const Polynomial zero = Polynomial::Zero(dim);
  std::vector<Cocycle> basis;
  auto slot_only = [&](int slot, const Polynomial& p) {
    Cocycle c{std::vector<Polynomial>(g, zero)};
    c.generator_values[slot] = p;
    basis.push_back(std::move(c));
  };
  slot_only(0, Polynomial::Unit(dim, n - 1));
  Polynomial shifted = Polynomial::Ones(1);
  for (int k = 1; k <= dim - 1; ++k) {
    shifted = multiply(shifted, linear(-1.0, 1.0));
    Polynomial p = zero;
    p.head(shifted.size()) = shifted;
    slot_only(1, p);
  }
  for (int slot = 2; slot < g; ++slot) {
    for (int k = 0; k < dim; ++k) slot_only(slot, Polynomial::Unit(dim, k));
  }
  return basis;
}

int tilde_dimension(int g, int n) {
  if (g < 2 || n < 2) throw Error(ErrorKind::InvalidInput, "dimension count needs g >= 2 and n >= 2");
  const int d = 1 + (2 * n - 2) + (g - 2) * (2 * n - 1);
  assert(d == (2 * n - 1) * (g - 1));
  return d;
}

double cocycle_distance(const Cocycle& a, const Cocycle& b) {
  if (a.generator_values.size() != b.generator_values.size()) throw Error(ErrorKind::InvalidInput, "cocycle sizes differ");
  double out = 0.0;
  for (std::size_t r = 0; r < a.generator_values.size(); ++r) {
    out = std::max(out, (a.generator_values[r] - b.generator_values[r]).cwiseAbs().maxCoeff());
  }
  return out;
}

}  // namespace schottky
