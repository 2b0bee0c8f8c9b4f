#include "equihf/random.hpp"

#include <stdexcept>

namespace equihf {

namespace {

struct Builder {
  std::vector<Generator> gens;
  std::vector<std::pair<int, int>> edges;  // (target, source)
  std::vector<int> perm;                   // iota as a permutation
  std::vector<int> weight;

  int add(int degree, int w = 0) {
    Generator g;
    g.name = "g" + std::to_string(gens.size());
    g.degree = degree;
    gens.push_back(g);
    perm.push_back(static_cast<int>(perm.size()));
    weight.push_back(w);
    return static_cast<int>(gens.size()) - 1;
  }
  void swap(int a, int b) {
    perm[a] = b;
    perm[b] = a;
  }
  void edge(int target, int source) { edges.emplace_back(target, source); }
  int size() const { return static_cast<int>(gens.size()); }
};

// Piece sizes, indexed by piece id (see add_piece).
constexpr int kPieceSize[] = {1, 2, 2, 4, 3, 3, 4};

void add_piece(Builder& b, int id, int k) {
  switch (id) {
    case 0:  // trivial point
      b.add(k);
      break;
    case 1: {  // trivial x -> y
      int x = b.add(k), y = b.add(k + 1);
      b.edge(y, x);
      break;
    }
    case 2: {  // free pair of points
      int x1 = b.add(k), x2 = b.add(k);
      b.swap(x1, x2);
      break;
    }
    case 3: {  // free copy of x -> y
      int x1 = b.add(k), x2 = b.add(k), y1 = b.add(k + 1), y2 = b.add(k + 1);
      b.swap(x1, x2);
      b.swap(y1, y2);
      b.edge(y1, x1);
      b.edge(y2, x2);
      break;
    }
    case 4: {  // x -> y1 + y2
      int x = b.add(k), y1 = b.add(k + 1), y2 = b.add(k + 1);
      b.swap(y1, y2);
      b.edge(y1, x);
      b.edge(y2, x);
      break;
    }
    case 5: {  // x1, x2 -> y
      int x1 = b.add(k), x2 = b.add(k), y = b.add(k + 1);
      b.swap(x1, x2);
      b.edge(y, x1);
      b.edge(y, x2);
      break;
    }
    case 6: {  // x -> y1 + y2 -> z
      int x = b.add(k), y1 = b.add(k + 1), y2 = b.add(k + 1), z = b.add(k + 2);
      b.swap(y1, y2);
      b.edge(y1, x);
      b.edge(y2, x);
      b.edge(z, y1);
      b.edge(z, y2);
      break;
    }
    default:
      throw std::logic_error("unknown piece");
  }
}

Builder random_pieces(std::mt19937_64& rng, int max_dim, const std::vector<int>& allowed) {
  Builder b;
  std::uniform_int_distribution<int> tdist(1, std::max(1, max_dim));
  std::uniform_int_distribution<int> kdist(-1, 1);
  const int target = tdist(rng);
  while (b.size() < target) {
    std::vector<int> fit;
    for (int id : allowed)
      if (b.size() + kPieceSize[id] <= target) fit.push_back(id);
    if (fit.empty()) break;
    std::uniform_int_distribution<size_t> pick(0, fit.size() - 1);
    add_piece(b, fit[pick(rng)], kdist(rng));
  }
  return b;
}

BitMatrix conjugate(const BitMatrix& m, const BitMatrix& q, const BitMatrix& qinv) { return q * m * qinv; }

}  // namespace

BitMatrix random_graded_automorphism(std::mt19937_64& rng, const std::vector<int>& degrees,
                                     const std::vector<int>* weights) {
  const int n = static_cast<int>(degrees.size());
  BitMatrix q = BitMatrix::identity(n);
  if (n < 2) return q;
  std::uniform_int_distribution<int> idx(0, n - 1);
  for (int t = 0; t < 4 * n; ++t) {
    int i = idx(rng), j = idx(rng);
    if (i == j || degrees[i] != degrees[j]) continue;
    if (weights && (*weights)[i] < (*weights)[j]) continue;
    q.row(i) ^= q.row(j);
  }
  return q;
}

GradedComplex random_complex(std::mt19937_64& rng, int max_dim, bool acyclic) {
  std::vector<int> allowed = acyclic ? std::vector<int>{1} : std::vector<int>{0, 1};
  if (acyclic && max_dim < 2) max_dim = 2;
  Builder b = random_pieces(rng, max_dim, allowed);
  GradedComplex c = GradedComplex::make(Ring::GF2, Grading::Z, b.gens);
  BitMatrix d(b.size(), b.size());
  for (auto [t, s] : b.edges) d.flip(t, s);
  std::vector<int> degs;
  for (const auto& g : b.gens) degs.push_back(g.degree);
  BitMatrix q = random_graded_automorphism(rng, degs);
  c.d = conjugate(d, q, *gf2_inverse(q)).to_poly();
  return c;
}

InvolutiveComplex random_involutive(std::mt19937_64& rng, int max_dim, InvolutionKind kind) {
  std::vector<int> allowed;
  switch (kind) {
    case InvolutionKind::General: allowed = {0, 1, 2, 3, 4, 5, 6}; break;
    case InvolutionKind::LevelwiseFree: allowed = {2, 3}; break;
    case InvolutionKind::Acyclic: allowed = {1, 3, 6}; break;
    case InvolutionKind::Trivial: allowed = {0, 1}; break;
  }
  if (kind != InvolutionKind::General && kind != InvolutionKind::Trivial && max_dim < 2) max_dim = 2;
  Builder b = random_pieces(rng, max_dim, allowed);
  const int n = b.size();
  BitMatrix d(n, n), iota(n, n);
  for (auto [t, s] : b.edges) d.flip(t, s);
  for (int i = 0; i < n; ++i) iota.set(b.perm[i], i, true);
  std::vector<int> degs;
  for (const auto& g : b.gens) degs.push_back(g.degree);
  BitMatrix q = random_graded_automorphism(rng, degs);
  BitMatrix qi = *gf2_inverse(q);
  InvolutiveComplex w{GradedComplex::make(Ring::GF2, Grading::Z, b.gens), conjugate(iota, q, qi)};
  w.complex.d = conjugate(d, q, qi).to_poly();
  return w;
}

std::pair<GradedComplex, Filtration> random_filtered(std::mt19937_64& rng, int max_dim) {
  Builder b;
  std::uniform_int_distribution<int> tdist(1, std::max(1, max_dim)), kdist(-1, 1), wdist(0, 3), jump(0, 2),
      kind(0, 2);
  const int target = tdist(rng);
  while (b.size() < target) {
    int k = kdist(rng), w = wdist(rng);
    if (b.size() + 2 <= target && kind(rng) > 0) {
      int x = b.add(k, w);
      int y = b.add(k + 1, w + jump(rng));
      b.edge(y, x);
    } else {
      b.add(k, w);
    }
  }
  const int n = b.size();
  BitMatrix d(n, n);
  for (auto [t, s] : b.edges) d.flip(t, s);
  std::vector<int> degs;
  for (const auto& g : b.gens) degs.push_back(g.degree);
  BitMatrix q = random_graded_automorphism(rng, degs, &b.weight);
  GradedComplex c = GradedComplex::make(Ring::GF2, Grading::Z, b.gens);
  c.d = conjugate(d, q, *gf2_inverse(q)).to_poly();
  return {c, Filtration{b.weight}};
}

}  // namespace equihf
