// Linear symplectic algebra on R^{2n} with coordinates (p1,q1,...,pn,qn) and
// omega(a,b) = a^T J0 b: membership in Sp* and Sp**, the Cayley transform,
// the block normal forms, the Krein index, the component invariant and the
// Conley-Zehnder index of symbolic lifted paths.
#pragma once

#include <complex>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "equihf/errors.hpp"

namespace equihf {

using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

struct Tolerances {
  double sp = 1e-9;   // symplecticity
  double eig = 1e-6;  // proximity of eigenvalues to 1, -1 and the unit circle
};

RMat standard_j(int n);
double symplectic_residual(const RMat& a);  // max |A^T J0 A - J0|

struct Membership {
  bool sp = false;
  bool star = false;      // no eigenvalue 1
  bool starstar = false;  // no eigenvalue 1 or -1
  double residual = 0;
};

// Throws InputError (with the residual) if a is not symplectic.
Membership membership(const RMat& a, const Tolerances& tol = {});

// Quadratic forms Q(v) = v^T S v and their Hamiltonian matrices B = -J0 S.
// p^2 + q^2 generates the anticlockwise rotation of the (p,q) plane.
RMat hamiltonian_from_form(const RMat& s);
RMat form_from_hamiltonian(const RMat& b);
bool is_hamiltonian(const RMat& b, double tol = 1e-9);
int morse_index(const RMat& s);  // throws InputError when degenerate

// Parses sums of terms such as "2*p1*q1 - q2^2 + pq"; bare p, q mean p1, q1.
// The half dimension is the largest index seen, or n if larger.
RMat parse_quadratic_form(const std::string& text, int n = 0);

RMat cayley(const RMat& b, const Tolerances& tol = {});
RMat cayley_inv(const RMat& a, const Tolerances& tol = {});

struct KreinCluster {
  std::complex<double> eigenvalue;
  int multiplicity = 0;
  int signature = 0;
};

struct KreinResult {
  int kappa = 0;
  int e_dim = 0;
  std::vector<KreinCluster> clusters;
};

KreinResult krein_index(const RMat& a, const Tolerances& tol = {});

enum class BlockKind { IPlus, IMinus, IIPlus, IIMinus, III };

struct BlockSpec {
  BlockKind kind = BlockKind::IPlus;
  double a = 0.5;
  double a1 = 0, a2 = 0;
};

std::string block_kind_name(BlockKind k);
std::string block_str(const BlockSpec& b);
BlockSpec parse_block(const std::string& text);                // "i-:a=-0.5", "ii+:a1=0,a2=1", "ii-:theta=-1"
std::vector<BlockSpec> parse_blocks(const std::string& text);  // ';'-separated
void validate_block(const BlockSpec& b);
int block_half_dim(const BlockSpec& b);
RMat build_block(const BlockSpec& b);
RMat direct_sum(const std::vector<RMat>& ms);
RMat build_blocks(const std::vector<BlockSpec>& bs);

int sign_det_i_minus(const RMat& a);  // sign det(I - A), 0 if numerically singular

struct ComponentInvariant {
  int sign = 1;
  int kappa = 0;
  bool operator==(const ComponentInvariant&) const = default;
};

ComponentInvariant component_invariant(const RMat& a, const Tolerances& tol = {});
bool admissible_component(int s, int k, int n);
std::vector<BlockSpec> representative_blocks(int s, int k, int n);  // throws InputError if inadmissible
RMat representative_for(int s, int k, int n);

// Symbolic lifts to the universal cover of Sp.
//   exp(S, t)     path s -> exp(s t B), B = -J0 S
//   rot(k, a, n)  anticlockwise rotation of plane k by angle a on R^{2n}
//   cat(x, y)     product x y of lifts; x must be a rot
//   sum(x, y)     direct sum
//   loop(m, x)    x acted on by m copies of the generator of pi_1
struct PathExpr {
  enum class Kind { Exp, Rot, Cat, Sum, Loop };
  Kind kind = Kind::Exp;
  RMat form;
  double t = 1;
  int plane = 1;
  double angle = 0;
  int n = 1;
  int count = 0;
  std::vector<PathExpr> args;

  int half_dim() const;

  static PathExpr exp(RMat s, double t);
  static PathExpr rot(int plane, double angle, int n);
  static PathExpr cat(PathExpr a, PathExpr b);
  static PathExpr sum(PathExpr a, PathExpr b);
  static PathExpr loop(int m, PathExpr x);
};

RMat evaluate(const PathExpr& p);
PathExpr parse_path(const std::string& text);
std::string path_str(const PathExpr& p);
PathExpr square(const PathExpr& p);

// Throws NumericError when an arc leaves Sp* and InputError for shapes the
// rules do not cover.
int conley_zehnder(const PathExpr& p, const Tolerances& tol = {});

PathExpr block_lift(const BlockSpec& b);
PathExpr blocks_lift(const std::vector<BlockSpec>& bs);

struct CzKreinReport {
  int n = 0;
  int kappa = 0;
  int mu = 0;
  int mu_square = 0;
  double lift_residual = 0;  // |evaluate(lift) - A|
  bool holds() const { return kappa - n == mu_square - 2 * mu; }
};

CzKreinReport verify_cz_krein(const RMat& a, const PathExpr& lift, const Tolerances& tol = {});
CzKreinReport verify_cz_krein(const std::vector<BlockSpec>& bs, const Tolerances& tol = {});

// Random blocks of total half dimension n, eigenvalues at least 0.05 from +-1.
std::vector<BlockSpec> random_blocks(std::mt19937_64& rng, int n);

// exp of a random Hamiltonian matrix with entries of size about scale.
RMat random_symplectic(std::mt19937_64& rng, int n, double scale = 0.4);

}  // namespace equihf
