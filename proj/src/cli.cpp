#include "equihf/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "equihf/equivariant.hpp"
#include "equihf/floermodel.hpp"
#include "equihf/io.hpp"
#include "equihf/morseflow.hpp"
#include "equihf/symplinalg.hpp"
#include "json.hpp"

namespace equihf {

using ojson = nlohmann::ordered_json;

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

struct Verdict {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct Report {
  std::string command;
  std::string digest;
  std::vector<Verdict> verdicts;
  ojson values = ojson::object();
  std::optional<double> timing_ms;

  void verdict(const std::string& name, bool pass, const std::string& detail = "") {
    verdicts.push_back({name, pass, detail});
  }
  bool pass() const {
    for (const auto& v : verdicts)
      if (!v.pass) return false;
    return true;
  }
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string scalar_text(const ojson& j) { return j.is_string() ? j.get<std::string>() : j.dump(); }

void render_text(const Report& r, std::ostream& out) {
  out << "schema: " << kReportSchema << "\n";
  out << "command: " << r.command << "\n";
  out << "input: fnv1a64:" << r.digest << "\n";
  for (const auto& v : r.verdicts) {
    out << "verdict " << v.name << ": " << (v.pass ? "PASS" : "FAIL");
    if (!v.detail.empty()) out << " (" << v.detail << ")";
    out << "\n";
  }
  for (const auto& [key, val] : r.values.items()) {
    const bool rows = val.is_array() && !val.empty() && (val[0].is_array() || val[0].is_object());
    if (rows) {
      out << key << ":\n";
      for (const auto& row : val) out << "  " << row.dump() << "\n";
    } else {
      out << key << ": " << scalar_text(val) << "\n";
    }
  }
  out << "result: " << (r.pass() ? "PASS" : "FAIL") << "\n";
  if (r.timing_ms) out << "timing_ms: " << *r.timing_ms << "\n";
}

void render_json(const Report& r, std::ostream& out) {
  ojson j;
  j["schema"] = kReportSchema;
  j["command"] = r.command;
  j["input_digest"] = "fnv1a64:" + r.digest;
  j["verdicts"] = ojson::array();
  for (const auto& v : r.verdicts) j["verdicts"].push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  j["values"] = r.values;
  j["result"] = r.pass() ? "pass" : "fail";
  if (r.timing_ms) j["timing_ms"] = *r.timing_ms;
  out << j.dump(2) << "\n";
}

std::string read_input(const std::string& path, std::istream& in) {
  if (path.empty() || path == "-") {
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

ojson matrix_json(const PolyMatrix& m) {
  ojson rows = ojson::array();
  for (const auto& r : poly_matrix_to_strings(m)) rows.push_back(r);
  return rows;
}

ojson bit_rows(const BitMatrix& m) {
  ojson rows = ojson::array();
  for (int r = 0; r < m.rows(); ++r) {
    ojson row = ojson::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m.get(r, c) ? 1 : 0);
    rows.push_back(row);
  }
  return rows;
}

ojson real_rows(const RMat& m) {
  ojson rows = ojson::array();
  for (int r = 0; r < m.rows(); ++r) {
    ojson row = ojson::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

RMat parse_real_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream rs(text);
  std::string row;
  while (std::getline(rs, row, ';')) {
    for (char& ch : row)
      if (ch == ',') ch = ' ';
    std::istringstream es(row);
    std::vector<double> r;
    std::string tok;
    while (es >> tok) {
      try {
        size_t pos = 0;
        r.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw InputError("matrix entry '" + tok + "' is not a number");
      }
    }
    if (!r.empty()) rows.push_back(r);
  }
  if (rows.empty()) throw InputError("empty matrix");
  RMat m(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw InputError("matrix rows have different lengths");
    for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

int parse_sigma(const std::string& s) {
  if (s == "+" || s == "+1" || s == "1") return 1;
  if (s == "-" || s == "-1") return -1;
  throw InputError("sigma must be + or -, got '" + s + "'");
}

std::string joined(const std::vector<std::string>& v, const std::string& sep) {
  std::string s;
  for (size_t k = 0; k < v.size(); ++k) s += (k ? sep : "") + v[k];
  return s;
}

struct Options {
  bool json = false;
  bool timing = false;
  std::uint64_t seed = 20240611ULL;
  std::string file = "-";
  std::string matrix, blocks, path, space = "P", sigma = "+", plus, name;
  int i = 1, n = 1, s = 1, k = 0, count = 0, truncation = 4, max_generators = 6;
  std::optional<int> codim;
  bool have_s = false, have_k = false, free = false;
};

ComplexFile load_complex(const std::string& text) { return parse_complex_json(text); }

InvolutiveComplex involutive(const ComplexFile& f) {
  if (!f.involution) throw InputError("this command needs an involution in the complex file");
  if (f.complex.ring != Ring::GF2) throw InputError("involutive complexes must be over GF2");
  InvolutiveComplex w{f.complex, *f.involution};
  validate_involutive(w);
  return w;
}

void cmd_check(const Options&, const std::string& text, Report& r) {
  const auto f = load_complex(text);
  const auto c = check_complex(f.complex);
  r.verdict("structure", c.structural_ok, joined(c.structural, "; "));
  r.verdict("d_squared", c.d_squared_zero);
  r.verdict("grading", c.grading_violations.empty(), joined(c.grading_violations, "; "));
  r.verdict("actions", c.action_violations.empty(), joined(c.action_violations, "; "));
  r.values["ring"] = ring_name(f.complex.ring);
  r.values["generators"] = f.complex.size();
  if (f.involution) {
    bool inv_ok = true;
    std::string why;
    try {
      validate_involutive({f.complex, *f.involution});
    } catch (const InputError& e) {
      inv_ok = false;
      why = e.what();
    }
    r.verdict("involution", inv_ok, why);
  }
}

// Thrown after a failed precondition verdict; the report is emitted as is.
struct StopCommand {};

void require_valid(const ComplexFile& f, Report& r) {
  const auto c = check_complex(f.complex);
  r.verdict("complex", c.ok(), c.ok() ? "" : "check_complex fails; run 'check' for details");
  if (!c.ok()) throw StopCommand{};
}

void cmd_cohomology(const Options&, const std::string& text, Report& r) {
  const auto f = load_complex(text);
  require_valid(f, r);
  const auto h = cohomology(f.complex);
  r.values["ring"] = ring_name(h.ring);
  if (h.ring == Ring::GF2) {
    ojson dims = ojson::object();
    for (const auto& [deg, dim] : h.dims) dims[std::to_string(deg)] = dim;
    r.values["dims"] = dims;
    r.values["total"] = h.total;
  } else if (h.ring == Ring::Frac) {
    r.values["total"] = h.total;
  } else {
    r.values["free_rank"] = h.free_rank;
    ojson inv = ojson::array();
    for (const auto& p : h.invariant_factors) inv.push_back(p.str());
    r.values["invariant_factors"] = inv;
    r.values["torsion_dim"] = h.torsion_dim;
  }
}

void cmd_equivariant(const Options&, const std::string& text, Report& r) {
  const auto w = involutive(load_complex(text));
  const auto g = group_cohomology(w);
  r.values["free_rank"] = g.free_rank;
  r.values["torsion_exponents"] = g.torsion_exponents;
  r.values["generator_count"] = g.generator_count;
  r.values["borel_differential"] = matrix_json(borel_complex(w).d);
}

void cmd_tate(const Options&, const std::string& text, Report& r) {
  const auto w = involutive(load_complex(text));
  const int t = tate_dimension(w);
  const auto g = group_cohomology(w);
  r.values["tate_dimension"] = t;
  r.values["free_rank"] = g.free_rank;
  r.verdict("tate dimension = free rank", t == g.free_rank);
}

void cmd_kaledin(const Options&, const std::string& text, Report& r) {
  const auto f = load_complex(text);
  if (f.complex.ring != Ring::GF2) throw InputError("kaledin needs a GF2 complex");
  require_valid(f, r);
  const auto k = kaledin_check(f.complex);
  r.values["dim_h"] = k.dim_h;
  r.values["dim_tate"] = k.dim_tate;
  r.values["image_rank"] = k.image_rank;
  r.verdict("squaring is bijective", k.bijective());
}

void cmd_smith_bound(const Options&, const std::string& text, Report& r) {
  const auto w = involutive(load_complex(text));
  const auto s = smith_bound_check(w);
  r.values["invariant_dim"] = s.invariant_dim;
  r.values["generator_count"] = s.generator_count;
  r.values["free_rank"] = s.free_rank;
  r.verdict("dim H^iota >= generators >= free rank", s.holds(),
            std::to_string(s.invariant_dim) + " >= " + std::to_string(s.generator_count) + " >= " +
                std::to_string(s.free_rank));
}

RMat matrix_option(const Options& o) {
  if (!o.matrix.empty() && !o.blocks.empty()) throw InputError("give either --matrix or --blocks");
  if (!o.matrix.empty()) return parse_real_matrix(o.matrix);
  if (!o.blocks.empty()) return build_blocks(parse_blocks(o.blocks));
  throw InputError("give --matrix or --blocks");
}

void cmd_krein(const Options& o, const std::string&, Report& r) {
  const RMat a = matrix_option(o);
  const auto mem = membership(a);
  r.values["n"] = a.rows() / 2;
  r.values["sp_star"] = mem.star;
  r.values["sp_starstar"] = mem.starstar;
  r.values["residual"] = mem.residual;
  if (!mem.star) throw InputError("matrix has eigenvalue 1; the Krein index is defined on Sp*");
  const auto k = krein_index(a);
  r.values["kappa"] = k.kappa;
  r.values["e_dim"] = k.e_dim;
  ojson cl = ojson::array();
  for (const auto& c : k.clusters)
    cl.push_back({{"re", c.eigenvalue.real()}, {"im", c.eigenvalue.imag()}, {"multiplicity", c.multiplicity}, {"signature", c.signature}});
  r.values["clusters"] = cl;
  const auto ci = component_invariant(a);
  r.values["sign"] = ci.sign;
  r.verdict("component admissible", admissible_component(ci.sign, ci.kappa, static_cast<int>(a.rows() / 2)));
}

void cmd_cz(const Options& o, const std::string&, Report& r) {
  if (o.path.empty()) throw InputError("give --path");
  const auto p = parse_path(o.path);
  r.values["path"] = path_str(p);
  r.values["n"] = p.half_dim();
  r.values["mu"] = conley_zehnder(p);
  r.values["endpoint"] = real_rows(evaluate(p));
}

void cz_krein_row(const CzKreinReport& c, ojson& row) {
  row = {{"n", c.n}, {"kappa", c.kappa}, {"mu", c.mu}, {"mu_square", c.mu_square}, {"holds", c.holds()}};
}

void cmd_cz_krein(const Options& o, const std::string&, Report& r) {
  if (o.count > 0) {
    std::mt19937_64 rng(o.seed);
    int held = 0;
    ojson rows = ojson::array();
    for (int t = 0; t < o.count; ++t) {
      const auto bs = random_blocks(rng, o.n);
      const auto c = verify_cz_krein(bs);
      held += c.holds();
      if (!c.holds()) {
        ojson row;
        cz_krein_row(c, row);
        row["blocks"] = [&] {
          std::vector<std::string> s;
          for (const auto& b : bs) s.push_back(block_str(b));
          return joined(s, ";");
        }();
        rows.push_back(row);
      }
    }
    r.values["samples"] = o.count;
    r.values["held"] = held;
    if (!rows.empty()) r.values["counterexamples"] = rows;
    r.verdict("kappa - n = mu(A^2) - 2 mu(A)", held == o.count, std::to_string(held) + "/" + std::to_string(o.count));
    return;
  }
  if (o.blocks.empty()) throw InputError("give --blocks or --random");
  const auto c = verify_cz_krein(parse_blocks(o.blocks));
  r.values["n"] = c.n;
  r.values["kappa"] = c.kappa;
  r.values["mu"] = c.mu;
  r.values["mu_square"] = c.mu_square;
  r.values["kappa_minus_n"] = c.kappa - c.n;
  r.values["mu_square_minus_2mu"] = c.mu_square - 2 * c.mu;
  r.values["lift_residual"] = c.lift_residual;
  r.verdict("kappa - n = mu(A^2) - 2 mu(A)", c.holds());
}

void cmd_blocks(const Options& o, const std::string&, Report& r) {
  if (o.n < 1) throw InputError("--n must be at least 1");
  auto one = [&](int s, int k) {
    const auto bs = representative_blocks(s, k, o.n);
    std::vector<std::string> names;
    for (const auto& b : bs) names.push_back(block_str(b));
    const auto ci = component_invariant(representative_for(s, k, o.n));
    return std::make_pair(joined(names, ";"), ci.sign == s && ci.kappa == k);
  };
  if (o.have_s || o.have_k) {
    if (!admissible_component(o.s, o.k, o.n))
      throw InputError("(s, kappa) = (" + std::to_string(o.s) + ", " + std::to_string(o.k) + ") is not admissible for n = " +
                       std::to_string(o.n));
    auto [names, ok] = one(o.s, o.k);
    r.values["blocks"] = names;
    r.values["matrix"] = real_rows(representative_for(o.s, o.k, o.n));
    r.verdict("component round trip", ok);
    return;
  }
  ojson rows = ojson::array();
  bool all = true;
  for (int s : {1, -1})
    for (int k = -o.n; k <= o.n; ++k) {
      if (!admissible_component(s, k, o.n)) continue;
      auto [names, ok] = one(s, k);
      all = all && ok;
      rows.push_back({{"s", s}, {"kappa", k}, {"blocks", names}, {"round_trip", ok}});
    }
  r.values["components"] = rows;
  r.verdict("component round trip", all);
}

void cmd_strata(const Options& o, const std::string&, Report& r) {
  SpaceKind kind;
  if (o.space == "P") kind = SpaceKind::P;
  else if (o.space == "Q") kind = SpaceKind::Q;
  else throw InputError("--space must be P or Q");
  const int sg = parse_sigma(o.sigma);
  const auto ss = enumerate_strata(kind, o.i, sg, o.codim);
  ojson rows = ojson::array();
  for (const auto& s : ss) rows.push_back({{"stratum", s.str()}, {"codim", s.codim()}, {"corner", s.corner_label()}});
  r.values["count"] = ss.size();
  r.values["strata"] = rows;
  if (kind == SpaceKind::P && o.codim && *o.codim == o.i && o.i >= 1)
    r.verdict("corner count 2^{i-1}(i+1)", static_cast<long long>(ss.size()) == corner_count(o.i));
}

void cmd_faces(const Options& o, const std::string&, Report& r) {
  const int sg = parse_sigma(o.sigma);
  const auto fs = codim1_faces(o.i, sg);
  ojson rows = ojson::array();
  for (const auto& f : fs) rows.push_back({{"stratum", f.stratum.str()}, {"order", f.pq ? "pq" : "qp"}, {"term", f.term.str()}});
  r.values["faces"] = rows;
  r.values["relation"] = "d_eq . p^{" + std::to_string(o.i) + "," + (sg > 0 ? "+" : "-") + "} + p . d = " + relation_rhs(o.i, sg);
  r.verdict("4i-2 faces", static_cast<int>(fs.size()) == 4 * o.i - 2);
  r.verdict("faces reproduce the relation", relation_terms(o.i, sg) == relation_formula(o.i, sg));
}

void validation_verdicts(const FloerDatum& d, Report& r) {
  const auto v = validate(d);
  for (const auto& [name, ok] : v.checks) {
    std::vector<std::string> why;
    for (const auto& f : v.failures)
      if (f.check == name) why.push_back(f.detail);
    r.verdict(name, ok, joined(why, "; "));
  }
}

void cmd_floer_validate(const Options&, const std::string& text, Report& r) {
  const auto d = parse_datum(text);
  r.values["name"] = d.name;
  r.values["mode"] = mode_name(d.mode);
  r.values["fixed_points"] = d.m();
  r.values["periodic_points"] = d.size2();
  validation_verdicts(d, r);
  if (r.pass()) {
    const auto inv = floer_invariants(d);
    ojson f = ojson::array();
    for (const auto& p : inv.hf_poly.invariant_factors) f.push_back(p.str());
    r.values["hf_poly_free_rank"] = inv.hf_poly.free_rank;
    r.values["hf_poly_invariant_factors"] = f;
    r.values["hf_poly_dim"] = inv.hf_poly_dim;
    r.values["hf_eq_free_rank"] = inv.hf_eq.free_rank;
    r.values["hf_eq_torsion_exponents"] = inv.hf_eq.torsion_exponents;
    r.values["hf_localized_dim"] = inv.localized_dim;
  }
}

void cmd_floer_localize(const Options&, const std::string& text, Report& r) {
  const auto d = parse_datum(text);
  const auto l = localized_check(d);
  r.values["name"] = d.name;
  r.values["dim_source"] = l.dim_source;
  r.values["dim_target"] = l.dim_target;
  r.values["dim_hf_phi"] = l.dim_hf_phi;
  r.values["e0_bijective"] = l.e0_bijective;
  r.values["e0_is_diagonal"] = l.e0_is_diagonal;
  r.verdict("chain_map", l.chain_map, joined(pants_chain_map(d).failures, "; "));
  r.verdict("bijective over GF(2)(h)", l.bijective);
  r.verdict("dimensions equal dim HF(phi)", l.dims_agree);
  r.verdict("agrees with the E0 criterion", l.ok() == l.e0_bijective);
}

void cmd_floer_smith(const Options& o, const std::string& text, Report& r) {
  const auto d = parse_datum(text);
  const auto s = smith_check(d);
  r.values["name"] = d.name;
  r.values["h_dim"] = s.h_dim;
  r.values["invariant_dim"] = s.invariant_dim;
  r.values["generator_count"] = s.generator_count;
  r.values["free_rank"] = s.free_rank;
  r.values["localized_dim"] = s.localized_dim;
  r.values["hf_phi_dim"] = s.hf_phi_dim;
  r.verdict("dim H^iota >= generators >= free rank", s.smith(),
            std::to_string(s.invariant_dim) + " >= " + std::to_string(s.generator_count) + " >= " + std::to_string(s.free_rank));
  r.verdict("free rank = localized dimension", s.free_rank == s.localized_dim);
  r.verdict("dim H(phi^2)^iota >= dim HF(phi)", s.quantum_smith(),
            std::to_string(s.invariant_dim) + " >= " + std::to_string(s.hf_phi_dim));
  const auto e2 = e2_check(d, o.truncation);
  ojson cols = ojson::array();
  for (const auto& [p, dim] : e2.e2) cols.push_back({{"p", p}, {"e2", dim}, {"expected", e2.expected.at(p)}});
  r.values["e2_page"] = cols;
  r.verdict("h-adic E2 = group cohomology", e2.ok());
  const auto te = tate_e1_check(d);
  r.values["tate_e1_by_level"] = te.by_level;
  r.verdict("Tate E1 dimension = dim CF(phi)", te.ok(), std::to_string(te.total) + " vs " + std::to_string(te.expected));
}

void cmd_floer_transfer(const Options& o, const std::string& text, Report& r) {
  const auto d = parse_datum(text);
  std::optional<TransferDecomposition> t;
  if (!o.plus.empty()) {
    TransferDecomposition td;
    std::stringstream ss(o.plus);
    std::string name;
    while (std::getline(ss, name, ',')) {
      int idx = -1;
      for (int y = 0; y < d.size2(); ++y)
        if (d.fix_phi2[y].name == name) idx = y;
      if (idx < 0) throw InputError("--plus: unknown generator '" + name + "'");
      td.plus_set.push_back(idx);
    }
    t = td;
  }
  const auto tr = transfer(d, t);
  r.values["name"] = d.name;
  r.values["plus_set"] = tr.plus_names;
  r.values["d_D"] = bit_rows(tr.d_d);
  r.values["dim_h"] = tr.dim_h;
  r.values["hf_poly_dim"] = tr.hf_poly_dim;
  r.values["free_orbits"] = tr.free_orbits;
  r.values["iterations"] = tr.iterations;
  for (const auto& [name, ok] : tr.side_conditions) r.verdict(name, ok);
  r.verdict("dim H(D) = dim HF over GF(2)[h]", tr.dim_h == tr.hf_poly_dim,
            std::to_string(tr.dim_h) + " vs " + std::to_string(tr.hf_poly_dim));
  r.verdict("dim H(D) <= free orbits", tr.dim_h <= tr.free_orbits);
}

using Handler = void (*)(const Options&, const std::string&, Report&);

struct Command {
  const char* name;
  const char* help;
  bool reads_input;
  Handler run;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> cs = {
      {"check", "validate a complex file", true, cmd_check},
      {"cohomology", "cohomology of a complex", true, cmd_cohomology},
      {"equivariant", "group cohomology of an involutive complex", true, cmd_equivariant},
      {"tate", "Tate cohomology dimension", true, cmd_tate},
      {"kaledin", "squaring map onto Tate cohomology of the swap square", true, cmd_kaledin},
      {"smith-bound", "Smith inequalities of an involutive complex", true, cmd_smith_bound},
      {"krein", "Krein index of a symplectic matrix", false, cmd_krein},
      {"cz", "Conley-Zehnder index of a path expression", false, cmd_cz},
      {"cz-krein", "kappa - n = mu(A^2) - 2 mu(A) for block sums", false, cmd_cz_krein},
      {"blocks", "representatives of the components of Sp**", false, cmd_blocks},
      {"strata", "strata of the spaces of flow lines", false, cmd_strata},
      {"faces", "codimension one faces and the resulting relation", false, cmd_faces},
      {"floer-validate", "check every relation of a Floer datum", true, cmd_floer_validate},
      {"floer-localize", "localized pair-of-pants comparison", true, cmd_floer_localize},
      {"floer-smith", "Smith inequalities and spectral sequences of a Floer datum", true, cmd_floer_smith},
      {"floer-transfer", "transfer to a plus set of a free involution", true, cmd_floer_transfer},
  };
  return cs;
}

int run_batch(const std::string& manifest_path, const std::string& text, const Options& o, std::ostream& out) {
  namespace fs = std::filesystem;
  const fs::path base = manifest_path == "-" ? fs::current_path() : fs::path(manifest_path).parent_path();
  struct Entry {
    int line;
    std::vector<std::string> args;
    std::string label;
  };
  std::vector<Entry> entries;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() < 2) throw InputError("manifest line " + std::to_string(lineno) + ": expected 'file command [options]'");
    std::vector<std::string> args{tok[1]};
    args.insert(args.end(), tok.begin() + 2, tok.end());
    if (tok[0] != ".") args.push_back((tok[0].front() == '/' ? fs::path(tok[0]) : base / tok[0]).string());
    args.push_back("--json");
    args.push_back("--seed");
    args.push_back(std::to_string(o.seed));
    entries.push_back({lineno, args, tok[0] + " " + joined({tok.begin() + 1, tok.end()}, " ")});
  }
  std::vector<std::pair<int, std::string>> results(entries.size());
  const size_t width = std::max(1u, std::thread::hardware_concurrency());
  for (size_t start = 0; start < entries.size(); start += width) {
    std::vector<std::future<std::pair<int, std::string>>> jobs;
    for (size_t k = start; k < std::min(entries.size(), start + width); ++k)
      jobs.push_back(std::async(std::launch::async, [args = entries[k].args] {
        std::ostringstream o1, o2;
        std::istringstream none;
        const int code = run_cli(args, o1, o2, none);
        return std::make_pair(code, code == 2 ? o2.str() : o1.str());
      }));
    for (size_t k = 0; k < jobs.size(); ++k) results[start + k] = jobs[k].get();
  }
  Report r;
  r.command = "batch";
  r.digest = hex64(fnv1a64(text));
  ojson rows = ojson::array();
  int worst = 0;
  for (size_t k = 0; k < entries.size(); ++k) {
    const auto& [code, output] = results[k];
    worst = std::max(worst, code);
    ojson row{{"line", entries[k].line}, {"entry", entries[k].label}, {"exit", code}};
    std::string detail;
    if (code == 2) {
      detail = output.substr(0, output.find('\n'));
    } else {
      // example and random-datum emit a datum, not a report
      const auto j = ojson::parse(output, nullptr, false);
      std::vector<std::string> failed;
      if (!j.is_discarded() && j.contains("verdicts"))
        for (const auto& v : j["verdicts"])
          if (!v["pass"].get<bool>()) failed.push_back(v["name"].get<std::string>());
      detail = joined(failed, ", ");
    }
    if (!detail.empty()) row["detail"] = detail;
    rows.push_back(row);
    r.verdict("line " + std::to_string(entries[k].line) + ": " + entries[k].label, code == 0, detail);
  }
  r.values["entries"] = rows;
  if (o.json) render_json(r, out);
  else render_text(r, out);
  return worst;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
  Options o;
  if (const char* s = std::getenv("EQUIHF_SEED")) {
    try {
      o.seed = std::stoull(s);
    } catch (const std::exception&) {
      err << "error: EQUIHF_SEED is not an unsigned integer\n";
      return 2;
    }
  }
  CLI::App app{"Z/2-equivariant Floer algebra toolkit", "equihf"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--json", o.json, "emit the report as JSON");
  app.add_flag("--timing", o.timing, "include wall-clock timing in the report");
  app.add_option("--seed", o.seed, "seed for randomized checks (default: EQUIHF_SEED or fixed)");

  std::map<std::string, CLI::App*> subs;
  for (const auto& c : commands()) {
    auto* sub = app.add_subcommand(c.name, c.help);
    if (c.reads_input) sub->add_option("file", o.file, "input file, '-' for standard input");
    subs[c.name] = sub;
  }
  for (const char* s : {"krein", "cz-krein"}) {
    subs[s]->add_option("--blocks", o.blocks, "block list such as \"i-:a=-0.5;ii+:theta=1\"");
  }
  subs["krein"]->add_option("--matrix", o.matrix, "rows separated by ';', entries by ',' or spaces");
  subs["cz"]->add_option("--path", o.path, "path expression such as cat(rot(1,3.14159),exp(pq,0.01))");
  subs["cz-krein"]->add_option("--random", o.count, "check this many random block sums (uses --seed)");
  subs["cz-krein"]->add_option("--n", o.n, "half dimension for --random");
  subs["blocks"]->add_option("--n", o.n, "half dimension")->required();
  subs["blocks"]->add_option("--s", o.s, "sign of det(I - A)")->each([&](const std::string&) { o.have_s = true; });
  subs["blocks"]->add_option("--k", o.k, "Krein index")->each([&](const std::string&) { o.have_k = true; });
  std::optional<int> codim;
  subs["strata"]->add_option("--space", o.space, "P or Q");
  subs["strata"]->add_option("--codim", codim, "restrict to one codimension");
  for (const char* s : {"strata", "faces"}) {
    subs[s]->add_option("--i", o.i, "index i")->required();
    subs[s]->add_option("--sigma", o.sigma, "+ or -");
  }
  subs["floer-transfer"]->add_option("--plus", o.plus, "comma-separated plus set, one point per orbit");
  subs["floer-smith"]->add_option("--truncation", o.truncation, "truncation for the h-adic spectral sequence");

  auto* example = app.add_subcommand("example", "print a built-in Floer datum");
  example->add_option("name", o.name, "morse_pair, twisted_pair, annulus, clifford or fixed_point")->required();
  example->add_option("--i", o.i, "index for morse_pair and twisted_pair");
  example->add_option("--n", o.n, "half dimension");
  auto* random = app.add_subcommand("random-datum", "print a random valid Floer datum (uses --seed)");
  random->add_flag("--free", o.free, "no fixed points, free involution");
  random->add_option("--max-generators", o.max_generators, "bound on the periodic points");
  auto* batch = app.add_subcommand("batch", "run the 'file command [options]' lines of a manifest");
  batch->add_option("manifest", o.file, "manifest file, '-' for standard input");

  std::vector<std::string> argv_s{"equihf"};
  argv_s.insert(argv_s.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_s) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  o.codim = codim;

  try {
    if (example->parsed()) {
      out << serialize_datum(builtin_example(o.name, o.i, o.n));
      return 0;
    }
    if (random->parsed()) {
      std::mt19937_64 rng(o.seed);
      RandomDatumOptions ro;
      ro.free = o.free;
      ro.max_generators = o.max_generators;
      auto d = random_valid_datum(rng, ro);
      d.name = "random(seed=" + std::to_string(o.seed) + ")";
      out << serialize_datum(d);
      return 0;
    }
    if (batch->parsed()) return run_batch(o.file, read_input(o.file, in), o, out);

    for (const auto& c : commands()) {
      if (!subs[c.name]->parsed()) continue;
      Report r;
      std::string text;
      if (c.reads_input) text = read_input(o.file, in);
      std::string echo = c.name;
      for (const auto& a : args)
        if (a != c.name && a != "--json" && a != "--timing") echo += " " + a;
      r.command = echo;
      r.digest = hex64(fnv1a64(c.reads_input ? text : echo));
      const auto t0 = std::chrono::steady_clock::now();
      try {
        c.run(o, text, r);
      } catch (const StopCommand&) {
      }
      if (o.timing)
        r.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      if (o.json) render_json(r, out);
      else render_text(r, out);
      return r.pass() ? 0 : 1;
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "error: no command\n";
  return 2;
}

}  // namespace equihf
