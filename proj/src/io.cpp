#include "equihf/io.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "json.hpp"

namespace equihf {

using nlohmann::json;

namespace {

long long parse_ll(const std::string& s) {
  size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw InputError("not an integer: '" + s + "'");
  }
  if (pos != s.size()) throw InputError("not an integer: '" + s + "'");
  return v;
}

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

Action parse_action(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) throw InputError("empty rational");
  const auto slash = s.find('/');
  if (slash == std::string::npos) return Action(parse_ll(s));
  const long long num = parse_ll(trim(s.substr(0, slash)));
  const long long den = parse_ll(trim(s.substr(slash + 1)));
  if (den == 0) throw InputError("zero denominator in '" + s + "'");
  return Action(num, den);
}

std::string format_action(const Action& a) {
  if (a.denominator() == 1) return std::to_string(a.numerator());
  return std::to_string(a.numerator()) + "/" + std::to_string(a.denominator());
}

ComplexFile parse_complex_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("JSON parse error: ") + e.what());
  }
  try {
    if (!j.is_object()) throw InputError("complex file must be a JSON object");
    const Ring ring = parse_ring(j.value("ring", std::string("GF2")));
    const std::string gname = j.value("grading", std::string("Z"));
    Grading grading;
    if (gname == "Z") grading = Grading::Z;
    else if (gname == "Z2" || gname == "Z/2") grading = Grading::Z2;
    else throw InputError("unknown grading '" + gname + "' (expected Z or Z2)");
    if (!j.contains("generators") || !j["generators"].is_array()) throw InputError("missing 'generators' array");
    std::vector<Generator> gens;
    std::map<std::string, int> index;
    for (size_t k = 0; k < j["generators"].size(); ++k) {
      const auto& g = j["generators"][k];
      Generator gen;
      if (g.is_string()) {
        gen.name = g.get<std::string>();
      } else {
        if (!g.contains("name")) throw InputError("generator " + std::to_string(k) + " has no name");
        gen.name = g["name"].get<std::string>();
        gen.degree = g.value("degree", 0);
        if (g.contains("action") && !g["action"].is_null()) {
          const auto& a = g["action"];
          gen.action = a.is_string() ? parse_action(a.get<std::string>()) : Action(a.get<long long>());
        }
      }
      if (grading == Grading::Z2) gen.degree = ((gen.degree % 2) + 2) % 2;
      if (!index.emplace(gen.name, static_cast<int>(k)).second)
        throw InputError("duplicate generator '" + gen.name + "'");
      gens.push_back(gen);
    }
    ComplexFile out;
    out.complex = GradedComplex::make(ring, grading, gens);
    out.complex.strict_action = j.value("strict_action", false);
    auto find = [&](const std::string& name, const std::string& where) {
      auto it = index.find(name);
      if (it == index.end()) throw InputError(where + ": unknown generator '" + name + "'");
      return it->second;
    };
    if (j.contains("differential")) {
      const auto& dl = j["differential"];
      for (size_t k = 0; k < dl.size(); ++k) {
        const auto& e = dl[k];
        const std::string where = "differential entry " + std::to_string(k);
        if (!e.is_array() || e.size() < 2 || e.size() > 3)
          throw InputError(where + ": expected [target, source, coefficient]");
        const int t = find(e[0].get<std::string>(), where);
        const int s = find(e[1].get<std::string>(), where);
        HPoly c = HPoly::one();
        if (e.size() == 3) c = e[2].is_string() ? HPoly::parse(e[2].get<std::string>()) : HPoly(e[2].get<int>() & 1 ? HPoly::one() : HPoly());
        if (ring == Ring::GF2 && c.degree() > 0) throw InputError(where + ": GF(2) coefficient contains h");
        out.complex.d(t, s) += c;
      }
    }
    if (j.contains("involution") && !j["involution"].is_null()) {
      const auto& inv = j["involution"];
      const int n = out.complex.size();
      BitMatrix m(n, n);
      if (inv.contains("permutation")) {
        const auto& p = inv["permutation"];
        if (static_cast<int>(p.size()) != n) throw InputError("involution permutation has the wrong length");
        for (int s = 0; s < n; ++s) m.set(find(p[s].get<std::string>(), "involution"), s, true);
      }
      if (inv.contains("matrix")) {
        const auto& rows = inv["matrix"];
        if (static_cast<int>(rows.size()) != n) throw InputError("involution matrix has the wrong size");
        BitMatrix mm(n, n);
        for (int r = 0; r < n; ++r) {
          if (static_cast<int>(rows[r].size()) != n) throw InputError("involution matrix has the wrong size");
          for (int c = 0; c < n; ++c) mm.set(r, c, rows[r][c].get<int>() & 1);
        }
        if (inv.contains("permutation") && !(mm == m))
          throw InputError("involution permutation and matrix disagree");
        m = mm;
      }
      out.involution = m;
    }
    return out;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed complex file: ") + e.what());
  }
}

std::string complex_to_json(const ComplexFile& f) {
  const auto& c = f.complex;
  json j;
  j["ring"] = ring_name(c.ring);
  j["grading"] = c.grading == Grading::Z ? "Z" : "Z2";
  j["strict_action"] = c.strict_action;
  j["generators"] = json::array();
  for (const auto& g : c.gens) {
    json jg{{"name", g.name}, {"degree", g.degree}};
    if (g.action) jg["action"] = format_action(*g.action);
    j["generators"].push_back(jg);
  }
  j["differential"] = json::array();
  for (int s = 0; s < c.size(); ++s)
    for (int t = 0; t < c.size(); ++t)
      if (!c.d(t, s).is_zero()) j["differential"].push_back({c.gens[t].name, c.gens[s].name, c.d(t, s).str()});
  if (f.involution) {
    json rows = json::array();
    for (int r = 0; r < f.involution->rows(); ++r) {
      json row = json::array();
      for (int cc = 0; cc < f.involution->cols(); ++cc) row.push_back(f.involution->get(r, cc) ? 1 : 0);
      rows.push_back(row);
    }
    j["involution"] = {{"matrix", rows}};
  }
  return j.dump(2) + "\n";
}

}  // namespace equihf
