#include "mcurv/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "mcurv/errors.hpp"

namespace mcurv {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "manifold.kind",          "manifold.a",
      "manifold.profile_resolution", "manifold.dim",
      "manifold.corruption",    "flow.p",
      "flow.q",                 "flow.pq_kind",
      "flow.profile.family",    "flow.profile.lo",
      "flow.profile.hi",        "flow.profile.peak",
      "flow.profile.amplitude", "flow.profile.center",
      "flow.profile.width",     "flow.profile.coefficients",
      "flow.profile.xs",        "flow.profile.fs",
      "flow.profile.degree",    "flow.profile.value",
      "flow.profile.mirror_about", "perturbation.mode",
      "perturbation.t0",        "perturbation.chi0",
      "perturbation.radius",    "perturbation.t_half_width",
      "perturbation.amplitude", "perturbation.weighting",
      "perturbation.budget",    "perturbation.seed",
      "perturbation.min_margin", "quadrature.resolution",
      "quadrature.collar",      "output.integrand_csv",
      "output.profile_csv"};
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_list(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
  return s;
}

class Table {
 public:
  struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
  };

  void add(const std::string& key, const std::string& value, int line) {
    if (!known_keys().count(key)) throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'", line, key);
    auto [it, inserted] = entries_.try_emplace(key, Entry{value, line});
    if (!inserted)
      throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "' (first set on line " +
                            std::to_string(it->second.line) + ")",
                        line, key);
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  bool has_prefix(const std::string& prefix) const {
    for (const auto& [k, e] : entries_)
      if (k.rfind(prefix, 0) == 0) return true;
    return false;
  }
  int line(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    const int l = line(key);
    throw ConfigError((l ? "line " + std::to_string(l) + ": " : std::string()) + key + ": " + message, l, key);
  }

  std::optional<std::string> raw(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    it->second.used = true;
    return it->second.value;
  }

  double number(const std::string& key, double fallback) {
    auto v = raw(key);
    return v ? parse_number(key, *v) : fallback;
  }

  template <class Int = long long>
  Int integer(const std::string& key, Int fallback) {
    auto v = raw(key);
    if (!v) return fallback;
    Int out = 0;
    auto res = std::from_chars(v->data(), v->data() + v->size(), out);
    if (res.ec != std::errc() || res.ptr != v->data() + v->size()) fail(key, "expected an integer, got '" + *v + "'");
    return out;
  }

  bool boolean(const std::string& key, bool fallback) {
    auto v = raw(key);
    if (!v) return fallback;
    if (*v == "true") return true;
    if (*v == "false") return false;
    fail(key, "expected true or false, got '" + *v + "'");
  }

  std::string choice(const std::string& key, const std::string& fallback,
                     const std::vector<std::string>& allowed) {
    auto v = raw(key);
    if (!v) return fallback;
    for (const auto& a : allowed)
      if (*v == a) return a;
    std::string list;
    for (size_t i = 0; i < allowed.size(); ++i) list += (i ? ", " : "") + allowed[i];
    fail(key, "expected one of {" + list + "}, got '" + *v + "'");
  }

  std::vector<double> numbers(const std::string& key) {
    auto v = raw(key);
    if (!v) return {};
    std::vector<double> out;
    for (const auto& item : split_list(*v)) out.push_back(parse_number(key, item));
    return out;
  }

  // Fails on the first key that was given but not consumed.
  template <class Context>
  void reject_unused(Context context) const {
    for (const auto& [k, e] : entries_)
      if (!e.used) fail(k, "does not apply " + context(k));
  }

 private:
  double parse_number(const std::string& key, const std::string& s) const {
    double out = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(out))
      fail(key, "expected a finite number, got '" + s + "'");
    return out;
  }

  std::map<std::string, Entry> entries_;
};

bool is_integral(double v) { return std::isfinite(v) && std::floor(v) == v; }

}  // namespace

int ScenarioConfig::dim() const {
  if (manifold.kind == "ellipsoid3d") return 3;
  if (manifold.kind == "flat_torus") return manifold.dim;
  return 2;
}

std::array<int, kMaxDim> ScenarioConfig::resolution() const {
  std::array<int, kMaxDim> r{};
  if (!quadrature.resolution.empty()) {
    for (size_t i = 0; i < quadrature.resolution.size(); ++i) r[i] = quadrature.resolution[i];
    return r;
  }
  if (manifold.kind == "ellipsoid3d") return {32, 32, 96};
  if (manifold.kind == "flat_torus") {
    for (int i = 0; i < manifold.dim; ++i) r[i] = 32;
    return r;
  }
  return {96, 32, 0};
}

ScenarioConfig parse_config(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string raw_line;
  int line = 0;
  while (std::getline(in, raw_line)) {
    ++line;
    std::string s = raw_line;
    if (auto hash = s.find('#'); hash != std::string::npos) s.resize(hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line) + ": missing key", line);
    if (value.empty())
      throw ConfigError("line " + std::to_string(line) + ": key '" + key + "' has no value", line, key);
    t.add(key, value, line);
  }

  ScenarioConfig c;
  auto& m = c.manifold;
  m.kind = t.choice("manifold.kind", m.kind, {"ellipsoid2d", "ellipsoid3d", "sphere2", "flat_torus"});
  if (m.kind == "ellipsoid2d" || m.kind == "ellipsoid3d") {
    m.a = t.number("manifold.a", m.a);
    if (!(m.a > 0.0)) t.fail("manifold.a", "aspect ratio must be positive");
  } else {
    m.a = 1.0;
  }
  if (m.kind == "ellipsoid2d") {
    m.profile_resolution = static_cast<int>(t.integer("manifold.profile_resolution", m.profile_resolution));
    if (m.profile_resolution < 8) t.fail("manifold.profile_resolution", "must be at least 8");
  }
  if (m.kind == "flat_torus") {
    m.dim = static_cast<int>(t.integer("manifold.dim", m.dim));
    if (m.dim < 1 || m.dim > 3) t.fail("manifold.dim", "must be 1, 2 or 3");
  }
  m.corruption = t.choice("manifold.corruption", m.corruption, {"none", "negate_g22"});
  const int dim = c.dim();
  const bool has_direction = m.kind == "ellipsoid3d" || (m.kind == "flat_torus" && dim >= 2);

  auto& f = c.flow;
  f.present = t.has_prefix("flow.");
  if (f.present) {
    if (has_direction) {
      f.pq_kind = t.choice("flow.pq_kind", f.pq_kind, {"integer", "irrational"});
      f.p = t.number("flow.p", f.p);
      f.q = t.number("flow.q", f.q);
      if (f.p == 0.0 && f.q == 0.0) t.fail("flow.p", "p and q cannot both be zero");
      if (f.pq_kind == "integer" && !(is_integral(f.p) && is_integral(f.q)))
        t.fail(is_integral(f.p) ? "flow.q" : "flow.p",
               "integer directions need integral p and q; set flow.pq_kind = irrational otherwise");
    }
    auto& pr = f.profile;
    pr.family = t.choice("flow.profile.family", pr.family,
                         {"bump", "raised_cosine", "cos2_polynomial", "table", "constant"});
    if (pr.family == "bump") {
      pr.lo = t.number("flow.profile.lo", pr.lo);
      pr.hi = t.number("flow.profile.hi", pr.hi);
      pr.peak = t.number("flow.profile.peak", pr.peak);
      pr.amplitude = t.number("flow.profile.amplitude", pr.amplitude);
      if (!(pr.lo < pr.peak && pr.peak < pr.hi)) t.fail("flow.profile.peak", "need lo < peak < hi");
    } else if (pr.family == "raised_cosine") {
      pr.center = t.number("flow.profile.center", pr.center);
      pr.width = t.number("flow.profile.width", pr.width);
      pr.amplitude = t.number("flow.profile.amplitude", pr.amplitude);
      if (!(pr.width > 0.0)) t.fail("flow.profile.width", "must be positive");
    } else if (pr.family == "cos2_polynomial") {
      pr.coefficients = t.numbers("flow.profile.coefficients");
      if (pr.coefficients.empty()) t.fail("flow.profile.family", "cos2_polynomial needs flow.profile.coefficients");
    } else if (pr.family == "table") {
      pr.xs = t.numbers("flow.profile.xs");
      pr.fs = t.numbers("flow.profile.fs");
      pr.degree = static_cast<int>(t.integer("flow.profile.degree", pr.degree));
      if (pr.degree != 1 && pr.degree != 3) t.fail("flow.profile.degree", "must be 1 or 3");
      if (pr.xs.size() < 2) t.fail("flow.profile.xs", "needs at least two nodes");
      if (pr.xs.size() != pr.fs.size()) t.fail("flow.profile.fs", "must have as many entries as flow.profile.xs");
      for (size_t i = 1; i < pr.xs.size(); ++i)
        if (!(pr.xs[i] > pr.xs[i - 1])) t.fail("flow.profile.xs", "nodes must be strictly increasing");
    } else {
      pr.value = t.number("flow.profile.value", pr.value);
    }
    if (t.has("flow.profile.mirror_about")) pr.mirror_about = t.number("flow.profile.mirror_about", 0.0);
  }

  auto& p = c.perturbation;
  p.mode = t.choice("perturbation.mode", p.mode, {"none", "zero", "flow", "explicit", "search"});
  if (p.mode != "none" && !f.present) t.fail("perturbation.mode", "needs a flow (flow.* keys)");
  if (p.mode == "explicit" || p.mode == "search") {
    if (m.kind == "flat_torus") t.fail("perturbation.mode", "bump fields need a chart with a profile axis");
    if (p.mode == "search" && m.kind != "ellipsoid3d") t.fail("perturbation.mode", "search runs on ellipsoid3d only");
    auto& b = p.bump;
    b.t0 = t.number("perturbation.t0", b.t0);
    b.chi0 = t.number("perturbation.chi0", b.chi0);
    b.radius = t.number("perturbation.radius", b.radius);
    b.t_half_width = t.number("perturbation.t_half_width", b.t_half_width);
    b.amplitude = t.number("perturbation.amplitude", b.amplitude);
    if (!(b.radius > 0.0)) t.fail("perturbation.radius", "must be positive");
    if (!(b.t_half_width > 0.0 && b.t_half_width < std::numbers::pi))
      t.fail("perturbation.t_half_width", "must lie in (0, pi)");
  }
  if (p.mode == "explicit") p.weighting = t.choice("perturbation.weighting", p.weighting, {"density", "none"});
  if (p.mode == "search") {
    p.budget = static_cast<int>(t.integer("perturbation.budget", p.budget));
    if (p.budget < 1) t.fail("perturbation.budget", "must be positive");
    p.seed = t.integer<unsigned long long>("perturbation.seed", 0);
    p.min_margin = t.number("perturbation.min_margin", p.min_margin);
    if (!(p.min_margin >= 0.0)) t.fail("perturbation.min_margin", "must be non-negative");
  }

  auto& q = c.quadrature;
  if (auto res = t.numbers("quadrature.resolution"); !res.empty()) {
    if (static_cast<int>(res.size()) != dim)
      t.fail("quadrature.resolution", "expected " + std::to_string(dim) + " entries, one per axis");
    for (double r : res) {
      if (!is_integral(r) || r < 2 || r > 4096) t.fail("quadrature.resolution", "entries must be integers in [2, 4096]");
      q.resolution.push_back(static_cast<int>(r));
    }
  } else {
    const auto r = c.resolution();
    q.resolution.assign(r.begin(), r.begin() + dim);
  }
  q.collar = t.number("quadrature.collar", q.collar);
  if (!(q.collar > 0.0 && q.collar <= 0.1)) t.fail("quadrature.collar", "must lie in (0, 0.1]");

  c.output.integrand_csv = t.boolean("output.integrand_csv", false);
  c.output.profile_csv = t.boolean("output.profile_csv", false);

  t.reject_unused([&](const std::string& key) -> std::string {
    if (key.rfind("manifold.", 0) == 0) return "to manifold.kind = " + m.kind;
    if (key.rfind("flow.profile.", 0) == 0) return "to flow.profile.family = " + f.profile.family;
    if (key.rfind("flow.", 0) == 0) return "to a " + std::to_string(dim) + "D " + m.kind + " chart";
    if (key.rfind("perturbation.", 0) == 0) return "to perturbation.mode = " + p.mode;
    return "here";
  });
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream os;
  auto kv = [&](const std::string& k, const std::string& v) { os << k << " = " << v << "\n"; };
  auto num = [&](const std::string& k, double v) { kv(k, format_number(v)); };

  const auto& m = c.manifold;
  kv("manifold.kind", m.kind);
  if (m.kind == "ellipsoid2d" || m.kind == "ellipsoid3d") num("manifold.a", m.a);
  if (m.kind == "ellipsoid2d") kv("manifold.profile_resolution", std::to_string(m.profile_resolution));
  if (m.kind == "flat_torus") kv("manifold.dim", std::to_string(m.dim));
  kv("manifold.corruption", m.corruption);

  const auto& f = c.flow;
  if (f.present) {
    if (m.kind == "ellipsoid3d" || (m.kind == "flat_torus" && m.dim >= 2)) {
      num("flow.p", f.p);
      num("flow.q", f.q);
      kv("flow.pq_kind", f.pq_kind);
    }
    const auto& pr = f.profile;
    kv("flow.profile.family", pr.family);
    if (pr.family == "bump") {
      num("flow.profile.lo", pr.lo);
      num("flow.profile.hi", pr.hi);
      num("flow.profile.peak", pr.peak);
      num("flow.profile.amplitude", pr.amplitude);
    } else if (pr.family == "raised_cosine") {
      num("flow.profile.center", pr.center);
      num("flow.profile.width", pr.width);
      num("flow.profile.amplitude", pr.amplitude);
    } else if (pr.family == "cos2_polynomial") {
      kv("flow.profile.coefficients", format_list(pr.coefficients));
    } else if (pr.family == "table") {
      kv("flow.profile.xs", format_list(pr.xs));
      kv("flow.profile.fs", format_list(pr.fs));
      kv("flow.profile.degree", std::to_string(pr.degree));
    } else {
      num("flow.profile.value", pr.value);
    }
    if (pr.mirror_about) num("flow.profile.mirror_about", *pr.mirror_about);
  }

  const auto& p = c.perturbation;
  kv("perturbation.mode", p.mode);
  if (p.mode == "explicit" || p.mode == "search") {
    num("perturbation.t0", p.bump.t0);
    num("perturbation.chi0", p.bump.chi0);
    num("perturbation.radius", p.bump.radius);
    num("perturbation.t_half_width", p.bump.t_half_width);
    num("perturbation.amplitude", p.bump.amplitude);
  }
  if (p.mode == "explicit") kv("perturbation.weighting", p.weighting);
  if (p.mode == "search") {
    kv("perturbation.budget", std::to_string(p.budget));
    kv("perturbation.seed", std::to_string(p.seed));
    num("perturbation.min_margin", p.min_margin);
  }

  std::string res;
  for (size_t i = 0; i < c.quadrature.resolution.size(); ++i)
    res += (i ? ", " : "") + std::to_string(c.quadrature.resolution[i]);
  kv("quadrature.resolution", res);
  num("quadrature.collar", c.quadrature.collar);
  kv("output.integrand_csv", c.output.integrand_csv ? "true" : "false");
  kv("output.profile_csv", c.output.profile_csv ? "true" : "false");
  return os.str();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_digest(const ScenarioConfig& c) { return fnv1a_hex(serialize_config(c)); }

}  // namespace mcurv
