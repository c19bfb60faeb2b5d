#include "nlslab/presets.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "nlslab/error.hpp"

namespace nlslab {

namespace {

Monomial mono(cplx c, std::vector<ExponentPair> e) { return Monomial{c, std::move(e)}; }

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

double to_number(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw SpecError("invalid preset parameter value '" + s + "'");
  }
  return v;
}

struct PresetCall {
  std::string family;
  std::vector<std::pair<std::string, std::string>> args;  // key may be empty
};

PresetCall split_call(std::string_view expr) {
  PresetCall call;
  const std::string e = trim(expr);
  const auto open = e.find('(');
  if (open == std::string::npos) {
    call.family = e;
    return call;
  }
  if (e.back() != ')') throw SpecError("malformed preset expression '" + e + "'");
  call.family = trim(std::string_view(e).substr(0, open));
  const std::string inner = e.substr(open + 1, e.size() - open - 2);
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      call.args.emplace_back("", item);
    } else {
      call.args.emplace_back(trim(std::string_view(item).substr(0, eq)),
                             trim(std::string_view(item).substr(eq + 1)));
    }
  }
  return call;
}

// Resolves positional and keyword arguments against the parameter names.
std::map<std::string, double> bind(const PresetCall& call, const std::vector<std::string>& names,
                                   const std::map<std::string, double>& defaults) {
  std::map<std::string, double> out = defaults;
  std::size_t position = 0;
  for (const auto& [key, value] : call.args) {
    std::string name = key;
    if (name.empty()) {
      if (position >= names.size()) throw SpecError("too many arguments for preset " + call.family);
      name = names[position++];
    } else if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw SpecError("unknown parameter '" + name + "' for preset " + call.family);
    }
    out[name] = to_number(value);
  }
  return out;
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SystemSpec quadratic_preset(double kappa, int dim) {
  if (!(kappa > 0.0)) throw SpecError("kappa must be positive");
  Potential pot;
  pot.components = 2;
  pot.p = 2;
  pot.F = Polynomial(2, {mono(1.0, {{0, 2}, {1, 0}})});
  return make_system("quadratic(kappa=" + format_value(kappa) + ")", dim, {1.0, 1.0}, {1.0, kappa},
                     {0.0, 0.0}, pot);
}

SystemSpec cubic_preset(double sigma, double mu, int dim) {
  if (!(sigma > 0.0)) throw SpecError("sigma must be positive");
  if (mu < 0.0) throw SpecError("mu must be nonnegative");
  Potential pot;
  pot.components = 2;
  pot.p = 3;
  pot.F = Polynomial(2, {mono(1.0 / 36.0, {{2, 2}, {0, 0}}), mono(9.0 / 4.0, {{0, 0}, {2, 2}}),
                         mono(1.0, {{1, 1}, {1, 1}}), mono(1.0 / 9.0, {{0, 3}, {1, 0}})});
  return make_system("cubic(sigma=" + format_value(sigma) + ",mu=" + format_value(mu) + ")", dim,
                     {1.0, sigma}, {1.0, 1.0}, {1.0, mu}, pot);
}

SystemSpec single_cubic_preset(int dim) {
  Potential pot;
  pot.components = 1;
  pot.p = 3;
  pot.F = Polynomial(1, {mono(0.25, {{2, 2}})});
  return make_system("single_cubic", dim, {1.0}, {1.0}, {0.0}, pot);
}

bool looks_like_preset(std::string_view text) {
  const std::string family = split_call(text).family;
  return family == "quadratic" || family == "cubic" || family == "single_cubic";
}

SystemSpec preset_from_expression(std::string_view expr, int dim) {
  const PresetCall call = split_call(expr);
  if (call.family == "quadratic") {
    const auto v = bind(call, {"kappa"}, {{"kappa", 0.5}});
    return quadratic_preset(v.at("kappa"), dim);
  }
  if (call.family == "cubic") {
    const auto v = bind(call, {"sigma", "mu"}, {{"sigma", 3.0}, {"mu", 1.0}});
    return cubic_preset(v.at("sigma"), v.at("mu"), dim);
  }
  if (call.family == "single_cubic") {
    if (!call.args.empty()) throw SpecError("single_cubic takes no parameters");
    return single_cubic_preset(dim);
  }
  throw SpecError("unknown preset '" + call.family + "'");
}

SystemSpec load_spec(const std::string& source, int dim_override) {
  if (looks_like_preset(source)) return preset_from_expression(source, dim_override > 0 ? dim_override : 1);
  std::ifstream in(source, std::ios::binary);
  if (!in) throw SpecError("cannot open spec file '" + source + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  SystemSpec spec = parse_spec(buf.str(), source);
  if (dim_override > 0) spec.dim = dim_override;
  return spec;
}

std::string with_preset_parameter(std::string_view expr, const std::string& key, double value) {
  PresetCall call = split_call(expr);
  std::vector<std::string> names;
  if (call.family == "quadratic") names = {"kappa"};
  else if (call.family == "cubic") names = {"sigma", "mu"};
  else throw SpecError("preset '" + call.family + "' has no sweepable parameter");
  if (std::find(names.begin(), names.end(), key) == names.end()) {
    throw SpecError("unknown parameter '" + key + "' for preset " + call.family);
  }
  // Normalize positional arguments to keywords, then overwrite.
  std::map<std::string, std::string> kw;
  std::size_t position = 0;
  for (const auto& [k, v] : call.args) kw[k.empty() ? names.at(position++) : k] = v;
  kw[key] = format_value(value);
  std::string out = call.family + "(";
  bool first = true;
  for (const auto& name : names) {
    if (!kw.count(name)) continue;
    if (!first) out += ",";
    first = false;
    out += name + "=" + kw[name];
  }
  return out + ")";
}

}  // namespace nlslab
