#include "qglab/spec_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace qg {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
  throw SpecError(origin + ": " + msg);
}

const json& require(const json& j, const char* key, const std::string& origin) {
  auto it = j.find(key);
  if (it == j.end()) fail(origin, std::string("missing field \"") + key + "\"");
  return *it;
}

Real positive_weight(const json& j, const std::string& unit, const char* table,
                     const std::string& origin) {
  auto it = j.find(unit);
  if (it == j.end()) fail(origin, std::string(table) + " has no entry for unit \"" + unit + "\"");
  if (!it->is_number()) fail(origin, std::string(table) + "[\"" + unit + "\"] is not a number");
  const Real w = it->get<Real>();
  if (!(w > 0)) fail(origin, std::string(table) + "[\"" + unit + "\"] must be positive");
  return w;
}

}  // namespace

std::string model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kFunction: return "function";
    case ModelKind::kConvolution: return "convolution";
    case ModelKind::kBoth: return "both";
  }
  return "function";
}

ModelKind model_from_name(const std::string& name) {
  if (name == "function") return ModelKind::kFunction;
  if (name == "convolution") return ModelKind::kConvolution;
  if (name == "both") return ModelKind::kBoth;
  throw SpecError("unknown model \"" + name + "\" (expected function|convolution|both)");
}

ParsedSpec parse_spec_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(origin, std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(origin, "top level is not an object");

  ParsedSpec out;
  FiniteGroupoid& g = out.groupoid;

  const json& units = require(j, "units", origin);
  if (!units.is_array() || units.empty()) fail(origin, "\"units\" must be a non-empty array");
  std::map<std::string, int> unit_idx;
  for (const auto& u : units) {
    if (!u.is_string()) fail(origin, "\"units\" entries must be strings");
    const std::string name = u.get<std::string>();
    if (!unit_idx.emplace(name, g.n_units()).second)
      fail(origin, "duplicate unit \"" + name + "\"");
    g.unit_names.push_back(name);
  }

  const json& arrows = require(j, "arrows", origin);
  if (!arrows.is_array() || arrows.empty()) fail(origin, "\"arrows\" must be a non-empty array");
  std::map<std::string, int> arrow_idx;
  for (const auto& a : arrows) {
    if (!a.is_object()) fail(origin, "\"arrows\" entries must be objects");
    const std::string id = require(a, "id", origin).get<std::string>();
    const std::string src = require(a, "src", origin).get<std::string>();
    const std::string tgt = require(a, "tgt", origin).get<std::string>();
    if (!arrow_idx.emplace(id, g.n_arrows()).second)
      fail(origin, "duplicate arrow \"" + id + "\"");
    auto s = unit_idx.find(src), t = unit_idx.find(tgt);
    if (s == unit_idx.end()) fail(origin, "arrow \"" + id + "\": unknown src unit \"" + src + "\"");
    if (t == unit_idx.end()) fail(origin, "arrow \"" + id + "\": unknown tgt unit \"" + tgt + "\"");
    g.arrow_names.push_back(id);
    g.src.push_back(s->second);
    g.tgt.push_back(t->second);
  }

  // Units are a subset of the arrows: each unit name must name its identity
  // arrow, a loop at that unit.
  g.unit_arrow.assign(g.n_units(), -1);
  for (int u = 0; u < g.n_units(); ++u) {
    auto it = arrow_idx.find(g.unit_names[u]);
    if (it == arrow_idx.end())
      fail(origin, "unit \"" + g.unit_names[u] + "\" has no arrow of the same id");
    const int p = it->second;
    if (g.src[p] != u || g.tgt[p] != u)
      fail(origin, "unit arrow \"" + g.unit_names[u] + "\" is not a loop at its unit");
    g.unit_arrow[u] = p;
  }

  const json& inverse = require(j, "inverse", origin);
  if (!inverse.is_object()) fail(origin, "\"inverse\" must be an object");
  g.inv.assign(g.n_arrows(), -1);
  for (const auto& [key, val] : inverse.items()) {
    auto p = arrow_idx.find(key);
    if (p == arrow_idx.end()) fail(origin, "inverse: unknown arrow \"" + key + "\"");
    if (!val.is_string()) fail(origin, "inverse[\"" + key + "\"] is not a string");
    auto q = arrow_idx.find(val.get<std::string>());
    if (q == arrow_idx.end())
      fail(origin, "inverse[\"" + key + "\"]: unknown arrow \"" + val.get<std::string>() + "\"");
    g.inv[p->second] = q->second;
  }
  for (int p = 0; p < g.n_arrows(); ++p)
    if (g.inv[p] < 0) fail(origin, "inverse missing for arrow \"" + g.arrow_names[p] + "\"");

  const json& compose = require(j, "compose", origin);
  if (!compose.is_object()) fail(origin, "\"compose\" must be an object");
  g.comp = Eigen::MatrixXi::Constant(g.n_arrows(), g.n_arrows(), -1);
  for (const auto& [key, val] : compose.items()) {
    const auto comma = key.find(',');
    if (comma == std::string::npos || key.find(',', comma + 1) != std::string::npos)
      fail(origin, "compose key \"" + key + "\" is not of the form \"p,q\"");
    auto p = arrow_idx.find(key.substr(0, comma));
    auto q = arrow_idx.find(key.substr(comma + 1));
    if (p == arrow_idx.end() || q == arrow_idx.end())
      fail(origin, "compose key \"" + key + "\" references an unknown arrow");
    if (!val.is_string()) fail(origin, "compose[\"" + key + "\"] is not a string");
    auto r = arrow_idx.find(val.get<std::string>());
    if (r == arrow_idx.end())
      fail(origin, "compose[\"" + key + "\"]: unknown arrow \"" + val.get<std::string>() + "\"");
    if (g.src[p->second] != g.tgt[q->second])
      fail(origin, "non-composable pair in compose table: \"" + key + "\"");
    g.comp(p->second, q->second) = r->second;
  }

  const json& lw = require(j, "left_weight", origin);
  const json& rw = require(j, "right_weight", origin);
  if (!lw.is_object() || !rw.is_object())
    fail(origin, "\"left_weight\" and \"right_weight\" must be objects");
  out.weights.m.resize(g.n_units());
  out.weights.n.resize(g.n_units());
  for (int u = 0; u < g.n_units(); ++u) {
    out.weights.m(u) = positive_weight(lw, g.unit_names[u], "left_weight", origin);
    out.weights.n(u) = positive_weight(rw, g.unit_names[u], "right_weight", origin);
  }
  for (const auto& [key, val] : lw.items()) {
    (void)val;
    if (unit_idx.find(key) == unit_idx.end())
      fail(origin, "left_weight: unknown unit \"" + key + "\"");
  }
  for (const auto& [key, val] : rw.items()) {
    (void)val;
    if (unit_idx.find(key) == unit_idx.end())
      fail(origin, "right_weight: unknown unit \"" + key + "\"");
  }

  out.model = model_from_name(require(j, "model", origin).get<std::string>());

  if (auto it = j.find("tamper"); it != j.end()) {
    if (!it->is_object()) fail(origin, "\"tamper\" must be an object");
    if (auto n = it->find("e_hermitian_noise"); n != it->end())
      out.tamper.e_noise = n->get<Real>();
    if (auto s = it->find("noise_seed"); s != it->end())
      out.tamper.e_seed = s->get<std::uint64_t>();
    if (auto a = it->find("phi_arrow"); a != it->end()) {
      auto p = arrow_idx.find(a->get<std::string>());
      if (p == arrow_idx.end())
        fail(origin, "tamper.phi_arrow: unknown arrow \"" + a->get<std::string>() + "\"");
      out.tamper.phi_arrow = p->second;
      out.tamper.phi_value = require(*it, "phi_value", origin).get<Real>();
    }
  }
  return out;
}

ParsedSpec parse_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError(path + ": cannot open file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_spec_text(text.str(), path);
}

std::string write_spec(const FiniteGroupoid& g, const HaarWeights& hw, ModelKind model) {
  // In the file format a unit is named by its identity arrow, so the units
  // array really is a subset of the arrow ids.
  std::vector<std::string> unames(g.n_units());
  for (int u = 0; u < g.n_units(); ++u) {
    if (g.unit_arrow[u] < 0)
      throw SpecError("cannot serialize: unit " + g.unit_names[u] + " has no identity arrow");
    unames[u] = g.arrow_names[g.unit_arrow[u]];
  }
  json j;
  j["units"] = json::array();
  for (const auto& u : unames) j["units"].push_back(u);
  j["arrows"] = json::array();
  for (int p = 0; p < g.n_arrows(); ++p)
    j["arrows"].push_back({{"id", g.arrow_names[p]},
                           {"src", unames[g.src[p]]},
                           {"tgt", unames[g.tgt[p]]}});
  json inv = json::object();
  for (int p = 0; p < g.n_arrows(); ++p) inv[g.arrow_names[p]] = g.arrow_names[g.inv[p]];
  j["inverse"] = std::move(inv);
  json comp = json::object();
  for (int p = 0; p < g.n_arrows(); ++p)
    for (int q = 0; q < g.n_arrows(); ++q)
      if (g.comp(p, q) >= 0)
        comp[g.arrow_names[p] + "," + g.arrow_names[q]] = g.arrow_names[g.comp(p, q)];
  j["compose"] = std::move(comp);
  json lw = json::object(), rw = json::object();
  for (int u = 0; u < g.n_units(); ++u) {
    lw[unames[u]] = hw.m(u);
    rw[unames[u]] = hw.n(u);
  }
  j["left_weight"] = std::move(lw);
  j["right_weight"] = std::move(rw);
  j["model"] = model_name(model);
  return j.dump(2) + "\n";
}

}  // namespace qg
