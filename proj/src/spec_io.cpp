#include "fracdev/spec_io.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace fracdev::io {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw std::invalid_argument("spec: unknown key '" + it.key() + "' in " + where);
}

}  // namespace

SpecDocument spec_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("spec: expected a JSON object");
  reject_unknown(j, {"hurst", "n", "d", "a", "T", "drift", "diffusion", "f", "expansion", "mc", "moments"}, "the top level");

  SpecDocument doc;
  SdeSpec& s = doc.spec;
  s.hurst = j.at("hurst").get<double>();
  s.n = j.at("n").get<int>();
  s.d = j.at("d").get<int>();
  s.horizon = j.at("T").get<double>();

  const auto a = j.at("a").get<std::vector<double>>();
  s.initial = Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<long>(a.size()));

  for (const auto& e : j.at("drift").get<std::vector<std::string>>()) s.drift.push_back(sym::parse(e));
  for (const auto& row : j.at("diffusion")) {
    std::vector<sym::Expr> r;
    for (const auto& e : row.get<std::vector<std::string>>()) r.push_back(sym::parse(e));
    s.diffusion.push_back(std::move(r));
  }
  s.f = sym::parse(j.at("f").get<std::string>());
  s.validate();

  if (j.contains("expansion")) {
    reject_unknown(j.at("expansion"), {"order"}, "expansion");
    doc.expansion_order = j.at("expansion").value("order", 2);
  }
  if (j.contains("mc")) {
    const json& m = j.at("mc");
    reject_unknown(m, {"paths", "steps", "seed", "scheme", "antithetic"}, "mc");
    doc.mc.paths = m.value("paths", doc.mc.paths);
    doc.mc.steps = m.value("steps", doc.mc.steps);
    doc.mc.seed = m.value("seed", doc.mc.seed);
    doc.mc.antithetic = m.value("antithetic", doc.mc.antithetic);
    if (m.contains("scheme")) doc.mc.scheme = solver::scheme_from_string(m.at("scheme").get<std::string>());
  }
  if (j.contains("moments")) {
    const json& m = j.at("moments");
    reject_unknown(m, {"method", "tol"}, "moments");
    doc.moment_method = m.value("method", doc.moment_method);
    if (doc.moment_method != "pairing" && doc.moment_method != "mc")
      throw std::invalid_argument("spec: moments.method must be 'pairing' or 'mc'");
    doc.moment_tol = m.value("tol", doc.moment_tol);
  }
  return doc;
}

SpecDocument load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open spec file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& err) {
    throw std::invalid_argument("spec file '" + path + "': " + err.what());
  }
  return spec_from_json(j);
}

json spec_to_json(const SpecDocument& doc) {
  const SdeSpec& s = doc.spec;
  json j;
  j["hurst"] = s.hurst;
  j["n"] = s.n;
  j["d"] = s.d;
  j["T"] = s.horizon;
  j["a"] = std::vector<double>(s.initial.data(), s.initial.data() + s.initial.size());
  json drift = json::array();
  for (const auto& e : s.drift) drift.push_back(e.str());
  j["drift"] = drift;
  json diffusion = json::array();
  for (const auto& row : s.diffusion) {
    json r = json::array();
    for (const auto& e : row) r.push_back(e.str());
    diffusion.push_back(r);
  }
  j["diffusion"] = diffusion;
  j["f"] = s.f.str();
  j["expansion"] = {{"order", doc.expansion_order}};
  j["mc"] = {{"paths", doc.mc.paths},
             {"steps", doc.mc.steps},
             {"seed", doc.mc.seed},
             {"scheme", solver::scheme_name(doc.mc.scheme)},
             {"antithetic", doc.mc.antithetic}};
  j["moments"] = {{"method", doc.moment_method}, {"tol", doc.moment_tol}};
  return j;
}

json slope_to_json(const mc::SlopeFit& fit) {
  json points = json::array();
  for (const auto& p : fit.points)
    points.push_back({{"t", p.t},
                      {"mc_mean", p.mc_mean},
                      {"mc_stderr", p.mc_stderr},
                      {"expansion", p.reference},
                      {"difference", p.difference},
                      {"used", p.used}});
  return {{"status", fit.status == mc::SlopeFit::Status::Ok ? "ok" : "inconclusive"},
          {"slope", fit.slope},
          {"target", fit.target},
          {"points", points}};
}

json expansion_to_json(const expansion::Expansion& e) {
  json terms = json::array();
  for (const auto& t : e.terms) {
    terms.push_back({{"tree_id", t.tree_id},
                     {"bracket", t.bracket},
                     {"assignment", t.assignment},
                     {"coefficient", t.coefficient},
                     {"moment", t.moment},
                     {"moment_error", t.moment_error},
                     {"exponent", t.exponent},
                     {"s", t.stochastic},
                     {"d", t.deterministic}});
  }
  json aggregates = json::array();
  for (const auto& a : e.aggregates)
    aggregates.push_back({{"exponent", a.exponent}, {"coefficient", a.coefficient}, {"error", a.error}});
  return {{"order", e.order},
          {"hurst", e.hurst},
          {"remainder_order", e.remainder_order},
          {"trees_total", e.trees_total},
          {"terms_total", e.terms_total},
          {"pruned_odd_stochastic", e.pruned_odd_stochastic},
          {"pruned_zero_coefficient", e.pruned_zero_coefficient},
          {"terms", terms},
          {"aggregates", aggregates}};
}

}  // namespace fracdev::io
