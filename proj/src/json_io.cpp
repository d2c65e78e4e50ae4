#include "calibra/json_io.hpp"

namespace calibra {

json form_to_json(const Form& f) {
  json terms = json::array();
  for (std::size_t r = 0; r < f.term_count(); ++r) {
    double c = f.coeff_at(r);
    if (c == 0.0) continue;
    terms.push_back({{"idx", f.index_at(r)}, {"c", c}});
  }
  return json{{"n", f.ambient_dim()}, {"k", f.degree()}, {"terms", terms}};
}

Form form_from_json(const json& j) {
  int n = j.at("n").get<int>();
  int k = j.at("k").get<int>();
  std::vector<std::pair<MultiIndex, double>> terms;
  for (const auto& t : j.at("terms")) {
    terms.emplace_back(t.at("idx").get<MultiIndex>(), t.at("c").get<double>());
  }
  return Form::make(n, k, terms);
}

json plane_to_json(const OrientedPlane& p) {
  json basis = json::array();
  for (const Vec& v : p.basis) basis.push_back(v);
  return json{{"n", p.n}, {"k", p.k}, {"basis", basis}};
}

OrientedPlane plane_from_json(const json& j) {
  int n = j.at("n").get<int>();
  std::vector<Vec> basis;
  for (const auto& row : j.at("basis")) basis.push_back(row.get<Vec>());
  if (j.contains("k") && j.at("k").get<int>() != static_cast<int>(basis.size()))
    throw DimMismatch("plane_from_json: k does not match basis rows");
  return OrientedPlane::from_orthonormal(n, std::move(basis));
}

json comass_to_json(const ComassReport& r) {
  return json{{"value", r.value},
              {"argmax", plane_to_json(r.argmax)},
              {"starts", r.starts},
              {"converged_fraction", r.converged_fraction}};
}

json angle_report_to_json(const AngleReport& r) {
  json out{{"theta", r.theta},
           {"psi", r.psi},
           {"psi_sum", r.psi_sum},
           {"minimizing", r.minimizing},
           {"boundary", r.boundary}};
  if (r.witness) {
    json polygon = json::array(), u = json::array();
    for (const auto& w : r.witness->polygon) polygon.push_back({w[0], w[1], w[2]});
    for (const auto& v : r.witness->u) u.push_back({v[0], v[1], v[2]});
    out["witness"] = json{{"polygon", polygon},
                          {"u", u},
                          {"eta", form_to_json(r.witness->eta)}};
  } else {
    out["witness"] = nullptr;
  }
  return out;
}

json plane_class_to_json(const PlaneClass& c) {
  json defects = json::object();
  for (const auto& [name, value] : c.defects) defects[name] = value;
  json out{{"label", to_string(c.label)}, {"defects", defects}};
  if (c.label == PlaneLabel::special_lagrangian) out["phase"] = c.phase;
  return out;
}

}  // namespace calibra
