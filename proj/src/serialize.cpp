#include "otl/serialize.hpp"

namespace otl {

Json to_json(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_json(Vector(m.row(i).transpose())));
  return rows;
}

Json to_json(const DiscreteMeasure& mu) {
  Json atoms = Json::array();
  for (const auto& p : mu.support()) atoms.push_back(to_json(p));
  return {{"atoms", atoms}, {"weights", to_json(mu.weights())}};
}

Json to_json(const OtSolution& sol) {
  return {{"status", to_string(sol.status)},
          {"value", sol.value},
          {"iterations", sol.iterations},
          {"plan", to_json(sol.plan.entries)},
          {"phi", to_json(sol.dual.phi)},
          {"psi", to_json(sol.dual.psi)}};
}

Json to_json(const Summary& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"q025", s.q025}, {"q50", s.q50}, {"q975", s.q975}};
}

Vector vector_from_json(const Json& j, const std::string& what) {
  require(j.is_array() && !j.empty(), what + " must be a nonempty array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    require(j[i].is_number(), what + " must contain numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from_json(const Json& j, const std::string& what) {
  require(j.is_array() && !j.empty(), what + " must be a nonempty array of rows");
  const Vector first = vector_from_json(j[0], what);
  Matrix m(static_cast<Eigen::Index>(j.size()), first.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Vector row = vector_from_json(j[i], what);
    require(row.size() == first.size(), what + " rows must have equal length");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

DiscreteMeasure measure_from_json(const Json& j, const std::string& what) {
  require(j.is_object() && j.contains("atoms"), what + " needs an \"atoms\" array");
  const Json& atoms = j.at("atoms");
  require(atoms.is_array() && !atoms.empty(), what + ".atoms must be a nonempty array");
  std::vector<Point> support;
  for (const auto& a : atoms) support.push_back(a.is_array() ? vector_from_json(a, what + ".atoms") : make_point({a.get<double>()}));
  if (!j.contains("weights")) return DiscreteMeasure::uniform(std::move(support));
  const Vector w = vector_from_json(j.at("weights"), what + ".weights");
  require(static_cast<std::size_t>(w.size()) == support.size(), what + ": one weight per atom");
  return DiscreteMeasure(std::move(support), std::vector<double>(w.data(), w.data() + w.size()));
}

Summary summarize(const EmpiricalLaw1D& law) { return summarize(law.values()); }

}  // namespace otl
