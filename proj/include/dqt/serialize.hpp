#ifndef DQT_SERIALIZE_HPP
#define DQT_SERIALIZE_HPP

// JSON schema:
//   density matrix:   {"labels": [...], "matrix": [[[re, im], ...], ...]}
//   Lindblad operator: {"labels": [...], "tag": "...", "support": [...],
//                       "entries": [[row, col, [re, im]], ...]}   (entries on the support)
//   Liouvillian:      {"labels": [...], "operators": [<operator without labels>, ...]}

#include <json.hpp>

#include "dqt/liouvillian.hpp"

namespace dqt {

using json = nlohmann::json;

namespace detail {
inline json complex_json(complex z) { return json::array({z.real(), z.imag()}); }
inline complex complex_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

inline json op_body(const LindbladOperator& op) {
  json entries = json::array();
  const auto& m = op.local();
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (m(r, c) != complex(0.0)) entries.push_back(json::array({r, c, complex_json(m(r, c))}));
  return {{"tag", op.tag()}, {"support", op.support()}, {"entries", entries}};
}

inline LindbladOperator op_from_body(const QubitRegister& reg, const json& j) {
  auto support = j.at("support").get<std::vector<std::string>>();
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << support.size());
  Matrix m = Matrix::Zero(d, d);
  for (const auto& e : j.at("entries")) {
    const auto r = e.at(0).get<Eigen::Index>(), c = e.at(1).get<Eigen::Index>();
    if (r < 0 || c < 0 || r >= d || c >= d) throw std::invalid_argument("operator entry out of range");
    m(r, c) = complex_from(e.at(2));
  }
  return {reg, std::move(support), std::move(m), j.value("tag", std::string{})};
}
}  // namespace detail

inline json to_json(const DensityMatrix& rho) {
  json rows = json::array();
  const auto& m = rho.matrix();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(detail::complex_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return {{"labels", rho.reg().labels()}, {"matrix", std::move(rows)}};
}

inline DensityMatrix density_from_json(const json& j) {
  QubitRegister reg(j.at("labels").get<std::vector<std::string>>());
  const auto& rows = j.at("matrix");
  const auto d = static_cast<Eigen::Index>(reg.dim());
  if (static_cast<Eigen::Index>(rows.size()) != d) throw register_mismatch("matrix row count does not match labels");
  Matrix m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    const auto& row = rows.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != d) throw register_mismatch("matrix row length does not match labels");
    for (Eigen::Index c = 0; c < d; ++c) m(r, c) = detail::complex_from(row.at(static_cast<std::size_t>(c)));
  }
  return {std::move(reg), std::move(m)};
}

inline json to_json(const LindbladOperator& op) {
  json j = detail::op_body(op);
  j["labels"] = op.reg().labels();
  return j;
}

inline LindbladOperator lindblad_from_json(const json& j) {
  return detail::op_from_body(QubitRegister(j.at("labels").get<std::vector<std::string>>()), j);
}

inline json to_json(const Liouvillian& L) {
  json ops = json::array();
  for (const auto& op : L.ops()) ops.push_back(detail::op_body(op));
  return {{"labels", L.reg().labels()}, {"operators", std::move(ops)}};
}

inline Liouvillian liouvillian_from_json(const json& j) {
  QubitRegister reg(j.at("labels").get<std::vector<std::string>>());
  Liouvillian L(reg);
  for (const auto& o : j.at("operators")) L.add(detail::op_from_body(reg, o));
  return L;
}

}  // namespace dqt

#endif  // DQT_SERIALIZE_HPP
