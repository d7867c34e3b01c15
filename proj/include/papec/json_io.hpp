#pragma once

#include <json.hpp>

#include "papec/entropy.hpp"
#include "papec/gf2.hpp"
#include "papec/hilbert.hpp"
#include "papec/pa.hpp"
#include "papec/qkd.hpp"
#include "papec/report.hpp"

// JSON forms for report artifacts and golden files: layouts with row-major
// complex entries as [re, im] pairs, hash matrices in the "110;011" text
// form, entropy certificates included so reports can be re-checked.

namespace papec::json_io {

using nlohmann::json;

inline json matrix_to_json(const hilbert::Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline hilbert::Matrix matrix_from_json(const json& j) {
  const int r = static_cast<int>(j.size());
  const int c = r ? static_cast<int>(j.at(0).size()) : 0;
  hilbert::Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < c; ++k)
      m(i, k) = hilbert::Complex(j.at(i).at(k).at(0).get<double>(),
                                 j.at(i).at(k).at(1).get<double>());
  return m;
}

inline json layout_to_json(const hilbert::SystemLayout& l) {
  json regs = json::array();
  for (int i = 0; i < l.size(); ++i) regs.push_back({{"name", l.reg(i).name}, {"dim", l.reg(i).dim}});
  return regs;
}

inline hilbert::SystemLayout layout_from_json(const json& j) {
  std::vector<hilbert::Register> regs;
  for (const auto& r : j) regs.push_back({r.at("name").get<std::string>(), r.at("dim").get<int>()});
  return hilbert::SystemLayout(regs);
}

inline json state_to_json(const hilbert::State& s) {
  return json{{"layout", layout_to_json(s.layout)}, {"data", matrix_to_json(s.mat)}};
}

inline hilbert::State state_from_json(const json& j) {
  return hilbert::State{layout_from_json(j.at("layout")), matrix_from_json(j.at("data"))};
}

inline json family_to_json(const gf2::LinearHashFamily& f) {
  json members = json::array();
  for (size_t i = 0; i < f.members.size(); ++i)
    members.push_back({{"g", f.members[i].str()}, {"p", f.probs[i].str()}});
  return json{{"n", f.n}, {"m", f.m}, {"members", members}};
}

inline gf2::LinearHashFamily family_from_json(const json& j) {
  gf2::LinearHashFamily f;
  f.n = j.at("n").get<int>();
  f.m = j.at("m").get<int>();
  for (const auto& mem : j.at("members")) {
    f.members.push_back(gf2::BitMatrix::from_string(mem.at("g").get<std::string>()));
    const std::string p = mem.at("p").get<std::string>();
    const auto slash = p.find('/');
    f.probs.emplace_back(std::stoll(p.substr(0, slash)), std::stoll(p.substr(slash + 1)));
  }
  return f;
}

inline json cq_to_json(const hilbert::CqState& cq) {
  json blocks = json::object();
  for (const auto& [a, b] : cq.blocks)
    blocks[gf2::BitVector::from_basis_index(cq.n, a).str()] = matrix_to_json(b);
  return json{{"n", cq.n}, {"e_layout", layout_to_json(cq.e_layout)}, {"blocks", blocks}};
}

inline hilbert::CqState cq_from_json(const json& j) {
  hilbert::CqState cq;
  cq.n = j.at("n").get<int>();
  cq.e_layout = layout_from_json(j.at("e_layout"));
  for (const auto& [key, val] : j.at("blocks").items())
    cq.blocks.emplace(gf2::BitVector::from_string(key).basis_index(), matrix_from_json(val));
  return cq;
}

inline json pa_instance_to_json(const pa::PaInstance& inst) {
  return json{{"n", inst.n},
              {"m", inst.m},
              {"initial", cq_to_json(inst.initial)},
              {"family", family_to_json(inst.family)}};
}

inline pa::PaInstance pa_instance_from_json(const json& j) {
  pa::PaInstance inst;
  inst.n = j.at("n").get<int>();
  inst.m = j.at("m").get<int>();
  inst.initial = cq_from_json(j.at("initial"));
  inst.family = family_from_json(j.at("family"));
  return inst;
}

inline json qkd_instance_to_json(const qkd::QkdInstance& inst) {
  return json{{"n", inst.n},
              {"m", inst.m},
              {"l", inst.l},
              {"d_e", inst.d_e},
              {"parity_test", inst.parity_test},
              {"init_layout", layout_to_json(inst.init_layout)},
              {"initial", matrix_to_json(inst.initial)},
              {"ec_table", inst.ec_table},
              {"verify_family", family_to_json(inst.verify_family)},
              {"pa_family", family_to_json(inst.pa_family)}};
}

inline qkd::QkdInstance qkd_instance_from_json(const json& j) {
  qkd::QkdInstance inst;
  inst.n = j.at("n").get<int>();
  inst.m = j.at("m").get<int>();
  inst.l = j.at("l").get<int>();
  inst.d_e = j.at("d_e").get<int>();
  inst.parity_test = j.at("parity_test").get<bool>();
  inst.init_layout = layout_from_json(j.at("init_layout"));
  inst.initial = matrix_from_json(j.at("initial"));
  inst.ec_table = j.at("ec_table").get<std::vector<std::vector<std::uint32_t>>>();
  inst.verify_family = family_from_json(j.at("verify_family"));
  inst.pa_family = family_from_json(j.at("pa_family"));
  return inst;
}

inline json interval_to_json(const entropy::EntropyInterval& iv) {
  return json{{"lower", iv.lower},       {"upper", iv.upper},
              {"gap", iv.gap},           {"converged", iv.converged},
              {"newton_steps", iv.newton_steps},
              {"X", matrix_to_json(iv.X)}, {"Y", matrix_to_json(iv.Y)}};
}

inline json inequality_to_json(const report::Inequality& q) {
  return json{{"id", q.id},
              {"lhs", q.lhs},
              {"rhs", q.rhs},
              {"margin", q.margin},
              {"verdict", report::verdict_name(q.verdict)}};
}

inline json security_report_to_json(const metrics::SecurityReport& r) {
  json per_g = json::object();
  for (const auto& [g, v] : r.per_g) per_g[g] = v;
  json j{{"d1", r.d1},
         {"phase_error", r.phase_error},
         {"correctness_failure", r.correctness_failure},
         {"per_g", per_g}};
  if (r.has_D1) j["D1"] = r.D1;
  return j;
}

}  // namespace papec::json_io
