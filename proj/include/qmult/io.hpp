#pragma once

#include <json.hpp>

#include "qmult/census.hpp"
#include "qmult/unfold.hpp"

// JSON schemas for the CLI: quivers, integer vectors, representation points,
// classical points, group elements, gamma parameters, reports. Field elements
// render as decimal integers over prime fields and as "p/q" strings over the
// rationals.

namespace qmult {

using Json = nlohmann::json;

struct FieldSpec {
  bool rational = true;
  std::uint32_t p = 0;

  static FieldSpec parse(const std::string& s) {
    if (s == "Q") return {true, 0};
    if (s.rfind("Fp:", 0) == 0) {
      long v = std::stol(s.substr(3));
      require(v >= 2, Err::InvalidParams, "field characteristic must be a prime >= 2");
      for (long d = 2; d * d <= v; ++d)
        require(v % d != 0, Err::InvalidParams, "field characteristic must be prime");
      return {false, static_cast<std::uint32_t>(v)};
    }
    fail(Err::InvalidParams, "field must be \"Q\" or \"Fp:<p>\"");
  }
  std::string str() const { return rational ? "Q" : "Fp:" + std::to_string(p); }
};

inline Json elem_to_json(const Rat& x) { return x.str(); }
inline Json elem_to_json(const Fp& x) { return x.v; }

inline Rat elem_from_json_rat(const Json& j) {
  if (j.is_number_integer()) return Rat(static_cast<long>(j.get<long long>()));
  return Rat::from_string(j.get<std::string>());
}
inline Fp elem_from_json_fp(const Json& j, std::uint32_t p) {
  if (j.is_number_integer()) return Fp::from_int(j.get<long long>(), p);
  return Fp::from_int(std::stoll(j.get<std::string>()), p);
}

template <class K>
K elem_from_json(const Json& j, const FieldCtx<K>& F);
template <>
inline Rat elem_from_json<Rat>(const Json& j, const FieldCtx<Rat>&) {
  return elem_from_json_rat(j);
}
template <>
inline Fp elem_from_json<Fp>(const Json& j, const FieldCtx<Fp>& F) {
  return elem_from_json_fp(j, F.p);
}

// ---------------------------------------------------------------------------
// Quivers and vectors.

inline Json quiver_to_json(const QuiverWithMult& Q) {
  Json j;
  j["vertices"] = Q.vertices;
  j["arrows"] = Json::array();
  for (const Arrow& a : Q.arrows)
    j["arrows"].push_back({{"id", a.id}, {"from", a.from}, {"to", a.to}});
  j["mult"] = Json::object();
  for (const auto& [v, m] : Q.mult) j["mult"][v] = m;
  return j;
}

inline QuiverWithMult quiver_from_json(const Json& j) {
  QuiverWithMult Q;
  for (const auto& v : j.at("vertices")) Q.vertices.push_back(v.get<std::string>());
  for (const auto& a : j.at("arrows"))
    Q.arrows.push_back(Arrow{a.at("id").get<std::string>(), a.at("from").get<std::string>(),
                             a.at("to").get<std::string>()});
  for (const auto& [v, m] : j.at("mult").items()) Q.mult[v] = m.get<int>();
  Q.validate();
  return Q;
}

inline Json intvec_to_json(const IntVec& v) {
  Json j = Json::object();
  for (const auto& [k, x] : v) j[k] = x;
  return j;
}

inline IntVec intvec_from_json(const Json& j) {
  IntVec v;
  for (const auto& [k, x] : j.items()) v[k] = x.get<long long>();
  return v;
}

// ---------------------------------------------------------------------------
// Points.

template <class K>
Json mat_to_json(const Mat<K>& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(elem_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class K>
Mat<K> mat_from_json(const Json& j, const FieldCtx<K>& F) {
  Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j.at(0).size());
  Mat<K> m = zeros<K>(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index jj = 0; jj < cols; ++jj) m(i, jj) = elem_from_json<K>(j.at(i).at(jj), F);
  return m;
}

template <class K>
Json rep_to_json(const RepPoint<K>& p) {
  Json arrows = Json::object();
  for (const auto& [id, h] : p.x) {
    Json blocks = Json::array();
    for (const Mat<K>& b : h.blocks) blocks.push_back(mat_to_json(b));
    arrows[id] = Json{{"blocks", std::move(blocks)}};
  }
  return Json{{"arrows", std::move(arrows)}, {"rank", intvec_to_json(p.rank)}};
}

template <class K>
RepPoint<K> rep_from_json(const QuiverWithMult& Q, const Json& j, const FieldCtx<K>& F) {
  IntVec rank = intvec_from_json(j.at("rank"));
  RepPoint<K> p = zero_rep<K>(Q, rank);
  for (const Arrow& a : Q.arrows) {
    const Json& blocks = j.at("arrows").at(a.id).at("blocks");
    HomElem<K>& h = p.x.at(a.id);
    require(blocks.size() == static_cast<std::size_t>(h.mij), Err::ShapeMismatch,
            "block count mismatch at arrow " + a.id);
    for (int l = 0; l < h.mij; ++l) {
      Mat<K> b = mat_from_json<K>(blocks.at(l), F);
      require(b.rows() == h.block_rows() && b.cols() == h.block_cols(), Err::ShapeMismatch,
              "block shape mismatch at arrow " + a.id);
      h.blocks[l] = b;
    }
  }
  return p;
}

template <class K>
Json classical_to_json(const ClassicalRep<K>& v) {
  Json arrows = Json::object();
  for (const auto& [id, m] : v.v) arrows[id] = mat_to_json(m);
  return Json{{"arrows", std::move(arrows)}, {"dim", intvec_to_json(v.dim)}};
}

template <class K>
ClassicalRep<K> classical_from_json(const QuiverWithMult& Q, const Json& j,
                                    const FieldCtx<K>& F) {
  ClassicalRep<K> v;
  v.dim = intvec_from_json(j.at("dim"));
  for (const Arrow& a : Q.arrows) {
    Mat<K> m = mat_from_json<K>(j.at("arrows").at(a.id), F);
    require(m.rows() == v.dim.at(a.to) && m.cols() == v.dim.at(a.from), Err::ShapeMismatch,
            "matrix shape mismatch at arrow " + a.id);
    v.v[a.id] = m;
  }
  return v;
}

template <class K>
Json group_to_json(const GroupElem<K>& g) {
  Json verts = Json::object();
  for (const auto& [v, m] : g.g) {
    Json coeffs = Json::array();
    for (const Mat<K>& c : m.c) coeffs.push_back(mat_to_json(c));
    verts[v] = std::move(coeffs);
  }
  return Json{{"vertices", std::move(verts)}};
}

template <class K>
GroupElem<K> group_from_json(const QuiverWithMult& Q, const Json& j, const FieldCtx<K>& F) {
  GroupElem<K> g;
  for (const std::string& v : Q.vertices) {
    const Json& coeffs = j.at("vertices").at(v);
    require(coeffs.size() == static_cast<std::size_t>(Q.m(v)), Err::ShapeMismatch,
            "coefficient count mismatch at vertex " + v);
    Mat<K> first = mat_from_json<K>(coeffs.at(0), F);
    MatPoly<K> m(Q.m(v), first.rows(), first.cols());
    m.c[0] = first;
    for (int l = 1; l < Q.m(v); ++l) m.c[l] = mat_from_json<K>(coeffs.at(l), F);
    g.g[v] = m;
  }
  require(group_is_valid(g), Err::NonUnit, "constant term is not invertible");
  return g;
}

/// gamma: {vertex: [coefficients of gamma_i in k_{m_i}]}, meaning the scalar
/// matrix gamma_i Id at each vertex.
template <class K>
std::map<std::string, MatPoly<K>> gamma_from_json(const QuiverWithMult& Q, const IntVec& r,
                                                  const Json& j, const FieldCtx<K>& F) {
  std::map<std::string, MatPoly<K>> gamma;
  for (const std::string& v : Q.vertices) {
    MatPoly<K> m(Q.m(v), r.at(v), r.at(v));
    if (j.contains(v)) {
      const Json& coeffs = j.at(v);
      require(coeffs.size() <= static_cast<std::size_t>(Q.m(v)), Err::ShapeMismatch,
              "too many gamma coefficients at " + v);
      for (std::size_t l = 0; l < coeffs.size(); ++l) {
        K c = elem_from_json<K>(coeffs.at(l), F);
        for (Eigen::Index i = 0; i < m.rows(); ++i) m.c[l](i, i) = c;
      }
    }
    gamma[v] = m;
  }
  return gamma;
}

template <class K>
Json cotangent_to_json(const CotangentPoint<K>& p) {
  Json y = Json::object();
  for (const auto& [id, h] : p.y) {
    Json blocks = Json::array();
    for (const Mat<K>& b : h.blocks) blocks.push_back(mat_to_json(b));
    y[id] = Json{{"blocks", std::move(blocks)}};
  }
  return Json{{"x", rep_to_json(p.x)}, {"y", std::move(y)}};
}

template <class K>
CotangentPoint<K> cotangent_from_json(const QuiverWithMult& Q, const Json& j,
                                      const FieldCtx<K>& F) {
  CotangentPoint<K> p;
  p.x = rep_from_json<K>(Q, j.at("x"), F);
  CotangentPoint<K> shape = zero_cotangent<K>(Q, p.x.rank);
  p.y = shape.y;
  for (const Arrow& a : Q.arrows) {
    const Json& blocks = j.at("y").at(a.id).at("blocks");
    HomElem<K>& h = p.y.at(a.id);
    require(blocks.size() == static_cast<std::size_t>(h.mij), Err::ShapeMismatch,
            "block count mismatch at reverse arrow " + a.id);
    for (int l = 0; l < h.mij; ++l) {
      Mat<K> b = mat_from_json<K>(blocks.at(l), F);
      require(b.rows() == h.block_rows() && b.cols() == h.block_cols(), Err::ShapeMismatch,
              "block shape mismatch at reverse arrow " + a.id);
      h.blocks[l] = b;
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Reports.

template <class K>
Json witness_to_json(const StabWitness<K>& w) {
  Json j;
  j["dims"] = intvec_to_json(w.dims);
  if (!w.graded.empty()) {
    Json g = Json::object();
    for (const auto& [v, s] : w.graded) g[v] = mat_to_json(s.basis);
    j["graded_subspace"] = std::move(g);
  }
  if (w.family.has_value()) {
    Json f = Json::object();
    for (const auto& [v, gen] : w.family->gen) {
      Json coeffs = Json::array();
      for (const auto& c : gen.c) coeffs.push_back(mat_to_json(c));
      f[v] = std::move(coeffs);
    }
    j["free_family"] = std::move(f);
  }
  return j;
}

template <class K>
Json verdict_to_json(const Verdict<K>& v) {
  Json j;
  j["verdict"] = ss_name(v.verdict);
  if (v.witness.has_value()) j["witness"] = witness_to_json(*v.witness);
  return j;
}

inline Json count_report_to_json(const CountReport& r) {
  Json j;
  j["q"] = r.q;
  j["mode"] = r.mode == CensusMode::ordinary ? "ordinary"
              : r.mode == CensusMode::pi     ? "pi"
                                             : "nakajima";
  j["total_points"] = r.total_points;
  j["semistable"] = r.semistable;
  j["group"] = {{"gl", r.group.gl}, {"delta", r.group.delta}, {"g", r.group.g}};
  j["freeness"] = r.freeness;
  j["moduli"] = {{"num", r.moduli_num}, {"den", r.moduli_den}, {"integral", r.moduli_integral}};
  j["cursor"] = r.cursor;
  j["complete"] = r.complete;
  if (r.s_class_count) j["s_classes"] = *r.s_class_count;
  return j;
}

inline Json polyfit_to_json(const PolyFit& f) {
  Json coeffs = Json::array();
  for (const Rat& c : f.coeffs) coeffs.push_back(c.str());
  return Json{{"polynomial", f.polynomial},
              {"degree", f.degree},
              {"coeffs_low_to_high", std::move(coeffs)},
              {"held_out_verified", f.held_out_verified}};
}

}  // namespace qmult
