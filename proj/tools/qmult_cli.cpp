// qmult: exact computations for quiver representations with multiplicities
// over Q and prime fields. Subcommands map one-to-one onto library
// operations; all input and output is JSON with sorted keys.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

#include "qmult/io.hpp"

using namespace qmult;

namespace {

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Json j;
  in >> j;
  return j;
}

Json parse_inline(const std::string& text) { return Json::parse(text); }

struct Common {
  std::string field = "Q";
  std::string theta, rho, gamma, alpha;
  std::string grading = "default";
  unsigned long long guard = 1ull << 26;
  int workers = 1;
  std::string out;
  std::string q_list;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--field", c.field, "Q or Fp:<p>");
  cmd->add_option("--theta", c.theta, "stability vector as JSON {vertex: int}");
  cmd->add_option("--rho", c.rho, "twisting vector as JSON {vertex: int}");
  cmd->add_option("--gamma", c.gamma, "moment value as JSON {vertex: [coeffs]}");
  cmd->add_option("--alpha", c.alpha, "grading vector as JSON {vertex: int}");
  cmd->add_option("--grading", c.grading, "default | revised:<C>");
  cmd->add_option("--guard", c.guard, "enumeration guard");
  cmd->add_option("--workers", c.workers, "census worker threads");
  cmd->add_option("--q-list", c.q_list, "comma-separated primes for multi-q runs");
  cmd->add_option("--out", c.out, "output path (default stdout)");
}

IntVec vec_or(const std::string& text, const QuiverWithMult& Q, long long def) {
  if (text.empty()) return const_vec(Q, def);
  return intvec_from_json(parse_inline(text));
}

void emit(const Common& c, Json payload, std::chrono::steady_clock::time_point t0) {
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - t0)
                .count();
  payload["timing_ms"] = ms;
  std::string text = payload.dump(2) + "\n";
  if (c.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(c.out);
    if (!out) throw std::runtime_error("cannot write " + c.out);
    out << text;
  }
}

GradingParams params_for(const QuiverWithMult& Q, const Common& c) {
  GradingParams p = canonical_params(Q);
  if (!c.alpha.empty()) {
    p.alpha = intvec_from_json(parse_inline(c.alpha));
    for (const Arrow& a : Q.arrows)
      p.beta[a.id] = p.alpha.at(a.from) * (arrow_consts(Q, a).f_ji - 1);
    p.scale = 0;
    for (const std::string& v : Q.vertices) p.scale = p.alpha.at(v) * Q.m(v);
    check_params(Q, p);
  }
  return p;
}

long long revised_c(const std::string& grading) {
  if (grading == "default") return -1;
  if (grading.rfind("revised:", 0) == 0) {
    long long C = std::stoll(grading.substr(8));
    require(C > 0, Err::InvalidParams, "revised grading needs C > 0");
    return C;
  }
  fail(Err::InvalidParams, "grading must be default or revised:<C>");
}

std::vector<std::uint32_t> parse_q_list(const std::string& text, const FieldSpec& fs) {
  std::vector<std::uint32_t> qs;
  if (!text.empty()) {
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t comma = text.find(',', pos);
      if (comma == std::string::npos) comma = text.size();
      qs.push_back(static_cast<std::uint32_t>(std::stoul(text.substr(pos, comma - pos))));
      pos = comma + 1;
    }
  } else {
    require(!fs.rational, Err::InvalidParams, "census needs a finite field or --q-list");
    qs.push_back(fs.p);
  }
  return qs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact quiver representations with multiplicities"};
  app.require_subcommand(1);

  std::string quiver_path, point_path, aux_path, resume_path;
  std::string r_text, s_text, f_text, mode_text = "ordinary";
  std::string data_text;
  int m_infinity = 1;
  long long degree_bound = 8;

  Common c;
  if (const char* env = std::getenv("QMULT_GUARD")) c.guard = std::stoull(env);

  auto* constants = app.add_subcommand("constants", "derived constants of a quiver");
  constants->add_option("quiver", quiver_path)->required();
  add_common(constants, c);

  auto* euler = app.add_subcommand("euler", "Euler form <r, s>");
  euler->add_option("quiver", quiver_path)->required();
  euler->add_option("--r", r_text)->required();
  euler->add_option("--s", s_text)->required();
  add_common(euler, c);

  auto* trunc = app.add_subcommand("truncate", "tau of a representation point");
  trunc->add_option("quiver", quiver_path)->required();
  trunc->add_option("point", point_path)->required();
  add_common(trunc, c);

  auto* iota = app.add_subcommand("iota", "section of tau on a classical point");
  iota->add_option("quiver", quiver_path)->required();
  iota->add_option("point", point_path)->required();
  add_common(iota, c);

  auto* act_cmd = app.add_subcommand("act", "group action g . x");
  act_cmd->add_option("quiver", quiver_path)->required();
  act_cmd->add_option("point", point_path)->required();
  act_cmd->add_option("group", aux_path)->required();
  add_common(act_cmd, c);

  auto* stab = app.add_subcommand("stability", "(theta, rho)-semistability verdict");
  stab->add_option("quiver", quiver_path)->required();
  stab->add_option("point", point_path)->required();
  add_common(stab, c);

  auto* poly = app.add_subcommand("polystable", "naive JH filtrations and polystability");
  poly->add_option("quiver", quiver_path)->required();
  poly->add_option("point", point_path)->required();
  add_common(poly, c);

  auto* framed = app.add_subcommand("framed", "framed quiver setup and framed stability");
  framed->add_option("quiver", quiver_path)->required();
  framed->add_option("--f", f_text, "framing vector")->required();
  framed->add_option("--r", r_text, "rank vector")->required();
  framed->add_option("--m-infinity", m_infinity, "multiplicity at the framing vertex");
  framed->add_option("--point", point_path, "framed point on Q_f (optional)");
  add_common(framed, c);

  auto* stabz = app.add_subcommand("stabilizers", "End(x), levels, unipotent stabiliser");
  stabz->add_option("quiver", quiver_path)->required();
  stabz->add_option("point", point_path)->required();
  add_common(stabz, c);

  auto* assum = app.add_subcommand("assumption-u", "exhaustive [U;theta] scan over F_q");
  assum->add_option("quiver", quiver_path)->required();
  assum->add_option("--r", r_text)->required();
  add_common(assum, c);

  auto* moment = app.add_subcommand("moment", "moment map of a cotangent point");
  moment->add_option("quiver", quiver_path)->required();
  moment->add_option("point", point_path)->required();
  add_common(moment, c);

  auto* fiber = app.add_subcommand("fiber", "solve mu(x, y) = gamma for y");
  fiber->add_option("quiver", quiver_path)->required();
  fiber->add_option("point", point_path)->required();
  add_common(fiber, c);

  auto* weights = app.add_subcommand("grading-weights", "thickened-arrow weight table");
  weights->add_option("quiver", quiver_path)->required();
  add_common(weights, c);

  auto* limit = app.add_subcommand("limit", "limit of t * x at t -> 0");
  limit->add_option("quiver", quiver_path)->required();
  limit->add_option("point", point_path)->required();
  add_common(limit, c);

  auto* unfold_cmd = app.add_subcommand("unfold", "unfolded quiver and embedding");
  unfold_cmd->add_option("quiver", quiver_path)->required();
  unfold_cmd->add_option("--point", point_path, "point to embed (optional)");
  add_common(unfold_cmd, c);

  auto* census = app.add_subcommand("census", "exhaustive F_q verdict counts");
  census->add_option("quiver", quiver_path)->required();
  census->add_option("--r", r_text)->required();
  census->add_option("--mode", mode_text, "ordinary | pi | nakajima");
  census->add_option("--resume", resume_path, "continue from a previous report");
  add_common(census, c);

  auto* fit = app.add_subcommand("fit", "exact polynomial fit of (q, count) data");
  fit->add_option("--data", data_text, "JSON [[q, count], ...]")->required();
  fit->add_option("--degree-bound", degree_bound);
  add_common(fit, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  auto t0 = std::chrono::steady_clock::now();
  try {
    FieldSpec fs = FieldSpec::parse(c.field);
    FieldCtx<Rat> FQ;
    FieldCtx<Fp> FP{fs.rational ? 2u : fs.p};

    if (*constants) {
      QuiverWithMult Q = quiver_from_json(read_json_file(quiver_path));
      DerivedConstants d = derived_constants(Q);
      Json pairs = Json::object();
      for (const auto& [key, pc] : d.pairs) {
        pairs[key.first + "," + key.second] = {
            {"m_ij", pc.m_ij}, {"mu_ij", pc.mu_ij}, {"f_ij", pc.f_ij}, {"f_ji", pc.f_ji}};
      }
      emit(c,
           Json{{"schema", "qmult/constants/1"},
                {"pairs", pairs},
                {"delta", d.delta},
                {"M", d.big_m}},
           t0);
    } else if (*euler) {
      QuiverWithMult Q = quiver_from_json(read_json_file(quiver_path));
      IntVec r = intvec_from_json(parse_inline(r_text));
      IntVec s = intvec_from_json(parse_inline(s_text));
      emit(c,
           Json{{"schema", "qmult/euler/1"},
                {"value", euler_form(Q, r, s)},
                {"rep_space_dim", rep_space_dim(Q, r)}},
           t0);
    } else if (*trunc) {
      QuiverWithMult Q = quiver_from_json(read_json_file(quiver_path));
      Json pj = read_json_file(point_path);
      Json out;
      if (fs.rational)
        out = classical_to_json(truncate(Q, rep_from_json<Rat>(Q, pj, FQ)));
      else
        out = classical_to_json(truncate(Q, rep_from_json<Fp>(Q, pj, FP)));
      emit(c, Json{{"schema", "qmult/classical/1"}, {"classical", out}}, t0);
    } else if (*iota) {
      QuiverWithMult Q = quiver_from_json(read_json_file(quiver_path));
      Json pj = read_json_file(point_path);
      Json out;
      if (fs.rational)
        out = rep_to_json(section_iota(Q, classical_from_json<Rat>(Q, pj, FQ)));
      else
        out = rep_to_json(section_iota(Q, classical_from_json<Fp>(Q, pj, FP)));
      emit(c, Json{{"schema", "qmult/point/1"}, {"point", out}}, t0);
    } else if (*act_cmd) {
      QuiverWithMult Q = quiver_from_json(read_json_file(quiver_path));
      Json pj = read_json_file(point_path), gj = read_json_file(aux_path);
      Json out;
      if (fs.rational)
        out = rep_to_json(act(Q, group_from_json<Rat>(Q, gj, FQ), rep_from_json<Rat>(Q, pj, FQ)));
      else
        out = rep_to_json(act(Q, group_from_json<Fp>(Q, gj, FP), rep_from_json<Fp>(Q, pj, FP)));
      emit(c, Json{{"schema", "qmult/point/1"}, {"point", out}}, t0);
    } else if (*stab) {
      QuiverWithMult Q = quiver_from_json(read_json_file(quiver_path));
      Json pj = read_json_file(point_path);
      IntVec theta = vec_or(c.theta, Q, 0), rho = vec_or(c.rho, Q, 0);
      Json out;
      if (fs.rational)
        out = verdict_to_json(semistable_mult(Q, rep_from_json<Rat>(Q, pj, FQ), theta, rho));
      else
        out = verdict_to_json(
            semistable_mult(Q, rep_from_json<Fp>(Q, pj, FP), theta, rho, FP.p, c.guard));
      out["schema"] = "qmult/stability/1";
      emit(c, out, t0);
    } else if (*poly) {
      require(!fs.rational, Err::Unsupported, "polystability runs over a finite field");
      QuiverWithMult Q = quiver_from_json(read_json_file(quiver_path));
      RepPoint<Fp> x = rep_from_json<Fp>(Q, read_json_file(point_path), FP);
      IntVec theta = vec_or(c.theta, Q, 0), rho = vec_or(c.rho, Q, 0);
      auto rep = polystable(Q, x, theta, rho, FP.p, c.guard);
      emit(c,
           Json{{"schema", "qmult/polystable/1"},
                {"polystable", rep.polystable},
                {"naively_polystable", rep.naively_polystable},
                {"filtrations", rep.filtration_count}},
           t0);
    } else if (*framed) {
      QuiverWithMult Q = quiver_from_json(read_json_file(quiver_path));
      IntVec f = intvec_from_json(parse_inline(f_text));
      IntVec r = intvec_from_json(parse_inline(r_text));
      IntVec theta = vec_or(c.theta, Q, 0);
      FramedSetup setup = build_framed(Q, f, r, theta, m_infinity);
      Json out{{"schema", "qmult/framed/1"},
               {"quiver_hat", quiver_to_json(setup.quiver)},
               {"rank_hat", intvec_to_json(setup.rank_hat)},
               {"theta_hat", intvec_to_json(setup.theta_hat)},
               {"ell", setup.ell},
               {"infinity", setup.infinity}};
      if (!point_path.empty()) {
        Json pj = read_json_file(point_path);
        if (fs.rational)
          out["verdict"] =
              verdict_to_json(framed_semistable(setup, rep_from_json<Rat>(setup.quiver, pj, FQ)));
        else
          out["verdict"] = verdict_to_json(
              framed_semistable(setup, rep_from_json<Fp>(setup.quiver, pj, FP), FP.p, c.guard));
      }
      emit(c, out, t0);
    } else if (*stabz) {
      QuiverWithMult Q = quiver_from_json(read_json_file(quiver_path));
      Json pj = read_json_file(point_path);
      Json out{{"schema", "qmult/stabilizers/1"}};
      auto fill = [&](auto v) {
        out["end_dim"] = end_classical(Q, v).size();
        Json per_vertex = Json::object();
        for (const std::string& vert : Q.vertices)
          per_vertex[vert] = {{"end_dim", end_at_vertex(Q, v, vert)},
                              {"jointly_injective", jointly_injective(Q, v, vert)},
                              {"jointly_surjective", jointly_surjective(Q, v, vert)}};
        out["vertices"] = per_vertex;
        auto rep = unip_stab(Q, v);
        Json levels = Json::array();
        for (const auto& lvl : rep.per_level)
          levels.push_back(
              {{"s", std::to_string(lvl.level.num) + "/" + std::to_string(lvl.level.den)},
               {"support", lvl.level.support},
               {"dim", lvl.dim},
               {"delta_level", lvl.level.delta_level}});
        out["stab_u"] = {{"dim", rep.dim}, {"in_delta", rep.in_delta}, {"levels", levels}};
      };
      if (fs.rational)
        fill(classical_from_json<Rat>(Q, pj, FQ));
      else
        fill(classical_from_json<Fp>(Q, pj, FP));
      emit(c, out, t0);
    } else if (*assum) {
      require(!fs.rational, Err::Unsupported, "the assumption-U scan runs over a finite field");
      QuiverWithMult Q = quiver_from_json(read_json_file(quiver_path));
      IntVec r = intvec_from_json(parse_inline(r_text));
      IntVec theta = vec_or(c.theta, Q, 0);
      auto rep = check_assumption_U(Q, r, theta, FP.p, c.guard);
      auto cond = sufficient_conditions(Q, r, theta, FP.p, c.guard);
      Json out{{"schema", "qmult/assumption-u/1"},
               {"holds", rep.holds},
               {"semistable_scanned", rep.semistable_scanned},
               {"sufficient_conditions",
                {{"indivisible_and_generic", cond.indivisible_and_generic},
                 {"ss_equals_s", cond.ss_equals_s},
                 {"coprime_neighbours", cond.coprime_neighbours},
                 {"inj_or_surj_everywhere", cond.inj_or_surj_everywhere},
                 {"any", cond.any_condition}}}};
      if (rep.counterexample) out["counterexample"] = classical_to_json(*rep.counterexample);
      emit(c, out, t0);
    } else if (*moment) {
      QuiverWithMult Q = quiver_from_json(read_json_file(quiver_path));
      Json pj = read_json_file(point_path);
      Json mu = Json::object();
      auto fill = [&](auto p) {
        for (auto& [v, m] : moment_map(Q, p)) {
          Json coeffs = Json::array();
          for (const auto& cm : m.c) coeffs.push_back(mat_to_json(cm));
          mu[v] = std::move(coeffs);
        }
      };
      if (fs.rational)
        fill(cotangent_from_json<Rat>(Q, pj, FQ));
      else
        fill(cotangent_from_json<Fp>(Q, pj, FP));
      emit(c, Json{{"schema", "qmult/moment/1"}, {"mu", mu}}, t0);
    } else if (*fiber) {
      QuiverWithMult Q = quiver_from_json(read_json_file(quiver_path));
      Json pj = read_json_file(point_path);
      Json out{{"schema", "qmult/fiber/1"}};
      auto fill = [&](auto x, auto F) {
        auto gamma = gamma_from_json(Q, x.rank,
                                     c.gamma.empty() ? Json::object() : parse_inline(c.gamma), F);
        auto sol = moment_fiber_solve(Q, x, gamma);
        out["empty"] = sol.empty;
        if (!sol.empty) {
          out["dim"] = sol.dim;
          out["particular"] = cotangent_to_json(sol.particular);
        }
      };
      if (fs.rational)
        fill(rep_from_json<Rat>(Q, pj, FQ), FQ);
      else
        fill(rep_from_json<Fp>(Q, pj, FP), FP);
      emit(c, out, t0);
    } else if (*weights) {
      QuiverWithMult Q = quiver_from_json(read_json_file(quiver_path));
      GradingParams p = params_for(Q, c);
      long long C = revised_c(c.grading);
      Json out{{"schema", "qmult/grading-weights/1"}, {"alpha", intvec_to_json(p.alpha)}};
      if (C > 0) {
        DoubledBeta beta;
        for (const Arrow& a : Q.arrows) {
          beta.forward[a.id] = p.beta.at(a.id);
          beta.reverse[a.id] = p.alpha.at(a.from) + C;
        }
        auto w = equivariance_weights(Q, p.alpha, beta, C);
        Json wf = Json::object(), wr = Json::object(), bf = Json::object(), br = Json::object();
        for (const Arrow& a : Q.arrows) {
          wf[a.id] = w.w_fwd.at(a.id);
          wr[a.id + "*"] = w.w_rev.at(a.id);
          bf[a.id] = w.revised.forward.at(a.id);
          br[a.id + "*"] = w.revised.reverse.at(a.id);
        }
        out["moment_weights"] = {{"forward", wf}, {"reverse", wr}};
        out["beta"] = {{"forward", bf}, {"reverse", br}};
        QuiverWithMult dq = double_quiver(Q);
        Json table = Json::object();
        for (auto& [id, wt] : weight_table(dq, doubled_params(Q, p.alpha, w.revised)))
          table[id] = wt;
        out["weights"] = table;
      } else {
        Json table = Json::object();
        for (auto& [id, wt] : weight_table(Q, p)) table[id] = wt;
        out["weights"] = table;
        Json beta = Json::object();
        for (auto& [id, b] : p.beta) beta[id] = b;
        out["beta"] = beta;
      }
      emit(c, out, t0);
    } else if (*limit) {
      QuiverWithMult Q = quiver_from_json(read_json_file(quiver_path));
      Json pj = read_json_file(point_path);
      GradingParams p = params_for(Q, c);
      Json out;
      if (fs.rational)
        out = classical_to_json(limit_zero(Q, rep_from_json<Rat>(Q, pj, FQ), p));
      else
        out = classical_to_json(limit_zero(Q, rep_from_json<Fp>(Q, pj, FP), p));
      emit(c, Json{{"schema", "qmult/classical/1"}, {"classical", out}}, t0);
    } else if (*unfold_cmd) {
      QuiverWithMult Q = quiver_from_json(read_json_file(quiver_path));
      UnfoldedQuiver unf = unfolded_quiver(Q);
      Json corr = Json::array();
      for (const UnfoldedArrow& ua : unf.correspondence)
        corr.push_back({{"base", ua.base}, {"n", ua.n}, {"from", ua.from}, {"to", ua.to}});
      Json out{{"schema", "qmult/unfold/1"},
               {"quiver", quiver_to_json(unf.quiver)},
               {"correspondence", corr}};
      if (!point_path.empty()) {
        DerivedConstants d = derived_constants(Q);
        Json pj = read_json_file(point_path);
        if (fs.rational) {
          auto root = primitive_root(d.big_m, FQ);
          out["point"] = rep_to_json(unfold_embed(Q, unf, rep_from_json<Rat>(Q, pj, FQ), root));
        } else {
          auto root = primitive_root(d.big_m, FP);
          out["point"] = rep_to_json(unfold_embed(Q, unf, rep_from_json<Fp>(Q, pj, FP), root));
        }
      }
      emit(c, out, t0);
    } else if (*census) {
      QuiverWithMult Q = quiver_from_json(read_json_file(quiver_path));
      IntVec r = intvec_from_json(parse_inline(r_text));
      IntVec theta = vec_or(c.theta, Q, 0), rho = vec_or(c.rho, Q, 0);
      std::vector<std::uint32_t> qs = parse_q_list(c.q_list, fs);
      Json reports = Json::array();
      for (std::uint32_t q : qs) {
        FieldCtx<Fp> F{q};
        CountReport rep;
        if (mode_text == "ordinary") {
          unsigned long long cursor = 0, carried = 0;
          if (!resume_path.empty()) {
            Json prev = read_json_file(resume_path);
            const Json& pr = prev.at("reports").at(0);
            require(pr.at("q").get<std::uint32_t>() == q, Err::InvalidParams,
                    "resume report is for a different q");
            cursor = pr.at("cursor").get<unsigned long long>();
            carried = pr.at("semistable").get<unsigned long long>();
          }
          rep = count_semistable(Q, r, theta, rho, q, c.guard, c.workers, cursor, carried);
        } else if (mode_text == "pi") {
          rep = count_semistable_pi(Q, r, theta, rho, q, c.guard, c.workers);
        } else if (mode_text == "nakajima") {
          auto gamma = gamma_from_json(Q, r,
                                       c.gamma.empty() ? Json::object() : parse_inline(c.gamma), F);
          rep = count_nakajima(Q, r, theta, rho, gamma, q, c.guard, c.workers);
        } else {
          fail(Err::InvalidParams, "mode must be ordinary, pi or nakajima");
        }
        reports.push_back(count_report_to_json(rep));
      }
      emit(c, Json{{"schema", "qmult/census/1"}, {"reports", reports}}, t0);
    } else if (*fit) {
      Json data = parse_inline(data_text);
      std::vector<std::pair<long long, long long>> points;
      for (const auto& row : data)
        points.push_back({row.at(0).get<long long>(), row.at(1).get<long long>()});
      auto result = poly_fit(points, degree_bound);
      Json out = polyfit_to_json(result);
      out["schema"] = "qmult/fit/1";
      emit(c, out, t0);
    }
    return 0;
  } catch (const DomainError& e) {
    Json err{{"error", {{"kind", err_name(e.code())}, {"message", e.what()}}}};
    std::cerr << err.dump(2) << "\n";
    return 2;
  } catch (const std::exception& e) {
    Json err{{"error", {{"kind", "io"}, {"message", e.what()}}}};
    std::cerr << err.dump(2) << "\n";
    return 1;
  }
}
