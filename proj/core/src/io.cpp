#include "dirac/io.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace dirac {

namespace {

std::string num(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

const json& need(const json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key))
    throw ParseError(what + ": missing field \"" + key + "\"");
  return j.at(key);
}

double number_from_json(const json& j, const std::string& what) {
  if (!j.is_number()) throw ParseError(what + ": expected a number");
  return j.get<double>();
}

long long integer_from_json(const json& j, const std::string& what) {
  if (!j.is_number_integer()) throw ParseError(what + ": expected an integer");
  return j.get<long long>();
}

std::vector<cplx> complex_vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + ": expected an array");
  std::vector<cplx> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(complex_from_json(j[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

json complex_array_to_json(const std::vector<cplx>& v) {
  json a = json::array();
  for (cplx z : v) a.push_back(complex_to_json(z));
  return a;
}

const char* mode_name(BasisMode m) {
  switch (m) {
    case BasisMode::theorem1: return "asymptotic-multiplicity";
    case BasisMode::lemma1: return "coefficient-ratio";
    case BasisMode::lemma2: return "entry-ratio";
  }
  return "?";
}

const char* smoothness_name(Smoothness s) {
  switch (s) {
    case Smoothness::smooth: return "smooth";
    case Smoothness::c1: return "c1";
    case Smoothness::c0: return "c0";
  }
  return "?";
}

Smoothness smoothness_from_json(const json& j) {
  const std::string s = j.get<std::string>();
  if (s == "smooth") return Smoothness::smooth;
  if (s == "c1") return Smoothness::c1;
  if (s == "c0") return Smoothness::c0;
  throw ParseError("smoothness: expected smooth, c1, or c0");
}

void append_entry_csv(std::string& out, const Mat2& E) {
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      out += ", " + num(E(r, c).real());
      out += ", " + num(E(r, c).imag());
    }
  out += "\n";
}

Mat2 mat2_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2)
    throw ParseError(what + ": expected two rows");
  Mat2 M;
  for (int r = 0; r < 2; ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.size() != 2)
      throw ParseError(what + ": expected rows of two entries");
    for (int c = 0; c < 2; ++c)
      M(r, c) = complex_from_json(row[c], what + " entry");
  }
  return M;
}

}  // namespace

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return cplx(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return cplx(j[0].get<double>(), j[1].get<double>());
  throw ParseError(what + ": expected [re, im] or a number");
}

json trig_to_json(const TrigAffine& f) {
  json j;
  j["c0"] = complex_to_json(f.c0);
  j["c1"] = complex_to_json(f.c1);
  json modes = json::array();
  for (const auto& m : f.modes) {
    json jm;
    jm["k"] = m.k;
    jm["shift"] = complex_to_json(m.shift);
    jm["coeff"] = complex_to_json(m.coeff);
    modes.push_back(std::move(jm));
  }
  j["modes"] = std::move(modes);
  return j;
}

TrigAffine trig_from_json(const json& j, const std::string& what) {
  if (!j.is_object()) throw ParseError(what + ": expected an object");
  TrigAffine f;
  if (j.contains("c0")) f.c0 = complex_from_json(j.at("c0"), what + ".c0");
  if (j.contains("c1")) f.c1 = complex_from_json(j.at("c1"), what + ".c1");
  if (j.contains("modes")) {
    const json& jm = j.at("modes");
    if (!jm.is_array()) throw ParseError(what + ".modes: expected an array");
    for (const auto& m : jm) {
      TrigMode mode;
      mode.k = integer_from_json(need(m, "k", what + ".modes"), what + ".modes.k");
      if (m.contains("shift"))
        mode.shift = complex_from_json(m.at("shift"), what + ".modes.shift");
      mode.coeff = complex_from_json(need(m, "coeff", what + ".modes"),
                                     what + ".modes.coeff");
      f.modes.push_back(mode);
    }
  }
  return f;
}

json potential_to_json(const Potential& V) {
  json j;
  if (V.kind == Potential::Kind::samples) {
    j["kind"] = "samples";
    j["x"] = V.Ps.x;
    std::vector<cplx> p(V.Ps.v.begin(), V.Ps.v.end());
    std::vector<cplx> q(V.Qs.v.begin(), V.Qs.v.end());
    j["P"] = complex_array_to_json(p);
    j["Q"] = complex_array_to_json(q);
    j["interp"] = (V.Ps.interp == SampledFunction::Interp::cubic) ? "cubic"
                                                                  : "linear";
    return j;
  }
  if (V.is_zero()) {
    j["kind"] = "builtin";
    j["name"] = "zero";
    return j;
  }
  if (V.name == "constant" && V.P.modes.empty() && V.Q.modes.empty() &&
      V.P.c1 == 0.0 && V.Q.c1 == 0.0) {
    j["kind"] = "builtin";
    j["name"] = "constant";
    j["P"] = complex_to_json(V.P.c0);
    j["Q"] = complex_to_json(V.Q.c0);
    return j;
  }
  j["kind"] = "trig-modes";
  j["name"] = V.name;
  j["smoothness"] = smoothness_name(V.smoothness);
  j["P"] = trig_to_json(V.P);
  j["Q"] = trig_to_json(V.Q);
  return j;
}

Potential potential_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("potential: expected an object");
  const std::string kind =
      need(j, "kind", "potential").get<std::string>();
  if (kind == "builtin") {
    const std::string name = need(j, "name", "potential").get<std::string>();
    if (name == "zero") return zero_potential();
    if (name == "constant")
      return constant_potential(
          complex_from_json(need(j, "P", "potential"), "potential.P"),
          complex_from_json(need(j, "Q", "potential"), "potential.Q"));
    if (name == "endpoint-smooth") {
      double p_pi = 0.6, q_pi = 0.45, q2 = 0.3;
      if (j.contains("p_pi")) p_pi = number_from_json(j.at("p_pi"), "p_pi");
      if (j.contains("q_pi")) q_pi = number_from_json(j.at("q_pi"), "q_pi");
      if (j.contains("q2")) q2 = number_from_json(j.at("q2"), "q2");
      return endpoint_smooth_potential(p_pi, q_pi, q2);
    }
    if (name == "theorem2") {
      double eps = 0.5;
      cplx w0(1.0, 0.0);
      long long N = 4;
      int K = 4;
      std::optional<long long> C;
      if (j.contains("eps")) eps = number_from_json(j.at("eps"), "eps");
      if (j.contains("w0")) w0 = complex_from_json(j.at("w0"), "w0");
      if (j.contains("N")) N = integer_from_json(j.at("N"), "N");
      if (j.contains("K")) K = int(integer_from_json(j.at("K"), "K"));
      if (j.contains("C")) C = integer_from_json(j.at("C"), "C");
      auto src = shape_source(stock_source, eps);
      auto tr = fourier_truncate(src, eps);
      auto plan = lacunary_plan(N, eps, w0, K, C);
      return build_p_tilde(tr, plan).V();
    }
    throw ParseError("potential: unknown builtin \"" + name + "\"");
  }
  if (kind == "fourier")
    return fourier_potential(
        complex_vector(need(j, "P", "potential"), "potential.P"),
        complex_vector(need(j, "Q", "potential"), "potential.Q"));
  if (kind == "trig-modes") {
    Potential V;
    V.kind = Potential::Kind::trig;
    V.P = trig_from_json(need(j, "P", "potential"), "potential.P");
    V.Q = trig_from_json(need(j, "Q", "potential"), "potential.Q");
    V.name = j.contains("name") ? j.at("name").get<std::string>() : "trig";
    if (j.contains("smoothness"))
      V.smoothness = smoothness_from_json(j.at("smoothness"));
    return V;
  }
  if (kind == "samples") {
    const json& jx = need(j, "x", "potential");
    if (!jx.is_array()) throw ParseError("potential.x: expected an array");
    SampledFunction P, Q;
    P.x = jx.get<std::vector<double>>();
    Q.x = P.x;
    P.v = complex_vector(need(j, "P", "potential"), "potential.P");
    Q.v = complex_vector(need(j, "Q", "potential"), "potential.Q");
    if (P.v.size() != P.x.size() || Q.v.size() != Q.x.size())
      throw ParseError("potential: x, P, Q must have equal lengths");
    if (j.contains("interp")) {
      const std::string s = j.at("interp").get<std::string>();
      if (s == "cubic")
        P.interp = Q.interp = SampledFunction::Interp::cubic;
      else if (s == "linear")
        P.interp = Q.interp = SampledFunction::Interp::linear;
      else
        throw ParseError("potential.interp: expected cubic or linear");
    }
    return sampled_potential(std::move(P), std::move(Q));
  }
  throw ParseError("potential: unknown kind \"" + kind + "\"");
}

json boundary_to_json(const Mat24& A) {
  json rows = json::array();
  for (int r = 0; r < 2; ++r) {
    json row = json::array();
    for (int c = 0; c < 4; ++c) row.push_back(complex_to_json(A(r, c)));
    rows.push_back(std::move(row));
  }
  json j;
  j["matrix"] = std::move(rows);
  return j;
}

Mat24 boundary_from_json(const json& j) {
  if (j.is_object() && j.contains("periodic_type_a"))
    return periodic_type_matrix(
        complex_from_json(j.at("periodic_type_a"), "periodic_type_a"));
  if (j.is_object() && j.contains("C") && j.contains("D"))
    return from_endpoint_matrices(mat2_from_json(j.at("C"), "boundary.C"),
                                  mat2_from_json(j.at("D"), "boundary.D"));
  const json* rows = nullptr;
  if (j.is_object() && j.contains("matrix"))
    rows = &j.at("matrix");
  else if (j.is_array())
    rows = &j;
  if (!rows || !rows->is_array() || rows->size() != 2)
    throw ParseError("boundary: expected periodic_type_a, C/D blocks, or a "
                     "two-row matrix");
  Mat24 A;
  for (int r = 0; r < 2; ++r) {
    const json& row = (*rows)[r];
    if (!row.is_array() || row.size() != 4)
      throw ParseError("boundary: each matrix row needs four entries");
    for (int c = 0; c < 4; ++c)
      A(r, c) = complex_from_json(row[c], "boundary entry");
  }
  return A;
}

json classification_to_json(const BcClassification& c) {
  json j;
  j["regular"] = c.regular;
  j["strongly_regular"] = c.strongly_regular;
  j["periodic_type"] = c.periodic_type;
  switch (c.subtype) {
    case PeriodicSubtype::none: j["subtype"] = "none"; break;
    case PeriodicSubtype::generic: j["subtype"] = "generic"; break;
    case PeriodicSubtype::periodic: j["subtype"] = "periodic"; break;
    case PeriodicSubtype::antiperiodic: j["subtype"] = "antiperiodic"; break;
  }
  j["coincident_roots"] = c.coincident_roots;
  if (c.periodic_type) j["periodic_a"] = complex_to_json(c.periodic_a);
  if (c.coincident_roots) j["center0"] = complex_to_json(c.center0);
  if (c.strongly_regular)
    j["note"] =
        "strongly regular conditions already give an unconditional basis; "
        "the band and escape diagnostics target coincident-root families";
  return j;
}

json spectrum_to_json(const SpectrumResult& r) {
  json j;
  j["center0"] = complex_to_json(r.center0);
  j["complete"] = r.complete;
  j["n0"] = r.n0;
  json entries = json::array();
  for (const auto& e : r.entries) {
    json je;
    je["n"] = e.n;
    je["j"] = e.j;
    je["multiplicity"] = e.multiplicity;
    je["lambda"] = complex_to_json(e.lambda);
    je["eps"] = complex_to_json(e.eps);
    je["abs_eps"] = std::abs(e.eps);
    je["ddelta"] = complex_to_json(e.ddelta);
    je["abs_delta"] = e.abs_delta;
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  json disks = json::array();
  for (const auto& d : r.disks) {
    json jd;
    jd["n"] = d.n;
    jd["radius"] = d.radius;
    jd["winding"] = d.winding;
    jd["contour_points"] = d.contour_points;
    jd["retries"] = d.retries;
    jd["ok"] = d.ok;
    if (!d.note.empty()) jd["note"] = d.note;
    disks.push_back(std::move(jd));
  }
  j["disks"] = std::move(disks);
  return j;
}

std::string spectrum_to_csv(const SpectrumResult& r) {
  std::string out =
      "n, j, re_lambda, im_lambda, abs_eps, multiplicity, abs_ddelta, "
      "abs_delta\n";
  char head[64];
  for (const auto& e : r.entries) {
    std::snprintf(head, sizeof head, "%lld, %d, ", e.n, e.j);
    out += head;
    out += num(e.lambda.real()) + ", " + num(e.lambda.imag()) + ", " +
           num(std::abs(e.eps)) + ", ";
    std::snprintf(head, sizeof head, "%d, ", e.multiplicity);
    out += head;
    out += num(std::abs(e.ddelta)) + ", " + num(e.abs_delta) + "\n";
  }
  return out;
}

json verdict_to_json(const BasisVerdict& v) {
  json j;
  j["mode"] = mode_name(v.mode);
  j["is_riesz"] = v.is_riesz;
  j["conclusive"] = v.conclusive;
  j["band_lo"] = v.band_lo;
  j["band_hi"] = v.band_hi;
  j["witness"] = v.witness;
  j["note"] = v.note;
  json ratios = json::array();
  for (const auto& p : v.ratios) {
    json jp;
    jp["n"] = p.n;
    if (std::isfinite(p.value))
      jp["value"] = p.value;
    else
      jp["value"] = "inf";
    ratios.push_back(std::move(jp));
  }
  j["ratios"] = std::move(ratios);
  return j;
}

std::string ratios_to_csv(const std::vector<BasisVerdict>& vs) {
  std::string out = "mode, n, value\n";
  char head[96];
  for (const auto& v : vs)
    for (const auto& p : v.ratios) {
      std::snprintf(head, sizeof head, "%s, %lld, ", mode_name(v.mode), p.n);
      out += head;
      out += num(p.value) + "\n";
    }
  return out;
}

json plan_to_json(const LacunaryPlan& p) {
  json j;
  j["N"] = p.N;
  j["epsilon"] = p.epsilon;
  j["w0"] = complex_to_json(p.w0);
  j["C"] = p.C;
  j["desk_scale"] = p.desk_scale;
  j["a_seq"] = p.a_seq;
  j["alpha"] = complex_array_to_json(p.alpha);
  j["beta"] = complex_array_to_json(p.beta);
  json cert;
  cert["recip_sqrt_sum"] = p.cert.recip_sqrt_sum;
  cert["recip_sqrt_bound"] = p.cert.recip_sqrt_bound;
  cert["recip_ok"] = p.cert.recip_ok;
  cert["gap_scaled"] = p.cert.gap_scaled;
  cert["gap_ok"] = p.cert.gap_ok;
  cert["theta_sup"] = p.cert.theta_sup;
  cert["theta_ok"] = p.cert.theta_ok;
  j["cert"] = std::move(cert);
  return j;
}

json build_to_json(const BuiltPotential& b) {
  json j;
  j["plan"] = plan_to_json(b.plan);
  j["P_corrected"] = trig_to_json(b.P_tilde);
  j["Q_companion"] = trig_to_json(b.Q_hat);
  j["S_N"] = trig_to_json(b.S_N);
  j["Theta"] = trig_to_json(b.Theta);
  j["F_at_0"] = complex_to_json(b.F_at_0);
  j["F_at_pi"] = complex_to_json(b.F_at_pi);
  j["F0_slope"] = complex_to_json(b.F0_slope);
  j["closeness"] = b.closeness;
  j["closeness_S"] = b.closeness_S;
  j["end0_abs"] = b.end0_abs;
  j["endpi_abs"] = b.endpi_abs;
  return j;
}

json divergence_to_json(const DivergenceReport& r) {
  json j;
  json points = json::array();
  for (const auto& p : r.points) {
    json jp;
    jp["k"] = p.k;
    jp["a"] = p.a;
    jp["n"] = p.lambda1.n;
    jp["frac"] = complex_to_json(p.lambda1.frac);
    jp["lambda"] = complex_to_json(p.lambda1.value());
    jp["from_ode"] = p.from_ode;
    jp["entry_corrected"] = p.entry_corrected;
    jp["entry_companion"] = p.entry_companion;
    jp["corrected_scaled"] = p.corrected_scaled;
    jp["ratio"] = p.ratio;
    jp["i1_scaled"] = p.i1_scaled;
    jp["i2_scaled"] = p.i2_scaled;
    jp["sn_scaled"] = p.sn_scaled;
    jp["f0_scaled"] = p.f0_scaled;
    points.push_back(std::move(jp));
  }
  j["points"] = std::move(points);
  j["slope_corrected"] = r.slope_corrected;
  j["slope_ratio"] = r.slope_ratio;
  j["c7"] = r.c7;
  j["f0_ok"] = r.f0_ok;
  j["conclusive"] = r.conclusive;
  j["verdict"] = verdict_to_json(r.verdict);
  return j;
}

std::string verification_to_csv(const DivergenceReport& r) {
  std::string out =
      "k, a_k, |I1|·√a_k, |I2|·a_k^{2/3}, "
      "|e₂₁|·a_k^{3/2}, ratio\n";
  char head[64];
  for (const auto& p : r.points) {
    std::snprintf(head, sizeof head, "%zu, %lld, ", p.k, p.a);
    out += head;
    out += num(p.i1_scaled) + ", " + num(p.i2_scaled) + ", " +
           num(p.corrected_scaled) + ", " + num(p.ratio) + "\n";
  }
  return out;
}

json orderfit_to_json(const OrderFit& f) {
  json j;
  j["lambdas"] = complex_array_to_json(f.lambdas);
  j["errors"] = f.errors;
  j["fitted_order"] = f.fitted_order;
  return j;
}

std::string error_table_to_csv(const std::vector<std::array<double, 9>>& rows) {
  std::string out =
      "abs_lambda, abs_e11, rel_e11, abs_e12, rel_e12, abs_e21, rel_e21, "
      "abs_e22, rel_e22\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ", ";
      out += num(row[i]);
    }
    out += "\n";
  }
  return out;
}

std::string fundamental_to_csv(const FundamentalMatrix& F) {
  std::string out =
      "x, re_e11, im_e11, re_e12, im_e12, re_e21, im_e21, re_e22, im_e22\n";
  for (std::size_t i = 0; i < F.x.size(); ++i) {
    out += num(F.x[i]);
    append_entry_csv(out, F.E[i]);
  }
  return out;
}

std::string kernel_to_csv(const GreenKernel& K) {
  std::string out =
      "t, x, re_g11, im_g11, re_g12, im_g12, re_g21, im_g21, re_g22, "
      "im_g22\n";
  const auto& xs = K.grid();
  for (std::size_t it = 0; it < xs.size(); ++it)
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
      out += num(xs[it]) + ", " + num(xs[ix]);
      append_entry_csv(out, K.G(it, ix));
    }
  return out;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
}

json load_json_file(const std::string& path) {
  return parse_json(read_text_file(path));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write file: " + path);
  out << content;
  if (!out.good()) throw PreconditionError("write failed: " + path);
}

}  // namespace dirac
