#pragma once

#include <array>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dirac/asymptotic.hpp"
#include "dirac/basis.hpp"
#include "dirac/counterexample.hpp"

namespace dirac {

// Reports keep field insertion order, so identical runs serialize to
// identical bytes.
using json = nlohmann::ordered_json;

// Complex numbers travel as [re, im]; a bare number is accepted on input.
json complex_to_json(cplx z);
cplx complex_from_json(const json& j, const std::string& what);

// {"c0": z, "c1": z, "modes": [{"k": int, "shift": z, "coeff": z}, ...]}
json trig_to_json(const TrigAffine& f);
TrigAffine trig_from_json(const json& j, const std::string& what);

// Potential descriptors:
//   {"kind": "builtin", "name": "zero"}
//   {"kind": "builtin", "name": "constant", "P": z, "Q": z}
//   {"kind": "builtin", "name": "endpoint-smooth", "p_pi"?, "q_pi"?, "q2"?}
//   {"kind": "builtin", "name": "theorem2", "eps"?, "w0"?, "K"?, "N"?, "C"?}
//   {"kind": "fourier", "P": [z...], "Q": [z...]}   (odd length, e^{2imx})
//   {"kind": "trig-modes", "P": trig, "Q": trig, "name"?, "smoothness"?}
//   {"kind": "samples", "x": [...], "P": [z...], "Q": [z...], "interp"?}
// "theorem2" runs the full corrected-potential pipeline on the stock source.
json potential_to_json(const Potential& V);
Potential potential_from_json(const json& j);

// Boundary descriptors: {"periodic_type_a": z}, {"matrix": [[z x4], [z x4]]},
// {"C": [[z,z],[z,z]], "D": ...}, or a bare two-row array.
json boundary_to_json(const Mat24& A);
Mat24 boundary_from_json(const json& j);

json classification_to_json(const BcClassification& c);

json spectrum_to_json(const SpectrumResult& r);
// n, j, re_lambda, im_lambda, abs_eps, multiplicity, abs_ddelta, abs_delta
std::string spectrum_to_csv(const SpectrumResult& r);

json verdict_to_json(const BasisVerdict& v);
// mode, n, value; one block per verdict under a shared header.
std::string ratios_to_csv(const std::vector<BasisVerdict>& vs);

json plan_to_json(const LacunaryPlan& p);
json build_to_json(const BuiltPotential& b);
json divergence_to_json(const DivergenceReport& r);
std::string verification_to_csv(const DivergenceReport& r);

json orderfit_to_json(const OrderFit& f);
// abs_lambda then absolute and relative deviation per entry.
std::string error_table_to_csv(const std::vector<std::array<double, 9>>& rows);

// x, then Re/Im of the four entries of E(x).
std::string fundamental_to_csv(const FundamentalMatrix& F);
// t, x, then Re/Im of the four entries of G(t, x) on the kernel grid.
std::string kernel_to_csv(const GreenKernel& K);

// Parse failures carry the library's position diagnostics as ParseError.
json parse_json(const std::string& text);
json load_json_file(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace dirac
