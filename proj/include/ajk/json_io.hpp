#pragma once

#include <string>

#include "json.hpp"

#include "ajk/admissibility.hpp"
#include "ajk/driver_measure.hpp"
#include "ajk/parameter_set.hpp"
#include "ajk/riccati.hpp"
#include "ajk/simulate.hpp"
#include "ajk/termstructure.hpp"

namespace ajk {

using json = nlohmann::json;

// {"segments":[{"t0":..,"t1":..,"density":{"kind":"const"|"poly","coeffs":[..]}}],
//  "atoms":[{"t":..,"dA":..}]}
json driver_to_json(const DriverMeasure& A);
DriverMeasure driver_from_json(const json& j);

// Model file: {"shape":{"m":..,"n":..},"driver":<driver>,"beta":[..],"alpha":[..],
// "mu":[..],"gamma":[{"t":..,"kind":"enhanced"|"table","data":..}]}. Scalars may be
// numbers or piecewise polynomials {"pieces":[{"t0","t1","coeffs"}]}; "table"
// transforms reference registered names.
AffineParameterSet params_from_json(const json& j);

json complex_to_json(const cplx& z);
cplx complex_from_json(const json& j);

// CLI format "a+bi" (also plain "a" and "bi").
cplx parse_complex(const std::string& s);

json admissibility_to_json(const AdmissibilityReport& rep);
json conservativeness_to_json(const ConservativenessReport& rep);
json jump_log_to_json(const RiccatiSolution& sol);
json charfn_comparison_to_json(const CharFnComparison& rep);
json drift_report_to_json(const DriftConditionReport& rep);
json bond_martingale_to_json(const BondMartingaleReport& rep);

// Solution table CSV: t, re_phi, im_phi, re_psi_1, im_psi_1, ...
void solution_to_csv(const RiccatiSolution& sol, std::ostream& os);

}  // namespace ajk
