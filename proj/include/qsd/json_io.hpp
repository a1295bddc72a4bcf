#pragma once

#include <json.hpp>

#include "qsd/certify.hpp"
#include "qsd/solver.hpp"

namespace qsd {

// Matrix wire format:
//   {"rows": R, "cols": C, "data": [[re, im], ...]}   (row major)
nlohmann::json matrix_to_json(const CMat& m);
CMat matrix_from_json(const nlohmann::json& j);

// {"d1": , "d2": , "separable": bool, "states": [{"prior": , "rho": matrix}]}
nlohmann::json ensemble_to_json(const StateEnsemble& e);
StateEnsemble ensemble_from_json(const nlohmann::json& j);

// {"d1": , "d2": , "elements": [matrix, ...]}
nlohmann::json povm_to_json(const Povm& m);
Povm povm_from_json(const nlohmann::json& j);

// {"problem": "pg"|"qg"|"ppt", "value": , "certified_gap": , "povm": povm,
//  "dual_K": matrix}
struct ResultData {
    ProblemKind problem = ProblemKind::PG;
    double value = 0.0;
    double certified_gap = 0.0;
    Povm povm;
    HermitianOperator dual_K;
};

nlohmann::json result_to_json(const SolveResult& r);
nlohmann::json result_to_json(const ResultData& r);
ResultData result_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const CertificateReport& r);
nlohmann::json report_to_json(const PptPovmReport& r);
nlohmann::json report_to_json(const LocalRealizationReport& r);
nlohmann::json bounds_to_json(const BoundsReport& r);
nlohmann::json closed_forms_to_json(int d, double lambda, const ClosedForms& f);

}  // namespace qsd
