#include "qsd/json_io.hpp"

#include <string>
#include <utility>
#include <vector>

namespace qsd {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) {
    throw ValidationError(ValidationKind::BadArgument, msg);
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) bad(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

int int_field(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number_integer()) bad(std::string("field \"") + key + "\" must be an integer");
    return v.get<int>();
}

double number_field(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number()) bad(std::string("field \"") + key + "\" must be a number");
    return v.get<double>();
}

}  // namespace

json matrix_to_json(const CMat& m) {
    json data = json::array();
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c)
            data.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

CMat matrix_from_json(const json& j) {
    const int rows = int_field(j, "rows");
    const int cols = int_field(j, "cols");
    if (rows < 0 || cols < 0) bad("matrix dimensions must be nonnegative");
    const json& data = field(j, "data");
    if (!data.is_array() || data.size() != static_cast<size_t>(rows) * cols)
        bad("matrix data length does not match rows*cols");
    CMat m(rows, cols);
    size_t idx = 0;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c, ++idx) {
            const json& entry = data[idx];
            if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
                !entry[1].is_number())
                bad("matrix entries must be [re, im] number pairs");
            m(r, c) = Complex(entry[0].get<double>(), entry[1].get<double>());
        }
    return m;
}

json ensemble_to_json(const StateEnsemble& e) {
    json states = json::array();
    for (int i = 0; i < e.size(); ++i)
        states.push_back(json{{"prior", e.prior(i)}, {"rho", matrix_to_json(e.state(i).mat())}});
    return json{{"d1", e.d1()},
                {"d2", e.d2()},
                {"separable", e.separable_asserted()},
                {"states", std::move(states)}};
}

StateEnsemble ensemble_from_json(const json& j) {
    const int d1 = int_field(j, "d1");
    const int d2 = int_field(j, "d2");
    bool separable = false;
    if (j.contains("separable")) {
        if (!j.at("separable").is_boolean()) bad("field \"separable\" must be a boolean");
        separable = j.at("separable").get<bool>();
    }
    const json& states = field(j, "states");
    if (!states.is_array() || states.empty()) bad("\"states\" must be a nonempty array");
    std::vector<std::pair<double, CMat>> items;
    items.reserve(states.size());
    for (const json& s : states)
        items.emplace_back(number_field(s, "prior"), matrix_from_json(field(s, "rho")));
    return StateEnsemble::create(d1, d2, std::move(items), separable);
}

json povm_to_json(const Povm& m) {
    json elems = json::array();
    for (int i = 0; i < m.size(); ++i) elems.push_back(matrix_to_json(m.element(i).mat()));
    return json{{"d1", m.d1()}, {"d2", m.d2()}, {"elements", std::move(elems)}};
}

Povm povm_from_json(const json& j) {
    const int d1 = int_field(j, "d1");
    const int d2 = int_field(j, "d2");
    const json& elems = field(j, "elements");
    if (!elems.is_array() || elems.empty()) bad("\"elements\" must be a nonempty array");
    std::vector<CMat> mats;
    mats.reserve(elems.size());
    for (const json& e : elems) mats.push_back(matrix_from_json(e));
    return Povm::create(d1, d2, std::move(mats));
}

namespace {

json result_body(ProblemKind kind, double value, double gap, const Povm& povm, const CMat& k) {
    return json{{"problem", to_string(kind)},
                {"value", value},
                {"certified_gap", gap},
                {"povm", povm_to_json(povm)},
                {"dual_K", matrix_to_json(k)}};
}

}  // namespace

json result_to_json(const SolveResult& r) {
    return result_body(r.problem_kind, r.value, r.certified_gap, r.povm, r.dual_K.mat());
}

json result_to_json(const ResultData& r) {
    return result_body(r.problem, r.value, r.certified_gap, r.povm, r.dual_K.mat());
}

ResultData result_from_json(const json& j) {
    ResultData r;
    const json& problem = field(j, "problem");
    if (!problem.is_string()) bad("field \"problem\" must be a string");
    const std::string name = problem.get<std::string>();
    if (name == "pg")
        r.problem = ProblemKind::PG;
    else if (name == "qg")
        r.problem = ProblemKind::QG;
    else if (name == "ppt")
        r.problem = ProblemKind::PPT;
    else
        bad("unknown problem \"" + name + "\"");
    r.value = number_field(j, "value");
    r.certified_gap = number_field(j, "certified_gap");
    r.povm = povm_from_json(field(j, "povm"));
    r.dual_K = HermitianOperator::create(r.povm.d1(), r.povm.d2(),
                                         matrix_from_json(field(j, "dual_K")), 1e-8);
    return r;
}

json report_to_json(const CertificateReport& r) {
    json slack = json::array();
    for (const PairResidual& s : r.slackness_residuals)
        slack.push_back(json{{"i", s.i}, {"j", s.j}, {"value", s.value}});
    return json{{"kind", to_string(r.kind)},
                {"tolerance", r.tolerance},
                {"passed", r.passed},
                {"lagrangian_residuals", r.lagrangian_residuals},
                {"slackness_residuals", std::move(slack)},
                {"hermiticity_residual", r.hermiticity_residual}};
}

json report_to_json(const PptPovmReport& r) {
    return json{{"kind", "ppt_povm"},
                {"tolerance", r.tolerance},
                {"all_ppt", r.all_ppt},
                {"pt_min_eigenvalues", r.pt_min_eigenvalues}};
}

json report_to_json(const LocalRealizationReport& r) {
    return json{{"kind", "local_realization"},
                {"tolerance", r.tolerance},
                {"is_product_projective", r.is_product_projective},
                {"product_defects", r.product_defects},
                {"qg_report", report_to_json(r.qg_report)},
                {"achieved_value", r.achieved_value},
                {"pl_established", r.pl_established}};
}

json bounds_to_json(const BoundsReport& r) {
    return json{{"p_G", r.p_g},
                {"q_G", r.q_g},
                {"p_PPT", r.p_ppt},
                {"ordering_ok", r.ordering_ok},
                {"nlwe_flag", r.nlwe_flag}};
}

json closed_forms_to_json(int d, double lambda, const ClosedForms& f) {
    return json{{"d", d}, {"lambda", lambda}, {"p_G", f.p_g}, {"q_G", f.q_g}, {"gap", f.gap}};
}

}  // namespace qsd
