#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "qsd/json_io.hpp"

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw qsd::ValidationError(qsd::ValidationKind::BadArgument, "cannot open " + path);
    return json::parse(in);
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw qsd::Error("cannot write " + out_path);
    out << j.dump(2) << "\n";
}

struct SolveOpts {
    std::string problem;
    std::string in_path;
    std::string out_path;
    double tol = 1e-8;
};

int cmd_solve(const SolveOpts& o) {
    const qsd::StateEnsemble e = qsd::ensemble_from_json(load_json(o.in_path));
    qsd::SolverConfig cfg;
    cfg.target_gap = o.tol;
    qsd::SolveResult r;
    if (o.problem == "pg")
        r = qsd::solve_pg(e, cfg);
    else if (o.problem == "qg")
        r = qsd::solve_qg(e, cfg);
    else
        r = qsd::solve_ppt(e, cfg);
    emit(qsd::result_to_json(r), o.out_path);
    std::cerr << o.problem << " value " << r.value << " certified gap " << r.certified_gap
              << " after " << r.iterations << " Newton steps\n";
    return 0;
}

struct CertifyOpts {
    std::string kind;
    std::string ensemble_path;
    std::string povm_path;
    double tol = qsd::kDefaultCertTol;
};

int cmd_certify(const CertifyOpts& o) {
    const qsd::Povm m = qsd::povm_from_json(load_json(o.povm_path));
    if (o.kind == "ppt") {
        const qsd::PptPovmReport rep = qsd::check_povm_ppt(m, o.tol);
        std::cout << qsd::report_to_json(rep).dump(2) << "\n";
        return rep.all_ppt ? 0 : 1;
    }
    if (o.ensemble_path.empty())
        throw qsd::ValidationError(qsd::ValidationKind::BadArgument,
                                   "--ensemble is required for kind " + o.kind);
    const qsd::StateEnsemble e = qsd::ensemble_from_json(load_json(o.ensemble_path));
    if (o.kind == "global") {
        const qsd::CertificateReport rep = qsd::check_global_optimality(e, m, o.tol);
        std::cout << qsd::report_to_json(rep).dump(2) << "\n";
        return rep.passed ? 0 : 1;
    }
    if (o.kind == "qg") {
        const qsd::CertificateReport rep = qsd::check_qg_optimality(e, m, o.tol);
        std::cout << qsd::report_to_json(rep).dump(2) << "\n";
        return rep.passed ? 0 : 1;
    }
    const qsd::LocalRealizationReport rep = qsd::check_local_realization(e, m, o.tol);
    std::cout << qsd::report_to_json(rep).dump(2) << "\n";
    return rep.pl_established ? 0 : 1;
}

struct ExampleOpts {
    int d = 2;
    double lambda = 1.0;
    std::string sigma = "mixed";
    std::string what = "ensemble";
    std::string out_path;
};

int cmd_example(const ExampleOpts& o) {
    if (o.what == "closed-forms") {
        emit(qsd::closed_forms_to_json(o.d, o.lambda, qsd::example_closed_forms(o.d, o.lambda)),
             o.out_path);
        return 0;
    }
    if (o.what == "global-povm") {
        emit(qsd::povm_to_json(qsd::example_global_povm(o.d)), o.out_path);
        return 0;
    }
    if (o.what == "local-povm") {
        emit(qsd::povm_to_json(qsd::example_local_povm(o.d)), o.out_path);
        return 0;
    }
    std::optional<qsd::CMat> sigma;
    if (o.sigma != "mixed") sigma = qsd::matrix_from_json(load_json(o.sigma));
    emit(qsd::ensemble_to_json(qsd::example_ensemble(o.d, o.lambda, sigma)), o.out_path);
    return 0;
}

struct BoundsOpts {
    std::string in_path;
    double tol = 1e-8;
};

int cmd_bounds(const BoundsOpts& o) {
    const qsd::StateEnsemble e = qsd::ensemble_from_json(load_json(o.in_path));
    qsd::SolverConfig cfg;
    cfg.target_gap = o.tol;
    const qsd::BoundsReport rep = qsd::bounds_report(e, cfg);
    std::cout << qsd::bounds_to_json(rep).dump(2) << "\n";
    return rep.ordering_ok ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal discrimination of bipartite quantum states"};
    app.require_subcommand(1);

    SolveOpts so;
    CLI::App* solve = app.add_subcommand("solve", "Solve pg, qg or ppt for an ensemble");
    solve->add_option("--problem", so.problem, "Problem kind")
        ->required()
        ->check(CLI::IsMember({"pg", "qg", "ppt"}));
    solve->add_option("--in", so.in_path, "Ensemble JSON file")->required();
    solve->add_option("--out", so.out_path, "Result JSON file (stdout when omitted)");
    solve->add_option("--tol", so.tol, "Certified duality gap target")
        ->check(CLI::PositiveNumber);

    CertifyOpts co;
    CLI::App* certify = app.add_subcommand("certify", "Check optimality certificates");
    certify->add_option("--kind", co.kind, "Certificate kind")
        ->required()
        ->check(CLI::IsMember({"global", "qg", "ppt", "local"}));
    certify->add_option("--ensemble", co.ensemble_path, "Ensemble JSON file");
    certify->add_option("--povm", co.povm_path, "POVM JSON file")->required();
    certify->add_option("--tol", co.tol, "Certification tolerance")->check(CLI::PositiveNumber);

    ExampleOpts eo;
    CLI::App* example = app.add_subcommand("example", "Generate the built-in ensemble family");
    example->add_option("--d", eo.d, "Local dimension")->required();
    example->add_option("--lambda", eo.lambda, "Mixing weight in (0, 1]");
    example->add_option("--sigma", eo.sigma, "\"mixed\" or path to a density matrix JSON");
    example->add_option("--emit", eo.what, "What to generate")
        ->check(CLI::IsMember({"ensemble", "global-povm", "local-povm", "closed-forms"}));
    example->add_option("--out", eo.out_path, "Output file (stdout when omitted)");

    BoundsOpts bo;
    CLI::App* bounds = app.add_subcommand("bounds", "Report p_G, q_G and p_PPT together");
    bounds->add_option("--in", bo.in_path, "Ensemble JSON file")->required();
    bounds->add_option("--tol", bo.tol, "Certified duality gap target")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (solve->parsed()) return cmd_solve(so);
        if (certify->parsed()) return cmd_certify(co);
        if (example->parsed()) return cmd_example(eo);
        return cmd_bounds(bo);
    } catch (const qsd::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const qsd::CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const qsd::SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
