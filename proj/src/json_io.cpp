#include "dioph/json_io.hpp"

#include <fstream>

#include "dioph/errors.hpp"

namespace dioph {

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    Json j;
    in >> j;
    return j;
}

BasisPtr basis_from_json(const Json& j) {
    std::vector<BasisConstant> cs;
    for (const auto& c : j.at("constants")) {
        BasisConstant bc;
        bc.name = c.at("name").get<std::string>();
        if (c.contains("builtin")) {
            std::string kind = c.at("builtin").get<std::string>();
            if (kind == "sqrt") {
                bc.kind = BasisConstant::Kind::Sqrt;
                bc.sqrt_arg = c.at("arg").get<unsigned long>();
            } else if (kind == "pi") {
                bc.kind = BasisConstant::Kind::Pi;
            } else if (kind == "e") {
                bc.kind = BasisConstant::Kind::E;
            } else {
                throw ParseError("unknown builtin constant kind: " + kind);
            }
        } else {
            bc.kind = BasisConstant::Kind::Decimal;
            bc.decimal = c.at("decimal").get<std::string>();
        }
        cs.push_back(std::move(bc));
    }
    return ConstantBasis::make(std::move(cs));
}

Json basis_to_json(const ConstantBasis& basis) {
    Json arr = Json::array();
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const BasisConstant& c = basis.constant(i);
        Json jc;
        jc["name"] = c.name;
        switch (c.kind) {
        case BasisConstant::Kind::Sqrt:
            jc["builtin"] = "sqrt";
            jc["arg"] = c.sqrt_arg;
            break;
        case BasisConstant::Kind::Pi:
            jc["builtin"] = "pi";
            break;
        case BasisConstant::Kind::E:
            jc["builtin"] = "e";
            break;
        case BasisConstant::Kind::Decimal:
            jc["decimal"] = c.decimal;
            break;
        }
        arr.push_back(std::move(jc));
    }
    return Json{{"constants", std::move(arr)}};
}

ExactScalar scalar_from_json(const Json& j, const BasisPtr& basis) {
    std::vector<Rational> coeffs;
    for (const auto& q : j.at("q")) coeffs.push_back(parse_rational(q.get<std::string>()));
    return ExactScalar(basis, std::move(coeffs));
}

Json scalar_to_json(const ExactScalar& x) {
    Json q = Json::array();
    for (const auto& c : x.coeffs()) q.push_back(format_rational(c));
    Json names = Json::array();
    names.push_back("1");
    for (std::size_t i = 0; i < x.basis()->size(); ++i)
        names.push_back(x.basis()->constant(i).name);
    return Json{{"q", std::move(q)}, {"basis", std::move(names)}};
}

LinearSystem system_from_json(const Json& j) {
    BasisPtr basis =
        j.contains("basis") ? basis_from_json(j.at("basis")) : ConstantBasis::empty();
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : j.at("rows")) {
        std::vector<std::string> r;
        for (const auto& entry : row) r.push_back(entry.get<std::string>());
        rows.push_back(std::move(r));
    }
    LinearSystem sys = LinearSystem::parse_rows(basis, rows);
    if (j.contains("m") && j.at("m").get<std::size_t>() != sys.m())
        throw ParseError("declared m does not match rows");
    if (j.contains("d") && j.at("d").get<std::size_t>() != sys.d())
        throw ParseError("declared d does not match rows");
    return sys;
}

Json system_to_json(const LinearSystem& sys) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < sys.m(); ++i) {
        Json row = Json::array();
        for (std::size_t jx = 0; jx < sys.d(); ++jx) row.push_back(sys.entry(i, jx).to_string());
        rows.push_back(std::move(row));
    }
    return Json{{"m", sys.m()},
                {"d", sys.d()},
                {"basis", basis_to_json(*sys.basis())},
                {"rows", std::move(rows)}};
}

WeightFunction weight_from_json(const Json& j) {
    std::size_t n = j.at("N").get<std::size_t>();
    std::vector<double> values = j.at("values").get<std::vector<double>>();
    if (values.size() != n) throw ParseError("weight values length does not match N");
    return WeightFunction::from_values(std::move(values));
}

Json weight_to_json(const WeightFunction& f) {
    return Json{{"N", f.n_max}, {"values", f.values}};
}

Json classification_to_json(const ClassificationReport& rep) {
    Json j;
    j["rank"] = rep.rank;
    j["rank_margin"] = rep.rank_margin;
    j["global_rank_margin"] = rep.global_rank_margin;
    j["dual_degeneracy_margin"] = rep.dual_degeneracy_margin;
    j["in_dual_degeneracy_variety"] = rep.in_dual_degeneracy_variety;
    j["rank_matrix"] = Json{{"columns", rep.rank_matrix.columns},
                            {"det", rep.rank_matrix.det},
                            {"inverse_norm", rep.rank_matrix.inverse_norm},
                            {"exhaustive", rep.rank_matrix.exhaustive}};
    j["rational_dimension"] = rep.rational.u;
    j["purely_irrational"] = rep.rational.purely_irrational();
    j["rational_complexity"] = format_rational(rep.rational.complexity);
    Json theta = Json::array();
    for (const auto& row : rep.rational.theta) {
        Json r = Json::array();
        for (const auto& v : row) r.push_back(format_rational(v));
        theta.push_back(std::move(r));
    }
    j["rational_map"] = std::move(theta);
    return j;
}

Json gowers_report_to_json(const GowersReport& rep) {
    const char* method = rep.method == GowersMethod::Fft
                             ? "fft"
                             : (rep.method == GowersMethod::Recursive ? "recursive" : "naive");
    return Json{{"degree", rep.degree},
                {"norm_value", rep.norm_value},
                {"numerator", rep.numerator},
                {"denominator", rep.denominator},
                {"method", method}};
}

Json count_result_to_json(const CountResult& res) {
    return Json{{"raw_sum", res.raw_sum},
                {"normalized", res.normalized},
                {"solutions_visited", res.solutions_visited},
                {"boundary_ambiguous", res.boundary_ambiguous},
                {"method", res.method}};
}

Json bundle_to_json(const ReductionBundle& bundle) {
    Json j;
    j["u"] = bundle.u;
    Json theta = Json::array();
    for (const auto& row : bundle.theta) {
        Json r = Json::array();
        for (const auto& v : row) r.push_back(format_rational(v));
        theta.push_back(std::move(r));
    }
    j["theta"] = std::move(theta);

    Json xi = Json::array();
    for (const auto& row : bundle.xi) {
        Json r = Json::array();
        for (const auto& v : row) r.push_back(v.get_str());
        xi.push_back(std::move(r));
    }
    j["xi"] = std::move(xi);

    Json shifts = Json::array();
    for (const auto& shift : bundle.shifts) {
        Json r = Json::array();
        for (const auto& v : shift) r.push_back(v.get_str());
        shifts.push_back(std::move(r));
    }
    j["shifts"] = std::move(shifts);

    Json p = Json::array();
    for (const auto& row : bundle.p_matrix) {
        Json r = Json::array();
        for (const auto& v : row) r.push_back(v.to_string());
        p.push_back(std::move(r));
    }
    j["p_matrix"] = std::move(p);

    if (bundle.l_prime) j["l_prime"] = system_to_json(*bundle.l_prime);

    Json a = Json::array();
    for (const auto& row : bundle.lattice_basis_a) {
        Json r = Json::array();
        for (const auto& v : row) r.push_back(v.get_str());
        a.push_back(std::move(r));
    }
    j["lattice_basis_a"] = std::move(a);

    Json lifts = Json::array();
    for (const auto& row : bundle.lifts_x) {
        Json r = Json::array();
        for (const auto& v : row) r.push_back(v.get_str());
        lifts.push_back(std::move(r));
    }
    j["lifts_x"] = std::move(lifts);

    j["eps"] = bundle.eps;
    j["dual_pair_margin"] = bundle.dual_pair_margin;
    return j;
}

Json approx_result_to_json(const ApproxResult& res) {
    return Json{{"lower_bound", res.lower_bound},
                {"upper_bound", res.upper_bound},
                {"witness_k", res.witness_k},
                {"witness_lattice", res.witness_lattice},
                {"definition_floor", res.definition_floor}};
}

FormSystem forms_from_json(const Json& j) {
    std::vector<std::vector<double>> rows;
    for (const auto& row : j.at("rows")) rows.push_back(row.get<std::vector<double>>());
    return FormSystem::from_rows(std::move(rows));
}

ExperimentConfig experiment_config_from_json(const Json& j) {
    ExperimentConfig cfg;
    cfg.kind = j.at("kind").get<std::string>();
    if (j.contains("N_grid")) cfg.n_grid = j.at("N_grid").get<std::vector<long>>();
    if (j.contains("trials")) cfg.trials = j.at("trials").get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("eps")) cfg.eps = j.at("eps").get<double>();
    if (j.contains("beta_sqrt")) cfg.beta_sqrt = j.at("beta_sqrt").get<unsigned long>();
    if (j.contains("tau1")) cfg.tau1 = j.at("tau1").get<double>();
    if (j.contains("tau2_grid")) cfg.tau2_grid = j.at("tau2_grid").get<std::vector<double>>();
    if (j.contains("assert_mean_rel_error"))
        cfg.assert_mean_rel_error = j.at("assert_mean_rel_error").get<double>();
    if (j.contains("assert_decay")) cfg.assert_decay = j.at("assert_decay").get<bool>();
    return cfg;
}

} // namespace dioph
