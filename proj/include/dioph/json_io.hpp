#pragma once

#include <string>

#include "json.hpp"

#include "dioph/approx.hpp"
#include "dioph/counter.hpp"
#include "dioph/experiments.hpp"
#include "dioph/gowers.hpp"
#include "dioph/linear_system.hpp"
#include "dioph/normal_form.hpp"
#include "dioph/reduction.hpp"

namespace dioph {

using Json = nlohmann::json;

Json load_json_file(const std::string& path);

BasisPtr basis_from_json(const Json& j);
Json basis_to_json(const ConstantBasis& basis);

ExactScalar scalar_from_json(const Json& j, const BasisPtr& basis);
Json scalar_to_json(const ExactScalar& x);

// {"m":1,"d":3,"basis":{...},"rows":[["1","-1*sqrt2","-1+1*sqrt2"]]}
LinearSystem system_from_json(const Json& j);
Json system_to_json(const LinearSystem& sys);

// {"N":64,"values":[...]}
WeightFunction weight_from_json(const Json& j);
Json weight_to_json(const WeightFunction& f);

Json classification_to_json(const ClassificationReport& rep);
Json gowers_report_to_json(const GowersReport& rep);
Json count_result_to_json(const CountResult& res);
Json bundle_to_json(const ReductionBundle& bundle);
Json approx_result_to_json(const ApproxResult& res);

FormSystem forms_from_json(const Json& j);
ExperimentConfig experiment_config_from_json(const Json& j);

} // namespace dioph
