#pragma once

#include <string>

#include "subnorm/setfn.hpp"

namespace subnorm {

// Set functions declared in a JSON config document. Flat object with a
// "kind" discriminator; subset indices are 1-based in configs and CLI output.
//
//   {"kind": "cardinality", "p": 5}
//   {"kind": "weighted_cardinality", "weights": [1, 2, 0.5]}
//   {"kind": "concave_cardinality", "h": [0, 1, 1.4142, 1.7320]}
//   {"kind": "group_cover", "p": 3, "groups": [[1,2],[2,3]], "weights": [1,1]}
//   {"kind": "range_plus_constant", "p": 6}
//   {"kind": "interval_count", "p": 5}
//   {"kind": "spectral", "h": "power", "q": 0.5, "x_csv": "X.csv"}
//   {"kind": "spectral", "h": "log_shift", "t": 1.0, "q_csv": "Q.csv"}
//   {"kind": "sum", "terms": [{...}, {...}], "coefficients": [1, 0.25]}
//
// CSV paths are resolved relative to the config file location.
SetFunctionPtr load_set_function(const std::string& config_path);

SetFunctionPtr set_function_from_json_text(const std::string& json_text,
                                           const std::string& base_dir = ".");

}  // namespace subnorm
