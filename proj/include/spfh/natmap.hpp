#pragma once

#include <memory>
#include <string>
#include <vector>

#include "spfh/expr.hpp"
#include "spfh/module.hpp"

namespace spfh {

// A structure map between evaluated functors, owning both modules.
struct NatMap {
    Expr source_expr, target_expr;
    std::shared_ptr<const WeightedModule> source, target;
    std::shared_ptr<const ModuleMap> map;
};

// Names: div-to-ten(d), ten-to-sym(d), ten-to-ext(d), sym-mult(a,b),
// div-comult(a,b), frobenius-power(r). Throws std::invalid_argument for
// unknown names or bad arguments.
NatMap nat_map(const std::string& name, const std::vector<int>& args, int n, const FieldPtr& f);
// Source and target expressions of a named map.
std::pair<Expr, Expr> nat_map_exprs(const std::string& name, const std::vector<int>& args, int p);
// The map at k^n as a matrix in evaluation bases.
Mat nat_map_matrix(const std::string& name, const std::vector<int>& args, int n, const FieldPtr& f);

// Converts a matrix in evaluation bases into a module map.
ModuleMap module_map_from_eval(const WeightedModule* src, const WeightedModule* dst, const Mat& m);

}  // namespace spfh
