#pragma once

#include <memory>
#include <string>

#include "drlcheck/constraints.hpp"
#include "drlcheck/invariants.hpp"
#include "drlcheck/transition.hpp"

// Readers for the structured-text (JSON) file formats. Queries reference
// variables as [coef, copy, site, index]; copy-local constraints (initial
// constraints, predicates) drop the copy and use [coef, site, index].
// Strict relations "<" and ">" are narrowed by delta_strict at load time.

namespace drlcheck {

struct ParseOptions {
    double delta_strict = kDeltaStrict;
};

// {"copies": k, "boxes": {"copy:in:index": [lo, hi]}, "constraints": [...],
//  "couplings": [...]}. Unlisted inputs keep an unbounded box; null array
// entries mean unbounded on that side.
Query parse_query(const std::string& text, std::shared_ptr<const Network> net,
                  const std::string& origin = "<string>",
                  const ParseOptions& opt = {});
Query load_query(const std::string& path, std::shared_ptr<const Network> net,
                 const ParseOptions& opt = {});

struct Property {
    enum class Kind { Safety, Liveness };
    Kind kind = Kind::Safety;
    std::string name;
    // Bad predicate for safety, Good predicate for liveness.
    StatePredicate predicate;
};

// {"kind": "safety" | "liveness", "name": ..., "predicate":
//  {"constraints": [{"terms": [[coef, site, index]], "rel": ..., "const": ...}]}}
Property parse_property(const std::string& text,
                        const std::string& origin = "<string>",
                        const ParseOptions& opt = {});
Property load_property(const std::string& path, const ParseOptions& opt = {});

// {"network": path, "window": t, "fields_per_step": f, "field_boxes":
//  [[lo, hi], ...], "field_roles": [...], "initial_constraints": [...],
//  "layout": [...]}. The network path is resolved against base_dir;
// load_transition_spec uses the directory of the file it was given.
TransitionSpec parse_transition_spec(const std::string& text,
                                     const std::string& origin,
                                     const std::string& base_dir,
                                     const ParseOptions& opt = {});
TransitionSpec load_transition_spec(const std::string& path,
                                    const ParseOptions& opt = {});

struct InvariantConfig {
    enum class Template { Output, Input };
    Template tmpl = Template::Output;
    OutputBoundSearch output;  // filled when tmpl == Output
    InputBoundSearch input;    // filled when tmpl == Input
};

// {"template": "output" | "input", ...search fields...}; see invariants.hpp
// for the per-template fields. role_boxes entries are
// {"base": [lo, hi], "eps_coef": [cl, cu]}.
InvariantConfig parse_invariant_config(const std::string& text,
                                       const std::string& origin = "<string>");
InvariantConfig load_invariant_config(const std::string& path);

}
