#include "drlcheck/formats.hpp"

#include <filesystem>
#include <limits>
#include <utility>

#include "drlcheck/errors.hpp"
#include "json_util.hpp"

namespace drlcheck {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relation plus the strictness shift applied to the constant: "<" narrows
// the right side by delta, ">" raises it.
std::pair<Relation, double> parse_relation(const std::string& rel, double delta,
                                           const std::string& origin) {
    if (rel == "<=")
        return {Relation::Le, 0.0};
    if (rel == ">=")
        return {Relation::Ge, 0.0};
    if (rel == "=" || rel == "==")
        return {Relation::Eq, 0.0};
    if (rel == "<")
        return {Relation::Le, -delta};
    if (rel == ">")
        return {Relation::Ge, delta};
    throw ParseError(origin + ": unknown relation \"" + rel + "\"");
}

Site parse_site(const std::string& site, const std::string& origin) {
    if (site == "in")
        return Site::Input;
    if (site == "out")
        return Site::Output;
    throw ParseError(origin + ": unknown site \"" + site + "\" (want \"in\" or \"out\")");
}

double bound_or_infinity(const Json& v, double sign, const std::string& what,
                         const std::string& origin) {
    if (v.is_null())
        return sign * kInf;
    return require_number(v, what, origin);
}

Box parse_box(const Json& v, const std::string& what, const std::string& origin) {
    const Json& arr = require_array(v, what, origin);
    if (arr.size() != 2)
        throw ParseError(origin + ": " + what + " must be a [lo, hi] pair");
    return Box(bound_or_infinity(arr[0], -1.0, what + "[0]", origin),
               bound_or_infinity(arr[1], 1.0, what + "[1]", origin));
}

// [coef, copy, site, index] when with_copy, else [coef, site, index].
LinearTerm parse_term(const Json& v, bool with_copy, const std::string& what,
                      const std::string& origin) {
    const Json& arr = require_array(v, what, origin);
    const std::size_t expected = with_copy ? 4 : 3;
    if (arr.size() != expected)
        throw ParseError(origin + ": " + what + " must have " +
                         std::to_string(expected) + " entries");
    LinearTerm t;
    std::size_t at = 0;
    t.coef = require_number(arr[at], what + " coefficient", origin);
    ++at;
    if (with_copy) {
        const long copy = require_int(arr[at], what + " copy", origin);
        if (copy < 0)
            throw ParseError(origin + ": " + what + " has a negative copy index");
        t.var.copy = static_cast<std::size_t>(copy);
        ++at;
    }
    t.var.site = parse_site(require_string(arr[at], what + " site", origin), origin);
    ++at;
    const long index = require_int(arr[at], what + " index", origin);
    if (index < 0)
        throw ParseError(origin + ": " + what + " has a negative variable index");
    t.var.index = static_cast<std::size_t>(index);
    return t;
}

LinearConstraint parse_constraint(const Json& v, bool with_copy, double delta,
                                  const std::string& what,
                                  const std::string& origin) {
    if (!v.is_object())
        throw ParseError(origin + ": " + what + " must be an object");
    LinearConstraint c;
    const Json& terms = require_array(require_field(v, "terms", origin),
                                      what + ".terms", origin);
    for (std::size_t i = 0; i < terms.size(); ++i)
        c.terms.push_back(parse_term(terms[i], with_copy,
                                     what + ".terms[" + std::to_string(i) + "]",
                                     origin));
    const auto [rel, shift] = parse_relation(
        require_string(require_field(v, "rel", origin), what + ".rel", origin),
        delta, origin);
    c.rel = rel;
    c.constant =
        require_number(require_field(v, "const", origin), what + ".const", origin) +
        shift;
    return c;
}

std::vector<LinearConstraint> parse_constraint_list(const Json& v, bool with_copy,
                                                    double delta,
                                                    const std::string& what,
                                                    const std::string& origin) {
    std::vector<LinearConstraint> out;
    const Json& arr = require_array(v, what, origin);
    for (std::size_t i = 0; i < arr.size(); ++i)
        out.push_back(parse_constraint(arr[i], with_copy, delta,
                                       what + "[" + std::to_string(i) + "]",
                                       origin));
    return out;
}

VarRef parse_box_key(const std::string& key, const std::string& origin) {
    const auto first = key.find(':');
    const auto second = key.find(':', first == std::string::npos ? 0 : first + 1);
    if (first == std::string::npos || second == std::string::npos)
        throw ParseError(origin + ": box key \"" + key +
                         "\" is not copy:site:index");
    VarRef v;
    try {
        v.copy = std::stoul(key.substr(0, first));
        v.index = std::stoul(key.substr(second + 1));
    } catch (const std::exception&) {
        throw ParseError(origin + ": box key \"" + key + "\" has non-numeric parts");
    }
    v.site = parse_site(key.substr(first + 1, second - first - 1), origin);
    if (v.site != Site::Input)
        throw ParseError(origin + ": box key \"" + key +
                         "\" must reference an input variable");
    return v;
}

}

Query parse_query(const std::string& text, std::shared_ptr<const Network> net,
                  const std::string& origin, const ParseOptions& opt) {
    const Json doc = parse_json_text(text, origin);
    if (!doc.is_object())
        throw ParseError(origin + ": query document must be an object");
    const long copies =
        require_int(require_field(doc, "copies", origin), "copies", origin);
    if (copies < 1)
        throw ParseError(origin + ": copies must be at least 1");

    try {
        Query q(std::move(net), static_cast<std::size_t>(copies));
        if (doc.contains("boxes")) {
            const Json& boxes = doc["boxes"];
            if (!boxes.is_object())
                throw ParseError(origin + ": boxes must be an object");
            for (const auto& [key, value] : boxes.items()) {
                const VarRef v = parse_box_key(key, origin);
                q.check_ref(v);
                q.set_box(v.copy, v.index,
                          parse_box(value, "boxes[" + key + "]", origin));
            }
        }
        if (doc.contains("constraints"))
            for (LinearConstraint& c :
                 parse_constraint_list(doc["constraints"], true, opt.delta_strict,
                                       "constraints", origin))
                q.add_constraint(std::move(c));
        if (doc.contains("couplings"))
            for (LinearConstraint& c :
                 parse_constraint_list(doc["couplings"], true, opt.delta_strict,
                                       "couplings", origin))
                q.add_coupling(std::move(c));
        return q;
    } catch (const ModelError& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

Query load_query(const std::string& path, std::shared_ptr<const Network> net,
                 const ParseOptions& opt) {
    return parse_query(read_text_file(path), std::move(net), path, opt);
}

Property parse_property(const std::string& text, const std::string& origin,
                        const ParseOptions& opt) {
    const Json doc = parse_json_text(text, origin);
    if (!doc.is_object())
        throw ParseError(origin + ": property document must be an object");
    Property p;
    const std::string kind =
        require_string(require_field(doc, "kind", origin), "kind", origin);
    if (kind == "safety") {
        p.kind = Property::Kind::Safety;
        p.predicate.kind = PredicateKind::Bad;
    } else if (kind == "liveness") {
        p.kind = Property::Kind::Liveness;
        p.predicate.kind = PredicateKind::Good;
    } else {
        throw ParseError(origin + ": unknown property kind \"" + kind + "\"");
    }
    if (doc.contains("name"))
        p.name = require_string(doc["name"], "name", origin);
    const Json& pred = require_field(doc, "predicate", origin);
    if (!pred.is_object())
        throw ParseError(origin + ": predicate must be an object");
    p.predicate.constraints = parse_constraint_list(
        require_field(pred, "constraints", origin), false, opt.delta_strict,
        "predicate.constraints", origin);
    try {
        validate_predicate(p.predicate);
    } catch (const ModelError& e) {
        throw ParseError(origin + ": " + e.what());
    }
    return p;
}

Property load_property(const std::string& path, const ParseOptions& opt) {
    return parse_property(read_text_file(path), path, opt);
}

TransitionSpec parse_transition_spec(const std::string& text,
                                     const std::string& origin,
                                     const std::string& base_dir,
                                     const ParseOptions& opt) {
    const Json doc = parse_json_text(text, origin);
    if (!doc.is_object())
        throw ParseError(origin + ": transition spec must be an object");

    TransitionSpec spec;
    const std::string net_path =
        require_string(require_field(doc, "network", origin), "network", origin);
    const std::filesystem::path resolved =
        std::filesystem::path(net_path).is_absolute()
            ? std::filesystem::path(net_path)
            : std::filesystem::path(base_dir) / net_path;
    spec.net = std::make_shared<Network>(load_network(resolved.string()));

    const long window =
        require_int(require_field(doc, "window", origin), "window", origin);
    const long fields = require_int(require_field(doc, "fields_per_step", origin),
                                    "fields_per_step", origin);
    if (window < 1 || fields < 1)
        throw ParseError(origin + ": window and fields_per_step must be positive");
    spec.window = static_cast<std::size_t>(window);
    spec.fields_per_step = static_cast<std::size_t>(fields);

    const Json& boxes = require_array(require_field(doc, "field_boxes", origin),
                                      "field_boxes", origin);
    for (std::size_t i = 0; i < boxes.size(); ++i)
        spec.field_boxes.push_back(
            parse_box(boxes[i], "field_boxes[" + std::to_string(i) + "]", origin));

    if (doc.contains("field_roles")) {
        const Json& roles = require_array(doc["field_roles"], "field_roles", origin);
        for (std::size_t i = 0; i < roles.size(); ++i)
            spec.field_roles.push_back(require_string(
                roles[i], "field_roles[" + std::to_string(i) + "]", origin));
    }
    if (doc.contains("initial_constraints"))
        spec.initial_constraints =
            parse_constraint_list(doc["initial_constraints"], false,
                                  opt.delta_strict, "initial_constraints", origin);
    if (doc.contains("layout")) {
        const Json& layout = require_array(doc["layout"], "layout", origin);
        for (std::size_t i = 0; i < layout.size(); ++i) {
            const long pos = require_int(
                layout[i], "layout[" + std::to_string(i) + "]", origin);
            if (pos < 0)
                throw ParseError(origin + ": layout entries must be non-negative");
            spec.layout.push_back(static_cast<std::size_t>(pos));
        }
    }

    try {
        spec.validate();
    } catch (const ModelError& e) {
        throw ParseError(origin + ": " + e.what());
    }
    return spec;
}

TransitionSpec load_transition_spec(const std::string& path,
                                    const ParseOptions& opt) {
    return parse_transition_spec(
        read_text_file(path), path,
        std::filesystem::path(path).parent_path().string(), opt);
}

namespace {

std::map<std::string, RoleBox> parse_role_boxes(const Json& doc,
                                                const std::string& origin) {
    std::map<std::string, RoleBox> out;
    if (!doc.contains("role_boxes"))
        return out;
    const Json& boxes = doc["role_boxes"];
    if (!boxes.is_object())
        throw ParseError(origin + ": role_boxes must be an object");
    for (const auto& [role, value] : boxes.items()) {
        if (!value.is_object())
            throw ParseError(origin + ": role_boxes[" + role + "] must be an object");
        RoleBox rb;
        const Json& base = require_array(require_field(value, "base", origin),
                                         "role_boxes[" + role + "].base", origin);
        if (base.size() != 2)
            throw ParseError(origin + ": role_boxes[" + role +
                             "].base must be a [lo, hi] pair");
        rb.base_lo = require_number(base[0], "base[0]", origin);
        rb.base_hi = require_number(base[1], "base[1]", origin);
        if (value.contains("eps_coef")) {
            const Json& eps = require_array(value["eps_coef"],
                                            "role_boxes[" + role + "].eps_coef",
                                            origin);
            if (eps.size() != 2)
                throw ParseError(origin + ": role_boxes[" + role +
                                 "].eps_coef must be a [cl, cu] pair");
            rb.eps_lo = require_number(eps[0], "eps_coef[0]", origin);
            rb.eps_hi = require_number(eps[1], "eps_coef[1]", origin);
        }
        out.emplace(role, rb);
    }
    return out;
}

}

InvariantConfig parse_invariant_config(const std::string& text,
                                       const std::string& origin) {
    const Json doc = parse_json_text(text, origin);
    if (!doc.is_object())
        throw ParseError(origin + ": invariant config must be an object");
    InvariantConfig cfg;
    const std::string tmpl =
        require_string(require_field(doc, "template", origin), "template", origin);
    const double epsilon =
        doc.contains("epsilon")
            ? require_number(doc["epsilon"], "epsilon", origin)
            : 0.0;
    if (tmpl == "output") {
        cfg.tmpl = InvariantConfig::Template::Output;
        cfg.output.epsilon = epsilon;
        if (doc.contains("eta"))
            cfg.output.eta = require_number(doc["eta"], "eta", origin);
        if (doc.contains("output_index"))
            cfg.output.output_index = static_cast<std::size_t>(
                require_int(doc["output_index"], "output_index", origin));
        if (doc.contains("big_m"))
            cfg.output.big_m = require_number(doc["big_m"], "big_m", origin);
        cfg.output.role_boxes = parse_role_boxes(doc, origin);
    } else if (tmpl == "input") {
        cfg.tmpl = InvariantConfig::Template::Input;
        cfg.input.epsilon = epsilon;
        if (doc.contains("pkt"))
            cfg.input.pkt = require_number(doc["pkt"], "pkt", origin);
        cfg.input.searched_role = require_string(
            require_field(doc, "searched_role", origin), "searched_role", origin);
        if (doc.contains("output_index"))
            cfg.input.output_index = static_cast<std::size_t>(
                require_int(doc["output_index"], "output_index", origin));
        if (doc.contains("output_rel"))
            cfg.input.output_rel =
                parse_relation(require_string(doc["output_rel"], "output_rel", origin),
                               0.0, origin)
                    .first;
        if (doc.contains("output_const"))
            cfg.input.output_constant =
                require_number(doc["output_const"], "output_const", origin);
        if (doc.contains("precision"))
            cfg.input.precision = require_number(doc["precision"], "precision", origin);
        cfg.input.role_boxes = parse_role_boxes(doc, origin);
    } else {
        throw ParseError(origin + ": unknown template \"" + tmpl +
                         "\" (want \"output\" or \"input\")");
    }
    return cfg;
}

InvariantConfig load_invariant_config(const std::string& path) {
    return parse_invariant_config(read_text_file(path), path);
}

}
