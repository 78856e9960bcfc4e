#include "rblab/json_io.hpp"

#include <set>

#include "json.hpp"
#include "rblab/errors.hpp"
#include "rblab/params.hpp"

namespace rblab {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void reject(const std::string& path, const std::string& why) {
    throw DomainError("instance json: " + path + ": " + why);
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("json parse error: ") + e.what(), 1);
    }
}

void require_keys(const json& obj, const std::set<std::string>& expected,
                  const std::string& path) {
    for (const auto& item : obj.items())
        if (!expected.count(item.key())) reject(path + "." + item.key(), "unknown field");
    for (const auto& key : expected)
        if (!obj.contains(key)) reject(path + "." + key, "missing field");
}

}  // namespace

std::string instance_to_json(const Instance& instance) {
    const RBParams& pr = instance.params;
    json j;
    j["n"] = pr.n;
    j["alpha"] = pr.alpha;
    j["k"] = pr.k;
    j["p"] = pr.p;
    j["r"] = pr.r;
    j["seed"] = pr.seed;
    j["d"] = pr.d;
    j["m"] = pr.m;
    j["variant"] = instance.variant == Variant::Original ? "original" : "symmetric";
    json constraints = json::array();
    for (const Constraint& c : instance.constraints) {
        json jc;
        json scope = json::array();
        for (int var : c.scope) scope.push_back(var + 1);
        jc["scope"] = std::move(scope);
        json permitted = json::array();
        for (const auto& tuple : c.permitted.tuples()) {
            json jt = json::array();
            for (Value v : tuple) jt.push_back(v + 1);
            permitted.push_back(std::move(jt));
        }
        jc["permitted"] = std::move(permitted);
        constraints.push_back(std::move(jc));
    }
    j["constraints"] = std::move(constraints);
    return j.dump(2) + "\n";
}

Instance instance_from_json(const std::string& text) {
    const json j = parse(text);
    if (!j.is_object()) reject("$", "expected a JSON object");
    require_keys(j, {"n", "alpha", "k", "p", "r", "seed", "d", "m", "variant", "constraints"}, "$");

    if (!j["n"].is_number_integer()) reject("$.n", "expected an integer");
    if (!j["k"].is_number_integer()) reject("$.k", "expected an integer");
    if (!j["alpha"].is_number()) reject("$.alpha", "expected a number");
    if (!j["p"].is_number()) reject("$.p", "expected a number");
    if (!j["r"].is_number()) reject("$.r", "expected a number");
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
        reject("$.seed", "expected an integer");
    if (!j["variant"].is_string()) reject("$.variant", "expected a string");
    if (!j["constraints"].is_array()) reject("$.constraints", "expected an array");

    RBParams params;
    try {
        params = derive_params(j["n"].get<int>(), j["alpha"].get<double>(), j["k"].get<int>(),
                               j["p"].get<double>(), j["r"].get<double>(),
                               j["seed"].get<std::uint64_t>());
    } catch (const DomainError& e) {
        reject("$", e.what());
    }
    if (j["d"].get<std::int64_t>() != params.d)
        reject("$.d", "inconsistent with n, alpha: expected " + std::to_string(params.d));
    if (j["m"].get<std::int64_t>() != params.m)
        reject("$.m", "inconsistent with r, n, d: expected " + std::to_string(params.m));

    const std::string variant_name = j["variant"].get<std::string>();
    Instance inst;
    inst.params = params;
    if (variant_name == "original") {
        inst.variant = Variant::Original;
    } else if (variant_name == "symmetric") {
        inst.variant = Variant::Symmetric;
    } else {
        reject("$.variant", "must be \"original\" or \"symmetric\"");
    }

    const auto& jcs = j["constraints"];
    if (static_cast<std::int64_t>(jcs.size()) != params.m)
        reject("$.constraints", "expected m = " + std::to_string(params.m) + " entries, found " +
                                    std::to_string(jcs.size()));

    std::size_t uniform_size = 0;
    for (std::size_t ci = 0; ci < jcs.size(); ++ci) {
        const std::string path = "$.constraints[" + std::to_string(ci) + "]";
        const json& jc = jcs[ci];
        if (!jc.is_object()) reject(path, "expected an object");
        require_keys(jc, {"scope", "permitted"}, path);

        Constraint c;
        const json& jscope = jc["scope"];
        if (!jscope.is_array() || static_cast<int>(jscope.size()) != params.k)
            reject(path + ".scope", "expected exactly k = " + std::to_string(params.k) + " entries");
        std::set<int> seen;
        for (const auto& jv : jscope) {
            if (!jv.is_number_integer()) reject(path + ".scope", "expected integers");
            const int var = jv.get<int>() - 1;
            if (var < 0 || var >= params.n)
                reject(path + ".scope", "variable " + std::to_string(var + 1) + " outside [1, " +
                                            std::to_string(params.n) + "]");
            if (!seen.insert(var).second)
                reject(path + ".scope", "repeated variable " + std::to_string(var + 1));
            c.scope.push_back(var);
        }

        const json& jperm = jc["permitted"];
        if (!jperm.is_array() || jperm.empty()) reject(path + ".permitted", "expected a nonempty array");
        c.permitted = TupleSet(params.k, params.d);
        for (std::size_t ti = 0; ti < jperm.size(); ++ti) {
            const std::string tpath = path + ".permitted[" + std::to_string(ti) + "]";
            const json& jt = jperm[ti];
            if (!jt.is_array() || static_cast<int>(jt.size()) != params.k)
                reject(tpath, "expected a tuple of arity k = " + std::to_string(params.k));
            std::vector<Value> tuple;
            for (const auto& jv : jt) {
                if (!jv.is_number_integer()) reject(tpath, "expected integers");
                const std::int64_t v = jv.get<std::int64_t>() - 1;
                if (v < 0 || v >= params.d)
                    reject(tpath, "value " + std::to_string(v + 1) + " outside [1, " +
                                      std::to_string(params.d) + "]");
                tuple.push_back(static_cast<Value>(v));
            }
            if (!c.permitted.insert(c.permitted.encode(tuple))) reject(tpath, "duplicate tuple");
        }
        if (ci == 0) uniform_size = c.permitted.size();
        if (c.permitted.size() != uniform_size)
            reject(path + ".permitted", "permitted-set sizes differ across constraints");
        inst.constraints.push_back(std::move(c));
    }

    if (inst.variant == Variant::Original && uniform_size != params.t)
        reject("$.constraints[0].permitted", "original variant requires |permitted| == t == " +
                                                 std::to_string(params.t) + ", found " +
                                                 std::to_string(uniform_size));
    inst.actual_tightness =
        static_cast<double>(uniform_size) / static_cast<double>(params.tuple_space());
    return inst;
}

std::string certificate_to_json(const FlipCertificate& cert) {
    json j;
    j["u"] = cert.u + 1;
    j["a"] = json::array({cert.a[0] + 1, cert.a[1] + 1});
    j["b"] = json::array({cert.b[0] + 1, cert.b[1] + 1});
    j["direction"] = cert.direction == FlipDirection::SatToUnsat ? "sat_to_unsat" : "unsat_to_sat";
    json witness = json::array();
    for (Value v : cert.witness) witness.push_back(v + 1);
    j["witness"] = std::move(witness);
    return j.dump(2) + "\n";
}

FlipCertificate certificate_from_json(const std::string& text) {
    const json j = parse(text);
    if (!j.is_object()) throw DomainError("certificate json: expected an object");
    require_keys(j, {"u", "a", "b", "direction", "witness"}, "$");
    FlipCertificate cert;
    cert.u = j["u"].get<int>() - 1;
    if (cert.u < 0) throw DomainError("certificate json: u must be >= 1");
    auto read_pair = [&](const char* key) -> std::array<Value, 2> {
        const json& jp = j[key];
        if (!jp.is_array() || jp.size() != 2)
            throw DomainError(std::string("certificate json: ") + key + " must be a pair");
        return {static_cast<Value>(jp[0].get<std::int64_t>() - 1),
                static_cast<Value>(jp[1].get<std::int64_t>() - 1)};
    };
    cert.a = read_pair("a");
    cert.b = read_pair("b");
    const std::string dir = j["direction"].get<std::string>();
    if (dir == "sat_to_unsat") {
        cert.direction = FlipDirection::SatToUnsat;
    } else if (dir == "unsat_to_sat") {
        cert.direction = FlipDirection::UnsatToSat;
    } else {
        throw DomainError("certificate json: unknown direction \"" + dir + "\"");
    }
    for (const auto& jv : j["witness"])
        cert.witness.push_back(static_cast<Value>(jv.get<std::int64_t>() - 1));
    return cert;
}

}  // namespace rblab
