#pragma once

#include <string>

#include "rblab/flip.hpp"
#include "rblab/instance.hpp"

namespace rblab {

// Canonical instance JSON. Field order is fixed:
//   {"n","alpha","k","p","r","seed","d","m","variant",
//    "constraints":[{"scope":[...],"permitted":[[...],...]},...]}
// Variable indices and domain values are 1-based on the wire (0-based
// internally). Serialization is deterministic: constraints in index order,
// permitted tuples in lexicographic order.
std::string instance_to_json(const Instance& instance);

// Parses and validates every structural invariant (derived d/m consistency,
// scope distinctness and range, tuple arity/range/distinctness, uniform
// permitted sizes, original-variant size == t). Rejections name the JSON
// path of the offending field.
Instance instance_from_json(const std::string& text);

// Certificate JSON: {"u","a","b","direction","witness"}, 1-based.
std::string certificate_to_json(const FlipCertificate& cert);
FlipCertificate certificate_from_json(const std::string& text);

}  // namespace rblab
