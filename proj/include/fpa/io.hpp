#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fpa/model.hpp"

namespace fpa::io {

using Json = nlohmann::ordered_json;

// Documents are JSON objects with a "kind" tag. Rationals are strings "p/q"
// (or integer strings); unknown fields are rejected.
Instance parse_instance(const std::string& text);
Json to_json(const Instance& inst);

using AnyProfile = std::variant<PureProfile, MixedProfile, JumpProfile>;

// Strategy files refer to values and bids literally; the instance supplies the
// value spaces (per bidder, or per group for symmetric profiles) and bids.
AnyProfile parse_profile(const std::string& text, const Instance& inst);
Json to_json(const AnyProfile& profile, const Instance& inst);

Rational rational_from(const Json& j, const std::string& where);
std::vector<Rational> rationals_from(const Json& j, const std::string& where);
Json to_json(const Rational& r);
Json to_json(const std::vector<Rational>& v);

// Rejects any key of `obj` outside `allowed` and any missing `required` key.
void check_fields(const Json& obj, const std::vector<std::string>& required, const std::vector<std::string>& optional,
                  const std::string& where);

// Value space of each strategy slot of a profile (bidder or group).
std::vector<std::vector<Rational>> slot_values(const Instance& inst, bool symmetric);
const BidSpace& bid_space(const Instance& inst);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);
// Pretty-printed with a trailing newline; identical input yields identical bytes.
std::string dump(const Json& j);

}  // namespace fpa::io
