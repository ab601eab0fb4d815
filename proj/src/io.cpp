#include "fpa/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "fpa/error.hpp"

namespace fpa::io {

namespace {

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::Parse, std::string("malformed JSON: ") + e.what());
    }
}

const Json& field(const Json& obj, const char* key) { return obj.at(key); }

int int_from(const Json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(ErrorKind::Parse, where + ": expected an integer");
    return j.get<int>();
}

const Json& array_from(const Json& j, const std::string& where) {
    if (!j.is_array()) fail(ErrorKind::Parse, where + ": expected an array");
    return j;
}

BidSpace bids_from(const Json& obj) { return BidSpace{rationals_from(field(obj, "bids"), "bids")}; }

std::vector<int> ints_from(const Json& j, const std::string& where) {
    std::vector<int> out;
    for (const auto& e : array_from(j, where)) out.push_back(int_from(e, where));
    return out;
}

std::vector<SupportPoint> support_from(const Json& j) {
    std::vector<SupportPoint> out;
    std::size_t k = 0;
    for (const auto& e : array_from(j, "support")) {
        std::string where = "support[" + std::to_string(k++) + "]";
        if (!e.is_object()) fail(ErrorKind::Parse, where + ": expected an object");
        check_fields(e, {"values", "mass"}, {}, where);
        out.push_back({rationals_from(e.at("values"), where + ".values"), rational_from(e.at("mass"), where + ".mass")});
    }
    return out;
}

Json support_to(const std::vector<SupportPoint>& s) {
    Json arr = Json::array();
    for (const auto& p : s) arr.push_back(Json{{"values", to_json(p.values)}, {"mass", to_json(p.mass)}});
    return arr;
}

Json spaces_to(const std::vector<std::vector<Rational>>& spaces) {
    Json arr = Json::array();
    for (const auto& s : spaces) arr.push_back(to_json(s));
    return arr;
}

std::vector<std::vector<Rational>> spaces_from(const Json& j) {
    std::vector<std::vector<Rational>> out;
    std::size_t k = 0;
    for (const auto& e : array_from(j, "value_spaces")) out.push_back(rationals_from(e, "value_spaces[" + std::to_string(k++) + "]"));
    return out;
}

}  // namespace

void check_fields(const Json& obj, const std::vector<std::string>& required, const std::vector<std::string>& optional,
                  const std::string& where) {
    for (const auto& key : required) {
        if (!obj.contains(key)) fail(ErrorKind::Parse, where + ": missing field '" + key + "'");
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = std::find(required.begin(), required.end(), it.key()) != required.end() ||
                     std::find(optional.begin(), optional.end(), it.key()) != optional.end();
        if (!known) fail(ErrorKind::Parse, where + ": unknown field '" + it.key() + "'");
    }
}

Rational rational_from(const Json& j, const std::string& where) {
    if (!j.is_string()) fail(ErrorKind::Parse, where + ": rationals must be strings of the form \"p/q\"");
    try {
        return Rational::parse(j.get<std::string>());
    } catch (const Error& e) {
        fail(ErrorKind::Parse, where + ": " + e.what());
    }
}

std::vector<Rational> rationals_from(const Json& j, const std::string& where) {
    std::vector<Rational> out;
    std::size_t k = 0;
    for (const auto& e : array_from(j, where)) out.push_back(rational_from(e, where + "[" + std::to_string(k++) + "]"));
    return out;
}

Json to_json(const Rational& r) { return r.str(); }

Json to_json(const std::vector<Rational>& v) {
    Json arr = Json::array();
    for (const auto& r : v) arr.push_back(r.str());
    return arr;
}

Instance parse_instance(const std::string& text) {
    Json j = parse_json(text);
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) fail(ErrorKind::Parse, "instance: missing \"kind\" tag");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "dfpa") {
        check_fields(j, {"kind", "bids", "n", "value_spaces", "support"}, {}, "dfpa instance");
        DfpaInstance inst;
        inst.bids = bids_from(j);
        inst.prior.n = int_from(j["n"], "n");
        inst.prior.value_spaces = spaces_from(j["value_spaces"]);
        inst.prior.support = support_from(j["support"]);
        return inst;
    }
    if (kind == "dfpa-sym") {
        check_fields(j, {"kind", "bids", "groups", "value_spaces", "support"}, {}, "dfpa-sym instance");
        SymDfpaInstance inst;
        inst.bids = bids_from(j);
        inst.prior.groups = ints_from(j["groups"], "groups");
        inst.prior.value_spaces = spaces_from(j["value_spaces"]);
        inst.prior.support = support_from(j["support"]);
        return inst;
    }
    if (kind == "cfpa-box") {
        check_fields(j, {"kind", "bids", "n", "boxes"}, {"groups"}, "cfpa-box instance");
        BoxInstance inst;
        inst.bids = bids_from(j);
        inst.density.n = int_from(j["n"], "n");
        if (j.contains("groups")) inst.density.groups = ints_from(j["groups"], "groups");
        std::size_t k = 0;
        for (const auto& e : array_from(j["boxes"], "boxes")) {
            std::string where = "boxes[" + std::to_string(k++) + "]";
            if (!e.is_object()) fail(ErrorKind::Parse, where + ": expected an object");
            check_fields(e, {"lo", "hi", "weight"}, {}, where);
            inst.density.boxes.push_back({rationals_from(e["lo"], where + ".lo"), rationals_from(e["hi"], where + ".hi"),
                                          rational_from(e["weight"], where + ".weight")});
        }
        return inst;
    }
    if (kind == "cfpa-iid") {
        check_fields(j, {"kind", "bids", "n", "breakpoints", "densities"}, {}, "cfpa-iid instance");
        IidInstance inst;
        inst.bids = bids_from(j);
        inst.n = int_from(j["n"], "n");
        inst.marginal.breakpoints = rationals_from(j["breakpoints"], "breakpoints");
        inst.marginal.densities = rationals_from(j["densities"], "densities");
        return inst;
    }
    fail(ErrorKind::Parse, "instance: unknown kind '" + kind + "'");
}

Json to_json(const Instance& inst) {
    return std::visit(
        [](const auto& x) -> Json {
            using T = std::decay_t<decltype(x)>;
            Json j;
            if constexpr (std::is_same_v<T, DfpaInstance>) {
                j["kind"] = "dfpa";
                j["bids"] = to_json(x.bids.bids);
                j["n"] = x.prior.n;
                j["value_spaces"] = spaces_to(x.prior.value_spaces);
                j["support"] = support_to(x.prior.support);
            } else if constexpr (std::is_same_v<T, SymDfpaInstance>) {
                j["kind"] = "dfpa-sym";
                j["bids"] = to_json(x.bids.bids);
                j["groups"] = x.prior.groups;
                j["value_spaces"] = spaces_to(x.prior.value_spaces);
                j["support"] = support_to(x.prior.support);
            } else if constexpr (std::is_same_v<T, BoxInstance>) {
                j["kind"] = "cfpa-box";
                j["bids"] = to_json(x.bids.bids);
                j["n"] = x.density.n;
                if (x.density.symmetric()) j["groups"] = x.density.groups;
                Json boxes = Json::array();
                for (const auto& b : x.density.boxes) {
                    boxes.push_back(Json{{"lo", to_json(b.lo)}, {"hi", to_json(b.hi)}, {"weight", to_json(b.weight)}});
                }
                j["boxes"] = boxes;
            } else {
                j["kind"] = "cfpa-iid";
                j["bids"] = to_json(x.bids.bids);
                j["n"] = x.n;
                j["breakpoints"] = to_json(x.marginal.breakpoints);
                j["densities"] = to_json(x.marginal.densities);
            }
            return j;
        },
        inst);
}

const BidSpace& bid_space(const Instance& inst) {
    return std::visit([](const auto& x) -> const BidSpace& { return x.bids; }, inst);
}

std::vector<std::vector<Rational>> slot_values(const Instance& inst, bool symmetric) {
    if (const auto* d = std::get_if<DfpaInstance>(&inst)) {
        if (symmetric) fail(ErrorKind::Validation, "symmetric profiles need a symmetric instance");
        return d->prior.value_spaces;
    }
    if (const auto* s = std::get_if<SymDfpaInstance>(&inst)) {
        if (symmetric) return s->prior.value_spaces;
        return expand_symmetric(s->prior).value_spaces;
    }
    fail(ErrorKind::Validation, "pure and mixed strategies require a discrete instance");
}

AnyProfile parse_profile(const std::string& text, const Instance& inst) {
    Json j = parse_json(text);
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) fail(ErrorKind::Parse, "strategy: missing \"kind\" tag");
    check_fields(j, {"kind", "profile"}, {"symmetric"}, "strategy file");
    const std::string kind = j["kind"].get<std::string>();
    bool symmetric = false;
    if (j.contains("symmetric")) {
        if (!j["symmetric"].is_boolean()) fail(ErrorKind::Parse, "symmetric: expected a boolean");
        symmetric = j["symmetric"].get<bool>();
    }
    const BidSpace& bids = bid_space(inst);
    const auto& entries = array_from(j["profile"], "profile");
    auto bid_index = [&](const Json& e, const std::string& where) {
        Rational b = rational_from(e, where);
        int k = bids.index_of(b);
        if (k < 0) fail(ErrorKind::Validation, where + ": bid " + b.str() + " is not in the bid space");
        return k;
    };
    if (kind == "jump") {
        JumpProfile p;
        p.symmetric = symmetric;
        std::size_t k = 0;
        for (const auto& e : entries) {
            std::string where = "profile[" + std::to_string(k++) + "]";
            JumpStrategy s{rationals_from(e, where)};
            require_valid(validate(s, bids), where);
            p.strategies.push_back(std::move(s));
        }
        return p;
    }
    if (kind != "pure" && kind != "mixed") fail(ErrorKind::Parse, "strategy: unknown kind '" + kind + "'");
    auto spaces = slot_values(inst, symmetric);
    if (entries.size() != spaces.size()) {
        fail(ErrorKind::Validation, "profile has " + std::to_string(entries.size()) + " strategies, instance needs " +
                                        std::to_string(spaces.size()));
    }
    PureProfile pure;
    MixedProfile mixed;
    pure.symmetric = mixed.symmetric = symmetric;
    for (std::size_t s = 0; s < entries.size(); ++s) {
        std::string where = "profile[" + std::to_string(s) + "]";
        const auto& e = entries[s];
        if (!e.is_object()) fail(ErrorKind::Parse, where + ": expected an object keyed by value");
        const auto& space = spaces[s];
        std::vector<bool> seen(space.size(), false);
        PureStrategy ps{std::vector<int>(space.size(), 0)};
        MixedStrategy ms{std::vector<std::vector<Rational>>(space.size(), std::vector<Rational>(static_cast<std::size_t>(bids.size()), Rational(0)))};
        for (auto it = e.begin(); it != e.end(); ++it) {
            Rational v = Rational::parse(it.key());
            int vi = value_index(space, v);
            if (vi < 0) fail(ErrorKind::Validation, where + ": value " + it.key() + " not in the value space");
            if (seen[static_cast<std::size_t>(vi)]) fail(ErrorKind::Validation, where + ": value " + it.key() + " given twice");
            seen[static_cast<std::size_t>(vi)] = true;
            std::string w = where + "[" + it.key() + "]";
            if (kind == "pure") {
                ps.bid[static_cast<std::size_t>(vi)] = bid_index(it.value(), w);
            } else {
                if (!it.value().is_object()) fail(ErrorKind::Parse, w + ": expected an object keyed by bid");
                for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) {
                    int b = bid_index(Json(jt.key()), w);
                    ms.dist[static_cast<std::size_t>(vi)][static_cast<std::size_t>(b)] = rational_from(jt.value(), w + "[" + jt.key() + "]");
                }
            }
        }
        for (std::size_t vi = 0; vi < space.size(); ++vi) {
            if (!seen[vi]) fail(ErrorKind::Validation, where + ": no entry for value " + space[vi].str());
        }
        if (kind == "pure") {
            pure.strategies.push_back(std::move(ps));
        } else {
            require_valid(validate(ms, static_cast<int>(space.size()), bids.size()), where);
            mixed.strategies.push_back(std::move(ms));
        }
    }
    if (kind == "pure") return pure;
    return mixed;
}

Json to_json(const AnyProfile& profile, const Instance& inst) {
    const BidSpace& bids = bid_space(inst);
    Json j;
    return std::visit(
        [&](const auto& p) -> Json {
            using T = std::decay_t<decltype(p)>;
            Json arr = Json::array();
            if constexpr (std::is_same_v<T, JumpProfile>) {
                j["kind"] = "jump";
                for (const auto& s : p.strategies) arr.push_back(to_json(s.x));
            } else {
                auto spaces = slot_values(inst, p.symmetric);
                for (std::size_t s = 0; s < p.strategies.size(); ++s) {
                    Json m = Json::object();
                    for (std::size_t vi = 0; vi < spaces[s].size(); ++vi) {
                        if constexpr (std::is_same_v<T, PureProfile>) {
                            m[spaces[s][vi].str()] = bids[p.strategies[s].bid[vi]].str();
                        } else {
                            Json row = Json::object();
                            const auto& d = p.strategies[s].dist[vi];
                            for (std::size_t b = 0; b < d.size(); ++b) {
                                if (!d[b].is_zero()) row[bids[static_cast<int>(b)].str()] = d[b].str();
                            }
                            m[spaces[s][vi].str()] = row;
                        }
                    }
                    arr.push_back(m);
                }
                j["kind"] = std::is_same_v<T, PureProfile> ? "pure" : "mixed";
            }
            j["symmetric"] = p.symmetric;
            j["profile"] = arr;
            return j;
        },
        profile);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
    out << text;
    if (!out) fail(ErrorKind::Io, "write failed for '" + path + "'");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace fpa::io
