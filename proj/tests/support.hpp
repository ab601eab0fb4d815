#pragma once

#include <string>
#include <vector>

#include "fpa/io.hpp"
#include "fpa/model.hpp"

namespace support {

inline fpa::Rational R(const char* text) { return fpa::Rational::parse(text); }

inline std::vector<fpa::Rational> Rs(std::initializer_list<const char*> items) {
    std::vector<fpa::Rational> out;
    for (const char* t : items) out.push_back(fpa::Rational::parse(t));
    return out;
}

inline fpa::BidSpace tenths() {
    fpa::BidSpace b;
    for (int k = 0; k <= 10; ++k) b.bids.push_back(fpa::Rational(k, 10));
    return b;
}

inline std::string fixture(const std::string& name) { return std::string(FPA_FIXTURE_DIR) + "/" + name; }

template <class T>
T load(const std::string& name) {
    return std::get<T>(fpa::io::parse_instance(fpa::io::read_file(fixture(name))));
}

// Uniform prior over {(0,1), (1/2,1/2), (1,0)} with bids {0, 1/10, ..., 1}.
inline fpa::DfpaInstance three_point() {
    fpa::DfpaInstance inst;
    inst.bids = tenths();
    inst.prior.n = 2;
    inst.prior.value_spaces = {Rs({"0", "1/2", "1"}), Rs({"0", "1/2", "1"})};
    inst.prior.support = {{Rs({"0", "1"}), R("1/3")}, {Rs({"1/2", "1/2"}), R("1/3")}, {Rs({"1", "0"}), R("1/3")}};
    return inst;
}

inline fpa::BoxDensity unit_cube(int n) {
    fpa::BoxDensity d;
    d.n = n;
    d.boxes.push_back({std::vector<fpa::Rational>(static_cast<std::size_t>(n), fpa::Rational(0)),
                       std::vector<fpa::Rational>(static_cast<std::size_t>(n), fpa::Rational(1)), fpa::Rational(1)});
    return d;
}

}  // namespace support
