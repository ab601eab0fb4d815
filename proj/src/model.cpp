#include "fpa/model.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "fpa/error.hpp"

namespace fpa {

namespace {

std::string fmt_tuple(const std::vector<Rational>& t) {
    std::ostringstream os;
    os << '(';
    for (std::size_t k = 0; k < t.size(); ++k) os << (k ? "," : "") << t[k];
    os << ')';
    return os.str();
}

void check_sorted_space(const std::vector<Rational>& space, const std::string& where,
                        std::vector<std::string>& out) {
    if (space.empty()) out.push_back(where + ": empty value space");
    for (std::size_t k = 0; k < space.size(); ++k) {
        if (space[k] < 0 || space[k] > 1) out.push_back(where + ": value " + space[k].str() + " outside [0,1]");
        if (k > 0 && !(space[k - 1] < space[k])) out.push_back(where + ": values not strictly increasing");
    }
}

std::vector<int> block_starts(const std::vector<int>& groups) {
    std::vector<int> starts(groups.size() + 1, 0);
    for (std::size_t g = 0; g < groups.size(); ++g) starts[g + 1] = starts[g] + groups[g];
    return starts;
}

// Calls emit(perm) for every distinct permutation of each block, combined
// across blocks. Blocks are taken from `items` according to `groups`.
template <class T, class F>
void for_each_group_permutation(const std::vector<T>& items, const std::vector<int>& groups, F&& emit) {
    auto starts = block_starts(groups);
    std::vector<std::vector<std::vector<T>>> per_block(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        std::vector<T> block(items.begin() + starts[g], items.begin() + starts[g + 1]);
        std::sort(block.begin(), block.end());
        do {
            per_block[g].push_back(block);
        } while (std::next_permutation(block.begin(), block.end()));
    }
    std::vector<std::size_t> pick(groups.size(), 0);
    std::vector<T> current(items.size());
    while (true) {
        for (std::size_t g = 0; g < groups.size(); ++g) {
            std::copy(per_block[g][pick[g]].begin(), per_block[g][pick[g]].end(), current.begin() + starts[g]);
        }
        emit(current);
        std::size_t g = 0;
        while (g < groups.size() && ++pick[g] == per_block[g].size()) {
            pick[g] = 0;
            ++g;
        }
        if (g == groups.size()) break;
    }
}

int group_index(const std::vector<int>& groups, int bidder) {
    int start = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (bidder < start + groups[g]) return static_cast<int>(g);
        start += groups[g];
    }
    fail(ErrorKind::Domain, "bidder index " + std::to_string(bidder) + " out of range");
}

Rational box_side_product(const Box& box, int skip) {
    Rational p(1);
    for (std::size_t j = 0; j < box.lo.size(); ++j) {
        if (static_cast<int>(j) != skip) p *= box.hi[j] - box.lo[j];
    }
    return p;
}

}  // namespace

int BidSpace::index_of(const Rational& b) const {
    auto it = std::lower_bound(bids.begin(), bids.end(), b);
    if (it == bids.end() || *it != b) return -1;
    return static_cast<int>(it - bids.begin());
}

int SymmetricDiscretePrior::n() const { return std::accumulate(groups.begin(), groups.end(), 0); }
int SymmetricDiscretePrior::group_of(int bidder) const { return group_index(groups, bidder); }
int SymmetricDiscretePrior::group_start(int group) const { return block_starts(groups)[static_cast<std::size_t>(group)]; }

int BoxDensity::group_of(int bidder) const { return symmetric() ? group_index(groups, bidder) : bidder; }
int BoxDensity::group_start(int group) const {
    return symmetric() ? block_starts(groups)[static_cast<std::size_t>(group)] : group;
}

Rational IIDMarginal::cdf(const Rational& x) const {
    Rational total(0);
    for (int j = 0; j < pieces(); ++j) {
        const auto& a = breakpoints[static_cast<std::size_t>(j)];
        const auto& b = breakpoints[static_cast<std::size_t>(j) + 1];
        if (x <= a) break;
        total += (std::min(x, b) - a) * densities[static_cast<std::size_t>(j)];
    }
    return total;
}

Rational IIDMarginal::density_at(const Rational& x) const {
    for (int j = 0; j < pieces(); ++j) {
        if (in_interval(x, breakpoints[static_cast<std::size_t>(j)], breakpoints[static_cast<std::size_t>(j) + 1])) {
            return densities[static_cast<std::size_t>(j)];
        }
    }
    return Rational(0);
}

ValidationReport validate(const BidSpace& space) {
    ValidationReport r;
    const auto& b = space.bids;
    if (b.empty()) {
        r.violations.push_back("bid space is empty");
        return r;
    }
    if (b.front() != 0) r.violations.push_back("bid space must contain 0 as its smallest bid");
    for (std::size_t k = 0; k < b.size(); ++k) {
        if (b[k] < 0 || b[k] > 1) r.violations.push_back("bid " + b[k].str() + " outside [0,1]");
        if (k > 0 && !(b[k - 1] < b[k])) r.violations.push_back("bids not strictly increasing at position " + std::to_string(k));
    }
    return r;
}

ValidationReport validate(const DfpaInstance& inst) {
    ValidationReport r = validate(inst.bids);
    const auto& p = inst.prior;
    if (p.n < 1) r.violations.push_back("bidder count must be positive");
    if (static_cast<int>(p.value_spaces.size()) != p.n) {
        r.violations.push_back("expected " + std::to_string(p.n) + " value spaces");
        return r;
    }
    for (int i = 0; i < p.n; ++i) check_sorted_space(p.value_spaces[static_cast<std::size_t>(i)], "bidder " + std::to_string(i), r.violations);
    if (p.support.empty()) r.violations.push_back("empty support");
    std::set<std::vector<Rational>> seen;
    Rational total(0);
    for (std::size_t s = 0; s < p.support.size(); ++s) {
        const auto& pt = p.support[s];
        std::string where = "support point " + std::to_string(s);
        if (static_cast<int>(pt.values.size()) != p.n) {
            r.violations.push_back(where + ": tuple arity differs from n");
            continue;
        }
        for (int i = 0; i < p.n; ++i) {
            if (value_index(p.value_spaces[static_cast<std::size_t>(i)], pt.values[static_cast<std::size_t>(i)]) < 0) {
                r.violations.push_back(where + ": component " + std::to_string(i) + " not in its value space");
            }
        }
        if (pt.mass.sign() <= 0) r.violations.push_back(where + ": mass must be strictly positive");
        if (!seen.insert(pt.values).second) r.violations.push_back(where + ": duplicate tuple " + fmt_tuple(pt.values));
        total += pt.mass;
    }
    if (total != 1) r.violations.push_back("total mass " + total.str() + " != 1");
    return r;
}

ValidationReport validate(const SymDfpaInstance& inst) {
    ValidationReport r = validate(inst.bids);
    const auto& p = inst.prior;
    if (p.groups.empty()) r.violations.push_back("no groups");
    for (int g : p.groups) {
        if (g < 1) r.violations.push_back("group sizes must be positive");
    }
    if (!r.ok()) return r;
    if (p.value_spaces.size() != p.groups.size()) {
        r.violations.push_back("expected one value space per group");
        return r;
    }
    for (std::size_t g = 0; g < p.groups.size(); ++g) check_sorted_space(p.value_spaces[g], "group " + std::to_string(g), r.violations);
    const int n = p.n();
    auto starts = block_starts(p.groups);
    if (p.support.empty()) r.violations.push_back("empty support");
    std::set<std::vector<Rational>> seen;
    Rational total(0);
    for (std::size_t s = 0; s < p.support.size(); ++s) {
        const auto& pt = p.support[s];
        std::string where = "support point " + std::to_string(s);
        if (static_cast<int>(pt.values.size()) != n) {
            r.violations.push_back(where + ": tuple arity differs from n");
            continue;
        }
        bool canonical = true;
        for (std::size_t g = 0; g < p.groups.size(); ++g) {
            for (int k = starts[g]; k < starts[g + 1]; ++k) {
                if (value_index(p.value_spaces[g], pt.values[static_cast<std::size_t>(k)]) < 0) {
                    r.violations.push_back(where + ": component " + std::to_string(k) + " not in its group value space");
                }
                if (k > starts[g] && pt.values[static_cast<std::size_t>(k - 1)] < pt.values[static_cast<std::size_t>(k)]) canonical = false;
            }
        }
        if (!canonical) {
            r.violations.push_back(where + ": tuple " + fmt_tuple(pt.values) + " is not canonical (blocks must be non-increasing)");
            continue;
        }
        if (pt.mass.sign() <= 0) r.violations.push_back(where + ": mass must be strictly positive");
        if (!seen.insert(pt.values).second) r.violations.push_back(where + ": duplicate tuple " + fmt_tuple(pt.values));
        total += multiplicity(pt.values, p.groups) * pt.mass;
    }
    if (total != 1) r.violations.push_back("total mass " + total.str() + " != 1");
    return r;
}

ValidationReport validate(const BoxInstance& inst) {
    ValidationReport r = validate(inst.bids);
    const auto& d = inst.density;
    if (d.n < 1) r.violations.push_back("bidder count must be positive");
    if (d.symmetric()) {
        int sum = 0;
        for (int g : d.groups) {
            if (g < 1) r.violations.push_back("group sizes must be positive");
            sum += g;
        }
        if (sum != d.n) r.violations.push_back("group sizes do not add up to n");
    }
    if (d.boxes.empty()) r.violations.push_back("no boxes");
    if (!r.ok()) return r;
    for (std::size_t k = 0; k < d.boxes.size(); ++k) {
        const auto& b = d.boxes[k];
        std::string where = "box " + std::to_string(k);
        if (static_cast<int>(b.lo.size()) != d.n || static_cast<int>(b.hi.size()) != d.n) {
            r.violations.push_back(where + ": dimension differs from n");
            continue;
        }
        for (int j = 0; j < d.n; ++j) {
            const auto& lo = b.lo[static_cast<std::size_t>(j)];
            const auto& hi = b.hi[static_cast<std::size_t>(j)];
            if (lo < 0 || hi > 1 || !(lo < hi)) {
                r.violations.push_back(where + ": side " + std::to_string(j) + " must satisfy 0 <= lo < hi <= 1");
            }
        }
        if (b.weight.sign() < 0) r.violations.push_back(where + ": negative weight");
    }
    if (!r.ok()) return r;
    Rational total = total_mass(d);
    if (total != 1) r.violations.push_back("total mass " + total.str() + " != 1");
    return r;
}

ValidationReport validate(const IidInstance& inst) {
    ValidationReport r = validate(inst.bids);
    if (inst.n < 1) r.violations.push_back("bidder count must be positive");
    const auto& m = inst.marginal;
    if (m.breakpoints.size() < 2) {
        r.violations.push_back("need at least two breakpoints");
        return r;
    }
    if (m.breakpoints.front() != 0 || m.breakpoints.back() != 1) r.violations.push_back("breakpoints must start at 0 and end at 1");
    for (std::size_t k = 1; k < m.breakpoints.size(); ++k) {
        if (!(m.breakpoints[k - 1] < m.breakpoints[k])) r.violations.push_back("breakpoints not strictly increasing");
    }
    if (m.densities.size() + 1 != m.breakpoints.size()) {
        r.violations.push_back("expected one density per piece");
        return r;
    }
    Rational total(0);
    for (std::size_t j = 0; j < m.densities.size(); ++j) {
        if (m.densities[j].sign() < 0) r.violations.push_back("negative density on piece " + std::to_string(j));
        total += (m.breakpoints[j + 1] - m.breakpoints[j]) * m.densities[j];
    }
    if (total != 1) r.violations.push_back("total mass " + total.str() + " != 1");
    return r;
}

ValidationReport validate(const Instance& inst) {
    return std::visit([](const auto& x) { return validate(x); }, inst);
}

ValidationReport validate(const PureStrategy& s, int values, int bids) {
    ValidationReport r;
    if (static_cast<int>(s.bid.size()) != values) {
        r.violations.push_back("pure strategy must assign a bid to each of the " + std::to_string(values) + " values");
        return r;
    }
    for (int b : s.bid) {
        if (b < 0 || b >= bids) r.violations.push_back("bid index out of range");
    }
    return r;
}

ValidationReport validate(const MixedStrategy& s, int values, int bids) {
    ValidationReport r;
    if (static_cast<int>(s.dist.size()) != values) {
        r.violations.push_back("mixed strategy must give a distribution for each of the " + std::to_string(values) + " values");
        return r;
    }
    for (std::size_t v = 0; v < s.dist.size(); ++v) {
        const auto& row = s.dist[v];
        if (static_cast<int>(row.size()) != bids) {
            r.violations.push_back("row " + std::to_string(v) + " has wrong length");
            continue;
        }
        Rational sum(0);
        for (const auto& w : row) {
            if (w < 0 || w > 1) r.violations.push_back("row " + std::to_string(v) + " has a weight outside [0,1]");
            sum += w;
        }
        if (sum != 1) r.violations.push_back("row " + std::to_string(v) + " sums to " + sum.str());
    }
    return r;
}

ValidationReport validate(const JumpStrategy& s, const BidSpace& bids) {
    ValidationReport r;
    const int m = bids.size();
    if (static_cast<int>(s.x.size()) != m + 1) {
        r.violations.push_back("jump strategy needs |B|+1 = " + std::to_string(m + 1) + " thresholds");
        return r;
    }
    if (s.x.front() != 0 || s.x.back() != 1) r.violations.push_back("first threshold must be 0 and last must be 1");
    for (int k = 0; k < m; ++k) {
        if (s.x[static_cast<std::size_t>(k) + 1] < s.x[static_cast<std::size_t>(k)]) r.violations.push_back("thresholds not nondecreasing");
        if (s.x[static_cast<std::size_t>(k)] < bids[k]) {
            r.violations.push_back("threshold " + std::to_string(k) + " below its bid (overbidding)");
        }
    }
    return r;
}

void require_valid(const ValidationReport& report, const std::string& what) {
    if (report.ok()) return;
    std::string msg = what + " is invalid:";
    for (const auto& v : report.violations) msg += "\n  - " + v;
    fail(ErrorKind::Validation, msg);
}

int value_index(const std::vector<Rational>& space, const Rational& v) {
    auto it = std::lower_bound(space.begin(), space.end(), v);
    if (it == space.end() || *it != v) return -1;
    return static_cast<int>(it - space.begin());
}

bool in_interval(const Rational& v, const Rational& lo, const Rational& hi) {
    if (v < lo) return false;
    return v < hi || (v == hi && hi == 1);
}

Rational overlap(const Rational& lo, const Rational& hi, const Rational& a, const Rational& b) {
    const Rational& l = std::max(lo, a);
    const Rational& h = std::min(hi, b);
    return l < h ? h - l : Rational(0);
}

int jump_bid_index(const JumpStrategy& s, const Rational& v) {
    const int m = static_cast<int>(s.x.size()) - 1;
    for (int k = 0; k < m; ++k) {
        if (v <= s.x[static_cast<std::size_t>(k) + 1]) return k;
    }
    return m - 1;
}

Rational jump_mass_at(const JumpStrategy& s, int k, const Rational& lo, const Rational& hi) {
    return overlap(lo, hi, s.x[static_cast<std::size_t>(k)], s.x[static_cast<std::size_t>(k) + 1]);
}

Rational jump_mass_below(const JumpStrategy& s, int k, const Rational& lo, const Rational& hi) {
    return overlap(lo, hi, Rational(0), s.x[static_cast<std::size_t>(k)]);
}

MixedStrategy to_mixed(const PureStrategy& s, int bids) {
    MixedStrategy m;
    m.dist.assign(s.bid.size(), std::vector<Rational>(static_cast<std::size_t>(bids), Rational(0)));
    for (std::size_t v = 0; v < s.bid.size(); ++v) m.dist[v][static_cast<std::size_t>(s.bid[v])] = 1;
    return m;
}

Rational multiplicity(const std::vector<Rational>& tuple, const std::vector<int>& groups) {
    auto starts = block_starts(groups);
    if (starts.back() != static_cast<int>(tuple.size())) fail(ErrorKind::Domain, "tuple arity does not match the groups");
    Rational m(1);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        m *= factorial(static_cast<unsigned>(groups[g]));
        int run = 1;
        for (int k = starts[g] + 1; k <= starts[g + 1]; ++k) {
            bool same = k < starts[g + 1] && tuple[static_cast<std::size_t>(k)] == tuple[static_cast<std::size_t>(k - 1)];
            if (k < starts[g + 1] && tuple[static_cast<std::size_t>(k - 1)] < tuple[static_cast<std::size_t>(k)]) {
                fail(ErrorKind::Domain, "tuple " + fmt_tuple(tuple) + " is not canonical");
            }
            if (same) {
                ++run;
            } else {
                m /= factorial(static_cast<unsigned>(run));
                run = 1;
            }
        }
    }
    return m;
}

DiscretePrior expand_symmetric(const SymmetricDiscretePrior& sym) {
    DiscretePrior out;
    out.n = sym.n();
    for (std::size_t g = 0; g < sym.groups.size(); ++g) {
        for (int k = 0; k < sym.groups[g]; ++k) out.value_spaces.push_back(sym.value_spaces[g]);
    }
    for (const auto& pt : sym.support) {
        for_each_group_permutation(pt.values, sym.groups, [&](const std::vector<Rational>& perm) {
            out.support.push_back({perm, pt.mass});
        });
    }
    return out;
}

BoxDensity expand_symmetric(const BoxDensity& boxes) {
    if (!boxes.symmetric()) return boxes;
    BoxDensity out;
    out.n = boxes.n;
    using Side = std::pair<Rational, Rational>;
    for (const auto& box : boxes.boxes) {
        std::vector<Side> sides;
        for (int j = 0; j < boxes.n; ++j) sides.emplace_back(box.lo[static_cast<std::size_t>(j)], box.hi[static_cast<std::size_t>(j)]);
        for_each_group_permutation(sides, boxes.groups, [&](const std::vector<Side>& perm) {
            Box b;
            b.weight = box.weight;
            for (const auto& s : perm) {
                b.lo.push_back(s.first);
                b.hi.push_back(s.second);
            }
            out.boxes.push_back(std::move(b));
        });
    }
    return out;
}

DfpaInstance expand_symmetric(const SymDfpaInstance& inst) { return {inst.bids, expand_symmetric(inst.prior)}; }
BoxInstance expand_symmetric(const BoxInstance& inst) { return {inst.bids, expand_symmetric(inst.density)}; }

BoxInstance iid_to_boxes(const IidInstance& inst) {
    BoxInstance out;
    out.bids = inst.bids;
    out.density.n = inst.n;
    out.density.groups = {inst.n};
    std::vector<int> pieces;
    for (int j = inst.marginal.pieces() - 1; j >= 0; --j) {
        if (inst.marginal.densities[static_cast<std::size_t>(j)].sign() > 0) pieces.push_back(j);
    }
    // Non-increasing multisets of piece indices, one canonical box each.
    std::vector<std::size_t> pick(static_cast<std::size_t>(inst.n), 0);
    while (true) {
        Box b;
        b.weight = 1;
        for (std::size_t c = 0; c < pick.size(); ++c) {
            int j = pieces[pick[c]];
            b.lo.push_back(inst.marginal.breakpoints[static_cast<std::size_t>(j)]);
            b.hi.push_back(inst.marginal.breakpoints[static_cast<std::size_t>(j) + 1]);
            b.weight *= inst.marginal.densities[static_cast<std::size_t>(j)];
        }
        out.density.boxes.push_back(std::move(b));
        // next multiset with pick[0] <= pick[1] <= ... (pieces sorted descending)
        int c = inst.n - 1;
        while (c >= 0 && pick[static_cast<std::size_t>(c)] + 1 == pieces.size()) --c;
        if (c < 0) break;
        std::size_t nv = pick[static_cast<std::size_t>(c)] + 1;
        for (int d = c; d < inst.n; ++d) pick[static_cast<std::size_t>(d)] = nv;
    }
    return out;
}

std::vector<Rational> marginal(const DiscretePrior& prior, int i) {
    if (i < 0 || i >= prior.n) fail(ErrorKind::Domain, "bidder index " + std::to_string(i) + " out of range");
    const auto& space = prior.value_spaces[static_cast<std::size_t>(i)];
    std::vector<Rational> f(space.size(), Rational(0));
    for (const auto& pt : prior.support) {
        int k = value_index(space, pt.values[static_cast<std::size_t>(i)]);
        f[static_cast<std::size_t>(k)] += pt.mass;
    }
    return f;
}

std::vector<Rational> marginal(const SymmetricDiscretePrior& prior, int i) {
    if (i < 0 || i >= prior.n()) fail(ErrorKind::Domain, "bidder index " + std::to_string(i) + " out of range");
    const int g = prior.group_of(i);
    const int start = prior.group_start(g);
    const int size = prior.groups[static_cast<std::size_t>(g)];
    const auto& space = prior.value_spaces[static_cast<std::size_t>(g)];
    std::vector<Rational> f(space.size(), Rational(0));
    for (const auto& pt : prior.support) {
        Rational m = multiplicity(pt.values, prior.groups) * pt.mass / Rational(size);
        for (int k = start; k < start + size; ++k) {
            f[static_cast<std::size_t>(value_index(space, pt.values[static_cast<std::size_t>(k)]))] += m;
        }
    }
    return f;
}

IIDMarginal marginal(const BoxDensity& density, int i) {
    if (i < 0 || i >= density.n) fail(ErrorKind::Domain, "bidder index " + std::to_string(i) + " out of range");
    BoxDensity full = expand_symmetric(density);
    IIDMarginal m;
    m.breakpoints = axis_breakpoints(full, i);
    for (std::size_t c = 0; c + 1 < m.breakpoints.size(); ++c) {
        Rational mid = (m.breakpoints[c] + m.breakpoints[c + 1]) / Rational(2);
        Rational f(0);
        for (const auto& box : full.boxes) {
            if (in_interval(mid, box.lo[static_cast<std::size_t>(i)], box.hi[static_cast<std::size_t>(i)])) {
                f += box.weight * box_side_product(box, i);
            }
        }
        m.densities.push_back(f);
    }
    return m;
}

std::vector<SupportPoint> conditional(const DiscretePrior& prior, int i, const Rational& v) {
    auto f = marginal(prior, i);
    int k = value_index(prior.value_spaces[static_cast<std::size_t>(i)], v);
    if (k < 0 || f[static_cast<std::size_t>(k)].is_zero()) fail(ErrorKind::Domain, "value outside marginal support: " + v.str());
    std::vector<SupportPoint> out;
    for (const auto& pt : prior.support) {
        if (pt.values[static_cast<std::size_t>(i)] != v) continue;
        SupportPoint c;
        for (int j = 0; j < prior.n; ++j) {
            if (j != i) c.values.push_back(pt.values[static_cast<std::size_t>(j)]);
        }
        c.mass = pt.mass / f[static_cast<std::size_t>(k)];
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Box> conditional(const BoxDensity& density, int i, const Rational& v) {
    if (i < 0 || i >= density.n) fail(ErrorKind::Domain, "bidder index " + std::to_string(i) + " out of range");
    BoxDensity full = expand_symmetric(density);
    std::vector<Box> out;
    Rational f(0);
    for (const auto& box : full.boxes) {
        if (!in_interval(v, box.lo[static_cast<std::size_t>(i)], box.hi[static_cast<std::size_t>(i)]) || box.weight.is_zero()) continue;
        f += box.weight * box_side_product(box, i);
        Box c;
        c.weight = box.weight;
        for (int j = 0; j < density.n; ++j) {
            if (j == i) continue;
            c.lo.push_back(box.lo[static_cast<std::size_t>(j)]);
            c.hi.push_back(box.hi[static_cast<std::size_t>(j)]);
        }
        out.push_back(std::move(c));
    }
    if (f.is_zero()) fail(ErrorKind::Domain, "value outside marginal support: " + v.str());
    for (auto& c : out) c.weight /= f;
    return out;
}

Rational total_mass(const BoxDensity& density) {
    Rational total(0);
    for (const auto& box : density.boxes) {
        Rational m = box.weight * box_side_product(box, -1);
        if (density.symmetric()) {
            // distinct permutations of the box's sides within each group
            using Side = std::pair<Rational, Rational>;
            std::vector<Side> sides;
            for (int j = 0; j < density.n; ++j) sides.emplace_back(box.lo[static_cast<std::size_t>(j)], box.hi[static_cast<std::size_t>(j)]);
            auto starts = block_starts(density.groups);
            for (std::size_t g = 0; g < density.groups.size(); ++g) {
                std::map<Side, int> counts;
                for (int k = starts[g]; k < starts[g + 1]; ++k) ++counts[sides[static_cast<std::size_t>(k)]];
                m *= factorial(static_cast<unsigned>(density.groups[g]));
                for (const auto& [side, c] : counts) m /= factorial(static_cast<unsigned>(c));
            }
        }
        total += m;
    }
    return total;
}

Rational density_at(const BoxDensity& density, const std::vector<Rational>& point) {
    BoxDensity full = expand_symmetric(density);
    Rational f(0);
    for (const auto& box : full.boxes) {
        bool inside = true;
        for (int j = 0; j < full.n && inside; ++j) {
            inside = in_interval(point[static_cast<std::size_t>(j)], box.lo[static_cast<std::size_t>(j)], box.hi[static_cast<std::size_t>(j)]);
        }
        if (inside) f += box.weight;
    }
    return f;
}

std::vector<Rational> axis_breakpoints(const BoxDensity& density, int i) {
    BoxDensity full = expand_symmetric(density);
    std::vector<Rational> pts{Rational(0), Rational(1)};
    for (const auto& box : full.boxes) {
        pts.push_back(box.lo[static_cast<std::size_t>(i)]);
        pts.push_back(box.hi[static_cast<std::size_t>(i)]);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace fpa
