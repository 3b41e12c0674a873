#include "polysz/pet.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "polysz/budget.hpp"
#include "polysz/errors.hpp"
#include "polysz/parallel.hpp"

namespace polysz {

// ---- weight pairs ---------------------------------------------------------

WeightPair::WeightPair(std::uint64_t m_, std::vector<std::uint64_t> s) : m(m_), seq(std::move(s)) {
    while (!seq.empty() && seq.back() == 0) seq.pop_back();
}

std::uint64_t WeightPair::total() const {
    std::uint64_t t = 0;
    for (auto v : seq) t += v;
    return t;
}

bool WeightPair::valid() const { return m >= 1 && total() <= m; }

std::string WeightPair::to_string() const {
    std::ostringstream os;
    os << "(" << m << ",(";
    for (std::size_t i = 0; i < seq.size(); ++i) os << (i ? "," : "") << seq[i];
    os << (seq.empty() ? "0" : "") << "))";
    return os.str();
}

const char* to_string(PairClass c) {
    switch (c) {
        case PairClass::Deg0: return "deg0";
        case PairClass::Deg1: return "deg1";
        default: return "general";
    }
}

PairClass classify(const WeightPair& p, unsigned n) {
    if (p.seq.empty()) return PairClass::Deg0;
    if (p.seq.size() <= n) return PairClass::Deg1;
    return PairClass::General;
}

bool is_lonely(const WeightPair& p, unsigned n) { return p.total() == 1 && p.seq.size() > n; }

namespace {

std::size_t leading_zeros(const WeightPair& p) {
    std::size_t s = 0;
    while (s < p.seq.size() && p.seq[s] == 0) ++s;
    return s;
}

void require_pair(const WeightPair& p) {
    if (!p.valid()) throw SpecViolation("weight pair " + p.to_string() + " is not in the state space");
}

}  // namespace

bool is_permissible(const WeightPair& a, const WeightPair& b, unsigned n) {
    require_pair(a);
    if (a.seq.empty()) throw Deg0Input("permissible operation on a degree-0 pair");
    if (!b.valid() || b.seq.empty()) return false;
    if (b.m < a.m || b.m > 2 * a.m) return false;
    std::size_t prefix;
    if (is_lonely(a, n)) {
        prefix = a.seq.size() - 1;  // i_1..i_{s-1}, zeros from s on
        if (b.seq.size() > prefix) return false;
    } else {
        std::size_t sp = leading_zeros(a);
        prefix = sp;
        std::size_t len = std::max(a.seq.size(), b.seq.size());
        for (std::size_t i = sp; i < len; ++i) {
            std::uint64_t want = a.a(i + 1) - (i == sp ? 1 : 0);
            if (b.a(i + 1) != want) return false;
        }
    }
    std::uint64_t fill = 0;
    for (std::size_t i = 1; i <= prefix; ++i) fill += b.a(i);
    return fill <= 2 * a.m;
}

namespace {

// Calls emit(b) for every successor with m' <= m_cap.
void for_each_successor(const WeightPair& a, unsigned n, std::uint64_t m_cap,
                        const std::function<void(const WeightPair&)>& emit) {
    if (a.seq.empty()) throw Deg0Input("permissible operation on a degree-0 pair");
    require_pair(a);
    bool lonely = is_lonely(a, n);
    std::size_t prefix = lonely ? a.seq.size() - 1 : leading_zeros(a);
    std::vector<std::uint64_t> tail;  // entries after the prefix
    if (!lonely) {
        tail.assign(a.seq.begin() + static_cast<std::ptrdiff_t>(prefix), a.seq.end());
        tail[0] -= 1;
    }
    std::uint64_t tail_sum = 0;
    for (auto v : tail) tail_sum += v;
    std::uint64_t hi = std::min(2 * a.m, m_cap);
    std::vector<std::uint64_t> fill(prefix, 0);
    for (std::uint64_t mp = a.m; mp <= hi; ++mp) {
        if (tail_sum > mp) continue;
        std::uint64_t room = std::min<std::uint64_t>(2 * a.m, mp - tail_sum);
        // enumerate fill vectors with sum <= room
        std::function<void(std::size_t, std::uint64_t)> rec = [&](std::size_t i, std::uint64_t left) {
            if (i == prefix) {
                std::vector<std::uint64_t> s(fill);
                s.insert(s.end(), tail.begin(), tail.end());
                WeightPair b(mp, std::move(s));
                if (!b.seq.empty()) emit(b);
                return;
            }
            for (std::uint64_t v = 0; v <= left; ++v) {
                fill[i] = v;
                rec(i + 1, left - v);
            }
            fill[i] = 0;
        };
        rec(0, room);
    }
}

}  // namespace

std::vector<WeightPair> permissible_successors(const WeightPair& p, unsigned n) {
    std::vector<WeightPair> out;
    for_each_successor(p, n, UINT64_MAX / 4, [&](const WeightPair& b) { out.push_back(b); });
    std::sort(out.begin(), out.end());
    return out;
}

// ---- t_bound --------------------------------------------------------------

namespace {

struct Sat {
    BigInt v;
    bool sat = false;
};

Sat saturate(BigInt v) {
    if (boost::multiprecision::msb(v) >= TBound::kSaturationBits) return {0, true};
    return {std::move(v), false};
}

Sat g_fn(unsigned d, const Sat& x);

Sat f_fn(unsigned d, const Sat& x) {
    if (x.sat) return x;
    if (d == 1) return x;
    // f'(m) = m + sum_{i=0}^{m} f((2g)^i(m))
    BigInt total = x.v;
    Sat it = x;
    for (BigInt i = 0; i <= x.v; ++i) {
        Sat term = f_fn(d - 1, it);
        if (term.sat) return {0, true};
        total += term.v;
        if (boost::multiprecision::msb(total) >= TBound::kSaturationBits) return {0, true};
        if (i == x.v) break;
        Sat gv = g_fn(d - 1, it);
        if (gv.sat) return {0, true};
        it = saturate(2 * gv.v);
        if (it.sat) return {0, true};
    }
    return {total, false};
}

Sat g_fn(unsigned d, const Sat& x) {
    if (x.sat) return x;
    if (d == 1) {
        if (x.v >= TBound::kSaturationBits) return {0, true};
        unsigned e = x.v.convert_to<unsigned>();
        return saturate(x.v << e);
    }
    // g'(m) = (2g)^{m+1}(m)
    Sat it = x;
    for (BigInt i = 0; i <= x.v; ++i) {
        Sat gv = g_fn(d - 1, it);
        if (gv.sat) return gv;
        it = saturate(2 * gv.v);
        if (it.sat) return it;
    }
    return it;
}

}  // namespace

std::string TBound::to_string() const {
    if (saturated) return ">2^" + std::to_string(kSaturationBits);
    return value.str();
}

TBound t_bound(std::uint64_t m, unsigned d) {
    if (m < 1 || d < 1) throw SpecViolation("t_bound: m and d must be >= 1");
    Sat r = f_fn(d, Sat{BigInt(m), false});
    TBound t;
    t.saturated = r.sat;
    t.value = r.v;
    return t;
}

std::uint64_t max_path_length(const WeightPair& p, unsigned n, std::uint64_t cap, std::uint64_t max_states) {
    require_pair(p);
    if (p.seq.empty()) throw Deg0Input("max_path_length: degree-0 pair");
    if (p.m > cap) throw SpecViolation("max_path_length: start pair exceeds the m cap");
    std::map<WeightPair, std::uint64_t> memo;
    std::function<std::uint64_t(const WeightPair&)> longest = [&](const WeightPair& a) -> std::uint64_t {
        if (classify(a, n) != PairClass::General) return 0;
        auto it = memo.find(a);
        if (it != memo.end()) return it->second;
        if (memo.size() >= max_states)
            throw SearchBudgetExceeded("max_path_length: more than " + std::to_string(max_states) + " states");
        std::uint64_t best = 0;
        std::vector<WeightPair> succ;
        for_each_successor(a, n, cap, [&](const WeightPair& b) { succ.push_back(b); });
        for (auto& b : succ) best = std::max(best, 1 + longest(b));
        memo.emplace(a, best);
        return best;
    };
    return longest(p);
}

// ---- selection ------------------------------------------------------------

Selection select_differencing(const std::vector<MemberInfo>& mem, SelectionPolicy policy,
                              std::optional<std::size_t> forced) {
    std::size_t m = mem.size();
    if (m == 0) throw SpecViolation("select_differencing: empty family");
    std::size_t last = m - 1;
    for (auto& x : mem)
        if (x.degree < 1) throw ConstantMember("select_differencing: constant member");
    for (auto& x : mem)
        if (x.weight > mem[last].weight) throw HypothesisViolation("selection", "last member does not have maximal weight");

    auto pick = [&](const std::vector<std::size_t>& cand) {
        if (forced) {
            if (std::find(cand.begin(), cand.end(), *forced) == cand.end())
                throw SpecViolation("forced differencing member " + std::to_string(*forced) + " is not eligible");
            return *forced;
        }
        if (policy == SelectionPolicy::Strict && cand.size() > 1) {
            std::ostringstream os;
            os << "candidates";
            for (auto c : cand) os << " " << c;
            throw AmbiguousSelection(os.str());
        }
        return cand.front();
    };

    Selection s;
    std::vector<std::size_t> linear;
    for (std::size_t i = 0; i < m; ++i)
        if (mem[i].degree == 1) linear.push_back(i);

    if (!linear.empty()) {
        std::size_t piv = pick(linear);
        s.order.push_back(piv);
        for (auto i : linear)
            if (i != piv) s.order.push_back(i);
        std::uint64_t wmin = UINT64_MAX;
        for (std::size_t i = 0; i < m; ++i)
            if (mem[i].degree > 1) wmin = std::min(wmin, mem[i].weight);
        std::optional<std::size_t> pl;
        for (std::size_t i = 0; i < last && !pl; ++i)
            if (mem[i].degree > 1 && mem[i].weight == wmin) pl = i;
        if (pl) s.order.push_back(*pl);
        for (std::size_t i = 0; i < last; ++i)
            if (mem[i].degree > 1 && (!pl || i != *pl)) s.order.push_back(i);
        s.order.push_back(last);
        s.ell = linear.size() + 1;
        return s;
    }
    if (m == 1) {
        if (forced && *forced != 0) throw SpecViolation("forced differencing member is not eligible");
        s.order = {0};
        return s;
    }
    std::uint64_t wmin = UINT64_MAX;
    for (auto& x : mem) wmin = std::min(wmin, x.weight);
    std::vector<std::size_t> cand, distinct_lc;
    for (std::size_t i = 0; i < last; ++i)
        if (mem[i].weight == wmin) cand.push_back(i);
    for (auto i : cand)
        if (mem[i].lc != mem[last].lc) distinct_lc.push_back(i);
    if (!distinct_lc.empty()) cand = distinct_lc;
    std::size_t piv = pick(cand);
    s.order.push_back(piv);
    for (std::size_t i = 0; i < last; ++i)
        if (i != piv) s.order.push_back(i);
    s.order.push_back(last);
    s.ell = 1;
    return s;
}

// ---- numeric inductive step ----------------------------------------------

namespace {

MemberInfo info_of(const IntPoly& p, std::uint64_t N) {
    ZnProfile z = zn_profile(p, N);
    if (z.deg_zn < 1) throw ConstantMember("member " + p.to_string() + " is constant mod " + std::to_string(N));
    return {z.deg_zn, *z.weight, std::to_string(*z.leading_coeff)};
}

std::vector<BigInt> to_big(const ZnVec& h) {
    std::vector<BigInt> v;
    for (auto x : h) v.emplace_back(x);
    return v;
}

std::uint64_t wz(const IntPoly& p, std::uint64_t N) {
    auto z = zn_profile(p, N);
    if (!z.weight) throw HypothesisViolation("pet_step", "output member " + p.to_string() + " is constant");
    return *z.weight;
}

}  // namespace

FamilyStep difference_family(const std::vector<IntPoly>& P, std::uint64_t N, const ZnVec& h,
                             SelectionPolicy policy, std::optional<std::size_t> forced_pivot) {
    if (P.empty()) throw SpecViolation("difference_family: empty family");
    unsigned n = P[0].n_vars();
    if (h.size() != n) throw SpecViolation("difference_family: shift has the wrong length");
    std::vector<IntPoly> Pm;
    std::vector<MemberInfo> info;
    for (auto& p : P) {
        Pm.push_back(p.reduce_mod(N));
        info.push_back(info_of(Pm.back(), N));
    }
    FamilyStep fs;
    fs.sel = select_differencing(info, policy, forced_pivot);
    const auto& ord = fs.sel.order;
    std::size_t m = Pm.size(), ell = fs.sel.ell;
    for (auto i : ord) fs.reindexed.push_back(Pm[i]);
    const auto& R = fs.reindexed;
    auto hb = to_big(h);
    std::vector<BigInt> zero(n, 0);
    auto fidx = [&](std::size_t j) { return ord[j - 1] + 1; };  // reindexed 1-based -> original f index
    auto shift_a = [&](std::size_t j) {
        return mod(R[j - 1].eval(hb) - R[j - 1].eval(zero), N);
    };

    if (ell >= 2) fs.g.push_back({GSource::Delta, fidx(1), shift_a(1)});
    else fs.g.push_back({GSource::Conj, fidx(1), 0});
    for (std::size_t i = 2; i + 1 <= ell; ++i) {
        fs.Q.push_back((R[i - 1] - R[0]).reduce_mod(N));
        fs.g.push_back({GSource::Delta, fidx(i), shift_a(i)});
    }
    for (std::size_t j = ell; j <= m; ++j) {
        if (!(ell == 1 && j == 1)) {
            fs.Q.push_back((R[j - 1] - R[0]).reduce_mod(N));
            fs.g.push_back({GSource::Conj, fidx(j), 0});
        }
        fs.Q.push_back((R[j - 1].shift(hb) - R[0]).reduce_mod(N));
        fs.g.push_back({GSource::Plain, fidx(j), 0});
    }

    if (ell >= 2) {
        fs.branch = 'a';
    } else if (info[ord[m - 1]].weight > info[ord[0]].weight) {
        fs.branch = 'b';
    } else if (info[ord[0]].lc != info[ord[m - 1]].lc) {
        fs.branch = 'c';
    } else {
        std::uint64_t r = 0;
        for (auto& q : fs.Q) r = std::max(r, wz(q, N));
        if (wz(fs.Q.back(), N) == r) {
            fs.branch = 'd';
        } else {
            fs.branch = 'e';
            std::size_t ip = 0;
            while (wz(fs.Q[ip], N) != r) ++ip;
            IntPoly qi = fs.Q[ip];
            for (std::size_t i = 0; i < fs.Q.size(); ++i)
                fs.Q[i] = (i == ip ? -qi : fs.Q[i] - qi).reduce_mod(N);
            std::swap(fs.g[0], fs.g[ip + 1]);
            fs.i_prime = ip + 1;
        }
    }
    return fs;
}

std::set<ZnVec> exclusion_set(const std::vector<IntPoly>& P, std::size_t ell, std::uint64_t N,
                              std::uint64_t H, EqMethod method) {
    if (P.empty()) throw SpecViolation("exclusion_set: empty family");
    unsigned n = P[0].n_vars();
    auto window = vdc_window(N, H, n);
    std::vector<char> bad(window.size(), 0);
    parallel_for(window.size(), [&](std::uint64_t w) {
        std::vector<IntPoly> fam;
        for (auto& p : P) fam.push_back(p.reduce_mod(N));
        auto hb = to_big(window[w]);
        for (std::size_t j = ell; j <= P.size(); ++j) fam.push_back(P[j - 1].shift(hb).reduce_mod(N));
        bad[w] = !essentially_distinct(fam, N, method).ok;
    });
    std::set<ZnVec> out;
    for (std::size_t w = 0; w < window.size(); ++w)
        if (bad[w]) out.insert(window[w]);
    return out;
}

namespace {

std::string label_of(const GSource& s, const std::vector<std::string>& labels) {
    const std::string& f = labels[s.f];
    switch (s.kind) {
        case GSource::Delta: return "D[" + std::to_string(s.a) + "](" + f + ")";
        case GSource::Conj: return "conj(" + f + ")";
        default: return f;
    }
}

FunctionOnRing build_g(const GSource& s, const std::vector<FunctionOnRing>& F) {
    const FunctionOnRing& f = F[s.f];
    switch (s.kind) {
        case GSource::Delta: {
            Elem a = f.ring().embed(BigInt(s.a));
            return f.conj() * f.translate(a);
        }
        case GSource::Conj: return f.conj();
        default: return f;
    }
}

PetStepResult run_step(const RingPtr& ring, const std::vector<IntPoly>& family, const std::vector<FunctionOnRing>& F,
                       std::uint64_t H, const PetOptions& opt) {
    const Ring& Rg = *ring;
    const std::string stage = "pet_step";
    std::size_t m = family.size();
    if (m == 0) throw HypothesisViolation(stage, "empty family");
    if (F.size() != m + 1) throw SpecViolation("pet_step: need m + 1 functions");
    unsigned n = family[0].n_vars();
    for (auto& p : family)
        if (p.n_vars() != n) throw SpecViolation("pet_step: mixed n_vars");
    for (auto& f : F) {
        if (&f.ring() != &Rg) throw SpecViolation("pet_step: function on a different ring");
        if (!f.bounded_by_one()) throw HypothesisViolation(stage, "functions must be 1-bounded");
    }
    std::uint64_t N = Rg.characteristic(), lp = Rg.lpf();

    std::vector<IntPoly> Pm;
    for (auto& p : family) Pm.push_back(p.reduce_mod(N));
    auto ed = essentially_distinct(Pm, N);
    if (!ed.ok) {
        auto [i, j] = *ed.witness;
        throw HypothesisViolation(stage, "family is not essentially distinct (members " + std::to_string(i) + ", " +
                                             std::to_string(j) + ")");
    }
    unsigned k = 0;
    std::vector<MemberInfo> info;
    for (auto& p : Pm) {
        info.push_back(info_of(p, N));
        k = std::max<unsigned>(k, static_cast<unsigned>(info.back().degree));
    }
    if (k <= 1) throw HypothesisViolation(stage, "maximal degree k = " + std::to_string(k) + " must exceed 1");
    if (k >= lp) throw HypothesisViolation(stage, "k = " + std::to_string(k) + " >= lpf N = " + std::to_string(lp));
    for (auto& x : info)
        if (x.weight > info.back().weight)
            throw HypothesisViolation(stage, "last member does not have maximal weight");
    std::uint64_t M = family_height(Pm, N);
    if (M >= lp)
        throw HypothesisViolation(stage, "height " + std::to_string(M) + " >= lpf N = " + std::to_string(lp));
    std::uint64_t Hmin = std::max<std::uint64_t>(2, m * m), Hmax = (N + 1) / 2;
    if (H < Hmin || H > Hmax)
        throw HypothesisViolation(stage, "H = " + std::to_string(H) + " outside [" + std::to_string(Hmin) + ", " +
                                             std::to_string(Hmax) + "]");

    Selection sel = select_differencing(info, opt.policy, opt.forced_pivot);
    std::vector<IntPoly> R;
    for (auto i : sel.order) R.push_back(Pm[i]);
    auto excl = exclusion_set(R, sel.ell, N, H);

    // g(x, y) = prod_i f_i(x + P_i(y))
    std::uint64_t sz = Rg.size(), ny = Rg.tuple_count(n);
    require_budget(sat_mul(sat_mul(sz, ny), m), "pet_step");
    std::vector<cplx> g(sz * ny, 1.0);
    for (std::size_t i = 0; i < m; ++i) {
        auto tab = Rg.value_table(Pm[i]);
        const auto& f = F[i + 1];
        parallel_for(ny, [&](std::uint64_t y) {
            for (std::uint64_t x = 0; x < sz; ++x) g[x + sz * y] *= f(Rg.add(static_cast<Elem>(x), tab[y]));
        });
    }

    PetStepResult r;
    if (opt.forced_h) {
        const ZnVec& h = *opt.forced_h;
        if (h.size() != n) throw SpecViolation("pet_transform: shift has the wrong length");
        auto win = vdc_window(N, H, n);
        if (std::find(win.begin(), win.end(), h) == win.end())
            throw HypothesisViolation("pet_transform", "shift lies outside the window");
        if (excl.count(h)) throw HypothesisViolation("pet_transform", "shift lies in the exclusion set");
        r.selected_h = h;
        r.vdc_G = vdc_G(Rg, g, h, n);
    } else {
        VdcResult v = vdc_select_h(Rg, g, H, excl, n);
        r.selected_h = v.h;
        r.vdc_G = v.G;
    }
    r.excluded_size = excl.size();

    FamilyStep fs = difference_family(Pm, N, r.selected_h, opt.policy, sel.order[0]);
    std::vector<std::string> labels = opt.labels;
    if (labels.empty())
        for (std::size_t i = 0; i <= m; ++i) labels.push_back("f" + std::to_string(i));
    if (labels.size() != m + 1) throw SpecViolation("pet_step: need m + 1 labels");
    for (auto& s : fs.g) {
        r.g.push_back(build_g(s, F));
        r.new_function_labels.push_back(label_of(s, labels));
    }
    r.new_family = fs.Q;
    r.m_prime = static_cast<unsigned>(fs.Q.size());
    r.branch = fs.branch;
    r.M = M;
    r.H = H;
    r.k = k;

    LambdaQuery qP{ring, Pm, F, {}, {}};
    r.lhs = std::abs(lambda(qP));
    LambdaQuery qQ{ring, fs.Q, r.g, {}, {}};
    r.lambda_Q = std::abs(lambda(qQ));
    double s2 = std::pow(2.0, n / 2.0);
    r.rhs = s2 * (s2 * static_cast<double>(m) / std::sqrt(static_cast<double>(H)) + std::sqrt(r.lambda_Q));

    r.before = WeightPair(m, weight_sequence(Pm, N));
    r.after = WeightPair(r.m_prime, weight_sequence(fs.Q, N));
    r.checks.permissible = is_permissible(r.before, r.after, n);
    r.checks.distinct = essentially_distinct(fs.Q, N).ok;
    r.new_height = family_height(fs.Q, N);
    r.height_bound = boost::multiprecision::pow(BigInt(k + 1), 2 * k * n) * M *
                     boost::multiprecision::pow(BigInt(H), k);
    r.checks.height = BigInt(r.new_height) <= r.height_bound;
    r.checks.traceable = r.g.back().values() == F.back().values() && r.new_function_labels.back() == labels.back();
    r.checks.inequality = r.lhs <= r.rhs + 1e-8;
    bool shape = true;
    std::uint64_t wmax = 0;
    for (auto& q : fs.Q) {
        auto z = zn_profile(q, N);
        if (z.deg_zn > static_cast<int>(k) || !z.weight) shape = false;
        else wmax = std::max(wmax, *z.weight);
    }
    if (shape) shape = wz(fs.Q.back(), N) == wmax;
    r.checks.shape = shape;
    r.detail = std::move(fs);
    return r;
}

}  // namespace

PetStepResult pet_step(const RingPtr& ring, const std::vector<IntPoly>& family, const std::vector<FunctionOnRing>& F,
                       std::uint64_t H, const PetOptions& opt) {
    return run_step(ring, family, F, H, opt);
}

PetStepResult pet_transform(const RingPtr& ring, const std::vector<IntPoly>& family,
                            const std::vector<FunctionOnRing>& F, std::uint64_t H, const ZnVec& h, PetOptions opt) {
    opt.forced_h = h;
    return run_step(ring, family, F, H, opt);
}

// ---- matrix regularization ------------------------------------------------

namespace {

BigInt bmod(const BigInt& a, const BigInt& N) {
    BigInt r = a % N;
    if (r < 0) r += N;
    return r;
}

BigInt C_const(unsigned i, const BigInt& M0) {
    // C_{i+1} = 2^{3 * 2^i - 1} * M0^{2^i}
    if (i > 24) throw HypothesisViolation("matrix_regularize", "too many row operations");
    unsigned long long e = 1ULL << i;
    return (BigInt(1) << static_cast<unsigned>(3 * e - 1)) * boost::multiprecision::pow(M0, static_cast<unsigned>(e));
}

}  // namespace

BigInt big_height(const BigInt& x, const BigInt& N) {
    BigInt r = bmod(x, N);
    return std::min<BigInt>(r, N - r);
}

BigInt matrix_height(const BigMatrix& A, const BigInt& N) {
    BigInt h = 0;
    for (auto& row : A)
        for (auto& v : row) h = std::max(h, big_height(v, N));
    return h;
}

bool is_row_regular(const BigMatrix& A, const BigInt& N) {
    for (auto& row : A) {
        std::vector<BigInt> r;
        for (auto& v : row) {
            r.push_back(bmod(v, N));
            if (r.back() == 0) return false;
        }
        std::sort(r.begin(), r.end());
        if (std::adjacent_find(r.begin(), r.end()) != r.end()) return false;
    }
    return true;
}

BigMatrix replay_row_ops(BigMatrix A, const std::vector<RowOp>& ops, const BigInt& N) {
    for (auto& row : A)
        for (auto& v : row) v = bmod(v, N);
    for (auto& op : ops) {
        if (op.target >= A.size() || op.source >= A.size() || op.target == op.source)
            throw SpecViolation("replay_row_ops: bad row operation");
        for (std::size_t j = 0; j < A[op.target].size(); ++j)
            A[op.target][j] = bmod(A[op.target][j] + op.C * A[op.source][j], N);
    }
    return A;
}

RegularizeResult matrix_regularize(const BigMatrix& A0, const BigInt& N, const BigInt& M0) {
    const std::string stage = "matrix_regularize";
    if (N < 2) throw SpecViolation("matrix_regularize: N must be >= 2");
    if (A0.empty() || A0[0].empty()) throw SpecViolation("matrix_regularize: empty matrix");
    std::size_t n = A0.size(), m = A0[0].size();
    for (auto& row : A0)
        if (row.size() != m) throw SpecViolation("matrix_regularize: ragged matrix");
    BigMatrix A = replay_row_ops(A0, {}, N);
    RegularizeResult res;
    unsigned nm2 = static_cast<unsigned>(n * m * m);
    if (nm2 < 64) {
        // (8 M0)^{2^{nm^2}} is only formed when it is small enough to print
        if (nm2 <= 16) res.height_bound = boost::multiprecision::pow(8 * M0, 1U << nm2);
    }
    if (is_row_regular(A, N)) {
        res.B = A;
        res.height = matrix_height(A, N);
        return res;
    }
    for (std::size_t j = 0; j < m; ++j) {
        bool nz = false;
        for (std::size_t i = 0; i < n; ++i) nz = nz || A[i][j] != 0;
        if (!nz) throw HypothesisViolation(stage, "column " + std::to_string(j) + " is zero");
        for (std::size_t j2 = j + 1; j2 < m; ++j2) {
            bool same = true;
            for (std::size_t i = 0; i < n; ++i) same = same && A[i][j] == A[i][j2];
            if (same) throw HypothesisViolation(stage, "columns " + std::to_string(j) + " and " + std::to_string(j2) + " are identical");
        }
    }
    if (matrix_height(A, N) > M0) throw HypothesisViolation(stage, "an entry has height above M0");
    // M0^{2^{nm^2}} 2^{3 * 2^{nm^2}} < N
    double lhs_bits = std::ldexp(1.0, static_cast<int>(std::min(nm2, 1000U))) *
                      (std::log2(std::max(1.0, M0.convert_to<double>())) + 3.0);
    double n_bits = static_cast<double>(boost::multiprecision::msb(N)) + 1.0;
    if (nm2 > 30 || lhs_bits > n_bits + 1.0)
        throw HypothesisViolation(stage, "N is too small: need M0^{2^{nm^2}} 2^{3 * 2^{nm^2}} < N");
    unsigned E = 1U << nm2;
    if (boost::multiprecision::pow(M0, E) * (BigInt(1) << (3 * E)) >= N)
        throw HypothesisViolation(stage, "N is too small: need M0^{2^{nm^2}} 2^{3 * 2^{nm^2}} < N");
    if (res.height_bound == 0) res.height_bound = boost::multiprecision::pow(8 * M0, E);

    unsigned t = 0;
    auto apply = [&](std::size_t target, std::size_t source) {
        RowOp op{target, source, C_const(t, M0)};
        A = replay_row_ops(A, {op}, N);
        res.ops.push_back(op);
        ++t;
        if (t > nm2) throw std::logic_error("matrix_regularize: operation count exceeded n m^2");
    };
    // phase 1: clear zero entries
    for (;;) {
        bool found = false;
        for (std::size_t i = 0; i < n && !found; ++i)
            for (std::size_t j = 0; j < m && !found; ++j)
                if (A[i][j] == 0) {
                    std::size_t src = 0;
                    while (A[src][j] == 0) ++src;
                    apply(i, src);
                    found = true;
                }
        if (!found) break;
    }
    // phase 2: separate equal entries within a row
    for (;;) {
        bool found = false;
        for (std::size_t i = 0; i < n && !found; ++i)
            for (std::size_t j = 0; j < m && !found; ++j)
                for (std::size_t j2 = j + 1; j2 < m && !found; ++j2)
                    if (A[i][j] == A[i][j2]) {
                        std::size_t src = 0;
                        while (A[src][j] == A[src][j2]) ++src;
                        apply(i, src);
                        found = true;
                    }
        if (!found) break;
    }
    res.B = A;
    res.height = matrix_height(A, N);
    if (!is_row_regular(A, N) || res.height > res.height_bound)
        throw std::logic_error("matrix_regularize: postcondition failed");
    return res;
}

// ---- Us-control trace -----------------------------------------------------

std::uint64_t default_H(std::uint64_t lp, unsigned i) {
    std::uint64_t r = 1;
    while (r * r * r * r < lp) ++r;
    return (std::uint64_t{1} << (2 * i - 2)) * r;
}

namespace {

using Rational = boost::multiprecision::cpp_rational;

// Gauss-Jordan over Q on the n x m coefficient matrix; returns the rank and the
// largest numerator/denominator among the scale factors used.
std::pair<std::size_t, BigInt> gauss_jordan(std::vector<std::vector<Rational>> A) {
    std::size_t n = A.size(), m = A.empty() ? 0 : A[0].size();
    BigInt big = 1;
    auto note = [&](const Rational& a) {
        big = std::max<BigInt>(big, abs(boost::multiprecision::numerator(a)));
        big = std::max<BigInt>(big, abs(boost::multiprecision::denominator(a)));
    };
    std::size_t row = 0;
    for (std::size_t c = 0; c < m && row < n; ++c) {
        std::size_t p = row;
        while (p < n && A[p][c] == 0) ++p;
        if (p == n) continue;
        std::swap(A[p], A[row]);
        Rational inv = 1 / A[row][c];
        note(inv);
        for (auto& v : A[row]) v *= inv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == row || A[i][c] == 0) continue;
            Rational f = A[i][c];
            note(f);
            for (std::size_t j = 0; j < m; ++j) A[i][j] -= f * A[row][j];
        }
        ++row;
    }
    return {row, big};
}

}  // namespace

UsTrace us_control_trace(const RingPtr& ring, const std::vector<IntPoly>& family, const std::vector<FunctionOnRing>& F,
                         std::size_t target, const std::vector<std::uint64_t>& H_overrides) {
    const Ring& Rg = *ring;
    std::size_t m = family.size();
    if (m == 0) throw HypothesisViolation("preconditions", "empty family");
    if (F.size() != m + 1) throw SpecViolation("us_control_trace: need m + 1 functions");
    if (target > m) throw SpecViolation("us_control_trace: target index out of range");
    unsigned n = family[0].n_vars();
    for (auto& p : family)
        if (p.constant_term() != 0) throw HypothesisViolation("preconditions", "member " + p.to_string() + " has a constant term");
    if (!independence_check(family).independent) throw HypothesisViolation("preconditions", "family is not independent");
    int k = 0;
    for (auto& p : family) k = std::max(k, p.degree());
    std::uint64_t N = Rg.characteristic(), lp = Rg.lpf();

    UsTrace tr;
    tr.target = target;
    LambdaQuery q0{ring, family, F, {}, {}};
    cplx lam = lambda(q0);
    tr.lambda_abs = std::abs(lam);

    if (k == 1) {
        tr.linear_path = true;
        std::vector<std::vector<Rational>> A(n, std::vector<Rational>(m));
        for (std::size_t j = 0; j < m; ++j)
            for (unsigned i = 0; i < n; ++i) {
                Exps e{};
                e[i] = 1;
                A[i][j] = Rational(family[j].coeff(e));
            }
        auto [rank, big] = gauss_jordan(A);
        tr.gauss_jordan_max = big;
        if (rank < m) throw HypothesisViolation("gauss_jordan", "coefficient matrix has rank below m");
        if (BigInt(lp) <= big)
            throw HypothesisViolation("gauss_jordan", "lpf N = " + std::to_string(lp) +
                                                          " does not exceed the scale factor " + big.str());
        cplx prod = F[0].mean();
        for (std::size_t j = 1; j <= m; ++j) prod *= F[j].mean();
        tr.u1_bound = std::abs(F[target].mean());
        tr.final_bound = tr.u1_bound;
        tr.certified = std::abs(lam - prod) < 1e-9 && tr.lambda_abs <= tr.u1_bound + 1e-9;
        if (!tr.certified) tr.notes.push_back("linear identity or U1 bound failed numerically");
        return tr;
    }
    if (static_cast<std::uint64_t>(k) >= lp)
        throw HypothesisViolation("preconditions", "k = " + std::to_string(k) + " >= lpf N = " + std::to_string(lp));

    // put a maximal-weight member last
    std::vector<std::size_t> perm(m);
    for (std::size_t i = 0; i < m; ++i) perm[i] = i;
    std::size_t top = 0;
    for (std::size_t i = 0; i < m; ++i)
        if (weight(family[i]) >= weight(family[top])) top = i;
    perm.erase(perm.begin() + static_cast<std::ptrdiff_t>(top));
    perm.push_back(top);
    std::vector<IntPoly> P;
    std::vector<FunctionOnRing> G{F[0]};
    std::vector<std::string> L{"f0"};
    for (auto i : perm) {
        P.push_back(family[i]);
        G.push_back(F[i + 1]);
        L.push_back("f" + std::to_string(i + 1));
    }
    std::size_t j = target == 0 ? 0 : static_cast<std::size_t>(std::find(perm.begin(), perm.end(), target - 1) - perm.begin()) + 1;

    // rearrange so f_target sits last
    std::vector<IntPoly> Pj;
    std::vector<FunctionOnRing> Fj;
    std::vector<std::string> Lj;
    bool same_weight = j >= 1 && weight(P[j - 1]) == weight(P[m - 1]);
    if (j == m || same_weight) {
        Pj = P;
        Fj = G;
        Lj = L;
        if (j != m) {
            std::swap(Pj[j - 1], Pj[m - 1]);
            std::swap(Fj[j], Fj[m]);
            std::swap(Lj[j], Lj[m]);
        }
    } else {
        for (std::size_t i = 1; i <= m; ++i) {
            if (i == m) Pj.push_back(j == 0 ? -P[m - 1] : P[j - 1] - P[m - 1]);
            else if (i == j) Pj.push_back(-P[m - 1]);
            else Pj.push_back(P[i - 1] - P[m - 1]);
        }
        Fj = G;
        Lj = L;
        Fj[0] = G[m];
        Lj[0] = L[m];
        if (j == 0) {
            Fj[m] = G[0];
            Lj[m] = L[0];
        } else {
            Fj[j] = G[0];
            Lj[j] = L[0];
            Fj[m] = G[j];
            Lj[m] = L[j];
        }
    }
    tr.start_family = Pj;
    tr.start_labels = Lj;
    {
        LambdaQuery qj{ring, Pj, Fj, {}, {}};
        if (std::abs(lambda(qj) - lam) > 1e-9) tr.notes.push_back("rearrangement changed Lambda");
    }

    bool ok = true;
    std::vector<IntPoly> cur;
    for (auto& p : Pj) cur.push_back(p.reduce_mod(N));
    std::vector<FunctionOnRing> curF = Fj;
    std::vector<std::string> curL = Lj;
    std::vector<std::uint64_t> ms{m};
    for (unsigned i = 1;; ++i) {
        int deg = 0;
        for (auto& p : cur) deg = std::max(deg, zn_profile(p, N).deg_zn);
        if (deg <= 1) break;
        if (i > 64) throw HypothesisViolation("pet_step", "no linear family after 64 steps");
        std::uint64_t H = i <= H_overrides.size() ? H_overrides[i - 1] : default_H(lp, i);
        tr.H.push_back(H);
        PetOptions opt;
        opt.labels = curL;
        PetStepResult st;
        try {
            st = pet_step(ring, cur, curF, H, opt);
        } catch (const HypothesisViolation& e) {
            throw HypothesisViolation("pet_step[" + std::to_string(i) + "]", e.what());
        }
        ok = ok && st.checks.all();
        cur = st.new_family;
        curF = st.g;
        curL = st.new_function_labels;
        ms.push_back(st.m_prime);
        tr.steps.push_back(std::move(st));
    }
    std::size_t D = tr.steps.size();
    std::size_t mD = cur.size();
    tr.m_D = static_cast<unsigned>(mD);

    // linear stage: drop constants by translating the functions
    std::vector<FunctionOnRing> ud_F{curF[0]};
    tr.A.assign(n, std::vector<BigInt>(mD));
    for (std::size_t c = 0; c < mD; ++c) {
        IntPoly lin = cur[c].without_constant();
        tr.linear_family.push_back(lin);
        ud_F.push_back(curF[c + 1].translate(Rg.embed(cur[c].constant_term())));
        for (unsigned i = 0; i < n; ++i) {
            Exps e{};
            e[i] = 1;
            tr.A[i][c] = lin.coeff(e);
        }
    }
    BigInt Mp = family_height(tr.linear_family, N);
    RegularizeResult reg;
    try {
        reg = matrix_regularize(tr.A, BigInt(N), Mp);
    } catch (const HypothesisViolation& e) {
        throw HypothesisViolation("matrix_regularize", e.what());
    }
    tr.B = reg.B;
    tr.ops = reg.ops;
    for (std::size_t c = 0; c < mD; ++c) {
        std::vector<std::int64_t> col;
        for (unsigned i = 0; i < n; ++i) col.push_back(symmetric_residue(mod(tr.B[i][c], N), N));
        tr.ud_coeffs.push_back(col);
    }
    InequalitySides ud;
    try {
        ud = linear_ud_check(Rg, tr.ud_coeffs, ud_F, true);
    } catch (const InvertibilityViolation& e) {
        throw HypothesisViolation("linear_ud_check", e.what());
    }
    tr.ud_lhs = ud.lhs;
    tr.ud_rhs = ud.rhs;
    ok = ok && ud.lhs <= ud.rhs + 1e-9;

    double two_n = std::ldexp(1.0, static_cast<int>(n));
    double sum = 0;
    double ex = std::ldexp(1.0, -static_cast<int>(D - 1));
    for (std::size_t i = 1; i <= D; ++i)
        sum += std::pow(static_cast<double>(ms[i - 1]) / std::sqrt(static_cast<double>(tr.H[i - 1])), ex);
    double norm = gowers_norm(F[target], tr.m_D);
    tr.final_bound = two_n * sum + two_n * std::pow(norm, std::ldexp(1.0, -static_cast<int>(D)));
    ok = ok && tr.lambda_abs <= tr.final_bound + 1e-9;
    tr.certified = ok;
    return tr;
}

}  // namespace polysz
