#include "polysz/symbolic.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "polysz/errors.hpp"
#include "polysz/ring.hpp"

namespace polysz {

std::string param_name(ParamId p) {
    return "h" + std::to_string(param_step(p)) + std::string(param_var(p), '\'');
}

// ---- HPoly ----------------------------------------------------------------

bool HPoly::MonoOrder::operator()(const Mono& a, const Mono& b) const {
    if (a.size() != b.size()) return a.size() > b.size();
    // compare from the largest parameter down
    for (std::size_t i = a.size(); i-- > 0;)
        if (a[i] != b[i]) return a[i] > b[i];
    return false;
}

HPoly::HPoly(const BigInt& c) {
    if (c != 0) t_[{}] = c;
}

HPoly HPoly::param(ParamId p) {
    HPoly h;
    h.t_[{p}] = 1;
    return h;
}

void HPoly::add_term(const Mono& m, const BigInt& c) {
    if (c == 0) return;
    auto [it, fresh] = t_.try_emplace(m, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) t_.erase(it);
    }
}

bool HPoly::is_constant() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first.empty()); }

BigInt HPoly::constant_value() const {
    auto it = t_.find({});
    return it == t_.end() ? BigInt(0) : it->second;
}

bool HPoly::mentions(ParamId p) const {
    for (auto& [m, c] : t_)
        if (std::find(m.begin(), m.end(), p) != m.end()) return true;
    return false;
}

std::vector<ParamId> HPoly::params() const {
    std::set<ParamId> s;
    for (auto& [m, c] : t_) s.insert(m.begin(), m.end());
    return {s.begin(), s.end()};
}

HPoly HPoly::operator-() const {
    HPoly r = *this;
    for (auto& [m, c] : r.t_) c = -c;
    return r;
}

HPoly& HPoly::operator+=(const HPoly& o) {
    for (auto& [m, c] : o.t_) add_term(m, c);
    return *this;
}

HPoly& HPoly::operator-=(const HPoly& o) {
    for (auto& [m, c] : o.t_) add_term(m, -c);
    return *this;
}

HPoly operator*(const HPoly& a, const HPoly& b) {
    HPoly r;
    for (auto& [ma, ca] : a.t_)
        for (auto& [mb, cb] : b.t_) {
            HPoly::Mono m;
            std::merge(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(m));
            r.add_term(m, ca * cb);
        }
    return r;
}

std::uint64_t HPoly::eval_mod(const std::map<ParamId, std::uint64_t>& values, std::uint64_t N) const {
    std::uint64_t acc = 0;
    for (auto& [m, c] : t_) {
        std::uint64_t v = mod(c, N);
        for (auto p : m) {
            auto it = values.find(p);
            if (it == values.end()) throw SpecViolation("no value for parameter " + param_name(p));
            v = mulmod(v, it->second % N, N);
        }
        acc = (acc + v) % N;
    }
    return acc;
}

namespace {

std::string mono_string(const HPoly::Mono& m) {
    std::string s;
    for (std::size_t i = 0; i < m.size();) {
        std::size_t j = i;
        while (j < m.size() && m[j] == m[i]) ++j;
        s += param_name(m[i]);
        if (j - i > 1) s += "^" + std::to_string(j - i);
        i = j;
    }
    return s;
}

}  // namespace

std::string HPoly::to_string() const {
    if (t_.empty()) return "0";
    std::string s;
    bool first = true;
    // the constant sorts last under MonoOrder since it has the fewest factors
    for (auto& [m, c] : t_) {
        BigInt a = c < 0 ? BigInt(-c) : c;
        if (c < 0) s += "-";
        else if (!first) s += "+";
        first = false;
        if (a != 1 || m.empty()) s += a.str();
        s += mono_string(m);
    }
    return s;
}

// ---- parsing --------------------------------------------------------------

namespace {

// Grammar: sum of terms; a term is a product of factors (integer, parameter
// h<s>'..., y-variable, parenthesized sum), each optionally raised to ^e.
class SymParser {
public:
    SymParser(std::string s, unsigned n_y, bool allow_y) : s_(std::move(s)), n_(n_y), allow_y_(allow_y) {}

    SymbolicPoly parse_all() {
        SymbolicPoly p = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return p;
    }

    unsigned max_y = 0;

private:
    SymbolicPoly sum() {
        SymbolicPoly acc(n_);
        skip();
        bool neg = false;
        if (eat('-')) neg = true;
        else eat('+');
        for (;;) {
            SymbolicPoly t = term();
            acc += neg ? -t : t;
            skip();
            if (eat('+')) neg = false;
            else if (eat('-')) neg = true;
            else break;
        }
        return acc;
    }

    SymbolicPoly term() {
        SymbolicPoly acc = unit();
        bool any = false;
        for (;;) {
            skip();
            if (pos_ >= s_.size()) break;
            char c = s_[pos_];
            if (c == '*') {
                ++pos_;
                skip();
            } else if (!(std::isdigit(static_cast<unsigned char>(c)) || c == 'h' || c == 'y' || c == '(')) {
                break;
            }
            acc = mul(acc, power());
            any = true;
        }
        if (!any) fail("expected a term");
        return acc;
    }

    SymbolicPoly power() {
        SymbolicPoly b = factor();
        skip();
        if (eat('^')) {
            skip();
            BigInt e = number();
            if (e > 64) fail("exponent too large");
            SymbolicPoly r = unit();
            for (int i = 0; i < e.convert_to<int>(); ++i) r = mul(r, b);
            return r;
        }
        return b;
    }

    SymbolicPoly factor() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        char c = s_[pos_];
        SymbolicPoly r(n_);
        if (std::isdigit(static_cast<unsigned char>(c))) {
            r.add_term(Exps{}, HPoly(number()));
        } else if (c == 'h') {
            ++pos_;
            if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) fail("parameter needs a step");
            BigInt st = number();
            unsigned var = 0;
            while (pos_ < s_.size() && s_[pos_] == '\'') ++var, ++pos_;
            if (st < 1 || st > 4000 || var >= 16) fail("bad parameter");
            r.add_term(Exps{}, HPoly::param(param_id(st.convert_to<unsigned>(), var)));
        } else if (c == 'y') {
            if (!allow_y_) fail("y is not allowed here");
            ++pos_;
            unsigned idx = 1;
            if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) idx = number().convert_to<unsigned>();
            if (idx < 1 || idx > kMaxVars) fail("bad variable index");
            max_y = std::max(max_y, idx);
            if (idx > n_) fail("variable index exceeds n");
            Exps e{};
            e[idx - 1] = 1;
            r.add_term(e, HPoly(1));
        } else if (c == '(') {
            ++pos_;
            r = sum();
            skip();
            if (!eat(')')) fail("missing ')'");
        } else {
            fail("unexpected '" + std::string(1, c) + "'");
        }
        return r;
    }

    SymbolicPoly unit() const {
        SymbolicPoly r(n_);
        r.add_term(Exps{}, HPoly(1));
        return r;
    }

    SymbolicPoly mul(const SymbolicPoly& a, const SymbolicPoly& b) const {
        SymbolicPoly r(n_);
        for (auto& [ea, ca] : a.terms())
            for (auto& [eb, cb] : b.terms()) {
                Exps e{};
                for (unsigned i = 0; i < kMaxVars; ++i) e[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
                r.add_term(e, ca * cb);
            }
        return r;
    }

    BigInt number() {
        std::size_t st = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (st == pos_) fail("expected a number");
        return BigInt(s_.substr(st, pos_ - st));
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& m) const {
        throw ParseError("'" + s_ + "' at " + std::to_string(pos_) + ": " + m);
    }

    std::string s_;
    std::size_t pos_ = 0;
    unsigned n_;
    bool allow_y_;
};

}  // namespace

HPoly HPoly::parse(const std::string& text) {
    SymParser ps(text, 1, false);
    SymbolicPoly p = ps.parse_all();
    return p.is_zero() ? HPoly() : p.terms().begin()->second;
}

// ---- SymbolicPoly ---------------------------------------------------------

SymbolicPoly SymbolicPoly::from_int(const IntPoly& p) {
    SymbolicPoly r(p.n_vars());
    for (auto& [e, c] : p.terms()) r.add_term(e, HPoly(c));
    return r;
}

SymbolicPoly SymbolicPoly::parse(const std::string& text, unsigned n_y) {
    if (n_y == 0) {
        SymParser probe(text, kMaxVars, true);
        probe.parse_all();
        n_y = std::max(1u, probe.max_y);
    }
    SymParser ps(text, n_y, true);
    return ps.parse_all();
}

void SymbolicPoly::add_term(const Exps& e, const HPoly& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = t_.try_emplace(e, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) t_.erase(it);
    }
}

int SymbolicPoly::degree() const {
    int d = -1;
    for (auto& [e, c] : t_) d = std::max<int>(d, static_cast<int>(total_degree(e)));
    return d;
}

std::uint64_t SymbolicPoly::weight() const {
    if (degree() < 1) throw ConstantMember("weight of a constant symbolic polynomial");
    return weight_order_rank(t_.begin()->first, n_);
}

const HPoly& SymbolicPoly::leading_coeff() const {
    if (t_.empty()) throw ConstantMember("leading coefficient of zero");
    return t_.begin()->second;
}

SymbolicPoly SymbolicPoly::without_constant() const {
    SymbolicPoly r = *this;
    r.t_.erase(Exps{});
    return r;
}

SymbolicPoly SymbolicPoly::shift(unsigned step) const {
    SymbolicPoly r(n_);
    for (auto& [e, c] : t_) {
        // prod_i (y_i + h_i)^{e_i}, expanded one variable at a time
        std::vector<std::pair<Exps, HPoly>> acc{{Exps{}, c}};
        for (unsigned i = 0; i < n_; ++i) {
            if (!e[i]) continue;
            HPoly hi = HPoly::param(param_id(step, i));
            std::vector<std::pair<Exps, HPoly>> next;
            std::vector<HPoly> hpow{HPoly(1)};
            for (unsigned t = 1; t <= e[i]; ++t) hpow.push_back(hpow.back() * hi);
            for (auto& [ex, cx] : acc)
                for (unsigned b = 0; b <= e[i]; ++b) {
                    Exps ne = ex;
                    ne[i] = static_cast<std::uint8_t>(b);
                    next.emplace_back(ne, cx * HPoly(binomial(e[i], b)) * hpow[e[i] - b]);
                }
            acc = std::move(next);
        }
        for (auto& [ex, cx] : acc) r.add_term(ex, cx);
    }
    return r;
}

bool SymbolicPoly::mentions(ParamId p) const {
    for (auto& [e, c] : t_)
        if (c.mentions(p)) return true;
    return false;
}

SymbolicPoly SymbolicPoly::operator-() const {
    return map_coeffs([](const HPoly& c) { return -c; });
}

SymbolicPoly& SymbolicPoly::operator+=(const SymbolicPoly& o) {
    if (o.n_ != n_) throw SpecViolation("symbolic polynomials with different variable counts");
    for (auto& [e, c] : o.t_) add_term(e, c);
    return *this;
}

SymbolicPoly& SymbolicPoly::operator-=(const SymbolicPoly& o) {
    if (o.n_ != n_) throw SpecViolation("symbolic polynomials with different variable counts");
    for (auto& [e, c] : o.t_) add_term(e, -c);
    return *this;
}

IntPoly SymbolicPoly::eval_mod(const std::map<ParamId, std::uint64_t>& values, std::uint64_t N) const {
    IntPoly r(n_);
    for (auto& [e, c] : t_) r.add_term(e, BigInt(c.eval_mod(values, N)));
    return r.reduce_mod(N);
}

std::string SymbolicPoly::to_string() const {
    if (t_.empty()) return "0";
    std::string s;
    bool first = true;
    for (auto& [e, c] : t_) {
        std::string mono;
        for (unsigned i = 0; i < n_; ++i) {
            if (!e[i]) continue;
            mono += n_ == 1 ? std::string("y") : "y" + std::to_string(i + 1);
            if (e[i] > 1) mono += "^" + std::to_string(e[i]);
        }
        std::string coef;
        bool neg = false;
        if (c.terms().size() == 1) {
            auto& [m, v] = *c.terms().begin();
            neg = v < 0;
            BigInt a = neg ? BigInt(-v) : v;
            if (a != 1 || m.empty()) coef = a.str();
            coef += mono_string(m);
            if (a == 1 && m.empty() && !mono.empty()) coef.clear();
        } else {
            coef = "(" + c.to_string() + ")";
        }
        if (neg) s += "-";
        else if (!first) s += "+";
        first = false;
        s += coef + mono;
    }
    return s;
}

std::string family_to_string(const std::vector<SymbolicPoly>& fam) {
    std::string s = "{";
    for (std::size_t i = 0; i < fam.size(); ++i) s += (i ? ", " : "") + fam[i].to_string();
    return s + "}";
}

// ---- substitutions and constraints ----------------------------------------

Substitution Substitution::parse(const std::string& text) {
    auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError("substitution '" + text + "' needs '='");
    HPoly lhs = HPoly::parse(text.substr(0, eq));
    HPoly rhs = HPoly::parse(text.substr(eq + 1));
    if (lhs.terms().size() != 1 || lhs.terms().begin()->first.size() != 1)
        throw ParseError("substitution '" + text + "': left side must be k*h for one parameter h");
    Substitution s;
    s.param = lhs.terms().begin()->first[0];
    s.k = lhs.terms().begin()->second;
    if (s.k <= 0) throw ParseError("substitution '" + text + "': k must be positive");
    s.value = rhs;
    if (rhs.mentions(s.param)) throw ParseError("substitution '" + text + "': right side mentions the parameter");
    return s;
}

std::string Substitution::to_string() const {
    return (k == 1 ? std::string() : k.str()) + param_name(param) + " := " + value.to_string();
}

HPoly Substitution::apply(const HPoly& c) const {
    HPoly cur = c;
    for (;;) {
        HPoly next;
        bool changed = false;
        for (auto& [m, v] : cur.terms()) {
            auto it = std::find(m.begin(), m.end(), param);
            if (it != m.end() && v % k == 0) {
                HPoly::Mono rest(m.begin(), m.end());
                rest.erase(rest.begin() + (it - m.begin()));
                HPoly mono;
                mono += HPoly(v / k);
                for (auto p : rest) mono = mono * HPoly::param(p);
                next += mono * value;
                changed = true;
            } else {
                HPoly t(v);
                for (auto p : m) t = t * HPoly::param(p);
                next += t;
            }
        }
        cur = next;
        if (!changed) return cur;
    }
}

Constraint Constraint::parse(const std::string& text) {
    auto ne = text.find("!=");
    if (ne == std::string::npos) throw ParseError("constraint '" + text + "' needs '!='");
    Constraint c;
    c.lhs = HPoly::parse(text.substr(0, ne));
    c.rhs = HPoly::parse(text.substr(ne + 2));
    if ((c.lhs - c.rhs).is_constant()) throw ParseError("constraint '" + text + "' mentions no parameter");
    return c;
}

std::string Constraint::to_string() const { return lhs.to_string() + " != " + rhs.to_string(); }

unsigned Constraint::step() const {
    unsigned s = 0;
    for (auto p : (lhs - rhs).params()) s = std::max(s, param_step(p));
    return s;
}

bool Constraint::holds(const std::map<ParamId, std::uint64_t>& values, std::uint64_t N) const {
    return (lhs - rhs).eval_mod(values, N) != 0;
}

// ---- diagrams -------------------------------------------------------------

namespace {

MemberInfo sym_info(const SymbolicPoly& p) {
    int d = p.degree();
    if (d < 1) throw HypothesisViolation("symbolic_diagram", "member " + p.to_string() + " is constant");
    return {d, p.weight(), p.leading_coeff().to_string()};
}

void require_distinct(const std::vector<SymbolicPoly>& fam, unsigned step) {
    for (std::size_t i = 0; i < fam.size(); ++i) {
        if (fam[i].degree() < 1)
            throw HypothesisViolation("symbolic_diagram", "step " + std::to_string(step) + " produced a constant member");
        for (std::size_t j = i + 1; j < fam.size(); ++j)
            if (fam[i] == fam[j])
                throw HypothesisViolation("symbolic_diagram", "step " + std::to_string(step) + " produced members " +
                                                                  std::to_string(i) + " and " + std::to_string(j) +
                                                                  " that differ by a constant");
    }
}

void max_weight_last(std::vector<SymbolicPoly>& fam) {
    std::size_t top = 0;
    for (std::size_t i = 0; i < fam.size(); ++i)
        if (fam[i].weight() >= fam[top].weight()) top = i;
    if (top + 1 != fam.size()) {
        auto p = fam[top];
        fam.erase(fam.begin() + static_cast<std::ptrdiff_t>(top));
        fam.push_back(p);
    }
}

}  // namespace

Diagram symbolic_diagram(const std::vector<IntPoly>& family, const DiagramOptions& opt) {
    if (family.empty()) throw SpecViolation("symbolic_diagram: empty family");
    Diagram d;
    d.n = family[0].n_vars();
    std::vector<SymbolicPoly> cur;
    for (auto& p : family) {
        if (p.n_vars() != d.n) throw SpecViolation("symbolic_diagram: mixed variable counts");
        if (p.degree() < 1) throw ConstantMember("symbolic_diagram: member " + p.to_string() + " is constant");
        cur.push_back(SymbolicPoly::from_int(p).without_constant());
    }
    require_distinct(cur, 0);
    max_weight_last(cur);
    d.start = cur;
    for (auto& c : opt.constraints) d.constraints.push_back(c.to_string());

    for (unsigned s = 1;; ++s) {
        int deg = 0;
        for (auto& p : cur) deg = std::max(deg, p.degree());
        if (deg <= 1) break;
        if (s > opt.max_steps) throw HypothesisViolation("symbolic_diagram", "no linear family after max_steps");
        std::vector<MemberInfo> info;
        for (auto& p : cur) info.push_back(sym_info(p));
        for (auto& x : info)
            if (x.weight > info.back().weight) {
                max_weight_last(cur);
                info.clear();
                for (auto& p : cur) info.push_back(sym_info(p));
                break;
            }
        std::optional<std::size_t> forced;
        if (auto it = opt.forced.find(s); it != opt.forced.end()) forced = it->second;

        DiagramStep st;
        st.index = s;
        st.family = cur;
        st.sel = select_differencing(info, opt.policy, forced);
        st.pivot = st.sel.order[0];
        for (unsigned v = 0; v < d.n; ++v) st.params_introduced.push_back(param_name(param_id(s, v)));

        std::vector<SymbolicPoly> R;
        for (auto i : st.sel.order) R.push_back(cur[i]);
        std::size_t m = R.size(), ell = st.sel.ell;
        std::vector<SymbolicPoly> Q;
        for (std::size_t i = 2; i + 1 <= ell; ++i) Q.push_back(R[i - 1] - R[0]);
        for (std::size_t j = ell; j <= m; ++j) {
            if (!(ell == 1 && j == 1)) Q.push_back(R[j - 1] - R[0]);
            Q.push_back(R[j - 1].shift(s) - R[0]);
        }
        for (auto& q : Q) q = q.without_constant();
        require_distinct(Q, s);

        if (ell >= 2) st.branch = 'a';
        else if (info[st.sel.order[m - 1]].weight > info[st.pivot].weight) st.branch = 'b';
        else if (info[st.pivot].lc != info[st.sel.order[m - 1]].lc) st.branch = 'c';
        else {
            std::uint64_t r = 0;
            for (auto& q : Q) r = std::max(r, q.weight());
            if (Q.back().weight() == r) {
                st.branch = 'd';
            } else {
                st.branch = 'e';
                std::size_t ip = 0;
                while (Q[ip].weight() != r) ++ip;
                SymbolicPoly qi = Q[ip];
                for (std::size_t i = 0; i < Q.size(); ++i) Q[i] = i == ip ? -qi : Q[i] - qi;
                require_distinct(Q, s);
            }
        }
        st.raw = Q;

        bool any = false;
        for (auto& sub : opt.substitutions) {
            if (param_step(sub.param) != s) continue;
            for (auto& q : Q) q = q.map_coeffs([&](const HPoly& c) { return sub.apply(c); }).without_constant();
            st.applied.push_back(sub.to_string());
            any = true;
        }
        if (any) {
            require_distinct(Q, s);
            max_weight_last(Q);
        }
        for (auto& c : opt.constraints)
            if (c.step() == s) st.constraints.push_back(c.to_string());
        cur = Q;
        d.steps.push_back(std::move(st));
    }
    for (auto& sub : opt.substitutions)
        if (param_step(sub.param) > d.steps.size())
            throw SpecViolation("substitution " + sub.to_string() + " names a step that never happens");
    d.final_family = cur;
    return d;
}

namespace {

std::string underlined(const std::vector<SymbolicPoly>& fam, std::optional<std::size_t> pivot) {
    std::string s = "{";
    for (std::size_t i = 0; i < fam.size(); ++i) {
        s += i ? ", " : "";
        if (pivot && *pivot == i) s += "[" + fam[i].to_string() + "]";
        else s += fam[i].to_string();
    }
    return s + "}";
}

}  // namespace

std::string Diagram::to_text() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& st = steps[i];
        os << (i == 0 ? "      " : "   =  ") << underlined(st.family, st.pivot) << "\n";
        os << "-> " << st.index << "  " << family_to_string(st.raw);
        if (st.branch != 'a' && st.branch != 'd') os << "   (branch " << st.branch << ")";
        os << "\n";
        if (!st.applied.empty()) {
            const auto& next = i + 1 < steps.size() ? steps[i + 1].family : final_family;
            os << "   =* " << family_to_string(next) << "   [";
            for (std::size_t k = 0; k < st.applied.size(); ++k) os << (k ? ", " : "") << st.applied[k];
            os << "]\n";
        }
        for (auto& c : st.constraints) os << "      assuming " << c << "\n";
    }
    if (steps.empty()) os << "      " << family_to_string(final_family) << "\n";
    os << "steps: " << steps.size() << "\n";
    return os.str();
}

std::string Diagram::to_json(int indent) const {
    using nlohmann::json;
    auto fam_json = [](const std::vector<SymbolicPoly>& f) {
        json a = json::array();
        for (auto& p : f) a.push_back(p.to_string());
        return a;
    };
    json leaf = {{"family", fam_json(final_family)},
                 {"underlined", nullptr},
                 {"params_introduced", json::array()},
                 {"constraints", json::array()},
                 {"children", json::array()}};
    json node = leaf;
    for (std::size_t i = steps.size(); i-- > 0;) {
        const auto& st = steps[i];
        json cons = st.constraints;
        for (auto& a : st.applied) cons.push_back(a);
        node = json{{"family", fam_json(st.family)},
                    {"underlined", st.pivot},
                    {"params_introduced", st.params_introduced},
                    {"constraints", cons},
                    {"branch", std::string(1, st.branch)},
                    {"children", json::array({node})}};
    }
    json root = {{"n", n}, {"steps", steps.size()}, {"constraints", constraints}, {"tree", node}};
    return root.dump(indent);
}

std::string diagram_step_match(const Diagram& d, std::uint64_t N, const std::map<ParamId, std::uint64_t>& values,
                               std::uint64_t seed, unsigned max_steps) {
    if (!is_prime(N)) throw SpecViolation("diagram_step_match: N must be prime");
    auto ring = make_ring(RingSpec::modint(N));
    std::vector<IntPoly> cur;
    for (auto& p : d.start) cur.push_back(p.eval_mod(values, N));
    unsigned steps = std::min<unsigned>(max_steps, static_cast<unsigned>(d.steps.size()));
    for (unsigned s = 0; s < steps; ++s) {
        const auto& st = d.steps[s];
        std::vector<FunctionOnRing> F;
        for (std::size_t i = 0; i <= cur.size(); ++i) F.push_back(FunctionOnRing::random_bounded(ring, seed + 97 * s + i));
        ZnVec h;
        for (unsigned v = 0; v < d.n; ++v) {
            auto it = values.find(param_id(st.index, v));
            if (it == values.end()) throw SpecViolation("no value for parameter " + param_name(param_id(st.index, v)));
            h.push_back(it->second % N);
        }
        PetOptions opt;
        opt.forced_pivot = st.pivot;
        PetStepResult r;
        try {
            r = pet_transform(ring, cur, F, (N + 1) / 2, h, opt);
        } catch (const std::exception& e) {
            return "step " + std::to_string(st.index) + ": " + e.what();
        }
        std::string at = "step " + std::to_string(st.index);
        if (r.new_family.size() != st.raw.size()) return at + ": family sizes differ";
        for (std::size_t i = 0; i < st.raw.size(); ++i) {
            IntPoly a = r.new_family[i].without_constant().reduce_mod(N);
            IntPoly b = st.raw[i].eval_mod(values, N).without_constant();
            if (a != b)
                return at + ", member " + std::to_string(i) + ": numeric " + a.to_string() + " vs symbolic " +
                       b.to_string();
        }
        // follow the symbolic order, which may move members after a substitution
        const auto& next = s + 1 < d.steps.size() ? d.steps[s + 1].family : d.final_family;
        std::vector<IntPoly> ordered;
        for (auto& q : next) {
            IntPoly b = q.eval_mod(values, N).without_constant();
            auto it = std::find_if(r.new_family.begin(), r.new_family.end(),
                                   [&](const IntPoly& a) { return a.without_constant().reduce_mod(N) == b; });
            if (it == r.new_family.end()) return at + ": substituted member " + b.to_string() + " has no numeric match";
            ordered.push_back(*it);
        }
        cur = ordered;
    }
    return {};
}

}  // namespace polysz
