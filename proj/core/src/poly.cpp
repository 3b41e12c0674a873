#include "polysz/poly.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "polysz/budget.hpp"
#include "polysz/errors.hpp"

namespace polysz {

unsigned total_degree(const Exps& a) {
    unsigned s = 0;
    for (auto v : a) s += v;
    return s;
}

bool Heavier::operator()(const Exps& a, const Exps& b) const {
    unsigned da = total_degree(a), db = total_degree(b);
    if (da != db) return da > db;
    return a > b;  // first differing coordinate, larger is heavier
}

namespace {

// Number of ways to write s as an ordered sum of k nonnegative parts.
std::uint64_t compositions(unsigned s, unsigned k) {
    if (k == 0) return s == 0 ? 1 : 0;
    return binomial(s + k - 1, k - 1);
}

}  // namespace

std::uint64_t weight_order_rank(const Exps& alpha, unsigned n) {
    unsigned d = total_degree(alpha);
    if (d == 0) throw ZeroExponent("weight_order_rank: exponent vector is zero");
    // nonzero vectors of smaller total degree
    std::uint64_t below = binomial(n + d - 1, n) - 1;
    std::uint64_t lex = 0;
    unsigned rem = d;
    for (unsigned i = 0; i + 1 < n; ++i) {
        for (unsigned v = 0; v < alpha[i]; ++v) lex += compositions(rem - v, n - i - 1);
        rem -= alpha[i];
    }
    return below + lex + 1;
}

std::uint64_t weight_order_rank(const std::vector<unsigned>& alpha) {
    if (alpha.empty() || alpha.size() > kMaxVars)
        throw SpecViolation("weight_order_rank: need 1..9 variables");
    Exps e{};
    for (std::size_t i = 0; i < alpha.size(); ++i) e[i] = static_cast<std::uint8_t>(alpha[i]);
    return weight_order_rank(e, static_cast<unsigned>(alpha.size()));
}

// ---------------------------------------------------------------------------

IntPoly::IntPoly(unsigned n_vars) : n_(n_vars) {
    if (n_vars == 0 || n_vars > kMaxVars) throw SpecViolation("IntPoly: n_vars must be in 1..9");
}

IntPoly IntPoly::constant(unsigned n, const BigInt& c) {
    IntPoly p(n);
    p.add_term(Exps{}, c);
    return p;
}

IntPoly IntPoly::variable(unsigned n, unsigned index, const BigInt& c) {
    if (index >= n) throw SpecViolation("IntPoly::variable: index out of range");
    Exps e{};
    e[index] = 1;
    return monomial(n, e, c);
}

IntPoly IntPoly::monomial(unsigned n, const Exps& e, const BigInt& c) {
    IntPoly p(n);
    p.add_term(e, c);
    return p;
}

IntPoly IntPoly::from_coeffs(const std::vector<std::int64_t>& asc) {
    IntPoly p(1);
    for (std::size_t k = 0; k < asc.size(); ++k) {
        Exps e{};
        e[0] = static_cast<std::uint8_t>(k);
        p.add_term(e, asc[k]);
    }
    return p;
}

int IntPoly::degree() const {
    if (terms_.empty()) return -1;
    return static_cast<int>(total_degree(terms_.begin()->first));
}

BigInt IntPoly::coeff(const Exps& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? BigInt(0) : it->second;
}

BigInt IntPoly::constant_term() const { return coeff(Exps{}); }

IntPoly IntPoly::without_constant() const {
    IntPoly p = *this;
    p.terms_.erase(Exps{});
    return p;
}

IntPoly IntPoly::with_n_vars(unsigned n) const {
    IntPoly p(n);
    for (auto& [e, c] : terms_) {
        for (unsigned i = n; i < kMaxVars; ++i)
            if (e[i]) throw SpecViolation("with_n_vars: polynomial uses a dropped variable");
        p.terms_.emplace(e, c);
    }
    return p;
}

void IntPoly::add_term(const Exps& e, const BigInt& c) {
    if (c == 0) return;
    for (unsigned i = n_; i < kMaxVars; ++i)
        if (e[i]) throw SpecViolation("IntPoly: exponent outside n_vars");
    auto [it, fresh] = terms_.emplace(e, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

IntPoly IntPoly::operator-() const {
    IntPoly p = *this;
    for (auto& [e, c] : p.terms_) c = -c;
    return p;
}

IntPoly& IntPoly::operator+=(const IntPoly& o) {
    if (o.n_ != n_) throw SpecViolation("IntPoly: n_vars mismatch");
    for (auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

IntPoly& IntPoly::operator-=(const IntPoly& o) {
    if (o.n_ != n_) throw SpecViolation("IntPoly: n_vars mismatch");
    for (auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

IntPoly operator*(const IntPoly& a, const IntPoly& b) {
    if (a.n_ != b.n_) throw SpecViolation("IntPoly: n_vars mismatch");
    IntPoly r(a.n_);
    for (auto& [ea, ca] : a.terms_)
        for (auto& [eb, cb] : b.terms_) {
            Exps e{};
            for (unsigned i = 0; i < kMaxVars; ++i) {
                unsigned s = ea[i] + eb[i];
                if (s > 255) throw SpecViolation("IntPoly: exponent overflow");
                e[i] = static_cast<std::uint8_t>(s);
            }
            r.add_term(e, ca * cb);
        }
    return r;
}

IntPoly operator*(const BigInt& c, const IntPoly& a) {
    IntPoly r(a.n_);
    if (c == 0) return r;
    for (auto& [e, v] : a.terms_) r.terms_.emplace(e, v * c);
    return r;
}

IntPoly IntPoly::reduce_mod(std::uint64_t N) const {
    IntPoly r(n_);
    for (auto& [e, c] : terms_) r.add_term(e, mod(c, N));
    return r;
}

IntPoly IntPoly::reduce_symmetric(std::uint64_t N) const {
    IntPoly r(n_);
    for (auto& [e, c] : terms_) r.add_term(e, symmetric_residue(mod(c, N), N));
    return r;
}

IntPoly IntPoly::shift(const std::vector<BigInt>& h) const {
    if (h.size() != n_) throw SpecViolation("shift: |h| must equal n_vars");
    IntPoly r(n_);
    for (auto& [e, c] : terms_) {
        IntPoly t = constant(n_, c);
        for (unsigned i = 0; i < n_; ++i) {
            if (!e[i]) continue;
            IntPoly f(n_);
            BigInt hp = 1;  // h_i^(a-k), filled from k = a downwards
            for (int k = e[i]; k >= 0; --k) {
                Exps m{};
                m[i] = static_cast<std::uint8_t>(k);
                f.add_term(m, BigInt(binomial(e[i], static_cast<unsigned>(k))) * hp);
                hp *= h[i];
            }
            t = t * f;
        }
        r += t;
    }
    return r;
}

BigInt IntPoly::eval(const std::vector<BigInt>& y) const {
    if (y.size() != n_) throw SpecViolation("eval: arity mismatch");
    BigInt s = 0;
    for (auto& [e, c] : terms_) {
        BigInt t = c;
        for (unsigned i = 0; i < n_; ++i)
            if (e[i]) t *= boost::multiprecision::pow(y[i], e[i]);
        s += t;
    }
    return s;
}

std::uint64_t IntPoly::eval_mod(const std::vector<std::uint64_t>& y, std::uint64_t N) const {
    if (y.size() != n_) throw SpecViolation("eval_mod: arity mismatch");
    std::uint64_t s = 0;
    for (auto& [e, c] : terms_) {
        std::uint64_t t = mod(c, N);
        for (unsigned i = 0; i < n_ && t; ++i)
            if (e[i]) t = mulmod(t, powmod(y[i], e[i], N), N);
        s = (s + t) % N;
    }
    return s;
}

std::string IntPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [e, c] : terms_) {
        BigInt a = c < 0 ? BigInt(-c) : c;
        if (c < 0)
            os << "-";
        else if (!first)
            os << "+";
        first = false;
        bool mono = total_degree(e) > 0;
        bool wrote = false;
        if (a != 1 || !mono) {
            os << a;
            wrote = true;
        }
        for (unsigned i = 0; i < n_; ++i) {
            if (!e[i]) continue;
            if (wrote) os << "*";
            os << (n_ == 1 ? std::string("y") : "y" + std::to_string(i + 1));
            if (e[i] > 1) os << "^" << unsigned(e[i]);
            wrote = true;
        }
    }
    return os.str();
}

std::string family_to_string(const std::vector<IntPoly>& fam) {
    std::string s = "{";
    for (std::size_t i = 0; i < fam.size(); ++i) s += (i ? ", " : "") + fam[i].to_string();
    return s + "}";
}

// --- parsing ----------------------------------------------------------------

namespace {

struct RawTerm {
    BigInt coeff;
    std::array<unsigned, kMaxVars> exps{};
};

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    std::vector<RawTerm> parse_sum() {
        std::vector<RawTerm> out;
        skip();
        bool first = true;
        while (pos_ < s_.size()) {
            int sign = 1;
            if (peek() == '+' || peek() == '-') {
                sign = get() == '-' ? -1 : 1;
                skip();
            } else if (!first) {
                fail("expected + or -");
            }
            RawTerm t = parse_term();
            t.coeff *= sign;
            out.push_back(t);
            first = false;
            skip();
        }
        if (out.empty()) fail("empty polynomial");
        return out;
    }

    unsigned max_var = 0;

private:
    RawTerm parse_term() {
        RawTerm t;
        t.coeff = 1;
        bool any = false;
        for (;;) {
            skip();
            char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c))) {
                t.coeff *= parse_number();
            } else if (c == 'y' || c == 'x') {
                get();
                unsigned idx = 1;
                if (std::isdigit(static_cast<unsigned char>(peek()))) {
                    idx = static_cast<unsigned>(get() - '0');
                    if (idx == 0 || std::isdigit(static_cast<unsigned char>(peek())))
                        fail("variable index must be 1..9");
                }
                unsigned e = 1;
                skip();
                if (peek() == '^') {
                    get();
                    skip();
                    BigInt v = parse_number();
                    if (v > 255) fail("exponent too large");
                    e = v.convert_to<unsigned>();
                }
                t.exps[idx - 1] += e;
                max_var = std::max(max_var, idx);
            } else {
                break;
            }
            any = true;
            skip();
            if (peek() == '*') {
                get();
                continue;
            }
            char n = peek();
            if (!(std::isdigit(static_cast<unsigned char>(n)) || n == 'y' || n == 'x')) break;
        }
        if (!any) fail("expected a term");
        return t;
    }

    BigInt parse_number() {
        std::size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) get();
        if (start == pos_) fail("expected a number");
        if (peek() == '.' || peek() == '/') fail("only integer coefficients are supported");
        return BigInt(s_.substr(start, pos_ - start));
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    char get() { return s_[pos_++]; }
    [[noreturn]] void fail(const std::string& m) const {
        throw ParseError("polynomial '" + s_ + "' at " + std::to_string(pos_) + ": " + m);
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

IntPoly build(const std::vector<RawTerm>& raw, unsigned n) {
    IntPoly p(n);
    for (auto& t : raw) {
        Exps e{};
        for (unsigned i = 0; i < kMaxVars; ++i) {
            if (t.exps[i] > 255) throw ParseError("exponent too large");
            e[i] = static_cast<std::uint8_t>(t.exps[i]);
        }
        p.add_term(e, t.coeff);
    }
    return p;
}

std::vector<std::string> split_top(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ',' || c == ';') {
            parts.push_back(cur);
            cur.clear();
        } else if (c != '{' && c != '}') {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

}  // namespace

IntPoly IntPoly::parse(const std::string& text, unsigned n_vars) {
    Parser ps(text);
    auto raw = ps.parse_sum();
    unsigned n = n_vars ? n_vars : std::max(1u, ps.max_var);
    if (ps.max_var > n) throw ParseError("polynomial '" + text + "' uses more than n_vars variables");
    return build(raw, n);
}

std::vector<IntPoly> IntPoly::parse_family(const std::string& text, unsigned n_vars) {
    std::vector<std::vector<RawTerm>> raws;
    unsigned n = 1;
    for (auto& part : split_top(text)) {
        Parser ps(part);
        raws.push_back(ps.parse_sum());
        n = std::max(n, ps.max_var);
    }
    if (n_vars) {
        if (n > n_vars) throw ParseError("family uses more than n_vars variables");
        n = n_vars;
    }
    std::vector<IntPoly> out;
    for (auto& r : raws) out.push_back(build(r, n));
    return out;
}

// --- weights ------------------------------------------------------------------

std::uint64_t weight(const IntPoly& p) {
    if (p.degree() < 1) throw ConstantMember("weight of a constant polynomial: " + p.to_string());
    return weight_order_rank(p.terms().begin()->first, p.n_vars());
}

BigInt leading_coeff(const IntPoly& p) {
    if (p.degree() < 1) throw ConstantMember("leading coefficient of a constant polynomial");
    return p.terms().begin()->second;
}

ZnProfile zn_profile(const IntPoly& p, std::uint64_t N) {
    if (N < 2) throw SpecViolation("zn_profile: N must be >= 2");
    ZnProfile z;
    z.N = N;
    for (auto& [e, c] : p.terms()) z.height = std::max(z.height, zn_height(c, N));
    IntPoly r = p.reduce_mod(N);
    z.deg_zn = r.degree();
    if (z.deg_zn >= 1) {
        z.weight = weight_order_rank(r.terms().begin()->first, r.n_vars());
        z.leading_coeff = r.terms().begin()->second.convert_to<std::uint64_t>();
    }
    return z;
}

std::vector<std::uint64_t> weight_sequence(const std::vector<IntPoly>& family,
                                           std::optional<std::uint64_t> N) {
    std::map<std::uint64_t, std::set<BigInt>> by_weight;
    for (std::size_t i = 0; i < family.size(); ++i) {
        const IntPoly& p = family[i];
        if (N) {
            ZnProfile z = zn_profile(p, *N);
            if (!z.weight)
                throw ConstantMember("member " + std::to_string(i) + " is constant mod " +
                                     std::to_string(*N));
            by_weight[*z.weight].insert(BigInt(*z.leading_coeff));
        } else {
            if (p.degree() < 1) throw ConstantMember("member " + std::to_string(i) + " is constant");
            by_weight[weight(p)].insert(leading_coeff(p));
        }
    }
    std::vector<std::uint64_t> seq;
    if (by_weight.empty()) return seq;
    seq.assign(by_weight.rbegin()->first, 0);
    for (auto& [w, s] : by_weight) seq[w - 1] = s.size();
    return seq;
}

// --- independence ---------------------------------------------------------------

namespace {

using Row = std::vector<BigInt>;

BigInt bareiss_det(std::vector<Row> a) {
    std::size_t n = a.size();
    BigInt prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t r = k + 1;
            while (r < n && a[r][k] == 0) ++r;
            if (r == n) return 0;
            std::swap(a[k], a[r]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

// Incremental row echelon basis over Q with integer rows.
struct Echelon {
    std::vector<std::pair<std::size_t, Row>> rows;  // pivot column, row

    bool insert(Row v) {
        for (auto& [pc, b] : rows) {
            if (v[pc] == 0) continue;
            BigInt f = v[pc], g = b[pc];
            for (std::size_t j = 0; j < v.size(); ++j) v[j] = v[j] * g - b[j] * f;
        }
        auto it = std::find_if(v.begin(), v.end(), [](const BigInt& x) { return x != 0; });
        if (it == v.end()) return false;
        BigInt g = 0;
        for (auto& x : v) g = gcd(g, x);
        for (auto& x : v) x /= g;
        rows.emplace_back(static_cast<std::size_t>(it - v.begin()), std::move(v));
        return true;
    }
};

}  // namespace

IndependenceResult independence_check(const std::vector<IntPoly>& family) {
    if (family.empty()) throw SpecViolation("independence_check: empty family");
    unsigned n = family[0].n_vars();
    std::set<Exps> monos_set;
    for (auto& p : family) {
        if (p.n_vars() != n) throw SpecViolation("independence_check: n_vars mismatch");
        for (auto& [e, c] : p.terms())
            if (total_degree(e) > 0) monos_set.insert(e);
    }
    std::vector<Exps> monos(monos_set.begin(), monos_set.end());
    std::sort(monos.begin(), monos.end(), [n](const Exps& a, const Exps& b) {
        return weight_order_rank(a, n) < weight_order_rank(b, n);
    });
    std::size_t m = family.size();
    IndependenceResult res;
    Echelon ech;
    std::vector<Row> chosen;
    for (auto& e : monos) {
        Row r(m);
        for (std::size_t j = 0; j < m; ++j) r[j] = family[j].coeff(e);
        if (ech.insert(r)) {
            chosen.push_back(r);
            res.minor_rows.push_back(e);
            if (chosen.size() == m) break;
        }
    }
    if (chosen.size() < m) {
        res.minor_rows.clear();
        return res;
    }
    res.independent = true;
    res.minor = bareiss_det(chosen);
    res.C1 = largest_prime_factor(res.minor);
    return res;
}

// --- polynomial functions mod N --------------------------------------------------

unsigned singmaster_ell(std::uint64_t N) {
    if (N < 2) throw SpecViolation("singmaster_ell: N must be >= 2");
    std::uint64_t f = 1;
    for (unsigned l = 1;; ++l) {
        f = mulmod(f, l, N);
        if (f == 0) return l;
    }
}

IntPoly singmaster_canonical(const IntPoly& p, std::uint64_t N) {
    if (N < 2) throw SpecViolation("singmaster_canonical: N must be >= 2");
    if (p.n_vars() != 1) throw SpecViolation("singmaster_canonical: univariate only");
    int D = std::max(p.degree(), 0);
    std::vector<std::uint64_t> b(D + 1, 0);
    for (auto& [e, c] : p.terms()) b[e[0]] = mod(c, N);
    unsigned ell = singmaster_ell(N);
    // gcd(k!, N) for k = 0..D
    std::vector<std::uint64_t> ck(D + 1, 1);
    std::uint64_t g = 1;
    for (int k = 0; k <= D; ++k) {
        if (k > 0) g = gcd_u(mulmod(g, static_cast<std::uint64_t>(k), N), N);
        ck[k] = (static_cast<unsigned>(k) >= ell) ? 1 : N / g;
    }
    // falling factorials x(x-1)...(x-k+1), ascending coefficients mod N
    std::vector<std::vector<std::uint64_t>> ff(D + 1);
    ff[0] = {1 % N};
    for (int k = 1; k <= D; ++k) {
        ff[k].assign(k + 1, 0);
        std::uint64_t shift = mod(-static_cast<std::int64_t>(k - 1), N);
        for (int j = 0; j < k; ++j) {
            ff[k][j + 1] = (ff[k][j + 1] + ff[k - 1][j]) % N;
            ff[k][j] = (ff[k][j] + mulmod(ff[k - 1][j], shift, N)) % N;
        }
    }
    for (int k = D; k >= 0; --k) {
        std::uint64_t q = b[k] / ck[k];
        if (!q) continue;
        std::uint64_t f = mulmod(q, ck[k], N);
        for (int j = 0; j <= k; ++j) b[j] = (b[j] + N - mulmod(f, ff[k][j], N)) % N;
    }
    IntPoly r(1);
    for (int k = 0; k <= D; ++k) {
        Exps e{};
        e[0] = static_cast<std::uint8_t>(k);
        r.add_term(e, b[k]);
    }
    return r;
}

namespace {

bool brute_zero(const IntPoly& d, std::uint64_t N) {
    unsigned n = d.n_vars();
    int deg = std::max(d.degree(), 0);
    // pw[y][e] = y^e mod N
    std::vector<std::vector<std::uint64_t>> pw(N, std::vector<std::uint64_t>(deg + 1));
    for (std::uint64_t y = 0; y < N; ++y) {
        pw[y][0] = 1 % N;
        for (int e = 1; e <= deg; ++e) pw[y][e] = mulmod(pw[y][e - 1], y, N);
    }
    std::vector<std::pair<Exps, std::uint64_t>> terms;
    for (auto& [e, c] : d.terms()) terms.emplace_back(e, mod(c, N));
    std::vector<std::uint64_t> y(n, 0);
    for (;;) {
        std::uint64_t s = 0;
        for (auto& [e, c] : terms) {
            std::uint64_t t = c;
            for (unsigned i = 0; i < n && t; ++i)
                if (e[i]) t = mulmod(t, pw[y[i]][e[i]], N);
            s = (s + t) % N;
        }
        if (s) return false;
        unsigned i = 0;
        while (i < n && ++y[i] == N) y[i++] = 0;
        if (i == n) return true;
    }
}

}  // namespace

bool function_equal_mod(const IntPoly& p, const IntPoly& q, std::uint64_t N, EqMethod method) {
    if (N < 2) throw SpecViolation("function_equal_mod: N must be >= 2");
    if (p.n_vars() != q.n_vars()) throw SpecViolation("function_equal_mod: n_vars mismatch");
    IntPoly d = (p - q).reduce_mod(N);
    if (method == EqMethod::Coefficient) return d.is_zero();
    std::uint64_t work = sat_pow(N, p.n_vars());
    if (method == EqMethod::BruteForce) {
        if (work > Budget::poly_equality())
            throw BudgetExceeded("function_equal_mod: N^n = " + std::to_string(work) + " exceeds cap");
        return brute_zero(d, N);
    }
    if (d.is_zero()) return true;
    std::uint64_t L = lpf(N);
    if (zn_profile(p, N).deg_zn < static_cast<int>(L) && zn_profile(q, N).deg_zn < static_cast<int>(L))
        return false;
    if (work <= Budget::poly_equality()) return brute_zero(d, N);
    if (p.n_vars() == 1) return singmaster_canonical(d, N).is_zero();
    throw BudgetExceeded("function_equal_mod: N^n = " + std::to_string(work) +
                         " exceeds cap and degrees are not below lpf N");
}

bool induces_constant(const IntPoly& p, std::uint64_t N, EqMethod method) {
    return function_equal_mod(p.without_constant(), IntPoly(p.n_vars()), N, method);
}

DistinctnessResult essentially_distinct(const std::vector<IntPoly>& family, std::uint64_t N,
                                        EqMethod method) {
    DistinctnessResult r;
    for (std::size_t i = 0; i < family.size(); ++i) {
        if (induces_constant(family[i], N, method)) {
            r.ok = false;
            r.witness = {i, i};
            return r;
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (induces_constant(family[i] - family[j], N, method)) {
                r.ok = false;
                r.witness = {j, i};
                return r;
            }
        }
    }
    return r;
}

IntPoly shift_difference(const IntPoly& p, const IntPoly& q, const std::vector<BigInt>& h) {
    if (p.n_vars() != q.n_vars()) throw SpecViolation("shift_difference: n_vars mismatch");
    return p.shift(h) - q;
}

IntersectiveResult jointly_intersective_up_to(const std::vector<IntPoly>& family,
                                              std::uint64_t k_max) {
    if (k_max < 1) throw SpecViolation("jointly_intersective_up_to: k_max must be >= 1");
    for (auto& p : family)
        if (p.n_vars() != 1) throw SpecViolation("jointly_intersective_up_to: univariate family required");
    IntersectiveResult r;
    for (std::uint64_t k = 2; k <= k_max; ++k) {
        bool found = false;
        for (std::uint64_t y = 0; y < k && !found; ++y) {
            found = std::all_of(family.begin(), family.end(),
                                [&](const IntPoly& p) { return p.eval_mod({y}, k) == 0; });
        }
        if (!found) {
            r.ok = false;
            r.first_failure = k;
            return r;
        }
    }
    return r;
}

HeightArithmetic height_arithmetic_bounds(const BigInt& a, const BigInt& b, std::uint64_t N) {
    if (N < 2) throw SpecViolation("height_arithmetic_bounds: N must be >= 2");
    HeightArithmetic h;
    std::uint64_t h1 = zn_height(a, N), h2 = zn_height(b, N);
    h.sum_height = zn_height(BigInt(a + b), N);
    h.prod_height = zn_height(BigInt(a * b), N);
    h.sum_bound = h1 + h2;
    h.prod_bound = sat_mul(h1, h2);
    return h;
}

std::uint64_t family_height(const std::vector<IntPoly>& fam, std::uint64_t N) {
    std::uint64_t h = 0;
    for (auto& p : fam) h = std::max(h, zn_profile(p, N).height);
    return h;
}

}  // namespace polysz
