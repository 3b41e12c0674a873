#include "polysz/ring.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "polysz/budget.hpp"
#include "polysz/errors.hpp"
#include "polysz/parallel.hpp"

namespace polysz {

// --- RingSpec -------------------------------------------------------------------

RingSpec RingSpec::modint(std::uint64_t N) {
    RingSpec s;
    s.kind = Kind::ModInt;
    s.N = N;
    return s;
}

RingSpec RingSpec::quotient(std::uint64_t N, const IntPoly& f) {
    RingSpec s;
    s.kind = Kind::Quotient;
    s.N = N;
    s.f = f;
    return s;
}

RingSpec RingSpec::product(std::vector<RingSpec> parts) {
    RingSpec s;
    s.kind = Kind::Product;
    s.N = 0;
    s.parts = std::move(parts);
    return s;
}

RingSpec RingSpec::nilpotent(std::uint64_t p, unsigned k) {
    RingSpec s;
    s.kind = Kind::NilpotentExt;
    s.N = p;
    s.k = k;
    return s;
}

namespace {

using ModVec = std::vector<std::uint64_t>;  // ascending coefficients mod p

ModVec to_modvec(const IntPoly& f, std::uint64_t p) {
    ModVec v(std::max(f.degree(), 0) + 1, 0);
    for (auto& [e, c] : f.terms()) v[e[0]] = mod(c, p);
    while (v.size() > 1 && v.back() == 0) v.pop_back();
    return v;
}

// a mod g over F_p with g monic
ModVec poly_rem(ModVec a, const ModVec& g, std::uint64_t p) {
    std::size_t dg = g.size() - 1;
    while (a.size() > dg && !a.empty()) {
        std::uint64_t t = a.back();
        std::size_t shift = a.size() - 1 - dg;
        if (t)
            for (std::size_t j = 0; j <= dg; ++j)
                a[shift + j] = (a[shift + j] + p - mulmod(t, g[j], p)) % p;
        a.pop_back();
    }
    return a;
}

bool all_zero(const ModVec& v) {
    return std::all_of(v.begin(), v.end(), [](std::uint64_t x) { return x == 0; });
}

}  // namespace

bool irreducible_mod_prime(const IntPoly& f, std::uint64_t p) {
    ModVec fv = to_modvec(f, p);
    std::size_t d = fv.size() - 1;
    if (d == 0) return false;
    for (std::size_t e = 1; e <= d / 2; ++e) {
        std::uint64_t count = sat_pow(p, static_cast<unsigned>(e));
        require_budget(count, "irreducibility search");
        ModVec g(e + 1, 0);
        g[e] = 1;
        for (std::uint64_t t = 0; t < count; ++t) {
            std::uint64_t r = t;
            for (std::size_t j = 0; j < e; ++j) {
                g[j] = r % p;
                r /= p;
            }
            if (all_zero(poly_rem(fv, g, p))) return false;
        }
    }
    return true;
}

IntPoly first_monic_irreducible(std::uint64_t p, unsigned r) {
    if (!is_prime(p) || r == 0) throw SpecViolation("first_monic_irreducible: need prime p, r >= 1");
    std::uint64_t count = sat_pow(p, r);
    require_budget(count, "irreducible polynomial search");
    for (std::uint64_t t = 0; t < count; ++t) {
        std::vector<std::int64_t> c(r + 1, 0);
        std::uint64_t v = t;
        for (unsigned j = 0; j < r; ++j) {
            c[j] = static_cast<std::int64_t>(v % p);
            v /= p;
        }
        c[r] = 1;
        IntPoly f = IntPoly::from_coeffs(c);
        if (irreducible_mod_prime(f, p)) return f;
    }
    throw SpecViolation("no irreducible polynomial found");
}

RingSpec RingSpec::galois_field(std::uint64_t q) {
    auto fac = factorize(q);
    if (fac.size() != 1) throw SpecViolation("gf: q must be a prime power");
    auto [p, r] = fac[0];
    if (r == 1) return modint(p);
    return quotient(p, first_monic_irreducible(p, r));
}

namespace {

std::uint64_t parse_u64(const std::string& s, const std::string& ctx) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw ParseError("ring spec '" + ctx + "': expected a positive integer, got '" + s + "'");
    return std::stoull(s);
}

std::string strip(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::string poly_in_x(const IntPoly& f) {
    std::string s = f.to_string();
    std::replace(s.begin(), s.end(), 'y', 'x');
    return s;
}

}  // namespace

RingSpec RingSpec::parse(const std::string& raw) {
    std::string text = strip(raw);
    auto colon = text.find(':');
    if (colon == std::string::npos) throw ParseError("ring spec '" + text + "': missing ':'");
    std::string head = text.substr(0, colon), rest = text.substr(colon + 1);
    if (head == "zmod") return modint(parse_u64(strip(rest), text));
    if (head == "gf") return galois_field(parse_u64(strip(rest), text));
    if (head == "nilp") {
        auto c2 = rest.find(':');
        if (c2 == std::string::npos) throw ParseError("ring spec '" + text + "': expected nilp:p:k");
        return nilpotent(parse_u64(strip(rest.substr(0, c2)), text),
                         static_cast<unsigned>(parse_u64(strip(rest.substr(c2 + 1)), text)));
    }
    if (head == "pgr") {
        auto c2 = rest.find(':');
        if (c2 == std::string::npos) throw ParseError("ring spec '" + text + "': expected pgr:N:f");
        return quotient(parse_u64(strip(rest.substr(0, c2)), text), IntPoly::parse(rest.substr(c2 + 1), 1));
    }
    if (head == "prod") {
        std::string body = strip(rest);
        if (body.size() < 2 || body.front() != '(' || body.back() != ')')
            throw ParseError("ring spec '" + text + "': expected prod:(spec,...)");
        body = body.substr(1, body.size() - 2);
        std::vector<RingSpec> parts;
        int depth = 0;
        std::string cur;
        for (char c : body) {
            if (c == '(') ++depth;
            if (c == ')') --depth;
            if (c == ',' && depth == 0) {
                parts.push_back(parse(cur));
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (depth != 0) throw ParseError("ring spec '" + text + "': unbalanced parentheses");
        parts.push_back(parse(cur));
        return product(std::move(parts));
    }
    throw ParseError("ring spec '" + text + "': unknown kind '" + head + "'");
}

std::string RingSpec::to_string() const {
    switch (kind) {
        case Kind::ModInt:
            return "zmod:" + std::to_string(N);
        case Kind::Quotient:
            return "pgr:" + std::to_string(N) + ":" + poly_in_x(f);
        case Kind::NilpotentExt:
            return "nilp:" + std::to_string(N) + ":" + std::to_string(k);
        case Kind::Product: {
            std::string s = "prod:(";
            for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "," : "") + parts[i].to_string();
            return s + ")";
        }
    }
    return "";
}

// --- Ring -------------------------------------------------------------------------

namespace {

void flatten(const RingSpec& s, std::vector<RingSpec>& out) {
    if (s.kind == RingSpec::Kind::Product) {
        if (s.parts.empty()) throw SpecViolation("product ring needs at least one factor");
        for (auto& p : s.parts) flatten(p, out);
    } else {
        out.push_back(s);
    }
}

void validate(const RingSpec& s) {
    switch (s.kind) {
        case RingSpec::Kind::ModInt:
            if (s.N < 2) throw SpecViolation("ModInt: N must be >= 2");
            break;
        case RingSpec::Kind::Quotient: {
            if (s.N < 2) throw SpecViolation("Quotient: N must be >= 2");
            if (s.f.n_vars() != 1) throw SpecViolation("Quotient: f must be univariate");
            if (s.f.degree() < 1) throw SpecViolation("Quotient: deg f must be >= 1");
            if (mod(leading_coeff(s.f), s.N) != 1 % s.N) throw SpecViolation("Quotient: f must be monic");
            // a monic f of positive degree is never a unit of Z_N[x], which is all the
            // pseudo-Galois condition asks for
            break;
        }
        case RingSpec::Kind::NilpotentExt:
            if (!is_prime(s.N)) throw SpecViolation("NilpotentExt: p must be prime");
            if (s.k < 1) throw SpecViolation("NilpotentExt: k must be >= 1");
            break;
        case RingSpec::Kind::Product:
            break;
    }
}

unsigned digit_count(const RingSpec& s) {
    switch (s.kind) {
        case RingSpec::Kind::ModInt:
            return 1;
        case RingSpec::Kind::Quotient:
            return static_cast<unsigned>(s.f.degree());
        case RingSpec::Kind::NilpotentExt:
            return s.k + 1;
        default:
            return 0;
    }
}

}  // namespace

Ring::Ring(const RingSpec& spec) : spec_(spec) {
    flatten(spec_, comps_);
    std::uint64_t size = 1;
    for (auto& c : comps_) {
        validate(c);
        comp_first_digit_.push_back(radix_.size());
        unsigned nd = digit_count(c);
        if (nd > 40) throw SpecViolation("ring too large");
        for (unsigned j = 0; j < nd; ++j) {
            radix_.push_back(c.N);
            size = sat_mul(size, c.N);
            if (size > kMaxSize)
                throw SpecViolation("ring of size > " + std::to_string(kMaxSize) + " rejected: " + spec_.to_string());
        }
    }
    size_ = size;
    stride_.resize(radix_.size());
    std::uint64_t st = 1;
    for (std::size_t j = 0; j < radix_.size(); ++j) {
        stride_[j] = st;
        st *= radix_[j];
    }
    cyclic_ = comps_.size() == 1 && comps_[0].kind == RingSpec::Kind::ModInt;

    std::vector<std::uint64_t> od(radix_.size(), 0);
    for (auto fd : comp_first_digit_) od[fd] = 1;
    one_ = from_digits(od);

    if (size_ <= kTableSize) {
        add_tab_.resize(size_ * size_);
        mul_tab_.resize(size_ * size_);
        for (Elem a = 0; a < size_; ++a)
            for (Elem b = 0; b < size_; ++b) {
                add_tab_[a * size_ + b] = add_slow(a, b);
                mul_tab_[a * size_ + b] = mul_slow(a, b);
            }
    }
    neg_tab_.resize(size_);
    for (Elem a = 0; a < size_; ++a) {
        auto d = digits(a);
        for (std::size_t j = 0; j < d.size(); ++j) d[j] = (radix_[j] - d[j]) % radix_[j];
        neg_tab_[a] = from_digits(d);
    }

    // characteristic: additive order of 1, by iteration
    std::uint64_t n = 1;
    for (Elem x = one_; x != 0; x = add(x, one_)) ++n;
    char_ = n;
    lpf_ = polysz::lpf(char_);

    roots_.resize(char_);
    for (std::uint64_t t = 0; t < char_; ++t) {
        double ang = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(char_);
        roots_[t] = {std::cos(ang), std::sin(ang)};
    }
    build_additive();
}

std::vector<std::uint64_t> Ring::digits(Elem x) const {
    std::vector<std::uint64_t> d(radix_.size());
    std::uint64_t v = x;
    for (std::size_t j = 0; j < radix_.size(); ++j) {
        d[j] = v % radix_[j];
        v /= radix_[j];
    }
    return d;
}

Elem Ring::from_digits(const std::vector<std::uint64_t>& d) const {
    std::uint64_t v = 0;
    for (std::size_t j = 0; j < radix_.size(); ++j) v += (d[j] % radix_[j]) * stride_[j];
    return static_cast<Elem>(v);
}

Elem Ring::component_value(Elem x, std::size_t c) const {
    std::size_t first = comp_first_digit_[c];
    std::size_t last = c + 1 < comps_.size() ? comp_first_digit_[c + 1] : radix_.size();
    return static_cast<Elem>((x / stride_[first]) % (stride_[last - 1] * radix_[last - 1] / stride_[first]));
}

Elem Ring::add_slow(Elem a, Elem b) const {
    if (cyclic_) return static_cast<Elem>((std::uint64_t(a) + b) % size_);
    auto da = digits(a), db = digits(b);
    for (std::size_t j = 0; j < da.size(); ++j) da[j] = (da[j] + db[j]) % radix_[j];
    return from_digits(da);
}

Elem Ring::mul_slow(Elem a, Elem b) const {
    if (cyclic_) return static_cast<Elem>(mulmod(a, b, size_));
    auto da = digits(a), db = digits(b);
    std::vector<std::uint64_t> out(da.size(), 0);
    for (std::size_t c = 0; c < comps_.size(); ++c) {
        const RingSpec& s = comps_[c];
        std::size_t f0 = comp_first_digit_[c];
        std::uint64_t M = s.N;
        switch (s.kind) {
            case RingSpec::Kind::ModInt:
                out[f0] = mulmod(da[f0], db[f0], M);
                break;
            case RingSpec::Kind::NilpotentExt: {
                std::uint64_t a0 = da[f0], b0 = db[f0];
                out[f0] = a0 * b0 % M;
                for (unsigned i = 1; i <= s.k; ++i)
                    out[f0 + i] = (a0 * db[f0 + i] + da[f0 + i] * b0) % M;
                break;
            }
            case RingSpec::Kind::Quotient: {
                std::size_t d = static_cast<std::size_t>(s.f.degree());
                std::vector<std::uint64_t> prod(2 * d - 1, 0);
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t j = 0; j < d; ++j)
                        prod[i + j] = (prod[i + j] + mulmod(da[f0 + i], db[f0 + j], M)) % M;
                std::vector<std::uint64_t> fc(d, 0);
                for (auto& [e, cf] : s.f.terms())
                    if (e[0] < d) fc[e[0]] = mod(cf, M);
                for (std::size_t k = 2 * d - 2; k >= d; --k) {
                    std::uint64_t t = prod[k];
                    prod[k] = 0;
                    if (t)
                        for (std::size_t j = 0; j < d; ++j)
                            prod[k - d + j] = (prod[k - d + j] + M - mulmod(t, fc[j], M)) % M;
                }
                for (std::size_t i = 0; i < d; ++i) out[f0 + i] = prod[i];
                break;
            }
            default:
                break;
        }
    }
    return from_digits(out);
}

Elem Ring::add(Elem a, Elem b) const {
    if (!add_tab_.empty()) return add_tab_[a * size_ + b];
    return add_slow(a, b);
}

Elem Ring::mul(Elem a, Elem b) const {
    if (!mul_tab_.empty()) return mul_tab_[a * size_ + b];
    return mul_slow(a, b);
}

Elem Ring::neg(Elem a) const { return neg_tab_[a]; }

Elem Ring::scale(std::uint64_t k, Elem a) const {
    auto d = digits(a);
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = mulmod(d[j], k % radix_[j], radix_[j]);
    return from_digits(d);
}

Elem Ring::embed(std::int64_t a) const { return scale(mod(a, char_), one_); }
Elem Ring::embed(const BigInt& a) const { return scale(mod(a, char_), one_); }

bool Ring::is_unit(Elem x) const {
    for (Elem y = 0; y < size_; ++y)
        if (mul(x, y) == one_) return true;
    return false;
}

std::uint64_t Ring::additive_order(Elem x) const {
    auto d = digits(x);
    std::uint64_t o = 1;
    for (std::size_t j = 0; j < d.size(); ++j) o = lcm_u(o, radix_[j] / gcd_u(d[j], radix_[j]));
    return o;
}

std::string Ring::element_to_string(Elem x) const {
    auto d = digits(x);
    std::vector<std::string> parts;
    for (std::size_t c = 0; c < comps_.size(); ++c) {
        const RingSpec& s = comps_[c];
        std::size_t f0 = comp_first_digit_[c];
        std::ostringstream os;
        if (s.kind == RingSpec::Kind::ModInt) {
            os << d[f0];
        } else if (s.kind == RingSpec::Kind::Quotient) {
            IntPoly p(1);
            for (int j = s.f.degree() - 1; j >= 0; --j) {
                Exps e{};
                e[0] = static_cast<std::uint8_t>(j);
                p.add_term(e, d[f0 + j]);
            }
            os << poly_in_x(p);
        } else {
            bool any = false;
            if (d[f0]) {
                os << d[f0];
                any = true;
            }
            for (unsigned i = 1; i <= s.k; ++i) {
                if (!d[f0 + i]) continue;
                if (any) os << "+";
                if (d[f0 + i] != 1) os << d[f0 + i] << "*";
                os << "x" << i;
                any = true;
            }
            if (!any) os << "0";
        }
        parts.push_back(os.str());
    }
    if (parts.size() == 1) return parts[0];
    std::string s = "(";
    for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? ", " : "") + parts[i];
    return s + ")";
}

void Ring::build_additive() {
    AdditiveStructure& A = add_;
    if (comps_.size() == 1) {
        // natural basis: highest digit first, the constant digit last
        const RingSpec& s = comps_[0];
        std::size_t nd = radix_.size();
        std::vector<std::size_t> order;
        if (s.kind == RingSpec::Kind::NilpotentExt) {
            for (std::size_t j = 1; j < nd; ++j) order.push_back(j);
            order.push_back(0);
        } else {
            for (std::size_t j = nd; j-- > 0;) order.push_back(j);
        }
        for (auto j : order) {
            A.invariant_factors.push_back(radix_[j]);
            A.generators.push_back(static_cast<Elem>(stride_[j]));
        }
    } else {
        // Greedy: scan by decreasing additive order and keep x when <x> meets the
        // span K trivially, starting from K = <1>.
        std::vector<char> inK(size_, 0);
        std::vector<Elem> kmembers;
        auto absorb = [&](Elem g) {
            std::vector<Elem> fresh;
            for (Elem base : kmembers) {
                Elem y = base;
                for (;;) {
                    y = add(y, g);
                    if (inK[y]) break;
                    inK[y] = 1;
                    fresh.push_back(y);
                }
            }
            kmembers.insert(kmembers.end(), fresh.begin(), fresh.end());
        };
        inK[0] = 1;
        kmembers.push_back(0);
        absorb(one_);
        std::vector<std::pair<std::uint64_t, Elem>> chosen{{char_, one_}};
        std::vector<std::pair<std::uint64_t, Elem>> cand;
        for (Elem x = 0; x < size_; ++x) cand.emplace_back(additive_order(x), x);
        std::sort(cand.begin(), cand.end(), [](auto& a, auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        for (auto [ord, x] : cand) {
            if (kmembers.size() == size_) break;
            if (inK[x]) continue;
            bool ok = true;
            for (auto p : prime_divisors(ord))
                if (inK[scale(ord / p, x)]) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            absorb(x);
            chosen.emplace_back(ord, x);
        }
        std::reverse(chosen.begin(), chosen.end());
        for (auto [o, g] : chosen) {
            A.invariant_factors.push_back(o);
            A.generators.push_back(g);
        }
    }
    std::uint64_t prod = 1;
    for (std::size_t i = 0; i < A.invariant_factors.size(); ++i) {
        prod *= A.invariant_factors[i];
        if (i + 1 < A.invariant_factors.size() && A.invariant_factors[i + 1] % A.invariant_factors[i])
            throw std::logic_error("additive decomposition: invariant factors do not divide");
    }
    if (prod != size_ || A.generators.back() != one_)
        throw std::logic_error("additive decomposition failed for " + spec_.to_string());

    std::size_t r = A.rank();
    coord_flat_.assign(size_ * r, 0);
    std::vector<char> seen(size_, 0);
    std::vector<std::uint64_t> a(r, 0);
    Elem cur = 0;
    for (std::uint64_t t = 0; t < size_; ++t) {
        if (seen[cur]) throw std::logic_error("additive decomposition: coordinates not unique");
        seen[cur] = 1;
        for (std::size_t i = 0; i < r; ++i) coord_flat_[cur * r + i] = static_cast<std::uint32_t>(a[i]);
        for (std::size_t i = 0; i < r; ++i) {
            cur = add(cur, A.generators[i]);
            if (++a[i] < A.invariant_factors[i]) break;
            a[i] = 0;
        }
    }
    char_scale_.resize(r);
    for (std::size_t i = 0; i < r; ++i) char_scale_[i] = char_ / A.invariant_factors[i];

    A.structure_constants.assign(r, std::vector<std::vector<std::uint64_t>>(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) A.structure_constants[i][j] = coords(mul(A.generators[i], A.generators[j]));
}

std::vector<std::uint64_t> Ring::coords(Elem x) const {
    std::size_t r = add_.rank();
    return {coord_flat_.begin() + x * r, coord_flat_.begin() + (x + 1) * r};
}

Elem Ring::from_coords(const std::vector<std::uint64_t>& a) const {
    Elem x = 0;
    for (std::size_t i = 0; i < a.size(); ++i) x = add(x, scale(a[i], add_.generators[i]));
    return x;
}

std::vector<std::uint64_t> Ring::character_coords(std::uint64_t idx) const {
    std::vector<std::uint64_t> a(add_.rank());
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = idx % add_.invariant_factors[i];
        idx /= add_.invariant_factors[i];
    }
    return a;
}

std::uint64_t Ring::character_index(const std::vector<std::uint64_t>& a) const {
    std::uint64_t idx = 0;
    for (std::size_t i = a.size(); i-- > 0;) idx = idx * add_.invariant_factors[i] + a[i] % add_.invariant_factors[i];
    return idx;
}

std::uint64_t Ring::conjugate_character(std::uint64_t idx) const {
    auto a = character_coords(idx);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = (add_.invariant_factors[i] - a[i]) % add_.invariant_factors[i];
    return character_index(a);
}

std::vector<std::uint64_t> Ring::character_weights(std::uint64_t idx) const {
    auto a = character_coords(idx);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = a[i] * char_scale_[i] % char_;
    return a;
}

std::uint64_t Ring::character_phase(const std::vector<std::uint64_t>& w, Elem x) const {
    std::size_t r = w.size();
    const std::uint32_t* c = coord_flat_.data() + std::size_t(x) * r;
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < r; ++i) s = (s + w[i] * c[i]) % char_;
    return s;
}

std::uint64_t Ring::character_phase(std::uint64_t idx, Elem x) const {
    return character_phase(character_weights(idx), x);
}

std::complex<double> Ring::character_value(std::uint64_t idx, Elem x) const {
    return roots_[character_phase(idx, x)];
}

std::vector<std::uint32_t> Ring::character_phase_table(std::uint64_t idx) const {
    auto w = character_weights(idx);
    std::vector<std::uint32_t> t(size_);
    for (Elem x = 0; x < size_; ++x) t[x] = static_cast<std::uint32_t>(character_phase(w, x));
    return t;
}

Elem Ring::eval(const IntPoly& p, const std::vector<Elem>& y) const {
    if (y.size() != p.n_vars()) throw SpecViolation("Ring::eval: arity mismatch");
    Elem s = 0;
    for (auto& [e, c] : p.terms()) {
        Elem t = embed(c);
        for (unsigned i = 0; i < p.n_vars(); ++i)
            for (unsigned k = 0; k < e[i]; ++k) t = mul(t, y[i]);
        s = add(s, t);
    }
    return s;
}

std::uint64_t Ring::tuple_count(unsigned n) const {
    std::uint64_t c = sat_pow(size_, n);
    require_budget(c, "|R|^" + std::to_string(n));
    return c;
}

std::vector<Elem> Ring::value_table(const IntPoly& p) const {
    unsigned n = p.n_vars();
    std::uint64_t count = tuple_count(n);
    std::vector<unsigned> maxe(n, 0);
    for (auto& [e, c] : p.terms())
        for (unsigned i = 0; i < n; ++i) maxe[i] = std::max<unsigned>(maxe[i], e[i]);
    unsigned top = *std::max_element(maxe.begin(), maxe.end());
    // pw[e][y] = y^e
    std::vector<std::vector<Elem>> pw(top + 1, std::vector<Elem>(size_));
    for (Elem y = 0; y < size_; ++y) {
        pw[0][y] = one_;
        for (unsigned e = 1; e <= top; ++e) pw[e][y] = mul(pw[e - 1][y], y);
    }
    std::vector<std::pair<Exps, Elem>> terms;
    for (auto& [e, c] : p.terms()) terms.emplace_back(e, embed(c));
    std::vector<Elem> out(count);
    parallel_for(count, [&](std::uint64_t t) {
        std::uint64_t v = t;
        Elem y[kMaxVars];
        for (unsigned i = 0; i < n; ++i) {
            y[i] = static_cast<Elem>(v % size_);
            v /= size_;
        }
        Elem s = 0;
        for (auto& [e, c] : terms) {
            Elem m = c;
            for (unsigned i = 0; i < n; ++i)
                if (e[i]) m = mul(m, pw[e[i]][y[i]]);
            s = add(s, m);
        }
        out[t] = s;
    });
    return out;
}

RingPtr make_ring(const RingSpec& spec) { return std::make_shared<const Ring>(spec); }

}  // namespace polysz
