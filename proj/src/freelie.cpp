#include "bautlab/freelie.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "bautlab/error.hpp"
#include "bautlab/parallel.hpp"

namespace bautlab {

// ---------------------------------------------------------------- monomials

namespace {

struct MonomialParser {
    std::string_view s;
    const std::vector<Generator>& gens;
    std::size_t pos = 0;

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorKind::ParseError,
                    "bracket expression '" + std::string(s) + "': " + what + " at position " + std::to_string(pos));
    }
    void expect(char c) {
        skip();
        if (pos >= s.size() || s[pos] != c) fail(std::string("expected '") + c + "'");
        ++pos;
    }
    Monomial parse() {
        skip();
        if (pos >= s.size()) fail("unexpected end");
        if (s[pos] == '[') {
            ++pos;
            Monomial m;
            m.left = std::make_shared<Monomial>(parse());
            expect(',');
            m.right = std::make_shared<Monomial>(parse());
            expect(']');
            return m;
        }
        std::size_t start = pos;
        while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_' || s[pos] == '\''))
            ++pos;
        if (pos == start) fail("expected a generator name");
        std::string name(s.substr(start, pos - start));
        for (std::size_t k = 0; k < gens.size(); ++k)
            if (gens[k].name == name) {
                Monomial m;
                m.generator = static_cast<int>(k);
                return m;
            }
        throw Error(ErrorKind::UnknownGenerator, "unknown generator '" + name + "'");
    }
};

constexpr std::uint32_t kMaxWordLength = 31;
constexpr std::size_t kMaxGenerators = 16;

Word concat(const Word& a, const Word& b) {
    Word w;
    w.bits = a.bits | (b.bits << (4 * a.len));
    w.len = a.len + b.len;
    return w;
}

std::string add_content(const std::string& a, const std::string& b) {
    std::string c = a;
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = static_cast<char>(c[k] + b[k]);
    return c;
}

std::string word_content(const Word& w, std::size_t ngens) {
    std::string c(ngens, '\0');
    for (std::uint32_t p = 0; p < w.len; ++p) c[w.letter(p)]++;
    return c;
}

// ------------------------------------------------------ per-content blocks

struct BlockBuild {
    std::vector<std::size_t> accepted;  // positions in the candidate list
    std::vector<Word> pivots;
    std::vector<SparseVec> inv_cols;
};

using u64 = std::uint64_t;

u64 mulmod(u64 a, u64 b, u64 p) { return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % p); }

u64 powmod(u64 a, u64 e, u64 p) {
    u64 r = 1;
    while (e) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

u64 to_mod(long long v, u64 p) {
    long long m = v % static_cast<long long>(p);
    return static_cast<u64>(m < 0 ? m + static_cast<long long>(p) : m);
}

long long coeff(const Tensor& t, const Word& w) {
    auto it = t.find(w);
    return it == t.end() ? 0 : it->second;
}

// Inverse of a square rational matrix by Gauss-Jordan; nullopt if singular.
std::optional<std::vector<std::vector<Rational>>> invert(std::vector<std::vector<Rational>> m) {
    std::size_t n = m.size();
    std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = Rational(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = n;
        for (std::size_t r = c; r < n; ++r)
            if (!m[r][c].is_zero()) {
                piv = r;
                break;
            }
        if (piv == n) return std::nullopt;
        std::swap(m[piv], m[c]);
        std::swap(inv[piv], inv[c]);
        Rational f = Rational(1) / m[c][c];
        for (std::size_t k = 0; k < n; ++k) {
            if (!m[c][k].is_zero()) m[c][k] *= f;
            if (!inv[c][k].is_zero()) inv[c][k] *= f;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || m[r][c].is_zero()) continue;
            Rational g = m[r][c];
            for (std::size_t k = 0; k < n; ++k) {
                if (!m[c][k].is_zero()) m[r][k] -= g * m[c][k];
                if (!inv[c][k].is_zero()) inv[r][k] -= g * inv[c][k];
            }
        }
    }
    return inv;
}

// Selects a basis among the candidates. Independence is decided modulo a
// large prime (independent mod p implies independent over Q); every rejected
// candidate is then checked to be an exact rational combination of the
// accepted ones, and a different prime is tried if that ever fails.
BlockBuild build_block(const std::vector<const Tensor*>& cands) {
    static const u64 primes[] = {2147483647ULL, 2147483629ULL, 2147483587ULL, 1000000007ULL, 998244353ULL};
    for (u64 p : primes) {
        std::unordered_map<Word, std::size_t, WordHash> col;
        std::vector<Word> col_words;
        std::vector<std::vector<u64>> rows;
        std::vector<std::size_t> pivcol;
        BlockBuild out;
        std::vector<std::size_t> rejected;
        for (std::size_t c = 0; c < cands.size(); ++c) {
            std::vector<std::pair<std::size_t, u64>> entries;
            for (const auto& [w, v] : *cands[c]) {
                if (v == 0) continue;
                auto [it, fresh] = col.emplace(w, col_words.size());
                if (fresh) col_words.push_back(w);
                entries.emplace_back(it->second, to_mod(v, p));
            }
            std::vector<u64> vec(col_words.size(), 0);
            for (const auto& [k, v] : entries) vec[k] = v;
            for (std::size_t r = 0; r < rows.size(); ++r) {
                u64 f = vec[pivcol[r]];
                if (f == 0) continue;
                const auto& row = rows[r];
                for (std::size_t k = 0; k < row.size(); ++k)
                    if (row[k]) vec[k] = (vec[k] + p - mulmod(f, row[k], p)) % p;
            }
            std::size_t lead = vec.size();
            for (std::size_t k = 0; k < vec.size(); ++k)
                if (vec[k]) {
                    lead = k;
                    break;
                }
            if (lead == vec.size()) {
                rejected.push_back(c);
                continue;
            }
            u64 inv = powmod(vec[lead], p - 2, p);
            for (auto& x : vec) x = mulmod(x, inv, p);
            rows.push_back(std::move(vec));
            pivcol.push_back(lead);
            out.accepted.push_back(c);
        }
        std::size_t k = out.accepted.size();
        for (std::size_t r = 0; r < k; ++r) out.pivots.push_back(col_words[pivcol[r]]);
        // M[r][c] = coefficient of accepted candidate c at pivot word r
        std::vector<std::vector<Rational>> m(k, std::vector<Rational>(k));
        for (std::size_t r = 0; r < k; ++r)
            for (std::size_t c = 0; c < k; ++c) m[r][c] = Rational(coeff(*cands[out.accepted[c]], out.pivots[r]));
        auto inv = invert(std::move(m));
        if (!inv) continue;
        out.inv_cols.resize(k);
        for (std::size_t r = 0; r < k; ++r) {
            std::vector<SparseVec::Entry> e;
            for (std::size_t c = 0; c < k; ++c)
                if (!(*inv)[c][r].is_zero()) e.emplace_back(c, (*inv)[c][r]);
            out.inv_cols[r] = SparseVec::from_terms(std::move(e));
        }
        bool exact = true;
        for (std::size_t c : rejected) {
            SparseVec coords;
            for (std::size_t r = 0; r < k; ++r) {
                long long v = coeff(*cands[c], out.pivots[r]);
                if (v) coords.axpy(Rational(v), out.inv_cols[r]);
            }
            RTensor sum;
            for (const auto& [w, v] : *cands[c])
                if (v) sum[w] += Rational(v);
            for (const auto& [i, x] : coords)
                for (const auto& [w, v] : *cands[out.accepted[i]]) sum[w] -= x * Rational(v);
            if (std::any_of(sum.begin(), sum.end(), [](const auto& e) { return !e.second.is_zero(); })) {
                exact = false;
                break;
            }
        }
        if (exact) return out;
    }
    throw Error(ErrorKind::InvalidStructure, "free Lie basis selection failed for every prime");
}

}  // namespace

Monomial parse_monomial(std::string_view text, const std::vector<Generator>& gens) {
    MonomialParser p{text, gens};
    Monomial m = p.parse();
    p.skip();
    if (p.pos != text.size()) p.fail("trailing characters");
    return m;
}

Word Word::prefix(std::uint32_t n) const {
    Word w;
    w.len = n;
    w.bits = n >= 32 ? bits : (bits & ((static_cast<unsigned __int128>(1) << (4 * n)) - 1));
    return w;
}

Word Word::suffix_from(std::uint32_t n) const {
    Word w;
    w.len = len - n;
    w.bits = bits >> (4 * n);
    return w;
}

Word operator+(const Word& a, const Word& b) { return concat(a, b); }

Word letter_word(unsigned generator) {
    Word w;
    w.bits = generator;
    w.len = 1;
    return w;
}

std::size_t WordHash::operator()(const Word& w) const {
    u64 lo = static_cast<u64>(w.bits), hi = static_cast<u64>(w.bits >> 64);
    u64 h = lo * 0x9E3779B97F4A7C15ULL ^ (hi + 0x632BE59BD9B4E019ULL + (lo << 6) + (lo >> 2));
    return static_cast<std::size_t>(h ^ (static_cast<u64>(w.len) << 58));
}

// ------------------------------------------------------------------ FreeLie

FreeLie::FreeLie(std::vector<Generator> generators, int max_degree)
    : gens_(std::move(generators)), max_degree_(max_degree) {
    std::set<std::string> names;
    for (const auto& g : gens_) {
        if (g.degree < 1)
            throw Error(ErrorKind::DegreeZeroGenerator,
                        "generator '" + g.name + "' has degree " + std::to_string(g.degree) +
                            "; simply connected requires degree >= 1");
        if (!names.insert(g.name).second)
            throw Error(ErrorKind::SchemaError, "duplicate generator name '" + g.name + "'");
    }
    if (gens_.size() > kMaxGenerators)
        throw Error(ErrorKind::InvalidStructure, "at most 16 generators are supported");
    if (max_degree_ < 1) throw Error(ErrorKind::WindowTooSmall, "free Lie algebra window must reach degree 1");
    int min_deg = max_degree_;
    for (const auto& g : gens_) min_deg = std::min(min_deg, g.degree);
    if (static_cast<std::uint32_t>(max_degree_ / min_deg) > kMaxWordLength)
        throw Error(ErrorKind::InvalidStructure, "window exceeds the supported bracket length of 31");
    build();
}

std::optional<std::size_t> FreeLie::find_generator(const std::string& name) const {
    for (std::size_t k = 0; k < gens_.size(); ++k)
        if (gens_[k].name == name) return k;
    return std::nullopt;
}

void FreeLie::build() {
    const std::size_t ng = gens_.size();
    std::map<int, std::vector<std::string>> names;
    std::vector<std::vector<std::size_t>> by_degree(static_cast<std::size_t>(max_degree_) + 1);
    gen_basis_.assign(ng, 0);

    struct Cand {
        int gen;
        long sub;
        Tensor t;
        std::string content;
        std::uint32_t len;
    };

    for (int n = 1; n <= max_degree_; ++n) {
        std::vector<Cand> cands;
        for (std::size_t g = 0; g < ng; ++g)
            if (gens_[g].degree == n) {
                Cand c{static_cast<int>(g), -1, {}, std::string(ng, '\0'), 1};
                c.t[letter_word(static_cast<unsigned>(g))] = 1;
                c.content[g] = 1;
                cands.push_back(std::move(c));
            }
        for (std::size_t g = 0; g < ng; ++g) {
            int m = n - gens_[g].degree;
            if (m < 1) continue;
            Word gw = letter_word(static_cast<unsigned>(g));
            long long sign = parity_sign(static_cast<long long>(gens_[g].degree) * m);
            for (std::size_t b : by_degree[static_cast<std::size_t>(m)]) {
                Cand c{static_cast<int>(g), static_cast<long>(b), {}, info_[b].content, info_[b].word_len + 1};
                c.content[g]++;
                c.t.reserve(tensors_[b].size() * 2);
                // [b, g] = b g - (-1)^{|b||g|} g b
                for (const auto& [w, v] : tensors_[b]) {
                    c.t[concat(w, gw)] += v;
                    c.t[concat(gw, w)] -= sign * v;
                }
                for (auto it = c.t.begin(); it != c.t.end();)
                    it = it->second == 0 ? c.t.erase(it) : std::next(it);
                cands.push_back(std::move(c));
            }
        }
        // group by content, in order of first appearance
        std::vector<std::string> order;
        std::map<std::string, std::vector<std::size_t>> groups;
        for (std::size_t c = 0; c < cands.size(); ++c) {
            auto [it, fresh] = groups.try_emplace(cands[c].content);
            if (fresh) order.push_back(cands[c].content);
            it->second.push_back(c);
        }
        std::vector<BlockBuild> built(order.size());
        parallel_for(order.size(), [&](std::size_t k) {
            std::vector<const Tensor*> ts;
            for (std::size_t c : groups[order[k]]) ts.push_back(&cands[c].t);
            built[k] = build_block(ts);
        });
        std::vector<bool> accepted(cands.size(), false);
        for (std::size_t k = 0; k < order.size(); ++k)
            for (std::size_t a : built[k].accepted) accepted[groups[order[k]][a]] = true;

        std::map<std::size_t, std::size_t> global_of;
        for (std::size_t c = 0; c < cands.size(); ++c) {
            if (!accepted[c]) continue;
            std::size_t gi = info_.size();
            global_of[c] = gi;
            Cand& cd = cands[c];
            Info info;
            info.gen = cd.gen;
            info.sub = cd.sub;
            info.word_len = cd.len;
            info.content = cd.content;
            info_.push_back(std::move(info));
            tensors_.push_back(std::move(cd.t));
            by_degree[static_cast<std::size_t>(n)].push_back(gi);
            if (cd.sub < 0) gen_basis_[static_cast<std::size_t>(cd.gen)] = gi;
        }
        for (std::size_t k = 0; k < order.size(); ++k) {
            Block blk;
            for (std::size_t a : built[k].accepted) blk.basis.push_back(global_of[groups[order[k]][a]]);
            blk.pivots = std::move(built[k].pivots);
            blk.inv_cols = std::move(built[k].inv_cols);
            blocks_.emplace(order[k], std::move(blk));
        }
    }

    // names: generators by name, brackets as [b,g]
    std::vector<std::string> full(info_.size());
    for (std::size_t i = 0; i < info_.size(); ++i) {
        const Info& in = info_[i];
        const std::string& g = gens_[static_cast<std::size_t>(in.gen)].name;
        full[i] = in.sub < 0 ? g : "[" + full[static_cast<std::size_t>(in.sub)] + "," + g + "]";
        int deg = 0;
        for (std::size_t k = 0; k < ng; ++k) deg += in.content[k] * gens_[k].degree;
        names[deg].push_back(full[i]);
    }
    space_ = std::make_shared<GradedSpace>(Window(1, max_degree_, true, false), names);
}

SparseVec FreeLie::resolve(const Block& blk, const std::vector<Rational>& at_pivots) const {
    SparseVec local;
    for (std::size_t r = 0; r < at_pivots.size(); ++r)
        if (!at_pivots[r].is_zero()) local.axpy(at_pivots[r], blk.inv_cols[r]);
    std::vector<SparseVec::Entry> out;
    for (const auto& [k, c] : local) out.emplace_back(blk.basis[k], c);
    return SparseVec::from_terms(std::move(out));
}

SparseVec FreeLie::compute_bracket(std::size_t i, std::size_t j) const {
    int di = degree(i), dj = degree(j);
    auto it = blocks_.find(add_content(info_[i].content, info_[j].content));
    if (it == blocks_.end()) return {};
    const Block& blk = it->second;
    const Tensor& ti = tensors_[i];
    const Tensor& tj = tensors_[j];
    std::uint32_t li = info_[i].word_len, lj = info_[j].word_len;
    long long sign = parity_sign(static_cast<long long>(di) * dj);
    std::vector<Rational> at(blk.pivots.size());
    bool any = false;
    for (std::size_t r = 0; r < blk.pivots.size(); ++r) {
        const Word& w = blk.pivots[r];
        long long c = coeff(ti, w.prefix(li)) * coeff(tj, w.suffix_from(li));
        c -= sign * coeff(tj, w.prefix(lj)) * coeff(ti, w.suffix_from(lj));
        if (c) {
            at[r] = Rational(c);
            any = true;
        }
    }
    if (!any) return {};
    return resolve(blk, at);
}

SparseVec FreeLie::bracket(std::size_t i, std::size_t j) const {
    if (degree(i) + degree(j) > max_degree_) return {};
    bool swapped = i > j;
    if (swapped) std::swap(i, j);
    unsigned long long key = static_cast<unsigned long long>(i) * dim() + j;
    SparseVec v;
    bool found = false;
    {
        std::lock_guard<std::mutex> lock(memo_mutex_);
        auto it = memo_.find(key);
        if (it != memo_.end()) {
            v = it->second;
            found = true;
        }
    }
    if (!found) {
        v = compute_bracket(i, j);
        std::lock_guard<std::mutex> lock(memo_mutex_);
        memo_.emplace(key, v);
    }
    if (swapped) v.scale(Rational(-parity_sign(static_cast<long long>(degree(i)) * degree(j))));
    return v;
}

SparseVec FreeLie::bracket(const SparseVec& a, const SparseVec& b) const {
    SparseVec out;
    for (const auto& [i, ci] : a)
        for (const auto& [j, cj] : b) {
            SparseVec t = bracket(i, j);
            if (!t.empty()) out.axpy(ci * cj, t);
        }
    return out;
}

int FreeLie::degree_of(const Monomial& m) const {
    if (m.is_leaf()) return gens_[static_cast<std::size_t>(m.generator)].degree;
    return degree_of(*m.left) + degree_of(*m.right);
}

SparseVec FreeLie::normal_form(const Monomial& m) const {
    if (degree_of(m) > max_degree_)
        throw Error(ErrorKind::WindowTooSmall, "bracket expression exceeds the window");
    if (m.is_leaf()) return SparseVec::unit(gen_basis_[static_cast<std::size_t>(m.generator)]);
    return bracket(normal_form(*m.left), normal_form(*m.right));
}

SparseVec FreeLie::normal_form(std::string_view expr) const { return normal_form(parse_monomial(expr, gens_)); }

RTensor FreeLie::to_tensor(const SparseVec& v) const {
    RTensor out;
    for (const auto& [i, c] : v)
        for (const auto& [w, x] : tensors_[i]) out[w] += c * Rational(x);
    for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

std::optional<SparseVec> FreeLie::from_tensor(const RTensor& t) const {
    std::map<std::string, RTensor> parts;
    for (const auto& [w, c] : t)
        if (!c.is_zero()) parts[word_content(w, gens_.size())][w] = c;
    SparseVec out;
    for (const auto& [content, part] : parts) {
        auto it = blocks_.find(content);
        if (it == blocks_.end()) return std::nullopt;
        const Block& blk = it->second;
        std::vector<Rational> at(blk.pivots.size());
        for (std::size_t r = 0; r < blk.pivots.size(); ++r) {
            auto f = part.find(blk.pivots[r]);
            if (f != part.end()) at[r] = f->second;
        }
        SparseVec coords = resolve(blk, at);
        RTensor back = to_tensor(coords);
        if (back.size() != part.size()) return std::nullopt;
        for (const auto& [w, c] : part) {
            auto f = back.find(w);
            if (f == back.end() || f->second != c) return std::nullopt;
        }
        out += coords;
    }
    return out;
}

std::shared_ptr<DgLie> FreeLie::as_dglie(const std::vector<SparseVec>& d) const {
    auto g = std::make_shared<DgLie>(space_);
    std::vector<std::vector<std::pair<std::size_t, SparseVec>>> rows(dim());
    parallel_for(dim(), [&](std::size_t i) {
        for (std::size_t j = i; j < dim(); ++j) {
            if (degree(i) + degree(j) > max_degree_) break;
            SparseVec b = bracket(i, j);
            if (!b.empty()) rows[i].emplace_back(j, std::move(b));
        }
    });
    for (std::size_t i = 0; i < dim(); ++i)
        for (auto& [j, b] : rows[i]) g->set_bracket(i, j, std::move(b));
    for (std::size_t i = 0; i < d.size(); ++i)
        if (!d[i].empty()) g->set_differential(i, d[i]);
    return g;
}

// --------------------------------------------------------------- Derivation

Derivation::Derivation(const FreeLie& lie, int degree, std::vector<SparseVec> values)
    : lie_(&lie), degree_(degree), values_(std::move(values)) {
    values_.resize(lie.generators().size());
    for (std::size_t k = 0; k < values_.size(); ++k)
        for (const auto& [i, c] : values_[k])
            if (lie.degree(i) != lie.generators()[k].degree + degree)
                throw Error(ErrorKind::DegreeMismatch,
                            "derivation value on '" + lie.generators()[k].name + "' has the wrong degree");
}

SparseVec Derivation::on_basis(std::size_t i) const {
    const FreeLie& L = *lie_;
    if (L.degree(i) + degree_ > L.max_degree())
        throw Error(ErrorKind::WindowTooSmall, "derivation image of " + L.space().name(i) + " leaves the window");
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(i);
        if (it != cache_.end()) return it->second;
    }
    SparseVec out;
    auto [g, sub] = L.split(i);
    if (sub < 0) {
        out = values_[static_cast<std::size_t>(g)];
    } else {
        // theta[b, g] = [theta b, g] + (-1)^{r|b|} [b, theta g]
        std::size_t gi = L.generator_index(static_cast<std::size_t>(g));
        std::size_t b = static_cast<std::size_t>(sub);
        SparseVec tb = on_basis(b);
        if (!tb.empty()) out = L.bracket(tb, SparseVec::unit(gi));
        const SparseVec& tg = values_[static_cast<std::size_t>(g)];
        if (!tg.empty())
            out.axpy(Rational(parity_sign(static_cast<long long>(degree_) * L.degree(b))),
                     L.bracket(SparseVec::unit(b), tg));
    }
    std::lock_guard<std::mutex> lock(mutex_);
    cache_.emplace(i, out);
    return out;
}

SparseVec Derivation::apply(const SparseVec& v) const {
    SparseVec out;
    for (const auto& [i, c] : v) {
        SparseVec t = on_basis(i);
        if (!t.empty()) out.axpy(c, t);
    }
    return out;
}

GradedMap extend_derivation(const FreeLie& lie, int degree, const std::vector<SparseVec>& values) {
    Derivation th(lie, degree, values);
    std::vector<SparseVec> images(lie.dim());
    bool truncated = false;
    for (std::size_t i = 0; i < lie.dim(); ++i) {
        if (lie.degree(i) + degree > lie.max_degree()) {
            truncated = true;
            continue;
        }
        images[i] = th.on_basis(i);
    }
    GradedMap f = GradedMap::from_images(lie.space_ptr(), lie.space_ptr(), degree, images);
    if (truncated) f.mark_truncated();
    return f;
}

// ----------------------------------------------------------------- LieModel

LieModel::LieModel(const QuillenModel& q, int max_degree, const ModelOptions& opts) : input_(q) {
    lie_ = std::make_shared<FreeLie>(q.generators, max_degree);
    const FreeLie& L = *lie_;
    std::vector<SparseVec> values(q.generators.size());
    if (q.differential.size() > q.generators.size())
        throw Error(ErrorKind::SchemaError, "differential given for more generators than exist");
    for (std::size_t k = 0; k < q.differential.size(); ++k) {
        int want = q.generators[k].degree - 1;
        for (const auto& [c, expr] : q.differential[k]) {
            Monomial m = parse_monomial(expr, q.generators);
            int deg = L.degree_of(m);
            if (deg != want)
                throw Error(ErrorKind::DegreeMismatch, "differential of '" + q.generators[k].name + "': term " +
                                                           expr + " has degree " + std::to_string(deg) +
                                                           ", expected " + std::to_string(want));
            values[k].axpy(c, L.normal_form(m));
        }
        for (const auto& [i, c] : values[k])
            if (L.is_generator(i)) minimal_ = false;
    }
    if (!minimal_) {
        if (!opts.allow_nonminimal)
            throw Error(ErrorKind::NotDecomposable, "the differential of " + q.name + " is not decomposable");
        warnings_.push_back("differential is not decomposable; model is not minimal");
    }
    delta_ = std::make_unique<Derivation>(L, -1, values);
    for (std::size_t k = 0; k < values.size(); ++k) {
        SparseVec dd = delta_->apply(values[k]);
        if (!dd.empty())
            throw Error(ErrorKind::CompositionNotZero,
                        "d^2 != 0 on generator '" + q.generators[k].name + "': " + L.space().format(dd));
    }
}

int LieModel::max_generator_degree() const {
    int m = 0;
    for (const auto& g : input_.generators) m = std::max(m, g.degree);
    return m;
}

std::shared_ptr<DgLie> LieModel::as_dglie() const {
    std::vector<SparseVec> d(lie_->dim());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = delta_->on_basis(i);
    return lie_->as_dglie(d);
}

// --------------------------------------------------------------- DerAlgebra

std::optional<std::size_t> DerAlgebra::der_index(std::size_t gen, std::size_t value) const {
    auto it = der_lookup[gen].find(value);
    if (it == der_lookup[gen].end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> DerAlgebra::sl_index(std::size_t value) const {
    auto it = sl_lookup.find(value);
    if (it == sl_lookup.end()) return std::nullopt;
    return it->second;
}

SparseVec DerAlgebra::from_values(const std::vector<SparseVec>& vals) const {
    std::vector<SparseVec::Entry> out;
    for (std::size_t k = 0; k < vals.size(); ++k)
        for (const auto& [b, c] : vals[k]) {
            auto idx = der_index(k, b);
            if (!idx) throw Error(ErrorKind::WindowTooSmall, "derivation outside the Der L window");
            out.emplace_back(*idx, c);
        }
    return SparseVec::from_terms(std::move(out));
}

SparseVec DerAlgebra::suspended(const SparseVec& x) const {
    std::vector<SparseVec::Entry> out;
    for (const auto& [b, c] : x) {
        auto idx = sl_index(b);
        if (!idx) throw Error(ErrorKind::WindowTooSmall, "suspended element outside the window");
        out.emplace_back(*idx, c);
    }
    return SparseVec::from_terms(std::move(out));
}

std::vector<SparseVec> DerAlgebra::values(const SparseVec& element) const {
    std::vector<SparseVec> vals(num_generators);
    for (const auto& [i, c] : element)
        if (!elems[i].sl) vals[elems[i].gen].add(elems[i].value, c);
    return vals;
}

SparseVec DerAlgebra::apply(const SparseVec& element, const SparseVec& x) const {
    SparseVec out;
    for (const auto& [i, c] : element)
        if (!elems[i].sl) out.axpy(c, derivations[i]->apply(x));
    return out;
}

SparseVec DerAlgebra::sl_part(const SparseVec& element) const {
    SparseVec out;
    for (const auto& [i, c] : element)
        if (elems[i].sl) out.add(elems[i].value, c);
    return out;
}

namespace {

DerAlgebra build_der(const LieModel& model, int hi, bool with_sl) {
    const FreeLie& L = model.lie();
    const auto& gens = L.generators();
    const std::size_t ng = gens.size();
    int maxgen = model.max_generator_degree();
    int lo = 1 - maxgen;
    if (ng == 0) lo = 1;
    if (hi < lo) throw Error(ErrorKind::WindowTooSmall, "Der L window is empty");
    if (L.max_degree() < maxgen + hi)
        throw Error(ErrorKind::WindowTooSmall, "free Lie algebra must reach degree " + std::to_string(maxgen + hi));

    DerAlgebra D;
    D.lie = model.lie_ptr();
    D.with_sl = with_sl;
    D.num_generators = ng;
    D.der_lookup.resize(ng);

    std::map<int, std::vector<std::string>> names;
    for (int r = lo; r <= hi; ++r) {
        auto& list = names[r];
        for (std::size_t k = 0; k < ng; ++k) {
            int target = gens[k].degree + r;
            const GradedSpace& s = L.space();
            for (std::size_t b = 0; b < s.dim(target); ++b) {
                std::size_t bi = s.global(target, b);
                D.der_lookup[k][bi] = D.elems.size();
                D.elems.push_back({false, k, bi});
                list.push_back(gens[k].name + "->" + s.name(bi));
            }
        }
        if (with_sl) {
            const GradedSpace& s = L.space();
            for (std::size_t b = 0; b < s.dim(r - 1); ++b) {
                std::size_t bi = s.global(r - 1, b);
                D.sl_lookup[bi] = D.elems.size();
                D.elems.push_back({true, 0, bi});
                list.push_back("s" + s.name(bi));
            }
        }
    }
    auto space = std::make_shared<GradedSpace>(Window(lo, hi, true, false), names);
    D.algebra = std::make_shared<DgLie>(space);
    DgLie& g = *D.algebra;
    const std::size_t n = D.elems.size();

    D.derivations.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (D.elems[i].sl) continue;
        std::vector<SparseVec> vals(ng);
        vals[D.elems[i].gen] = SparseVec::unit(D.elems[i].value);
        D.derivations[i] = std::make_shared<Derivation>(L, g.degree(i), std::move(vals));
    }

    // brackets
    std::vector<std::vector<std::pair<std::size_t, SparseVec>>> rows(n);
    parallel_for(n, [&](std::size_t i) {
        int di = g.degree(i);
        const auto& ei = D.elems[i];
        for (std::size_t j = i; j < n; ++j) {
            int dj = g.degree(j);
            if (di + dj > hi) break;
            if (di + dj < lo) continue;
            const auto& ej = D.elems[j];
            SparseVec v;
            if (!ei.sl && !ej.sl) {
                // [theta_i, theta_j](v) = theta_i(theta_j v) - (-1)^{|i||j|} theta_j(theta_i v)
                std::vector<SparseVec> vals(ng);
                vals[ej.gen] += D.derivations[i]->on_basis(ej.value);
                vals[ei.gen].axpy(Rational(-parity_sign(static_cast<long long>(di) * dj)),
                                  D.derivations[j]->on_basis(ei.value));
                v = D.from_values(vals);
            } else if (!ei.sl && ej.sl) {
                v = D.suspended(D.derivations[i]->on_basis(ej.value));
                v.scale(Rational(parity_sign(di)));
            } else if (ei.sl && !ej.sl) {
                // [s z, theta] = -(-1)^{|sz||theta|} [theta, s z]
                v = D.suspended(D.derivations[j]->on_basis(ei.value));
                v.scale(Rational(parity_sign(dj) * -parity_sign(static_cast<long long>(di) * dj)));
            }
            if (!v.empty()) rows[i].emplace_back(j, std::move(v));
        }
    });
    for (std::size_t i = 0; i < n; ++i)
        for (auto& [j, v] : rows[i]) g.set_bracket(i, j, std::move(v));

    // differentials
    const Derivation& delta = model.delta();
    std::vector<SparseVec> delta_gen(ng);
    for (std::size_t k = 0; k < ng; ++k) delta_gen[k] = delta.on_basis(L.generator_index(k));
    std::vector<SparseVec> dimg(n);
    parallel_for(n, [&](std::size_t i) {
        const auto& e = D.elems[i];
        int r = g.degree(i);
        if (!e.sl) {
            // (d theta)(v) = delta(theta v) - (-1)^r theta(delta v)
            std::vector<SparseVec> vals(ng);
            vals[e.gen] = delta.on_basis(e.value);
            for (std::size_t k = 0; k < ng; ++k)
                if (!delta_gen[k].empty())
                    vals[k].axpy(Rational(-parity_sign(r)), D.derivations[i]->apply(delta_gen[k]));
            if (r - 1 >= lo) dimg[i] = D.from_values(vals);
        } else {
            // d(s z) = ad_z - s dz
            std::vector<SparseVec> vals(ng);
            for (std::size_t k = 0; k < ng; ++k) vals[k] = L.bracket(e.value, L.generator_index(k));
            dimg[i] = D.from_values(vals);
            SparseVec dz = delta.on_basis(e.value);
            if (!dz.empty()) dimg[i].axpy(Rational(-1), D.suspended(dz));
        }
    });
    for (std::size_t i = 0; i < n; ++i)
        if (!dimg[i].empty()) g.set_differential(i, std::move(dimg[i]));
    return D;
}

}  // namespace

DerAlgebra der_algebra(const LieModel& model, int hi) { return build_der(model, hi, false); }

DerAlgebra der_semidirect(const LieModel& model, int hi) { return build_der(model, hi, true); }

}  // namespace bautlab
