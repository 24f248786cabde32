#include "shellfield/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace shellfield {

namespace {

std::string default_name(const TestFunction& f, const std::string& given) {
    if (!given.empty()) return given;
    return "f" + std::to_string(f.uid());
}

using WordKey = std::vector<std::pair<int, std::uint64_t>>;

WordKey key_of(const std::vector<OperatorSymbol>& word) {
    WordKey k;
    k.reserve(word.size());
    for (const OperatorSymbol& s : word)
        k.emplace_back(s.flavor == OpFlavor::Create ? 1 : 0, s.label.uid());
    return k;
}

std::string format_complex(Complex c) {
    std::ostringstream os;
    os << "(" << c.real() << (c.imag() < 0.0 ? "-" : "+") << std::fabs(c.imag()) << "i)";
    return os.str();
}

std::string symbol_text(const OperatorSymbol& s) {
    return (s.flavor == OpFlavor::Create ? std::string("a†[") : std::string("a[")) + s.name +
           "]";
}

// Canonical ordering inside a same-flavor run: label identity. Creation
// (and annihilation) operators commute exactly among themselves.
void sort_flavor_runs(std::vector<OperatorSymbol>& word) {
    auto by_uid = [](const OperatorSymbol& a, const OperatorSymbol& b) {
        return a.label.uid() < b.label.uid();
    };
    auto run_begin = word.begin();
    while (run_begin != word.end()) {
        auto run_end = run_begin + 1;
        while (run_end != word.end() && run_end->flavor == run_begin->flavor) ++run_end;
        std::stable_sort(run_begin, run_end, by_uid);
        run_begin = run_end;
    }
}

// Wick reordering of a single word into a map canonical-word-key -> coef,
// memoized on the word key. Symbols are tracked in a registry so result
// words can be reassembled.
struct WickEngine {
    PairingTable& table;
    std::map<std::uint64_t, OperatorSymbol> registry;
    std::map<WordKey, std::map<WordKey, Complex>> memo;

    void register_word(const std::vector<OperatorSymbol>& word) {
        for (const OperatorSymbol& s : word) registry.emplace(s.label.uid(), s);
    }

    std::vector<OperatorSymbol> rebuild(const WordKey& key) const {
        std::vector<OperatorSymbol> word;
        word.reserve(key.size());
        for (const auto& [flavor, uid] : key) {
            OperatorSymbol s = registry.at(uid);
            s.flavor = flavor == 1 ? OpFlavor::Create : OpFlavor::Annihilate;
            word.push_back(std::move(s));
        }
        return word;
    }

    const std::map<WordKey, Complex>& normal_form(const std::vector<OperatorSymbol>& word) {
        const WordKey key = key_of(word);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        register_word(word);

        std::map<WordKey, Complex> result;
        size_t swap_at = word.size();
        for (size_t i = 0; i + 1 < word.size(); ++i) {
            if (word[i].flavor == OpFlavor::Annihilate && word[i + 1].flavor == OpFlavor::Create) {
                swap_at = i;
                break;
            }
        }
        if (swap_at == word.size()) {
            std::vector<OperatorSymbol> canon = word;
            sort_flavor_runs(canon);
            result.emplace(key_of(canon), Complex{1.0, 0.0});
        } else {
            // a_g adag_f = adag_f a_g + (f, g)
            std::vector<OperatorSymbol> swapped = word;
            std::swap(swapped[swap_at], swapped[swap_at + 1]);
            std::vector<OperatorSymbol> contracted;
            contracted.reserve(word.size() - 2);
            for (size_t i = 0; i < word.size(); ++i)
                if (i != swap_at && i != swap_at + 1) contracted.push_back(word[i]);
            const Complex scalar = table.ip(word[swap_at + 1].label, word[swap_at].label);

            for (const auto& [k, c] : normal_form(swapped)) result[k] += c;
            if (scalar != Complex{0.0, 0.0})
                for (const auto& [k, c] : normal_form(contracted)) result[k] += scalar * c;
        }
        return memo.emplace(key, std::move(result)).first->second;
    }
};

}  // namespace

OperatorSymbol annihilate(TestFunction f, std::string name) {
    std::string n = default_name(f, name);
    return {OpFlavor::Annihilate, std::move(f), std::move(n)};
}

OperatorSymbol create(TestFunction f, std::string name) {
    std::string n = default_name(f, name);
    return {OpFlavor::Create, std::move(f), std::move(n)};
}

OperatorSymbol adjoint(const OperatorSymbol& s) {
    OperatorSymbol r = s;
    r.flavor = s.flavor == OpFlavor::Create ? OpFlavor::Annihilate : OpFlavor::Create;
    return r;
}

OperatorExpr OperatorExpr::identity(Complex coef) {
    OperatorExpr e;
    e.terms_.push_back({coef, {}});
    return e;
}

OperatorExpr OperatorExpr::symbol(OperatorSymbol s) {
    OperatorExpr e;
    e.terms_.push_back({{1.0, 0.0}, {std::move(s)}});
    return e;
}

OperatorExpr OperatorExpr::from_terms(std::vector<Term> terms) {
    OperatorExpr e;
    e.terms_ = std::move(terms);
    return e.collected();
}

OperatorExpr OperatorExpr::field(const TestFunction& f, const std::string& name) {
    const std::string n = default_name(f, name);
    return symbol(annihilate(f, n)) + symbol(create(conjugate(f), n + "*"));
}

int OperatorExpr::max_word_length() const {
    size_t m = 0;
    for (const Term& t : terms_) m = std::max(m, t.word.size());
    return static_cast<int>(m);
}

OperatorExpr& OperatorExpr::operator+=(const OperatorExpr& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    *this = collected();
    return *this;
}

OperatorExpr& OperatorExpr::operator-=(const OperatorExpr& o) {
    return *this += Complex{-1.0, 0.0} * o;
}

OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b) {
    OperatorExpr out;
    out.terms_.reserve(a.terms_.size() * b.terms_.size());
    for (const OperatorExpr::Term& ta : a.terms_)
        for (const OperatorExpr::Term& tb : b.terms_) {
            OperatorExpr::Term t;
            t.coef = ta.coef * tb.coef;
            t.word = ta.word;
            t.word.insert(t.word.end(), tb.word.begin(), tb.word.end());
            out.terms_.push_back(std::move(t));
        }
    return out.collected();
}

OperatorExpr operator*(Complex c, OperatorExpr e) {
    for (OperatorExpr::Term& t : e.terms_) t.coef *= c;
    return e.collected();
}

OperatorExpr OperatorExpr::adjoint() const {
    OperatorExpr out;
    out.terms_.reserve(terms_.size());
    for (const Term& t : terms_) {
        Term r;
        r.coef = std::conj(t.coef);
        r.word.reserve(t.word.size());
        for (auto it = t.word.rbegin(); it != t.word.rend(); ++it)
            r.word.push_back(shellfield::adjoint(*it));
        out.terms_.push_back(std::move(r));
    }
    return out.collected();
}

OperatorExpr OperatorExpr::pow(int n) const {
    if (n < 0) throw std::invalid_argument("OperatorExpr::pow: negative power");
    OperatorExpr acc = identity();
    for (int i = 0; i < n; ++i) acc = acc * *this;
    return acc;
}

OperatorExpr OperatorExpr::collected() const {
    std::map<WordKey, Term> merged;
    for (const Term& t : terms_) {
        auto [it, fresh] = merged.try_emplace(key_of(t.word), t);
        if (!fresh) it->second.coef += t.coef;
    }
    OperatorExpr out;
    for (auto& [k, t] : merged)
        if (t.coef != Complex{0.0, 0.0}) out.terms_.push_back(std::move(t));
    return out;
}

bool OperatorExpr::approx_equal(const OperatorExpr& other, Real tol) const {
    std::map<WordKey, Complex> diff;
    for (const Term& t : terms_) diff[key_of(t.word)] += t.coef;
    for (const Term& t : other.terms_) diff[key_of(t.word)] -= t.coef;
    Real scale = 0.0;
    for (const Term& t : terms_) scale = std::max(scale, std::abs(t.coef));
    for (const Term& t : other.terms_) scale = std::max(scale, std::abs(t.coef));
    for (const auto& [k, c] : diff)
        if (std::abs(c) > tol * std::max(1.0, scale)) return false;
    return true;
}

std::string OperatorExpr::render() const {
    if (terms_.empty()) return "0";
    std::vector<const Term*> order;
    order.reserve(terms_.size());
    for (const Term& t : terms_) order.push_back(&t);
    auto text_of = [](const Term& t) {
        std::string s;
        for (const OperatorSymbol& sym : t.word) {
            if (!s.empty()) s += " ";
            s += symbol_text(sym);
        }
        return s;
    };
    std::sort(order.begin(), order.end(), [&](const Term* a, const Term* b) {
        if (a->word.size() != b->word.size()) return a->word.size() > b->word.size();
        return text_of(*a) < text_of(*b);
    });
    std::string out;
    for (const Term* t : order) {
        if (!out.empty()) out += " + ";
        if (t->word.empty()) {
            out += format_complex(t->coef) + "·1";
        } else if (t->coef == Complex{1.0, 0.0}) {
            out += text_of(*t);
        } else {
            out += format_complex(t->coef) + "·" + text_of(*t);
        }
    }
    return out;
}

Complex PairingTable::ip(const TestFunction& create_label, const TestFunction& annih_label) {
    const auto key = std::make_pair(create_label.uid(), annih_label.uid());
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const Complex v = pairing(create_label, annih_label, kind_, cfg_);
    memo_.emplace(key, v);
    return v;
}

OperatorExpr normal_order(const OperatorExpr& e, PairingTable& table) {
    WickEngine engine{table, {}, {}};
    std::map<WordKey, Complex> acc;
    for (const OperatorExpr::Term& t : e.terms()) {
        engine.register_word(t.word);
        for (const auto& [k, c] : engine.normal_form(t.word)) acc[k] += t.coef * c;
    }
    std::vector<OperatorExpr::Term> terms;
    terms.reserve(acc.size());
    for (const auto& [k, c] : acc)
        if (c != Complex{0.0, 0.0}) terms.push_back({c, engine.rebuild(k)});
    return OperatorExpr::from_terms(std::move(terms));
}

OperatorExpr normal_order(const OperatorExpr& e, KernelKind kind, const ShellConfig& cfg) {
    PairingTable table(kind, cfg);
    return normal_order(e, table);
}

Complex vev(const OperatorExpr& e, PairingTable& table) {
    WickEngine engine{table, {}, {}};
    Complex acc{0.0, 0.0};
    for (const OperatorExpr::Term& t : e.terms()) {
        engine.register_word(t.word);
        const auto& nf = engine.normal_form(t.word);
        if (auto it = nf.find(WordKey{}); it != nf.end()) acc += t.coef * it->second;
    }
    return acc;
}

Complex vev(const OperatorExpr& e, KernelKind kind, const ShellConfig& cfg) {
    PairingTable table(kind, cfg);
    return vev(e, table);
}

Complex ccr_commutator(const TestFunction& f, const TestFunction& g, KernelKind kind,
                       const ShellConfig& cfg) {
    return pairing(f, g, kind, cfg);
}

Complex ccr_same_flavor() { return {0.0, 0.0}; }

Complex field_moment(const TestFunction& f, int n, KernelKind kind, const ShellConfig& cfg) {
    if (n < 1 || n > kMaxMomentPower)
        throw std::invalid_argument("field_moment: power must be in [1, 12]");
    PairingTable table(kind, cfg);
    return vev(OperatorExpr::field(f).pow(n), table);
}

Complex field_commutator(const TestFunction& f, const TestFunction& g, KernelKind kind,
                         const ShellConfig& cfg) {
    PairingTable table(kind, cfg);
    const OperatorExpr pf = OperatorExpr::field(f);
    const OperatorExpr pg = OperatorExpr::field(g);
    return vev(pf * pg - pg * pf, table);
}

FockState FockState::vacuum() { return FockState(OperatorExpr::identity()); }

FockState FockState::one_particle(const TestFunction& g, std::string name) {
    return FockState(OperatorExpr::symbol(create(g, std::move(name))));
}

FockState FockState::from_expr(OperatorExpr creation_expr) {
    for (const OperatorExpr::Term& t : creation_expr.terms())
        for (const OperatorSymbol& s : t.word)
            if (s.flavor != OpFlavor::Create)
                throw std::invalid_argument("FockState: words must contain creation operators only");
    return FockState(std::move(creation_expr));
}

Real resonance_probability(const TestFunction& f, const FockState& state, KernelKind kind,
                           const ShellConfig& cfg) {
    PairingTable table(kind, cfg);
    const Complex ipff = table.ip(f, f);
    const Real scale = f.spectrum_scale();
    if (!(ipff.real() > 0.0) || ipff.real() <= 1e-14 * scale * scale)
        throw ZeroNormError("resonance_probability: (f,f) vanishes; X_f is not normalizable");
    const Complex normsq = vev(state.expr().adjoint() * state.expr(), table);
    if (!(normsq.real() > 0.0))
        throw ZeroNormError("resonance_probability: state has zero norm");
    const Complex amp = vev(OperatorExpr::symbol(annihilate(f)) * state.expr(), table);
    return std::norm(amp) / (ipff.real() * normsq.real());
}

Real resonance_nonlocality_witness(const TestFunction& f, const TestFunction& g,
                                   const ShellConfig& cfg) {
    PairingTable table(KernelKind::Quantum, cfg);
    const Complex gff = table.ip(f, f);
    const Complex ggg = table.ip(g, g);
    if (!(gff.real() > 0.0) || !(ggg.real() > 0.0))
        throw ZeroNormError("resonance_nonlocality_witness: zero-norm input");
    const Complex gfg = table.ip(f, g);  // (f, g)
    const Complex ggf = table.ip(g, f);  // (g, f)

    // Matrices in the (non-orthogonal) basis {adag_f|0>, adag_g|0>} with
    // Gram G = [[(f,f),(g,f)],[(f,g),(g,g)]].
    const Complex G[2][2] = {{gff, ggf}, {gfg, ggg}};
    const Complex xf[2][2] = {{{1.0, 0.0}, ggf / gff}, {{0.0, 0.0}, {0.0, 0.0}}};
    const Complex xg[2][2] = {{{0.0, 0.0}, {0.0, 0.0}}, {gfg / ggg, {1.0, 0.0}}};

    auto mul = [](const Complex a[2][2], const Complex b[2][2], Complex out[2][2]) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    };
    Complex fg[2][2], gf[2][2], c[2][2];
    mul(xf, xg, fg);
    mul(xg, xf, gf);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) c[i][j] = fg[i][j] - gf[i][j];

    // Parallel rays: X_f = X_g, commutator vanishes.
    const Complex det_g = G[0][0] * G[1][1] - G[0][1] * G[1][0];
    if (std::abs(det_g) <= 1e-12 * std::abs(G[0][0] * G[1][1])) return 0.0;

    // ||C||^2 = max lambda with det(C^H G C - lambda G) = 0.
    Complex ch[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) ch[i][j] = std::conj(c[j][i]);
    Complex gc[2][2], h[2][2];
    mul(G, c, gc);
    mul(ch, gc, h);
    const Real a = det_g.real();
    const Real b = (h[0][0] * G[1][1] + G[0][0] * h[1][1] - h[0][1] * G[1][0] - G[0][1] * h[1][0])
                       .real();
    const Real cc = (h[0][0] * h[1][1] - h[0][1] * h[1][0]).real();
    const Real disc = std::max(0.0, b * b - 4.0 * a * cc);
    const Real lam = (b + std::sqrt(disc)) / (2.0 * a);
    return std::sqrt(std::max(0.0, lam));
}

}  // namespace shellfield
