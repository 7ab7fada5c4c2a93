#include "spfh/expr.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace spfh {

struct Expr::Node {
    ExprKind kind;
    int arg = 0;
    int arg2 = 0;
    std::vector<int> dims;
    std::vector<Expr> children;
    std::string text;
};

namespace {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string render(ExprKind kind, int arg, int arg2, const std::vector<int>& dims,
                   const std::vector<Expr>& ch) {
    auto join = [&](const char* op) {
        std::string s = "(";
        for (std::size_t i = 0; i < ch.size(); ++i) s += (i ? op : "") + ch[i].str();
        return s + ")";
    };
    switch (kind) {
        case ExprKind::Id: return "id";
        case ExprKind::Sym: return "sym(" + std::to_string(arg) + ")";
        case ExprKind::Ext: return "ext(" + std::to_string(arg) + ")";
        case ExprKind::Div: return "div(" + std::to_string(arg) + ")";
        case ExprKind::Ten: return "ten(" + std::to_string(arg) + ")";
        case ExprKind::Twist: return "twist(" + ch[0].str() + "," + std::to_string(arg) + ")";
        case ExprKind::MultiTwist:
            return "mtwist(" + ch[0].str() + "," + std::to_string(arg) + "," + std::to_string(arg2) + ")";
        case ExprKind::Param: {
            std::string s = "param(" + ch[0].str() + ",[";
            for (std::size_t i = 0; i < dims.size(); ++i) s += (i ? "," : "") + std::to_string(dims[i]);
            return s + "])";
        }
        case ExprKind::Tensor: return join("*");
        case ExprKind::Sum: return join("+");
        case ExprKind::Compose: return join("@");
        case ExprKind::Kuhn: return "kuhn(" + ch[0].str() + ")";
        case ExprKind::Contra: return "cdual(" + ch[0].str() + ")";
    }
    return "?";
}

long long ipow(long long b, int e) {
    long long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

std::vector<int> to_vec(const std::set<int>& s) { return {s.begin(), s.end()}; }

// All sums of exactly `count` elements of `parts`, repetition allowed.
std::set<int> multisums(const std::vector<int>& parts, int count) {
    std::set<int> cur{0};
    for (int k = 0; k < count; ++k) {
        std::set<int> next;
        for (int a : cur)
            for (int b : parts) next.insert(a + b);
        cur = std::move(next);
    }
    return cur;
}

}  // namespace

struct ExprFactory {
    static Expr make(ExprKind k, int arg, int arg2, std::vector<int> dims, std::vector<Expr> ch);
};

namespace {
Expr make(ExprKind k, int arg, int arg2, std::vector<int> dims, std::vector<Expr> ch) {
    return ExprFactory::make(k, arg, arg2, std::move(dims), std::move(ch));
}
}  // namespace

Expr Expr::id() { return make(ExprKind::Id, 1, 0, {}, {}); }
Expr Expr::sym(int d) { return make(ExprKind::Sym, d, 0, {}, {}); }
Expr Expr::ext(int d) { return make(ExprKind::Ext, d, 0, {}, {}); }
Expr Expr::div(int d) { return make(ExprKind::Div, d, 0, {}, {}); }
Expr Expr::ten(int d) { return make(ExprKind::Ten, d, 0, {}, {}); }
Expr Expr::twist(Expr e, int r) { return make(ExprKind::Twist, r, 0, {}, {std::move(e)}); }
Expr Expr::multitwist(Expr e, int a, int s) { return make(ExprKind::MultiTwist, a, s, {}, {std::move(e)}); }
Expr Expr::param(Expr e, std::vector<int> graded_dims) {
    return make(ExprKind::Param, 0, 0, std::move(graded_dims), {std::move(e)});
}
Expr Expr::tensor(std::vector<Expr> f) {
    if (f.size() == 1) return f[0];
    return make(ExprKind::Tensor, 0, 0, {}, std::move(f));
}
Expr Expr::sum(std::vector<Expr> t) {
    if (t.size() == 1) return t[0];
    return make(ExprKind::Sum, 0, 0, {}, std::move(t));
}
Expr Expr::compose(Expr outer, Expr inner) {
    return make(ExprKind::Compose, 0, 0, {}, {std::move(outer), std::move(inner)});
}
Expr Expr::kuhn(Expr e) { return make(ExprKind::Kuhn, 0, 0, {}, {std::move(e)}); }
Expr Expr::contra(Expr e) { return make(ExprKind::Contra, 0, 0, {}, {std::move(e)}); }

Expr Expr::gamma(const std::vector<int>& weight) {
    std::vector<Expr> f;
    for (int w : weight) f.push_back(div(w));
    if (f.empty()) return div(0);
    return make(ExprKind::Tensor, 0, 0, {}, std::move(f));
}

ExprKind Expr::kind() const { return node_->kind; }
int Expr::arg() const { return node_->arg; }
int Expr::arg2() const { return node_->arg2; }
const std::vector<int>& Expr::dims() const { return node_->dims; }
const std::vector<Expr>& Expr::children() const { return node_->children; }
std::string Expr::str() const { return node_->text; }
std::uint64_t Expr::hash() const { return fnv1a(node_->text); }

std::vector<int> Expr::degrees(int p) const {
    switch (kind()) {
        case ExprKind::Id: return {1};
        case ExprKind::Sym:
        case ExprKind::Ext:
        case ExprKind::Div:
        case ExprKind::Ten: return {arg()};
        case ExprKind::Twist: {
            auto d = child().degrees(p);
            for (auto& x : d) x = int(x * ipow(p, arg()));
            return d;
        }
        case ExprKind::MultiTwist: {
            std::vector<int> parts;
            for (int i = 0; i < arg2(); ++i) parts.push_back(int(ipow(p, i * arg())));
            std::set<int> out;
            for (int e : child().degrees(p))
                for (int v : multisums(parts, e)) out.insert(v);
            return to_vec(out);
        }
        case ExprKind::Param:
        case ExprKind::Kuhn:
        case ExprKind::Contra: return child().degrees(p);
        case ExprKind::Tensor: {
            std::set<int> cur{0};
            for (const auto& c : children()) {
                std::set<int> next;
                for (int a : cur)
                    for (int b : c.degrees(p)) next.insert(a + b);
                cur = std::move(next);
            }
            return to_vec(cur);
        }
        case ExprKind::Sum: {
            std::set<int> out;
            for (const auto& c : children())
                for (int d : c.degrees(p)) out.insert(d);
            return to_vec(out);
        }
        case ExprKind::Compose: {
            auto inner = children()[1].degrees(p);
            std::set<int> out;
            for (int e : children()[0].degrees(p))
                for (int v : multisums(inner, e)) out.insert(v);
            return to_vec(out);
        }
    }
    return {};
}

int Expr::max_degree(int p) const {
    auto d = degrees(p);
    return d.empty() ? 0 : d.back();
}

bool Expr::contravariant() const {
    switch (kind()) {
        case ExprKind::Contra: return !child().contravariant();
        case ExprKind::Compose: return children()[0].contravariant() != children()[1].contravariant();
        case ExprKind::Tensor:
        case ExprKind::Sum:
            return std::any_of(children().begin(), children().end(), [](const Expr& c) { return c.contravariant(); });
        default: return children().empty() ? false : child().contravariant();
    }
}

Expr ExprFactory::make(ExprKind k, int arg, int arg2, std::vector<int> dims, std::vector<Expr> ch) {
    if (arg < 0 || arg2 < 0) throw std::invalid_argument("negative functor parameter");
    if (k == ExprKind::MultiTwist && arg2 < 1) throw std::invalid_argument("mtwist needs s >= 1");
    for (int d : dims)
        if (d < 0) throw std::invalid_argument("negative parameter dimension");
    auto n = std::make_shared<Expr::Node>();
    n->kind = k;
    n->arg = arg;
    n->arg2 = arg2;
    n->text = render(k, arg, arg2, dims, ch);
    n->dims = std::move(dims);
    n->children = std::move(ch);
    return Expr(std::shared_ptr<const Expr::Node>(std::move(n)));
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    Expr parse() {
        Expr e = sum();
        skip();
        if (pos_ != s_.size()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
    }
    int integer() {
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) throw ParseError("expected integer", pos_);
        long v = std::stol(std::string(s_.substr(start, pos_ - start)));
        if (v > 1 << 20) throw ParseError("integer too large", start);
        return int(v);
    }
    std::string word() {
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    Expr sum() {
        std::vector<Expr> t{product()};
        while (accept('+')) t.push_back(product());
        return Expr::sum(std::move(t));
    }
    Expr product() {
        std::vector<Expr> f{composite()};
        while (accept('*')) f.push_back(composite());
        return Expr::tensor(std::move(f));
    }
    Expr composite() {
        Expr e = atom();
        while (accept('@')) e = Expr::compose(e, atom());
        return e;
    }
    Expr atom() {
        if (accept('(')) {
            Expr e = sum();
            expect(')');
            return e;
        }
        std::size_t at = (skip(), pos_);
        std::string w = word();
        if (w == "id") return Expr::id();
        auto leaf = [&](auto ctor) {
            expect('(');
            int d = integer();
            expect(')');
            return ctor(d);
        };
        if (w == "sym") return leaf(Expr::sym);
        if (w == "ext") return leaf(Expr::ext);
        if (w == "div") return leaf(Expr::div);
        if (w == "ten") return leaf(Expr::ten);
        if (w == "twist") {
            expect('(');
            Expr e = sum();
            expect(',');
            int r = integer();
            expect(')');
            return Expr::twist(e, r);
        }
        if (w == "mtwist") {
            expect('(');
            Expr e = sum();
            expect(',');
            int a = integer();
            expect(',');
            int s = integer();
            expect(')');
            if (s < 1) throw ParseError("mtwist needs s >= 1", at);
            return Expr::multitwist(e, a, s);
        }
        if (w == "param") {
            expect('(');
            Expr e = sum();
            expect(',');
            expect('[');
            std::vector<int> dims;
            if (!accept(']')) {
                dims.push_back(integer());
                while (accept(',')) dims.push_back(integer());
                expect(']');
            }
            expect(')');
            return Expr::param(e, std::move(dims));
        }
        if (w == "kuhn" || w == "cdual") {
            expect('(');
            Expr e = sum();
            expect(')');
            return w == "kuhn" ? Expr::kuhn(e) : Expr::contra(e);
        }
        throw ParseError(w.empty() ? "expected functor" : "unknown functor '" + w + "'", at);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text) { return Parser(text).parse(); }

Expr expand_multitwist(const Expr& e) {
    std::vector<Expr> ch;
    for (const auto& c : e.children()) ch.push_back(expand_multitwist(c));
    switch (e.kind()) {
        case ExprKind::MultiTwist: {
            std::vector<Expr> parts;
            for (int i = 0; i < e.arg2(); ++i) parts.push_back(i == 0 ? Expr::id() : Expr::twist(Expr::id(), i * e.arg()));
            return Expr::compose(ch[0], Expr::sum(std::move(parts)));
        }
        case ExprKind::Twist: return Expr::twist(ch[0], e.arg());
        case ExprKind::Param: return Expr::param(ch[0], e.dims());
        case ExprKind::Tensor: return Expr::tensor(std::move(ch));
        case ExprKind::Sum: return Expr::sum(std::move(ch));
        case ExprKind::Compose: return Expr::compose(ch[0], ch[1]);
        case ExprKind::Kuhn: return Expr::kuhn(ch[0]);
        case ExprKind::Contra: return Expr::contra(ch[0]);
        default: return e;
    }
}

}  // namespace spfh
