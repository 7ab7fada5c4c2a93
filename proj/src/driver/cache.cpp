#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <system_error>
#include <thread>

#include "spfh/driver.hpp"

namespace spfh {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[5] = {'S', 'P', 'F', 'H', '1'};

class Writer {
public:
    void u8(std::uint8_t x) { out.push_back(x); }
    void u32(std::uint32_t x) {
        for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(x >> (8 * i)));
    }
    void u64(std::uint64_t x) {
        for (int i = 0; i < 8; ++i) out.push_back(std::uint8_t(x >> (8 * i)));
    }
    void i64(long long x) { u64(std::uint64_t(x)); }
    void bytes(const void* p, std::size_t n) {
        auto b = static_cast<const std::uint8_t*>(p);
        out.insert(out.end(), b, b + n);
    }
    void str(const std::string& s) {
        u32(std::uint32_t(s.size()));
        bytes(s.data(), s.size());
    }

    std::vector<std::uint8_t> out;
};

class Reader {
public:
    Reader(const std::uint8_t* p, std::size_t n) : p_(p), n_(n) {}

    std::uint8_t u8() {
        need(1);
        return p_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t x = 0;
        for (int i = 0; i < 4; ++i) x |= std::uint32_t(p_[pos_++]) << (8 * i);
        return x;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t x = 0;
        for (int i = 0; i < 8; ++i) x |= std::uint64_t(p_[pos_++]) << (8 * i);
        return x;
    }
    long long i64() { return (long long)u64(); }
    std::string str() {
        std::uint32_t len = u32();
        need(len);
        std::string s(reinterpret_cast<const char*>(p_ + pos_), len);
        pos_ += len;
        return s;
    }
    const std::uint8_t* take(std::size_t n) {
        need(n);
        const std::uint8_t* at = p_ + pos_;
        pos_ += n;
        return at;
    }
    std::size_t pos() const { return pos_; }
    bool done() const { return pos_ == n_; }

private:
    void need(std::size_t k) const {
        if (n_ - pos_ < k) throw std::runtime_error("truncated cache payload");
    }
    const std::uint8_t* p_;
    std::size_t n_;
    std::size_t pos_ = 0;
};

void write_field(Writer& w, const Field& f) {
    w.u32(std::uint32_t(f.p()));
    w.u32(std::uint32_t(f.r()));
}

void write_vec(Writer& w, const Vec& v) {
    w.u32(std::uint32_t(v.size()));
    if (v.packed()) {
        for (std::uint64_t word : v.words()) w.u64(word);
    } else {
        for (Elem e : v.entries()) {
            w.u8(std::uint8_t(e));
            w.u8(std::uint8_t(e >> 8));
        }
    }
}

Vec read_vec(Reader& r, const FieldPtr& f) {
    const int n = int(r.u32());
    Vec v(f, n);
    if (v.packed()) {
        for (auto& word : v.words()) word = r.u64();
        // Bits past the end must stay clear for equality and rank.
        if (n % 64 != 0 && !v.words().empty() && (v.words().back() >> (n % 64)) != 0)
            throw std::runtime_error("malformed packed vector in cache payload");
    } else {
        for (auto& e : v.entries()) {
            const std::uint8_t* b = r.take(2);
            e = Elem(b[0] | (b[1] << 8));
            if (e >= f->q()) throw std::runtime_error("field element out of range in cache payload");
        }
    }
    return v;
}

std::string hex64(std::uint64_t x) {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << x;
    return os.str();
}

}  // namespace

std::uint64_t checksum64(const std::uint8_t* data, std::size_t size) {
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

Cache::Cache(fs::path dir) : dir_(std::move(dir)) {}

fs::path Cache::default_dir() {
    if (const char* d = std::getenv("SPFH_CACHE_DIR"); d && *d) return d;
    if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return fs::path(x) / "spfh";
    if (const char* h = std::getenv("HOME"); h && *h) return fs::path(h) / ".cache" / "spfh";
    return fs::temp_directory_path() / "spfh-cache";
}

fs::path Cache::path_of(const std::string& key, const Field& field) const {
    const std::string tag = field.name() + "|" + key;
    return dir_ / (hex64(checksum64(reinterpret_cast<const std::uint8_t*>(tag.data()), tag.size())) + ".spfh");
}

std::optional<std::vector<std::uint8_t>> Cache::get(const std::string& key, const Field& field) const {
    const fs::path path = path_of(key, field);
    std::error_code ec;
    if (!fs::exists(path, ec)) {
        if (ec) throw fs::filesystem_error("cache lookup", path, ec);
        return std::nullopt;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open cache entry " + path.string());
    std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw std::runtime_error("read error on cache entry " + path.string());

    auto corrupt = [&]() -> std::optional<std::vector<std::uint8_t>> {
        fs::remove(path, ec);
        return std::nullopt;
    };
    if (raw.size() < sizeof(kMagic) + 1 + 8) return corrupt();
    const std::size_t body = raw.size() - 8;
    Reader tail(raw.data() + body, 8);
    if (tail.u64() != checksum64(raw.data(), body)) return corrupt();

    Reader r(raw.data(), body);
    if (!std::equal(kMagic, kMagic + 5, r.take(5))) return corrupt();
    if (r.u8() != kSchemaVersion) return std::nullopt;  // another engine's entry
    if (int(r.u32()) != field.p() || int(r.u32()) != field.r()) return std::nullopt;
    if (r.str() != key) return std::nullopt;  // file name collision
    const std::uint64_t len = r.u64();
    if (len != body - r.pos()) return corrupt();
    const std::uint8_t* p = r.take(len);
    return std::vector<std::uint8_t>(p, p + len);
}

void Cache::put(const std::string& key, const Field& field, const std::vector<std::uint8_t>& payload) const {
    fs::create_directories(dir_);
    Writer w;
    w.bytes(kMagic, sizeof(kMagic));
    w.u8(kSchemaVersion);
    write_field(w, field);
    w.str(key);
    w.u64(payload.size());
    w.bytes(payload.data(), payload.size());
    w.u64(checksum64(w.out.data(), w.out.size()));

    static std::atomic<unsigned> serial{0};
    const fs::path path = path_of(key, field);
    std::ostringstream tmpname;
    tmpname << path.filename().string() << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "."
            << serial++;
    const fs::path tmp = dir_ / tmpname.str();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write cache entry " + tmp.string());
        out.write(reinterpret_cast<const char*>(w.out.data()), std::streamsize(w.out.size()));
        out.flush();
        if (!out) throw std::runtime_error("write error on cache entry " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::vector<std::uint8_t> encode_resolution(const Resolution& res) {
    const FieldPtr& f = res.target->field();
    Writer w;
    write_field(w, *f);
    w.u8(std::uint8_t(res.policy));
    w.u32(std::uint32_t(res.target->rank()));
    w.u32(std::uint32_t(res.steps.size()));
    for (const auto& st : res.steps) {
        w.u32(std::uint32_t(st.proj.summands.size()));
        for (const auto& lam : st.proj.summands) {
            w.u32(std::uint32_t(lam.size()));
            for (int x : lam) w.u32(std::uint32_t(x));
        }
        w.i64(st.rank);
        w.i64(st.expected_rank);
        w.u32(std::uint32_t(st.images.size()));
        for (const auto& [block, v] : st.images) {
            w.u32(std::uint32_t(block));
            write_vec(w, v);
        }
    }
    return std::move(w.out);
}

Resolution decode_resolution(const std::vector<std::uint8_t>& bytes, std::shared_ptr<const WeightedModule> target) {
    const FieldPtr& f = target->field();
    Reader r(bytes.data(), bytes.size());
    if (int(r.u32()) != f->p() || int(r.u32()) != f->r()) throw std::runtime_error("cached resolution field mismatch");
    Resolution res;
    const std::uint8_t policy = r.u8();
    if (policy > std::uint8_t(CoverPolicy::Reverse)) throw std::runtime_error("unknown cover policy in cache payload");
    res.policy = CoverPolicy(policy);
    const int n = int(r.u32());
    if (n != target->rank()) throw std::runtime_error("cached resolution rank mismatch");
    const std::uint32_t steps = r.u32();
    for (std::uint32_t i = 0; i < steps; ++i) {
        ResolutionStep st;
        std::vector<Weight> summands(r.u32());
        for (auto& lam : summands) {
            lam.resize(r.u32());
            for (auto& x : lam) x = int(r.u32());
        }
        st.proj = GammaSum::build(f, n, std::move(summands));
        st.rank = r.i64();
        st.expected_rank = r.i64();
        st.images.resize(r.u32());
        for (auto& [block, v] : st.images) {
            block = int(r.u32());
            v = read_vec(r, f);
        }
        res.steps.push_back(std::move(st));
    }
    if (!r.done()) throw std::runtime_error("trailing bytes in cached resolution");
    res.target = std::move(target);
    return res;
}

std::string resolution_key(const Expr& e, int n, const Field& field, CoverPolicy policy, int length) {
    std::ostringstream os;
    os << "resolution;engine=" << kEngineVersion << ";field=" << field.name() << ";expr=" << e.str() << ";n=" << n
       << ";policy=" << policy_name(policy) << ";length=" << length;
    return os.str();
}

Resolution cached_resolution(const Expr& e, int n, const FieldPtr& field, int length, const ResolveOptions& opt,
                             const Cache* cache, bool* hit) {
    auto target = eval_cached(e, n, field);
    if (hit) *hit = false;
    const std::string key = resolution_key(e, n, *field, opt.policy, length);
    if (cache) {
        if (auto bytes = cache->get(key, *field)) {
            try {
                Resolution res = decode_resolution(*bytes, target);
                if (res.certified() && res.length() == length) {
                    if (hit) *hit = true;
                    return res;
                }
            } catch (const std::runtime_error&) {
                // Checksummed but undecodable: recompute and overwrite.
            }
        }
    }
    Resolution res = resolve(target, length, opt);
    if (cache) cache->put(key, *field, encode_resolution(res));
    return res;
}

}  // namespace spfh
