#include <algorithm>
#include <set>
#include <sstream>

#include "spfh/compare.hpp"
#include "spfh/driver.hpp"
#include "spfh/fqcat.hpp"
#include "spfh/generic.hpp"
#include "spfh/oracle.hpp"
#include "spfh/parallel.hpp"

namespace spfh {

using nlohmann::json;

namespace {

const std::set<std::string> kCommands = {"ext",       "tor",     "generic-ext", "generic-tor",
                                         "fqcat-ext", "compare", "oracle",      "suite"};
constexpr int kMaxFunctorDegree = 10;
constexpr int kMaxCohomDegree = 64;
constexpr int kMaxTruncation = 4;

Expr parse_or_throw(const std::string& text, const char* which) {
    if (text.empty()) throw JobError("missing-expression", std::string("--") + which + " is required");
    try {
        return parse_expr(text);
    } catch (const ParseError& e) {
        throw JobError("bad-expression", std::string(which) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw JobError("bad-expression", std::string(which) + ": " + e.what());
    }
}

FieldPtr field_or_throw(int p, int r) {
    try {
        return Field::get(p, r);
    } catch (const std::invalid_argument& e) {
        throw JobError("bad-field", e.what());
    }
}

FieldPtr fq_or_throw(int q) {
    try {
        return Field::of_order(q);
    } catch (const std::invalid_argument& e) {
        throw JobError("bad-field", e.what());
    }
}

CoverPolicy policy_of(const std::string& name) {
    if (name == "dominant-first") return CoverPolicy::DominantFirst;
    if (name == "reverse") return CoverPolicy::Reverse;
    throw JobError("bad-parameter", "unknown cover policy '" + name + "' (expected dominant-first or reverse)");
}

void check_degree(const Expr& e, int p, const char* which) {
    if (e.max_degree(p) > kMaxFunctorDegree)
        throw JobError("over-cap", std::string(which) + " has degree " + std::to_string(e.max_degree(p)) +
                                       " above the cap " + std::to_string(kMaxFunctorDegree));
}

int default_rank(const Job& job, const Expr& a, const Expr& b, int p) {
    if (job.n > 0) return job.n;
    return std::max({1, a.max_degree(p), b.max_degree(p)});
}

json base_document(const Job& job) {
    json doc;
    doc["job"] = job.to_json();
    doc["engine_version"] = kEngineVersion;
    doc["rows"] = json::array();
    return doc;
}

void add_dims(json& doc, const Job& job, const std::vector<long long>& dims, const std::string& certificate) {
    for (int i = job.min_degree; i <= job.max_degree; ++i)
        doc["rows"].push_back({{"degree", i},
                               {"dim", i < int(dims.size()) ? dims[i] : 0},
                               {"certificate", certificate}});
}

std::optional<Cache> cache_of(const Job& job) {
    if (!job.use_cache) return std::nullopt;
    return Cache(job.cache_dir.empty() ? Cache::default_dir() : std::filesystem::path(job.cache_dir));
}

RunResult run_ext(const Job& job) {
    auto field = field_or_throw(job.p, job.r);
    Expr f = parse_or_throw(job.f, "F"), g = parse_or_throw(job.g, "G");
    const int n = default_rank(job, f, g, job.p);
    ResolveOptions opt;
    opt.policy = policy_of(job.policy);
    auto cache = cache_of(job);
    Resolution res = cached_resolution(f, n, field, job.max_degree + 1, opt, cache ? &*cache : nullptr);
    GradedDims dims = ext(res, *eval_cached(g, n, field), job.max_degree);
    std::ostringstream cert;
    cert << "exact (" << field->name() << ", n=" << n << ", resolution certified";
    if (n < std::max(f.max_degree(job.p), g.max_degree(job.p))) cert << ", non-faithful: n below degree";
    cert << ")";
    RunResult out{base_document(job)};
    add_dims(out.document, job, dims.dims, cert.str());
    return out;
}

RunResult run_tor(const Job& job) {
    auto field = field_or_throw(job.p, job.r);
    Expr e = parse_or_throw(job.f, "F"), f = parse_or_throw(job.g, "G");
    if (e.kind() != ExprKind::Contra)
        throw JobError("bad-expression", "tor expects a contravariant first argument, cdual(E)");
    const int n = default_rank(job, e.child(), f, job.p);
    ResolveOptions opt;
    opt.policy = policy_of(job.policy);
    GradedDims dims = tor(e, f, n, field, job.max_degree, opt);
    RunResult out{base_document(job)};
    add_dims(out.document, job, dims.dims,
             "exact (" + field->name() + ", n=" + std::to_string(n) + ", through Kuhn duality)");
    return out;
}

RunResult run_generic(const Job& job, bool torsion) {
    auto field = field_or_throw(job.p, job.r);
    Expr f = parse_or_throw(job.f, "F"), g = parse_or_throw(job.g, "G");
    GenericOptions opt;
    opt.n = job.n;
    opt.resolve.policy = policy_of(job.policy);
    GenericResult res = torsion ? generic_tor(f, g, job.max_degree, field, opt)
                                : generic_ext(f, g, job.max_degree, field, opt);
    RunResult out{base_document(job)};
    add_dims(out.document, job, res.dims.dims, res.cert.str());
    if (res.cert.status == "contradiction") out.exit_code = kExitContradiction;
    return out;
}

RunResult run_fqcat(const Job& job) {
    auto k = fq_or_throw(job.q);
    Expr f = parse_or_throw(job.f, "F"), g = parse_or_throw(job.g, "G");
    auto dims_at = [&](int N) {
        auto cat = std::make_shared<const TruncCat>(job.q, N);
        return cat_ext(restrict_functor(f, cat, k), restrict_functor(g, cat, k), job.max_degree);
    };
    GradedDims dims = dims_at(job.N);
    std::optional<GradedDims> next;
    try {
        next = dims_at(job.N + 1);
    } catch (const ResourceCapExceeded&) {
    }
    RunResult out{base_document(job)};
    for (int i = job.min_degree; i <= job.max_degree; ++i) {
        std::string stability = !next                          ? "stability unchecked: N+1 over caps"
                                : next->at(i) == dims.at(i) ? "stable at N=" + std::to_string(job.N + 1)
                                                                : "changes at N=" + std::to_string(job.N + 1);
        out.document["rows"].push_back(
            {{"degree", i}, {"dim", dims.at(i)}, {"certificate", dims.certificate + "; " + stability}});
    }
    return out;
}

json report_row(const ComparisonReport& rep, const ComparisonRow& row) {
    return {{"map", rep.map},
            {"f", rep.f},
            {"g", rep.g},
            {"q", rep.q},
            {"r", rep.r},
            {"s", rep.s},
            {"twist_level", rep.twist_level},
            {"N", rep.N},
            {"rank_n", rep.rank_n},
            {"components", rep.components},
            {"degree", row.degree},
            {"source", row.source},
            {"target", row.target},
            {"rank", row.rank},
            {"verdict", row.verdict},
            {"predicted_iso", row.predicted_iso},
            {"stability", row.stability},
            {"certificate", row.certificate}};
}

RunResult run_compare(const Job& job) {
    Expr f = parse_or_throw(job.f, "F"), g = parse_or_throw(job.g, "G");
    fq_or_throw(job.q);
    CompareOptions opt;
    opt.max_degree = job.max_degree;
    opt.resolve.policy = policy_of(job.policy);
    ComparisonReport rep;
    if (job.kind.empty() || job.kind == "strong")
        rep = strong_phi(f, g, job.q, job.N, opt);
    else if (job.kind == "generalized")
        rep = gen_comp_map(f, g, job.q, job.s, job.N, opt);
    else
        throw JobError("bad-parameter", "unknown comparison map '" + job.kind + "' (expected strong or generalized)");
    RunResult out{base_document(job)};
    for (const auto& row : rep.rows)
        if (row.degree >= job.min_degree) out.document["rows"].push_back(report_row(rep, row));
    if (rep.contradiction()) out.exit_code = kExitContradiction;
    return out;
}

RunResult run_oracle(const Job& job) {
    RunResult out{base_document(job)};
    std::vector<long long> dims;
    const std::string cert = "closed form";
    try {
        if (job.kind == "ffss") {
            auto s = ffss_series(parse_ffss_pair(job.pair), job.v_dim, job.twist, job.p, job.max_degree, job.weight);
            dims = s.by_weight[job.weight].dims;
            out.document["param_weight"] = s.param_weight(job.weight);
        } else if (job.kind == "tor-series") {
            auto s = tor_series(parse_tor_pair(job.pair), job.v_dim, job.twist, job.p, job.max_degree, job.weight);
            dims = s.by_weight[job.weight].dims;
            out.document["param_weight"] = s.param_weight(job.weight);
        } else if (job.kind == "e-infinity") {
            dims = e_infty_ext(parse_or_throw(job.g, "G"), job.max_degree, job.p).dims;
        } else if (job.kind == "gl-exterior") {
            dims = gl_exterior_homology(job.weight, job.l, job.m, job.max_degree).dims;
        } else {
            throw JobError("bad-parameter",
                           "unknown oracle '" + job.kind + "' (expected ffss, tor-series, e-infinity or gl-exterior)");
        }
    } catch (const std::invalid_argument& e) {
        throw JobError("bad-parameter", e.what());
    }
    add_dims(out.document, job, dims, cert);
    return out;
}

std::vector<SuiteInstance> instances_of(const Job& job) {
    if (job.instances.is_null()) return default_verdict_config();
    if (!job.instances.is_array()) throw JobError("bad-config", "instances must be an array");
    std::vector<SuiteInstance> out;
    for (const auto& x : job.instances) {
        SuiteInstance in;
        try {
            in.map = x.value("map", in.map);
            in.f = x.at("F").get<std::string>();
            in.g = x.at("G").get<std::string>();
            in.q = x.value("q", in.q);
            in.s = x.value("s", in.s);
            in.N = x.value("N", in.N);
            in.max_degree = x.value("max_degree", in.max_degree);
        } catch (const json::exception& e) {
            throw JobError("bad-config", std::string("suite instance: ") + e.what());
        }
        if (in.map != "strong" && in.map != "generalized-second-form")
            throw JobError("bad-config", "suite instance map must be strong or generalized-second-form");
        out.push_back(in);
    }
    return out;
}

RunResult run_suite(const Job& job) {
    RunResult out{base_document(job)};
    if (job.kind.empty() || job.kind == "acceptance") {
        json timing = json::array();
        for (const auto& c : acceptance_suite(job.workers)) {
            out.document["rows"].push_back({{"criterion", c.id}, {"pass", c.pass}, {"certificate", c.detail}});
            timing.push_back({{"criterion", c.id}, {"seconds", c.seconds}, {"limit_seconds", c.limit_seconds}});
            if (!c.pass) out.exit_code = kExitFailure;
        }
        out.document["timing"] = timing;
    } else if (job.kind == "verdicts") {
        for (const auto& rep : verdict_suite(instances_of(job), job.workers)) {
            for (const auto& row : rep.rows) out.document["rows"].push_back(report_row(rep, row));
            if (rep.contradiction()) out.exit_code = kExitContradiction;
        }
    } else {
        throw JobError("bad-parameter", "unknown suite '" + job.kind + "' (expected acceptance or verdicts)");
    }
    return out;
}

// Jobs whose documents are stored whole; a hit skips the computation.
bool result_cacheable(const Job& job) { return job.command != "suite" && job.command != "oracle"; }

}  // namespace

json Job::to_json() const {
    json j = {{"command", command}, {"min_degree", min_degree}, {"max_degree", max_degree}};
    auto put_field = [&] {
        j["p"] = p;
        j["r"] = r;
    };
    if (command == "ext" || command == "tor" || command == "generic-ext" || command == "generic-tor") {
        j["F"] = f;
        j["G"] = g;
        put_field();
        j["n"] = n;
        j["policy"] = policy;
    } else if (command == "fqcat-ext") {
        j["F"] = f;
        j["G"] = g;
        j["q"] = q;
        j["N"] = N;
    } else if (command == "compare") {
        j["F"] = f;
        j["G"] = g;
        j["q"] = q;
        j["s"] = s;
        j["N"] = N;
        j["map"] = kind.empty() ? "strong" : kind;
        j["policy"] = policy;
    } else if (command == "oracle") {
        j["oracle"] = kind;
        if (kind == "ffss" || kind == "tor-series") {
            j["pair"] = pair;
            j["p"] = p;
            j["r"] = twist;
            j["v_dim"] = v_dim;
            j["weight"] = weight;
        } else if (kind == "e-infinity") {
            j["G"] = g;
            j["p"] = p;
        } else if (kind == "gl-exterior") {
            j["d"] = weight;
            j["l"] = l;
            j["m"] = m;
        }
    } else if (command == "suite") {
        j["name"] = kind.empty() ? "acceptance" : kind;
        if (!instances.is_null()) j["instances"] = instances;
    }
    return j;
}

Job Job::from_json(const json& j, Job job) {
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) j.at(key).get_to(field);
    };
    get("command", job.command);
    get("F", job.f);
    get("G", job.g);
    get("p", job.p);
    get("r", job.r);
    get("n", job.n);
    get("N", job.N);
    get("q", job.q);
    get("s", job.s);
    get("twist", job.twist);
    get("min_degree", job.min_degree);
    get("max_degree", job.max_degree);
    get("kind", job.kind);
    get("map", job.kind);
    get("name", job.kind);
    get("oracle", job.kind);
    get("pair", job.pair);
    get("v_dim", job.v_dim);
    get("weight", job.weight);
    get("d", job.weight);
    get("l", job.l);
    get("m", job.m);
    get("policy", job.policy);
    get("workers", job.workers);
    get("use_cache", job.use_cache);
    get("cache_dir", job.cache_dir);
    if (j.contains("instances")) job.instances = j.at("instances");
    return job;
}

void validate(const Job& job) {
    if (!kCommands.count(job.command)) throw JobError("bad-command", "unknown command '" + job.command + "'");
    if (job.min_degree < 0 || job.max_degree < job.min_degree || job.max_degree > kMaxCohomDegree)
        throw JobError("bad-parameter", "degree window must satisfy 0 <= min <= max <= " +
                                            std::to_string(kMaxCohomDegree));
    if (job.workers < 1) throw JobError("bad-parameter", "--workers must be positive");
    if (job.n < 0 || job.n > 12) throw JobError("over-cap", "evaluation rank n must lie in 0..12");
    if (job.command == "ext" || job.command == "tor" || job.command == "generic-ext" || job.command == "generic-tor") {
        field_or_throw(job.p, job.r);
        Expr f = parse_or_throw(job.f, "F"), g = parse_or_throw(job.g, "G");
        check_degree(f, job.p, "F");
        check_degree(g, job.p, "G");
        policy_of(job.policy);
    }
    if (job.command == "fqcat-ext" || job.command == "compare") {
        fq_or_throw(job.q);
        if (job.N < 0 || job.N > kMaxTruncation)
            throw JobError("over-cap", "truncation N must lie in 0.." + std::to_string(kMaxTruncation));
        Expr f = parse_or_throw(job.f, "F"), g = parse_or_throw(job.g, "G");
        check_degree(f, Field::of_order(job.q)->p(), "F");
        check_degree(g, Field::of_order(job.q)->p(), "G");
        if (job.s < 1) throw JobError("bad-parameter", "s must be positive");
    }
    if (job.command == "oracle") {
        if (job.twist < 0 || job.weight < 0 || job.v_dim < 0 || job.l < 0 || job.m < 0)
            throw JobError("bad-parameter", "oracle parameters must be nonnegative");
        field_or_throw(job.p, 1);
    }
}

RunResult run(const Job& job) {
    validate(job);
    set_worker_budget(job.workers);
    auto cache = cache_of(job);
    const bool cacheable = cache && result_cacheable(job);
    const std::string key = "result;engine=" + std::string(kEngineVersion) + ";" + job.to_json().dump();
    const FieldPtr tag = Field::get(2);
    if (cacheable) {
        if (auto bytes = cache->get(key, *tag)) {
            try {
                json stored = json::parse(bytes->begin(), bytes->end());
                return {stored.at("document"), stored.at("exit_code").get<int>()};
            } catch (const json::exception&) {
            }
        }
    }

    RunResult out;
    if (job.command == "ext")
        out = run_ext(job);
    else if (job.command == "tor")
        out = run_tor(job);
    else if (job.command == "generic-ext")
        out = run_generic(job, false);
    else if (job.command == "generic-tor")
        out = run_generic(job, true);
    else if (job.command == "fqcat-ext")
        out = run_fqcat(job);
    else if (job.command == "compare")
        out = run_compare(job);
    else if (job.command == "oracle")
        out = run_oracle(job);
    else
        out = run_suite(job);

    if (cacheable) {
        std::string text = json{{"document", out.document}, {"exit_code", out.exit_code}}.dump();
        cache->put(key, *tag, std::vector<std::uint8_t>(text.begin(), text.end()));
    }
    return out;
}

std::string to_csv(const json& document) {
    const auto& rows = document.at("rows");
    if (rows.empty()) return "";
    std::vector<std::string> cols;
    for (auto it = rows[0].begin(); it != rows[0].end(); ++it) cols.push_back(it.key());
    // degree first and certificate last; the rest in key order
    auto rank_of = [](const std::string& c) { return c == "degree" || c == "criterion" ? 0 : c == "certificate" ? 2 : 1; };
    std::stable_sort(cols.begin(), cols.end(), [&](const auto& a, const auto& b) { return rank_of(a) < rank_of(b); });
    std::ostringstream os;
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const json& v = row.at(cols[i]);
            std::string cell = v.is_string() ? v.get<std::string>() : v.dump();
            if (cell.find_first_of(",\"\n") != std::string::npos) {
                std::string quoted = "\"";
                for (char c : cell) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
                cell = quoted + "\"";
            }
            os << (i ? "," : "") << cell;
        }
        os << "\n";
    }
    return os.str();
}

std::string summary(const json& document) {
    const auto& rows = document.at("rows");
    std::ostringstream os;
    const std::string command = document.at("job").at("command");
    if (command == "suite" && !rows.empty() && rows[0].contains("verdict")) {
        for (const auto& row : rows)
            os << (&row == &rows[0] ? "" : "; ") << row.at("map").get<std::string>() << " "
               << row.at("f").get<std::string>() << " -> " << row.at("g").get<std::string>() << " q="
               << row.at("q").get<int>() << ": " << row.at("verdict").get<std::string>();
        return os.str();
    }
    if (command == "suite") {
        int passed = 0;
        for (const auto& row : rows) passed += row.at("pass").get<bool>() ? 1 : 0;
        os << passed << "/" << rows.size() << " passed";
        return os.str();
    }
    const char* field = command == "compare" ? "rank" : "dim";
    os << "(";
    bool first = true;
    for (const auto& row : rows) {
        const long long v = row.at(field);
        if (command == "oracle") {
            if (v == 0) continue;
            os << (first ? "" : ", ") << v << "@" << row.at("degree").get<int>();
        } else {
            os << (first ? "" : ",") << v;
        }
        first = false;
    }
    os << ")";
    return os.str();
}

}  // namespace spfh
