#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "spfh/homalg.hpp"

namespace spfh {

inline constexpr const char* kEngineVersion = "1.0.0";

enum ExitCode { kExitOk = 0, kExitFailure = 1, kExitContradiction = 2 };

// A validation failure with a machine-readable code such as "bad-field" or
// "over-cap".
class JobError : public std::runtime_error {
public:
    JobError(std::string code, const std::string& what) : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

struct Job {
    // ext | tor | generic-ext | generic-tor | fqcat-ext | compare | oracle | suite
    std::string command;
    std::string f, g;
    int p = 2, r = 1;  // coefficient field GF(p^r)
    int n = 0;         // evaluation rank; 0 picks the degree of the functors
    int N = 2;         // truncation of the finite-field category
    int q = 2;
    int s = 1;
    int twist = 1;  // Frobenius level for oracle series
    int min_degree = 0, max_degree = 2;
    // compare: "strong" or "generalized"; oracle: ffss | tor-series |
    // e-infinity | gl-exterior; suite: acceptance | verdicts.
    std::string kind;
    std::string pair;  // oracle series pair, e.g. GS
    long long v_dim = 1;
    int weight = 1;
    int l = 1, m = 1;  // gl-exterior ranks
    std::string policy = "dominant-first";
    int workers = 1;
    bool use_cache = true;
    std::string cache_dir;  // empty: SPFH_CACHE_DIR or the user cache
    // suite verdicts: [{map, F, G, q, s, N, max_degree}]; null for the
    // shipped default.
    nlohmann::json instances;

    nlohmann::json to_json() const;
    // Fields present in j override those of base.
    static Job from_json(const nlohmann::json& j, Job base);
    static Job from_json(const nlohmann::json& j) { return from_json(j, Job()); }
};

struct RunResult {
    nlohmann::json document;
    int exit_code = kExitOk;
};

// Validates against the module caps and runs the job. Throws JobError for
// invalid jobs; computation errors propagate.
RunResult run(const Job& job);
void validate(const Job& job);

// One line per row, degree then the numeric fields then the certificate.
std::string to_csv(const nlohmann::json& document);
// "(1,0,1)" for dense dimension tables, "(1@0, 1@4)" for sparse ones.
std::string summary(const nlohmann::json& document);

// On-disk store of byte payloads in the SPFH1 envelope: magic "SPFH1",
// schema version byte, field descriptor, key, payload, trailing 64-bit
// checksum, all little-endian.
class Cache {
public:
    static constexpr std::uint8_t kSchemaVersion = 1;

    explicit Cache(std::filesystem::path dir);
    // $SPFH_CACHE_DIR, else $XDG_CACHE_HOME/spfh, else ~/.cache/spfh.
    static std::filesystem::path default_dir();

    // Miss on absence, key mismatch or failed checksum (a corrupted entry is
    // removed so that the caller recomputes). IO errors throw.
    std::optional<std::vector<std::uint8_t>> get(const std::string& key, const Field& field) const;
    // Writes to a temporary file and renames it into place.
    void put(const std::string& key, const Field& field, const std::vector<std::uint8_t>& payload) const;

    std::filesystem::path path_of(const std::string& key, const Field& field) const;
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
};

std::uint64_t checksum64(const std::uint8_t* data, std::size_t size);

// Resolution payload: policy, rank, then per step the Γ^λ summand list,
// exactness ranks and generator images; vectors bitpacked for p = 2.
std::vector<std::uint8_t> encode_resolution(const Resolution& res);
Resolution decode_resolution(const std::vector<std::uint8_t>& bytes, std::shared_ptr<const WeightedModule> target);

std::string resolution_key(const Expr& e, int n, const Field& field, CoverPolicy policy, int length);

// Resolution of eval(e, n) of the given length through the cache.
Resolution cached_resolution(const Expr& e, int n, const FieldPtr& field, int length, const ResolveOptions& opt,
                             const Cache* cache, bool* hit = nullptr);

// Acceptance criteria; each line carries the measured values and timing.
struct CriterionResult {
    int id = 0;
    bool pass = false;
    double seconds = 0;
    double limit_seconds = 0;
    std::string detail;
};

std::vector<CriterionResult> acceptance_suite(int workers = 1, const std::vector<int>& only = {});
std::string format_criterion(const CriterionResult& c);

}  // namespace spfh
