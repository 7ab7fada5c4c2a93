// spfh: command-line front end of the engine.
#include <cctype>
#include <fstream>
#include <functional>
#include <iostream>

#include "CLI11.hpp"
#include "spfh/driver.hpp"
#include "spfh/polyfun.hpp"

using nlohmann::json;

namespace {

struct Binding {
    CLI::Option* opt;
    std::function<void(spfh::Job&)> apply;
};

// Registers an option on sub whose value overrides the config file only
// when given explicitly.
template <class T>
void add_job_option(CLI::App* sub, std::vector<Binding>& out, const std::string& name, T spfh::Job::*field,
          const std::string& help, spfh::Job& scratch) {
    CLI::Option* o = sub->add_option(name, scratch.*field, help);
    out.push_back({o, [field, &scratch](spfh::Job& job) { job.*field = scratch.*field; }});
}

// Single-letter parameters are spelled --p, --F, --N; CLI11 reserves
// one-character names for the short form, so they are rewritten to -p.
std::vector<std::string> normalize_args(int argc, char** argv) {
    std::vector<std::string> out;
    for (int i = argc - 1; i >= 1; --i) {
        std::string a = argv[i];
        if (a.size() >= 3 && a.rfind("--", 0) == 0 && std::isalpha(static_cast<unsigned char>(a[2])) &&
            (a.size() == 3 || a[3] == '=')) {
            if (a.size() > 3) out.push_back(a.substr(4));
            a = "-" + a.substr(2, 1);
        }
        out.push_back(a);
    }
    return out;  // reversed, as CLI::App::parse expects
}

json error_document(const std::string& code, const std::string& message) {
    return {{"engine_version", spfh::kEngineVersion}, {"error", {{"code", code}, {"message", message}}}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact Ext/Tor for strict polynomial functors and functors over finite fields"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(spfh::kEngineVersion));

    spfh::Job scratch;
    std::string config_path, output_path, format = "json";
    bool no_cache = false, quiet = false;
    std::vector<Binding> bindings;

    struct Spec {
        const char* name;
        const char* help;
    };
    const Spec specs[] = {
        {"ext", "Ext_P(F, G) over GF(p^r) at rank n"},
        {"tor", "Tor_P(E, F) for contravariant E = cdual(E0)"},
        {"generic-ext", "generic Ext by Frobenius-twist stabilization"},
        {"generic-tor", "generic Tor through duality"},
        {"fqcat-ext", "Ext between restricted functors over F_q-spaces of dimension <= N"},
        {"compare", "comparison map from strict polynomial Ext to the finite-field category"},
        {"oracle", "closed-form tables: ffss, tor-series, e-infinity, gl-exterior"},
        {"suite", "run a named suite: acceptance or verdicts"},
    };
    for (const auto& [name, help] : specs) {
        CLI::App* sub = app.add_subcommand(name, help);
        const std::string cmd = name;
        sub->add_option("--config", config_path, "JSON job file; explicit flags override it")->check(CLI::ExistingFile);
        sub->add_option("-o,--output", output_path, "write the result document here instead of stdout");
        sub->add_option("--format", format, "json, csv or summary")->check(CLI::IsMember({"json", "csv", "summary"}));
        sub->add_flag("--no-cache", no_cache, "bypass the on-disk cache");
        sub->add_flag("--quiet", quiet, "do not print the summary line on stderr");
        add_job_option(sub, bindings, "--workers", &spfh::Job::workers, "concurrency budget", scratch);
        add_job_option(sub, bindings, "--cache-dir", &spfh::Job::cache_dir, "cache directory (default $SPFH_CACHE_DIR)", scratch);
        add_job_option(sub, bindings, "--min-degree", &spfh::Job::min_degree, "first cohomological degree", scratch);
        add_job_option(sub, bindings, "--max-degree", &spfh::Job::max_degree, "last cohomological degree", scratch);
        if (cmd != "suite") {
            add_job_option(sub, bindings, "-F", &spfh::Job::f, "first functor expression", scratch);
            add_job_option(sub, bindings, "-G", &spfh::Job::g, "second functor expression", scratch);
            add_job_option(sub, bindings, "-p", &spfh::Job::p, "characteristic", scratch);
        }
        if (cmd == "ext" || cmd == "tor" || cmd == "generic-ext" || cmd == "generic-tor") {
            add_job_option(sub, bindings, "-r", &spfh::Job::r, "field degree: coefficients in GF(p^r)", scratch);
            add_job_option(sub, bindings, "-n", &spfh::Job::n, "evaluation rank (0: degree of the functors)", scratch);
            add_job_option(sub, bindings, "--policy", &spfh::Job::policy, "cover policy: dominant-first or reverse", scratch);
        }
        if (cmd == "fqcat-ext" || cmd == "compare") {
            add_job_option(sub, bindings, "-q", &spfh::Job::q, "order of the finite field", scratch);
            add_job_option(sub, bindings, "-N", &spfh::Job::N, "largest dimension in the truncated category", scratch);
        }
        if (cmd == "compare") {
            add_job_option(sub, bindings, "--map", &spfh::Job::kind, "strong or generalized", scratch);
            add_job_option(sub, bindings, "-s", &spfh::Job::s, "number of twist summands for the generalized map", scratch);
            add_job_option(sub, bindings, "--policy", &spfh::Job::policy, "cover policy", scratch);
        }
        if (cmd == "oracle") {
            CLI::Option* o = sub->add_option("kind", scratch.kind, "ffss, tor-series, e-infinity or gl-exterior");
            bindings.push_back({o, [&scratch](spfh::Job& job) { job.kind = scratch.kind; }});
            add_job_option(sub, bindings, "--pair", &spfh::Job::pair, "series pair such as GS", scratch);
            add_job_option(sub, bindings, "-r", &spfh::Job::twist, "Frobenius twist of the series", scratch);
            add_job_option(sub, bindings, "--v-dim", &spfh::Job::v_dim, "dimension of the parameter space", scratch);
            add_job_option(sub, bindings, "--weight", &spfh::Job::weight, "weight of the twisted side (d for gl-exterior)", scratch);
            add_job_option(sub, bindings, "-l", &spfh::Job::l, "gl-exterior rank l", scratch);
            add_job_option(sub, bindings, "-m", &spfh::Job::m, "gl-exterior rank m", scratch);
        }
        if (cmd == "suite") add_job_option(sub, bindings, "--name", &spfh::Job::kind, "acceptance or verdicts", scratch);
    }

    std::vector<std::string> args = normalize_args(argc, argv);
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    CLI::App* sub = app.get_subcommands().front();

    spfh::Job job;
    auto emit = [&](const std::string& text) {
        if (output_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(output_path);
            out << text;
            if (!out) {
                std::cerr << "error: cannot write " << output_path << "\n";
                return false;
            }
        }
        return true;
    };
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            json cfg;
            try {
                cfg = json::parse(in);
            } catch (const json::exception& e) {
                throw spfh::JobError("bad-config", e.what());
            }
            job = spfh::Job::from_json(cfg);
        }
        job.command = sub->get_name();
        for (const auto& b : bindings)
            if (b.opt->count() > 0) b.apply(job);
        job.use_cache = job.use_cache && !no_cache;

        spfh::RunResult res = spfh::run(job);
        std::string text = format == "csv"       ? spfh::to_csv(res.document)
                           : format == "summary" ? spfh::summary(res.document) + "\n"
                                                 : res.document.dump(2) + "\n";
        if (!emit(text)) return spfh::kExitFailure;
        if (!quiet && format != "summary") std::cerr << spfh::summary(res.document) << "\n";
        if (res.exit_code == spfh::kExitContradiction)
            std::cerr << "THEOREM CONTRADICTION: a predicted isomorphism failed on a stable row\n";
        return res.exit_code;
    } catch (const spfh::JobError& e) {
        std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
        emit(error_document(e.code(), e.what()).dump(2) + "\n");
    } catch (const spfh::ResourceCapExceeded& e) {
        std::cerr << "error [over-cap]: " << e.what() << "\n";
        emit(error_document("over-cap", e.what()).dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "error [computation-failure]: " << e.what() << "\n";
        emit(error_document("computation-failure", e.what()).dump(2) + "\n");
    }
    return spfh::kExitFailure;
}
