// coherence-lab: command-line front end for the assisted-coherence toolkit.
//
// Subcommands: measure (coherence/entanglement measures of state files),
// verify (named theorem-verification suites), protocol (exact branch-by-
// branch protocol simulation, optionally with Monte Carlo sampling on top),
// random (seeded state generation).
//
// Exit codes: 0 success, 1 suite failure, 2 usage/parse error, 3 data
// invariant violation.

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "coherence/errors.hpp"
#include "coherence/io.hpp"
#include "coherence/linalg.hpp"
#include "coherence/maxcorr.hpp"
#include "coherence/measures.hpp"
#include "coherence/protocols.hpp"
#include "coherence/roof.hpp"
#include "coherence/verify.hpp"

using namespace coherence;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSuiteFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInvariant = 3;

struct CommonOpts {
    std::optional<std::uint64_t> seed_flag;
    std::size_t restarts = 32;
    double tol = 1e-7;
    bool tol_from_flag = false;
    std::string report_format = "json";
    std::string out_path;
};

std::uint64_t resolve_seed(const CommonOpts& opts, std::string* provenance = nullptr) {
    if (opts.seed_flag) {
        if (provenance) *provenance = "flag";
        return *opts.seed_flag;
    }
    if (const char* env = std::getenv("COHERENCE_LAB_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0')
            throw parse_error("COHERENCE_LAB_SEED is not an unsigned integer");
        if (provenance) *provenance = "env";
        return static_cast<std::uint64_t>(v);
    }
    if (provenance) *provenance = "default";
    return kDefaultSeed;
}

void emit(const CommonOpts& opts, const std::string& text) {
    if (opts.out_path.empty())
        std::cout << text;
    else
        io::write_file(opts.out_path, text);
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out.push_back('\\');
            out.push_back(c);
        } else if (c == '\n') {
            out += "\\n";
        } else {
            out.push_back(c);
        }
    }
    return out;
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

// ---------------------------------------------------------------------------
// measure

struct MeasureRecord {
    std::string input;
    std::string measure;
    double value_bits = 0.0;
    bool converged = true;
    std::size_t restarts_used = 0;
    std::size_t ensemble_size = 0;
    bool roof_based = false;
};

MeasureRecord evaluate_measure(const std::string& name, const std::string& path,
                               const RoofConfig& roof) {
    const DensityMatrix rho = io::as_density(io::load_state_file(path));
    MeasureRecord rec;
    rec.input = path;
    rec.measure = name;

    auto from_roof = [&](const RoofResult& r) {
        rec.value_bits = r.value;
        rec.converged = r.converged;
        rec.restarts_used = r.restarts_used;
        rec.ensemble_size = r.ensemble.members.size();
        rec.roof_based = true;
    };

    if (name == "cr") {
        rec.value_bits = relative_entropy_of_coherence(rho);
    } else if (name == "coa") {
        from_roof(coherence_of_assistance(rho, roof));
    } else if (name == "coa-inf") {
        rec.value_bits = regularized_coa(rho);
    } else if (name == "cof") {
        from_roof(coherence_of_formation(rho, roof));
    } else if (name == "qire") {
        rec.value_bits = qi_relative_entropy(rho, 1);
    } else if (name == "eoa") {
        from_roof(entanglement_of_assistance(rho, roof));
    } else if (name == "eoa-inf") {
        rec.value_bits = regularized_eoa(rho);
    } else if (name == "entropy") {
        rec.value_bits = von_neumann_entropy(rho);
    } else if (name == "gain") {
        rec.value_bits = assistance_gain(rho);
    } else {
        throw parse_error("unknown measure: " + name +
                          " (expected cr, coa, coa-inf, cof, qire, eoa, eoa-inf, entropy, gain)");
    }
    return rec;
}

int cmd_measure(const CommonOpts& opts, const std::vector<std::string>& states,
                const std::string& measure) {
    std::string tol_provenance;
    std::string seed_provenance;
    const std::uint64_t seed = resolve_seed(opts, &seed_provenance);
    tol_provenance = opts.tol_from_flag ? "flag" : "default";

    RoofConfig roof;
    roof.restarts = opts.restarts;
    roof.tol = opts.tol;
    roof.seed = seed;

    std::vector<MeasureRecord> records;
    for (const std::string& path : states) records.push_back(evaluate_measure(measure, path, roof));

    std::ostringstream os;
    if (opts.report_format == "csv") {
        os << "input,measure,value_bits,converged,seed\n";
        for (const MeasureRecord& r : records)
            os << r.input << ',' << r.measure << ',' << io::format_significant(r.value_bits) << ','
               << bool_text(r.converged) << ',' << seed << '\n';
    } else {
        os << "{\n  \"reports\": [\n";
        for (std::size_t i = 0; i < records.size(); ++i) {
            const MeasureRecord& r = records[i];
            os << "    {\n"
               << "      \"input\": \"" << json_escape(r.input) << "\",\n"
               << "      \"measure\": \"" << r.measure << "\",\n"
               << "      \"value_bits\": " << io::format_significant(r.value_bits) << ",\n"
               << "      \"converged\": " << bool_text(r.converged) << ",\n"
               << "      \"restarts_used\": " << r.restarts_used << ",\n"
               << "      \"seed\": " << seed << ",\n"
               << "      \"seed_provenance\": \"" << seed_provenance << "\",\n"
               << "      \"tol\": " << io::format_significant(opts.tol) << ",\n"
               << "      \"tol_provenance\": \"" << tol_provenance << "\"";
            if (r.roof_based)
                os << ",\n      \"ensemble_size\": " << r.ensemble_size;
            os << "\n    }" << (i + 1 < records.size() ? "," : "") << "\n";
        }
        os << "  ]\n}\n";
    }
    emit(opts, os.str());
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const CommonOpts& opts, const std::string& suite, std::size_t cases) {
    const std::vector<std::string>& names = verify::suite_names();
    if (std::find(names.begin(), names.end(), suite) == names.end()) {
        std::ostringstream os;
        os << "unknown suite: " << suite << " (available:";
        for (const std::string& n : names) os << ' ' << n;
        os << ')';
        throw parse_error(os.str());
    }

    verify::SuiteConfig cfg;
    cfg.cases = cases;
    cfg.seed = resolve_seed(opts);
    cfg.restarts = opts.restarts;
    cfg.tol = opts.tol;
    const verify::SuiteResult res = verify::run_suite(suite, cfg);

    std::ostringstream os;
    if (opts.report_format == "csv") {
        os << "suite,case,passed,deviation,note\n";
        for (const verify::CaseRecord& c : res.details)
            os << res.suite << ',' << c.index << ',' << bool_text(c.passed) << ','
               << io::format_significant(c.deviation) << ",\"" << c.note << "\"\n";
    } else {
        os << "{\n"
           << "  \"suite\": \"" << res.suite << "\",\n"
           << "  \"cases_run\": " << res.cases_run << ",\n"
           << "  \"cases_passed\": " << res.cases_passed << ",\n"
           << "  \"worst_deviation\": " << io::format_significant(res.worst_deviation) << ",\n"
           << "  \"seed\": " << cfg.seed << ",\n"
           << "  \"details\": [\n";
        for (std::size_t i = 0; i < res.details.size(); ++i) {
            const verify::CaseRecord& c = res.details[i];
            os << "    {\"case\": " << c.index << ", \"passed\": " << bool_text(c.passed)
               << ", \"deviation\": " << io::format_significant(c.deviation) << ", \"note\": \""
               << json_escape(c.note) << "\"}" << (i + 1 < res.details.size() ? "," : "") << "\n";
        }
        os << "  ]\n}\n";
    }
    emit(opts, os.str());
    return res.all_passed() ? kExitOk : kExitSuiteFailure;
}

// ---------------------------------------------------------------------------
// protocol

int cmd_protocol(const CommonOpts& opts, const std::string& state_path,
                 const std::string& protocol_path, std::size_t monte_carlo) {
    const DensityMatrix rho = io::as_density(io::load_state_file(state_path));
    if (rho.subsystem_count() != 2)
        throw contract_violation("protocol: the input state must be bipartite");
    const std::vector<ProtocolStep> steps = io::load_protocol_file(protocol_path);
    const std::uint64_t seed = resolve_seed(opts);

    const std::vector<ProtocolNode> nodes = run_protocol_tree(rho, steps);

    // Leaves: deepest nodes plus earlier aborted branches.
    std::vector<const ProtocolNode*> leaves;
    for (const ProtocolNode& n : nodes)
        if (n.trace.aborted || n.depth + 1 == steps.size()) leaves.push_back(&n);

    std::ostringstream os;
    os << "{\n"
       << "  \"input_digest\": \"" << io::state_digest(rho) << "\",\n"
       << "  \"steps\": " << steps.size() << ",\n"
       << "  \"tree\": {\n";
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const ProtocolNode& n = nodes[i];
        os << "    \"" << n.path << "\": {"
           << "\"operation\": \"" << n.party << "\", "
           << "\"outcome_index\": " << n.outcome_index << ", "
           << "\"probability\": " << io::format_significant(n.probability) << ", "
           << "\"p_alpha\": " << io::format_significant(n.trace.p_alpha) << ", "
           << "\"q_alpha\": " << io::format_significant(n.trace.q_alpha) << ", "
           << "\"success_prob\": " << io::format_significant(n.trace.success_prob) << ", "
           << "\"deterministic_path\": " << bool_text(n.trace.deterministic_path) << ", "
           << "\"aborted\": " << bool_text(n.trace.aborted) << ", "
           << "\"post_state_digest\": \"" << io::state_digest(n.trace.final_state) << "\"}"
           << (i + 1 < nodes.size() ? "," : "") << "\n";
    }
    os << "  }";

    if (monte_carlo > 0) {
        std::vector<double> cumulative;
        double acc = 0.0;
        for (const ProtocolNode* leaf : leaves) {
            acc += leaf->probability;
            cumulative.push_back(acc);
        }
        std::vector<std::size_t> hits(leaves.size(), 0);
        SplitMix64 rng(seed);
        for (std::size_t s = 0; s < monte_carlo; ++s) {
            const double u = rng.next_double() * acc;
            const std::size_t idx =
                std::lower_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin();
            ++hits[std::min(idx, leaves.size() - 1)];
        }
        os << ",\n  \"monte_carlo\": {\n"
           << "    \"samples\": " << monte_carlo << ",\n"
           << "    \"seed\": " << seed << ",\n"
           << "    \"leaves\": [\n";
        for (std::size_t i = 0; i < leaves.size(); ++i) {
            const double freq = static_cast<double>(hits[i]) / static_cast<double>(monte_carlo);
            os << "      {\"path\": \"" << leaves[i]->path
               << "\", \"exact\": " << io::format_significant(leaves[i]->probability)
               << ", \"empirical\": " << io::format_significant(freq) << "}"
               << (i + 1 < leaves.size() ? "," : "") << "\n";
        }
        os << "    ]\n  }";
    }
    os << "\n}\n";
    emit(opts, os.str());
    return kExitOk;
}

// ---------------------------------------------------------------------------
// random

int cmd_random(const CommonOpts& opts, const std::string& dims_csv, std::size_t rank, bool pure) {
    std::vector<std::size_t> dims;
    std::stringstream ss(dims_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(tok.c_str(), &end, 10);
        if (end == tok.c_str() || *end != '\0' || v < 1)
            throw parse_error("--dims must be a comma-separated list of positive integers");
        dims.push_back(v);
    }
    if (dims.empty()) throw parse_error("--dims is required");
    const std::size_t d = total_dimension(dims);
    if (rank > d) throw parse_error("--rank exceeds the total dimension");

    SplitMix64 rng(resolve_seed(opts));
    if (pure) {
        emit(opts, io::encode_pure(random_pure(dims, rng)));
    } else {
        emit(opts, io::encode_density(random_density(dims, rank == 0 ? d : rank, rng)));
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coherence-lab: assisted quantum-coherence distillation toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::vector<std::string> states;
    std::string measure_name, suite_name, protocol_path;
    std::size_t cases = 0, monte_carlo = 0, rank = 0;
    std::string dims_csv;
    bool pure = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", opts.seed_flag, "64-bit seed (default 3405691582)");
        cmd->add_option("--restarts", opts.restarts, "optimizer restarts")->capture_default_str();
        cmd->add_option("--tol", opts.tol, "optimizer tolerance")
            ->capture_default_str()
            ->each([&](const std::string&) { opts.tol_from_flag = true; });
        cmd->add_option("--report", opts.report_format, "report format: json or csv")
            ->check(CLI::IsMember({"json", "csv"}))
            ->capture_default_str();
        cmd->add_option("--out", opts.out_path, "output path (default stdout)");
    };

    CLI::App* measure = app.add_subcommand("measure", "compute a measure of state files");
    measure->add_option("--state", states, "state file (repeatable)")->required();
    measure->add_option("--measure", measure_name,
                        "cr | coa | coa-inf | cof | qire | eoa | eoa-inf | entropy | gain")
        ->required();
    add_common(measure);

    CLI::App* verify_cmd = app.add_subcommand("verify", "run a named verification suite");
    verify_cmd->add_option("--suite", suite_name, "suite name (see docs)")->required();
    verify_cmd->add_option("--cases", cases, "number of cases (0: suite default)");
    add_common(verify_cmd);

    CLI::App* protocol = app.add_subcommand("protocol", "replay a protocol description exactly");
    protocol->add_option("--state", states, "bipartite input state file")->required();
    protocol->add_option("--protocol", protocol_path, "protocol description file")->required();
    protocol->add_option("--monte-carlo", monte_carlo, "also sample N runs");
    add_common(protocol);

    CLI::App* random_cmd = app.add_subcommand("random", "generate a seeded random state file");
    random_cmd->add_option("--dims", dims_csv, "subsystem dimensions, e.g. 2,3")->required();
    random_cmd->add_option("--rank", rank, "rank of the mixed state (default: full)");
    random_cmd->add_flag("--pure", pure, "emit a Haar-random pure state");
    add_common(random_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*measure) return cmd_measure(opts, states, measure_name);
        if (*verify_cmd) return cmd_verify(opts, suite_name, cases);
        if (*protocol) {
            if (states.size() != 1) throw parse_error("protocol: exactly one --state is required");
            return cmd_protocol(opts, states.front(), protocol_path, monte_carlo);
        }
        if (*random_cmd) return cmd_random(opts, dims_csv, rank, pure);
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const contract_violation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInvariant;
    }
    return kExitUsage;
}
