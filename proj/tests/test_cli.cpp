// Exercises the coherence-lab binary end to end: exit-code contract,
// byte-determinism, report schemas and the documented example values.
// argv[1] is the binary, argv[2] the fixtures directory.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

using nlohmann::json;

namespace {

std::string g_binary;
std::string g_fixtures;
int g_failures = 0;

/// Structural schema conformance for the subset the shipped schemas use.
bool conforms(const json& schema, const json& value) {
    if (schema.contains("type")) {
        const std::string t = schema["type"];
        if (t == "object" && !value.is_object()) return false;
        if (t == "array" && !value.is_array()) return false;
        if (t == "string" && !value.is_string()) return false;
        if (t == "boolean" && !value.is_boolean()) return false;
        if (t == "number" && !value.is_number()) return false;
        if (t == "integer" && !value.is_number_integer() && !value.is_number_unsigned())
            return false;
    }
    if (schema.contains("enum")) {
        bool hit = false;
        for (const json& option : schema["enum"])
            if (option == value) hit = true;
        if (!hit) return false;
    }
    if (schema.contains("minimum") && value.is_number() &&
        value.get<double>() < schema["minimum"].get<double>())
        return false;
    if (value.is_object()) {
        if (schema.contains("required"))
            for (const json& key : schema["required"])
                if (!value.contains(key.get<std::string>())) return false;
        const json props = schema.value("properties", json::object());
        for (const auto& [key, sub] : value.items()) {
            if (props.contains(key)) {
                if (!conforms(props[key], sub)) return false;
            } else if (schema.value("additionalProperties", json(true)) == json(false)) {
                return false;
            }
        }
    }
    if (value.is_array() && schema.contains("items"))
        for (const json& item : value)
            if (!conforms(schema["items"], item)) return false;
    return true;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    json doc;
    in >> doc;
    return doc;
}

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args, const std::string& env_prefix = {}) {
    const std::string out_path = "/tmp/cli_test_out.txt";
    const std::string cmd = env_prefix + g_binary + " " + args + " >" + out_path + " 2>&1";
    const int raw = std::system(cmd.c_str());
    RunResult res;
    res.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream in(out_path);
    std::ostringstream os;
    os << in.rdbuf();
    res.output = os.str();
    return res;
}

void check(bool ok, const std::string& what) {
    if (ok) {
        std::printf("[ ok ] %s\n", what.c_str());
    } else {
        std::printf("[FAIL] %s\n", what.c_str());
        ++g_failures;
    }
}

void check_exit(const std::string& args, int expected, const std::string& what) {
    const RunResult res = run(args);
    std::ostringstream os;
    os << what << " (exit " << res.exit_code << ", expected " << expected << ")";
    check(res.exit_code == expected, os.str());
}

double report_value(const std::string& output) {
    const json doc = json::parse(output);
    return doc["reports"][0]["value_bits"].get<double>();
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: cli_contract <binary> <fixtures-dir>\n";
        return 2;
    }
    g_binary = argv[1];
    g_fixtures = argv[2];
    const std::string fx = g_fixtures + "/";

    // Documented example values.
    {
        const RunResult res = run("measure --state " + fx + "phi2.json --measure cr");
        check(res.exit_code == 0, "measure cr on the maximally coherent qubit exits 0");
        check(std::abs(report_value(res.output) - 1.0) < 1e-10, "cr of phi2 is 1.0");
    }
    {
        const RunResult res =
            run("measure --state " + fx + "counterexample_rho_b.json --measure coa-inf");
        check(std::abs(report_value(res.output) - 2.0) < 1e-11,
              "regularized assistance of the counterexample target is 2.0");
    }
    {
        const RunResult coa =
            run("measure --state " + fx + "qubit_mixed.json --measure coa --restarts 16");
        const RunResult inf = run("measure --state " + fx + "qubit_mixed.json --measure coa-inf");
        check(std::abs(report_value(coa.output) - report_value(inf.output)) < 1e-5,
              "qubit assistance equals its regularization within 1e-5");
    }

    // Exit-code contract.
    check_exit("measure --state " + fx + "bad_syntax.json --measure cr", 2,
               "syntax error exits 2");
    {
        const RunResult res = run("measure --state " + fx + "bad_syntax.json --measure cr");
        check(res.output.find("line") != std::string::npos &&
                  res.output.find("column") != std::string::npos,
              "parse errors report line and column");
    }
    check_exit("measure --state " + fx + "bad_nonfinite.json --measure cr", 2,
               "non-finite numbers are rejected at parse time");
    for (const std::string bad : {"bad_nonhermitian", "bad_trace", "bad_notpsd"}) {
        const RunResult res = run("measure --state " + fx + bad + ".json --measure cr");
        check(res.exit_code == 3, bad + " exits 3");
        check(res.output.find("invariant violation") != std::string::npos,
              bad + " names the violated invariant");
    }
    check_exit("measure --state " + fx + "phi2.json --measure nonsense", 2,
               "unknown measure exits 2");
    check_exit("measure --state " + fx + "bell.json", 2, "missing --measure exits 2");
    check_exit("verify --suite no-such-suite", 2, "unknown suite exits 2");
    {
        const RunResult res = run("verify --suite no-such-suite");
        check(res.output.find("thm5-qubit") != std::string::npos,
              "unknown suite lists the available suites");
    }
    check_exit("random --dims 4 --rank 9", 2, "rank above dimension exits 2");
    check_exit("protocol --state " + fx + "bell.json --protocol " + fx + "channel_hadamard.json",
               2, "protocol file without steps exits 2");
    {
        const RunResult res = run("protocol --state " + fx + "bell.json --protocol " + fx +
                                  "protocol_bad_channel.json");
        check(res.exit_code == 3, "coherent Kraus operator in a protocol step exits 3");
        check(res.output.find("coherent Kraus operator") != std::string::npos,
              "the rejection names the offending operator");
    }

    // Determinism: byte-identical outputs for identical configurations.
    {
        const RunResult a = run("random --dims 2 --pure --seed 7");
        const RunResult b = run("random --dims 2 --pure --seed 7");
        check(a.output == b.output && a.exit_code == 0, "random --seed 7 is byte-identical");
        const RunResult c = run("random --dims 2 --pure --seed 8");
        check(a.output != c.output, "different seeds give different states");
    }
    {
        const RunResult a =
            run("measure --state " + fx + "qubit_mixed.json --measure coa --restarts 8");
        const RunResult b =
            run("measure --state " + fx + "qubit_mixed.json --measure coa --restarts 8");
        check(a.output == b.output, "measure reports are byte-identical");
    }
    {
        const RunResult a = run("verify --suite counterexample --restarts 8");
        const RunResult b = run("verify --suite counterexample --restarts 8");
        check(a.output == b.output && a.exit_code == 0,
              "verify reports are byte-identical and the suite passes");
    }

    // Environment seed applies only when --seed is absent.
    {
        const RunResult env_run = run("random --dims 2 --pure", "COHERENCE_LAB_SEED=7 ");
        const RunResult flag_run = run("random --dims 2 --pure --seed 7");
        check(env_run.output == flag_run.output, "COHERENCE_LAB_SEED matches --seed 7");
        const RunResult both = run("random --dims 2 --pure --seed 9", "COHERENCE_LAB_SEED=7 ");
        const RunResult flag9 = run("random --dims 2 --pure --seed 9");
        check(both.output == flag9.output, "--seed wins over the environment");
        const RunResult junk = run("random --dims 2 --pure", "COHERENCE_LAB_SEED=pony ");
        check(junk.exit_code == 2, "malformed COHERENCE_LAB_SEED exits 2");
    }

    // Generated states pass their own ingestion invariants.
    {
        const RunResult gen = run("random --dims 4 --rank 2 --seed 11 --out /tmp/cli_rank2.json");
        check(gen.exit_code == 0, "random --rank 2 exits 0");
        const RunResult meas = run("measure --state /tmp/cli_rank2.json --measure entropy");
        check(meas.exit_code == 0, "generated state is accepted by measure");
    }

    // Protocol trees: identity, branching, Monte Carlo agreement.
    {
        const RunResult res = run("protocol --state " + fx + "bell.json --protocol " + fx +
                                  "protocol_identity.json");
        const json doc = json::parse(res.output);
        check(res.exit_code == 0 && doc["tree"].size() == 1, "identity protocol has one node");
        const json node = doc["tree"]["0"];
        check(node["deterministic_path"].get<bool>() &&
                  std::abs(node["probability"].get<double>() - 1.0) < 1e-9,
              "identity branch is deterministic with probability 1");
    }
    {
        const RunResult res = run("protocol --state " + fx + "bell.json --protocol " + fx +
                                  "protocol_dephase.json");
        const json doc = json::parse(res.output);
        check(doc["tree"].size() == 2, "dephasing protocol has two branches");
        for (const auto& [path, node] : doc["tree"].items())
            check(std::abs(node["probability"].get<double>() - 0.5) < 1e-9,
                  "branch " + path + " has probability 1/2");
    }
    {
        const RunResult res = run("protocol --state " + fx + "bell.json --protocol " + fx +
                                  "protocol_merge.json --monte-carlo 100000");
        const json doc = json::parse(res.output);
        check(doc.contains("monte_carlo"), "Monte Carlo block present");
        for (const json& leaf : doc["monte_carlo"]["leaves"]) {
            const double exact = leaf["exact"].get<double>();
            const double freq = leaf["empirical"].get<double>();
            const double sigma = std::sqrt(exact * (1.0 - exact) / 100000.0);
            check(std::abs(freq - exact) <= 3.0 * sigma + 1e-12,
                  "leaf " + leaf["path"].get<std::string>() +
                      " empirical frequency within 3 sigma");
        }
    }

    // Live reports validate against the shipped schemas.
    {
        const json schema = load_json_file(g_fixtures + "/../schemas/measure_report.schema.json");
        const RunResult multi = run("measure --state " + fx + "phi2.json --state " + fx +
                                    "qubit_mixed.json --measure coa --restarts 4");
        const json doc = json::parse(multi.output);
        check(doc["reports"].size() == 2, "repeated --state yields one report per input");
        check(conforms(schema, doc), "measure report conforms to the shipped schema");
    }
    {
        const json schema = load_json_file(g_fixtures + "/../schemas/verify_report.schema.json");
        const RunResult res = run("verify --suite slocc --cases 5");
        check(conforms(schema, json::parse(res.output)),
              "verify report conforms to the shipped schema");
    }
    {
        const RunResult res = run("verify --suite slocc --cases 5 --report csv");
        check(res.exit_code == 0 && res.output.rfind("suite,case,", 0) == 0,
              "csv verify report has the documented header");
    }
    {
        const RunResult res =
            run("measure --state " + fx + "phi2.json --measure cr --report csv");
        check(res.output.rfind("input,measure,value_bits,converged,seed", 0) == 0,
              "csv measure report has the documented header");
    }

    std::printf("%s: %d failure(s)\n", g_failures ? "FAILURE" : "SUCCESS", g_failures);
    return g_failures ? 1 : 0;
}
