// Manifest-driven front end: load groupoid/cocycle/bundle/loop fixtures,
// run validations and computations, emit deterministic tables.
//
//   orbitwist validate <manifest> [--json]
//   orbitwist h2 <group> <n> [--json]
//   orbitwist report <manifest> [--json] [--seed N]
//   orbitwist selftest [--seed N] [--json] [--inject-failure]
//
// Exit codes: 0 success, 1 usage/parse error, 2 validation failure,
// 3 computation mismatch.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "orbitwist/manifest.hpp"
#include "orbitwist/selftest.hpp"

using namespace orbitwist;

namespace {

std::uint64_t env_seed() {
    if (const char* s = std::getenv("ORBITWIST_SEED")) {
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
        }
    }
    return 12345;
}

int load_json_file(const std::string& path, json& out) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open " << path << "\n";
        return 1;
    }
    try {
        in >> out;
    } catch (const std::exception& e) {
        std::cerr << "error: parse failure in " << path << ": " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact twisted-cohomology computations on finite groupoid models"};
    app.require_subcommand(1);
    app.fallthrough();
    bool as_json = false;
    app.add_flag("--json", as_json, "emit JSON instead of TSV");
    std::uint64_t seed = env_seed();
    app.add_option("--seed", seed, "random seed (fallback: ORBITWIST_SEED)");

    std::string manifest_path;
    auto* validate_cmd = app.add_subcommand("validate", "validate a manifest");
    validate_cmd->add_option("manifest", manifest_path)->required();

    std::string group_name;
    std::int64_t modulus = 2;
    auto* h2_cmd = app.add_subcommand("h2", "elementary divisors of H^2(G, Z/n)");
    h2_cmd->add_option("group", group_name)->required();
    h2_cmd->add_option("n", modulus)->required();

    auto* report_cmd = app.add_subcommand("report", "run the computations of a manifest");
    report_cmd->add_option("manifest", manifest_path)->required();

    bool inject_failure = false;
    auto* selftest_cmd = app.add_subcommand("selftest", "run the property suite");
    selftest_cmd->add_flag("--inject-failure", inject_failure,
                           "force one failing check (test hook)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (validate_cmd->parsed()) {
            json j;
            if (int rc = load_json_file(manifest_path, j)) return rc;
            Manifest m;
            try {
                m = load_manifest(j);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 1;
            }
            auto rep = validate_manifest(m);
            if (as_json) {
                json out{{"ok", rep.ok()}, {"violations", rep.violations}};
                std::cout << out.dump(2) << "\n";
            } else {
                for (auto& v : rep.violations) std::cout << "violation\t" << v << "\n";
                std::cout << (rep.ok() ? "valid" : "invalid") << "\n";
            }
            return rep.ok() ? 0 : 2;
        }

        if (h2_cmd->parsed()) {
            auto h2 = group_h2(named_group(group_name), modulus);
            if (as_json) {
                std::cout << json(h2.divisors).dump() << "\n";
            } else {
                for (std::size_t i = 0; i < h2.divisors.size(); ++i)
                    std::cout << (i ? "\t" : "") << h2.divisors[i];
                std::cout << "\n";
            }
            return 0;
        }

        if (report_cmd->parsed()) {
            json j;
            if (int rc = load_json_file(manifest_path, j)) return rc;
            Manifest m;
            try {
                m = load_manifest(j);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 1;
            }
            auto rep = validate_manifest(m);
            if (!rep.ok()) {
                for (auto& v : rep.violations) std::cerr << "violation\t" << v << "\n";
                return 2;
            }
            auto result = run_report(m, seed);
            if (as_json)
                std::cout << result.data.dump(2) << "\n";
            else
                std::cout << result.text;
            return result.computation_ok ? 0 : 3;
        }

        if (selftest_cmd->parsed()) {
            auto t0 = std::chrono::steady_clock::now();
            auto res = run_selftest(seed, inject_failure);
            auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
            if (as_json) {
                json out;
                for (auto& [name, ok] : res.checks)
                    out["checks"].push_back({{"name", name}, {"ok", ok}});
                out["ok"] = res.ok();
                out["elapsed_ms"] = ms;
                std::cout << out.dump(2) << "\n";
            } else {
                for (auto& [name, ok] : res.checks)
                    std::cout << (ok ? "PASS" : "FAIL") << "\t" << name << "\n";
                std::cout << (res.ok() ? "selftest passed" : "selftest FAILED") << "\t"
                          << res.checks.size() << " checks\t" << ms << " ms\n";
            }
            return res.ok() ? 0 : 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
