#include "doctest.h"

#include "qcrypt/report.hpp"

#include "json.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

using namespace qcrypt::cli;

namespace {

std::string binary_path() {
    const char* env = std::getenv("QCRYPT_LAB_BIN");
    return env ? env : "./qcrypt-lab";
}

struct CliResult {
    int exit_code;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    std::string cmd = binary_path() + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    std::string output;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) output.append(buf.data(), n);
    int status = pclose(pipe);
    return {WEXITSTATUS(status), output};
}

}  // namespace

TEST_CASE("record emission") {
    SUBCASE("empty record list still carries the header") {
        std::string csv = to_csv({"x", "y"}, {});
        CHECK(csv == "x,y\r\n");
    }

    SUBCASE("records round-trip through a JSON parser") {
        Record rec;
        rec.add("p_zero", 0.75).add("trials", 100000L).add("mode", "sampled");
        std::string json = to_json({"p_zero", "trials", "mode"}, {rec});
        auto parsed = nlohmann::json::parse(json);
        REQUIRE(parsed.is_array());
        CHECK(parsed[0]["p_zero"].get<double>() == doctest::Approx(0.75));
        CHECK(parsed[0]["trials"].get<long>() == 100000);
        CHECK(parsed[0]["mode"].get<std::string>() == "sampled");
    }

    SUBCASE("mixed-type record lists are a usage error") {
        Record a, b;
        a.add("x", 1.0);
        b.add("y", 2.0);
        CHECK_THROWS_AS(to_csv({"x"}, {a, b}), std::invalid_argument);
        CHECK_THROWS_AS(to_json({"x"}, {a, b}), std::invalid_argument);
    }

    SUBCASE("csv quoting") {
        Record rec;
        rec.add("text", "hello, \"world\"").add("n", 1L);
        std::string csv = to_csv({"text", "n"}, {rec});
        CHECK(csv.find("\"hello, \"\"world\"\"\"") != std::string::npos);
    }

    SUBCASE("doubles carry 12 significant digits") {
        CHECK(format_double(1.0 / 3.0) == "0.333333333333");
        CHECK(format_double(2.0) == "2");
    }
}

TEST_CASE("cli binary") {
    SUBCASE("every subcommand offers --help") {
        for (const char* sub :
             {"cointoss", "vbct", "twoparty", "randexp", "entropy", "nonlocal"}) {
            auto r = run_cli(std::string(sub) + " --help");
            CHECK(r.exit_code == 0);
            CHECK(r.output.find("--seed") != std::string::npos);
        }
    }

    SUBCASE("identical config and seed give identical bytes") {
        std::string args = "cointoss --protocol colbeck --alice cheat0 --trials 20000 --seed 7";
        auto first = run_cli(args);
        auto second = run_cli(args);
        CHECK(first.exit_code == 0);
        CHECK(first.output == second.output);
        auto other_seed =
            run_cli("cointoss --protocol colbeck --alice cheat0 --trials 20000 --seed 8");
        CHECK(first.output != other_seed.output);
    }

    SUBCASE("the published cheat probability shows up") {
        auto r = run_cli("cointoss --protocol colbeck --alice cheat0 --trials 100000 --seed 7");
        CHECK(r.exit_code == 0);
        auto parsed = nlohmann::json::parse(r.output);
        CHECK(parsed[0]["p_zero"].get<double>() == doctest::Approx(0.75).epsilon(0.01));
    }

    SUBCASE("sweep emits a strictly positive gap column") {
        auto r = run_cli("twoparty --sweep-3x3 --max-alphabet 4 --format csv");
        CHECK(r.exit_code == 0);
        std::istringstream lines(r.output);
        std::string line;
        std::getline(lines, line);
        CHECK(line.find("canonical_id") != std::string::npos);
        int rows = 0;
        while (std::getline(lines, line)) {
            if (line.empty() || line == "\r") continue;
            auto pos = line.rfind(',');
            double gap = std::stod(line.substr(pos + 1));
            CHECK(gap > 0.0);
            ++rows;
        }
        CHECK(rows > 0);
    }

    SUBCASE("honest expansion produces output and exit 0") {
        auto r = run_cli(
            "randexp --mode protocol-a --device honest --x-bits 400 --epsilon 1e-6 --seed 11");
        CHECK(r.exit_code == 0);
        auto parsed = nlohmann::json::parse(r.output);
        CHECK(parsed[0]["produced"].get<long>() > 0);
        CHECK(parsed[0]["outcome"].get<std::string>() == "output");
    }

    SUBCASE("replayed feeds earn nothing") {
        auto r = run_cli(
            "randexp --mode protocol-a --device replay --x-bits 200 --epsilon 1e-4 --seed 13");
        CHECK(r.exit_code == 0);
        auto parsed = nlohmann::json::parse(r.output);
        REQUIRE(parsed.size() == 2);
        CHECK(parsed[0]["produced"].get<long>() > 0);
        CHECK(parsed[1]["produced"].get<long>() == 0);
    }

    SUBCASE("aborted protocol runs exit with code 2") {
        // a programmed device fails some test quickly at this length
        auto r = run_cli(
            "randexp --mode protocol-a --device classical --x-bits 400 --epsilon 1e-4 --seed 17");
        auto parsed = nlohmann::json::parse(r.output);
        if (parsed[0]["outcome"].get<std::string>() == "abort")
            CHECK(r.exit_code == 2);
        else
            CHECK(r.exit_code == 0);
    }

    SUBCASE("unknown subcommands are usage errors") {
        auto r = run_cli("frobnicate");
        CHECK(r.exit_code == 1);
    }

    SUBCASE("config files supply defaults and flags override them") {
        std::string config_path = "/tmp/qcrypt_cli_test_config.json";
        {
            std::ofstream f(config_path);
            f << R"({"subcommand":"cointoss","protocol":"colbeck","alice":"cheat0",)"
              << R"("trials":20000,"seed":7})";
        }
        auto from_config = run_cli("--config " + config_path);
        CHECK(from_config.exit_code == 0);
        auto baseline = run_cli("cointoss --protocol colbeck --alice cheat0 --trials 20000 --seed 7");
        CHECK(from_config.output == baseline.output);

        auto overridden = run_cli("cointoss --config " + config_path + " --alice honest");
        auto honest = run_cli("cointoss --protocol colbeck --alice honest --trials 20000 --seed 7");
        CHECK(overridden.output == honest.output);
    }

    SUBCASE("entropy quantities") {
        auto r = run_cli("entropy --dist 0.75,0.25 --alpha-inf --collision");
        CHECK(r.exit_code == 0);
        auto parsed = nlohmann::json::parse(r.output);
        CHECK(parsed[0]["quantity"].get<std::string>() == "renyi_entropy");
        CHECK(parsed[0]["value"].get<double>() == doctest::Approx(0.415037).epsilon(1e-5));
    }

    SUBCASE("thread cap does not change the report bytes") {
        std::string base = binary_path() + " nonlocal --game all --k 2 --format csv 2>/dev/null";
        auto run_with = [&](const char* threads) {
            std::string cmd = std::string("QCRYPT_LAB_THREADS=") + threads + " " + base;
            std::array<char, 4096> buf{};
            std::string output;
            FILE* pipe = popen(cmd.c_str(), "r");
            REQUIRE(pipe != nullptr);
            size_t n;
            while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) output.append(buf.data(), n);
            pclose(pipe);
            return output;
        };
        std::string serial = run_with("1");
        std::string parallel = run_with("4");
        CHECK(!serial.empty());
        CHECK(serial == parallel);
    }

    SUBCASE("vbct trace export") {
        std::string trace_path = "/tmp/qcrypt_cli_test_trace.json";
        auto r = run_cli("vbct --protocol vbct1 --theta 0.7853981633974483 --trials 100 --seed 5 "
                         "--trace " + trace_path);
        CHECK(r.exit_code == 0);
        std::ifstream trace(trace_path);
        REQUIRE(trace.good());
        auto parsed = nlohmann::json::parse(trace);
        CHECK(parsed.is_array());
        CHECK(!parsed.empty());
        CHECK(parsed[0].contains("payload-digest"));
    }
}
