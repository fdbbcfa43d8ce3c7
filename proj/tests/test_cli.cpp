#include "doctest.h"

#include "pascs_qkd/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace pascs;

namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "pascs_qkd");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const auto parsed = cli::parse_command_line(static_cast<int>(argv.size()), argv.data(), out, err);
    Outcome o;
    if (const int* code = std::get_if<int>(&parsed)) {
        o.code = *code;
    } else {
        o.code = cli::run(std::get<cli::RunConfig>(parsed), out, err);
    }
    o.out = out.str();
    o.err = err.str();
    return o;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) out.push_back(line);
    return out;
}

std::vector<double> fields(const std::string& line) {
    std::vector<double> out;
    std::istringstream is(line);
    for (std::string f; std::getline(is, f, ',');) out.push_back(f.empty() ? 0.0 : std::stod(f));
    return out;
}

}  // namespace

TEST_CASE("exit codes") {
    CHECK(invoke({"rate", "--distance", "100"}).code == cli::kExitOk);
    CHECK(invoke({"rate", "--beta", "2"}).code == cli::kExitInvalidFlags);
    CHECK(invoke({"rate", "--protocol", "squeezed"}).code == cli::kExitInvalidFlags);
    CHECK(invoke({"rate", "--distance", "10:0:1"}).code == cli::kExitInvalidFlags);
    CHECK(invoke({"rate", "--no-such-flag"}).code == cli::kExitInvalidFlags);
    CHECK(invoke({"optimize", "--distance", "100", "--xi", "0.05", "--beta", "0.8"}).code == cli::kExitNoSecurePoint);
    CHECK(invoke({"optimize", "--mi-convention", "paper-literal"}).code == cli::kExitNoSecurePoint);
    CHECK(invoke({}).code != cli::kExitOk);
}

TEST_CASE("rate output") {
    const auto o = invoke({"rate", "--distance", "100", "--xi", "0.002"});
    REQUIRE(o.code == 0);
    const auto ls = lines(o.out);
    REQUIRE(ls.size() == 2);
    CHECK(ls[0] == cli::kCsvHeader);
    const auto f = fields(ls[1]);
    REQUIRE(f.size() == 9);
    CHECK(f[0] == 100.0);
    CHECK(f[1] == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(f[3] == 0.13);
    CHECK(f[8] > 0.0);

    const auto t = invoke({"rate", "--transmissivity", "0.01", "--xi", "0.002"});
    REQUIRE(t.code == 0);
    CHECK(fields(lines(t.out)[1])[8] == doctest::Approx(f[8]).epsilon(1e-10));
}

TEST_CASE("sweep CSV") {
    const auto o = invoke({"sweep", "--protocol", "pascs", "--alpha", "0.13", "--xi", "0.002",
                           "--distance", "0:450:1"});
    REQUIRE(o.code == 0);
    const auto ls = lines(o.out);
    REQUIRE(ls.size() == 452);
    CHECK(ls[0] == cli::kCsvHeader);
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto f = fields(ls[i]);
        REQUIRE(f.size() == 9);
        CHECK(f[0] == static_cast<double>(i - 1));
        // printed with 12 significant digits
        CHECK(std::abs(f[8] - (f[6] - f[7])) <= 1e-11 * std::max(1.0, std::abs(f[6])));
    }

    const auto again = invoke({"sweep", "--protocol", "pascs", "--alpha", "0.13", "--xi", "0.002",
                               "--distance", "0:450:1"});
    CHECK(again.out == o.out);
}

TEST_CASE("sweep with beta below one") {
    const auto o = invoke({"sweep", "--xi", "0.004", "--beta", "0.95", "--distance", "0:200:20"});
    REQUIRE(o.code == 0);
    const auto ls = lines(o.out);
    REQUIRE(ls.size() == 12);
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto f = fields(ls[i]);
        CHECK(std::abs(f[8] - (0.95 * f[6] - f[7])) <= 1e-11);
    }
}

TEST_CASE("JSON output and metadata") {
    const auto o = invoke({"sweep", "--format", "json", "--xi", "0.002,0.01", "--distance", "0:100:50"});
    REQUIRE(o.code == 0);
    const auto j = nlohmann::json::parse(o.out);
    CHECK(j["metadata"]["tool"] == "pascs_qkd");
    CHECK(j["metadata"]["version"] == cli::kVersion);
    CHECK(j["metadata"]["subcommand"] == "sweep");
    CHECK(j["metadata"]["sign_convention"] == "standard");
    CHECK(j["metadata"]["mi_convention"] == "standard");
    CHECK(j["metadata"]["truncation"]["source"] == "default");
    CHECK(j["records"].size() == 6);
    REQUIRE(j["curves"].size() == 2);
    CHECK(j["curves"][1]["excess_noise"] == 0.01);
    for (const auto& r : j["records"]) {
        CHECK(r["key_rate_bits"].get<double>() ==
              doctest::Approx(r["i_ab_bits"].get<double>() - r["s_be_bits"].get<double>()).epsilon(1e-12));
    }
}

TEST_CASE("truncation sources") {
    const auto flag = invoke({"sweep", "--format", "json", "--distance", "0", "--truncation", "80"});
    REQUIRE(flag.code == 0);
    const auto jf = nlohmann::json::parse(flag.out)["metadata"]["truncation"];
    CHECK(jf["source"] == "flag");
    CHECK(jf["initial"] == 80);
    CHECK(jf["escalate"] == false);

    ::setenv(cli::kTruncationEnv, "90", 1);
    const auto env = invoke({"sweep", "--format", "json", "--distance", "0"});
    ::setenv(cli::kTruncationEnv, "abc", 1);
    const auto bad = invoke({"sweep", "--distance", "0"});
    ::unsetenv(cli::kTruncationEnv);
    REQUIRE(env.code == 0);
    const auto je = nlohmann::json::parse(env.out)["metadata"]["truncation"];
    CHECK(je["source"] == "env");
    CHECK(je["initial"] == 90);
    CHECK(je["escalate"] == true);
    CHECK(bad.code == cli::kExitInvalidFlags);

    // too small a fixed basis is reported, not silently truncated
    CHECK(invoke({"rate", "--alpha", "1", "--truncation", "5"}).code == cli::kExitInternal);
}

TEST_CASE("conventions") {
    const auto literal = invoke({"rate", "--distance", "10", "--mi-convention", "paper-literal"});
    REQUIRE(literal.code == 0);
    CHECK(fields(lines(literal.out)[1])[6] < 0.0);
    CHECK_FALSE(literal.err.empty());

    const auto sign = invoke({"rate", "--distance", "10", "--xi", "0.01", "--convention", "paper-literal"});
    const auto standard = invoke({"rate", "--distance", "10", "--xi", "0.01"});
    REQUIRE(sign.code == 0);
    CHECK(fields(lines(sign.out)[1])[8] > fields(lines(standard.out)[1])[8]);
}

TEST_CASE("compare verdict agrees with the table") {
    const auto path = (std::filesystem::temp_directory_path() / "pascs_qkd_compare_test.csv").string();
    const auto o = invoke({"compare", "--xi", "0.01", "--distance", "0:300:10", "--output", path});
    REQUIRE(o.code == 0);
    std::ifstream file(path);
    std::stringstream buf;
    buf << file.rdbuf();
    std::filesystem::remove(path);
    const auto ls = lines(buf.str());
    REQUIRE(ls.size() == 32);
    CHECK(ls[0] == "distance_km,excess_noise,k_pascs_bits,k_coherent_bits,pascs_dominates");
    std::size_t violations = 0;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto f = fields(ls[i]);
        const bool dom = f[2] >= f[3] - 1e-12;
        CHECK(static_cast<bool>(f[4]) == dom);
        if (!dom) ++violations;
    }
    const std::string expected = violations == 0
                                     ? std::string("verdict: PASCS ≥ coherent at all points")
                                     : "verdict: PASCS < coherent at " + std::to_string(violations) + " of 31 points";
    CHECK(o.out.find(expected) != std::string::npos);
    CHECK(o.out.find("xi=0.01: K>0 cutoff") != std::string::npos);
}

TEST_CASE("optimize output") {
    const auto o = invoke({"optimize", "--protocol", "coherent", "--distance", "100"});
    REQUIRE(o.code == 0);
    const auto ls = lines(o.out);
    REQUIRE(ls.size() == 2);
    CHECK(ls[0] == "protocol,distance_km,excess_noise,alpha_opt,key_rate_bits,unimodal");
    CHECK(ls[1].rfind("coherent,100,0.002,", 0) == 0);
}

TEST_CASE("selftest") {
    const auto ok = invoke({"selftest"});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("FAIL") == std::string::npos);
    CHECK(ok.out.find("holevo-vs-symplectic-oracle") != std::string::npos);

    const auto flagged = invoke({"selftest", "--convention", "paper-literal"});
    CHECK(flagged.code == 0);
    CHECK(flagged.out.find("FLAG") != std::string::npos);

    const auto broken = invoke({"selftest", "--truncation", "5", "--alpha", "1"});
    CHECK(broken.code == cli::kExitInternal);
}
