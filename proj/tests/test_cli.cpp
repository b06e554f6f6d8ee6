#include "gammasum/cli.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace gammasum::cli {
namespace {

struct Outcome {
    int status;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    std::vector<const char*> argv{"gammasum"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int status = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    return {status, out.str(), err.str()};
}

std::string usage_message(const std::vector<std::string>& args) {
    try {
        parse_args(args);
    } catch (const UsageError& e) {
        return e.what();
    }
    return "";
}

TEST(ParseArgs, SingleEvaluation) {
    const RunSpec s = parse_args({"cdf", "--alpha", "1", "--betas", "1", "--rho", "1", "--y", "1"});
    EXPECT_EQ(s.command, Command::cdf);
    ASSERT_TRUE(s.params.has_value());
    EXPECT_EQ(s.params->alpha, 1.0);
    EXPECT_EQ(s.params->size(), 1u);
    EXPECT_EQ(s.grid.points, std::vector<double>{1.0});
    EXPECT_EQ(s.format, OutputFormat::json);
    EXPECT_EQ(s.method, EvalPath::automatic);
}

TEST(ParseArgs, OutageSweepWithRhoFile) {
    {
        std::ofstream f("c.csv");
        f << "1,0.5,0.25\n0.5,1,0.5\n0.25,0.5,1\n";
    }
    const RunSpec s =
        parse_args({"outage-table", "--m", "1.5", "--snr-db", "0,0,0", "--rho-file", "c.csv", "--th-db", "-10:10:21"});
    EXPECT_EQ(s.command, Command::outage_table);
    ASSERT_TRUE(s.nakagami.has_value());
    EXPECT_EQ(s.nakagami->m, 1.5);
    EXPECT_EQ(s.params->alpha, 1.5);
    EXPECT_NEAR(s.params->betas[0], 1.0 / 1.5, 1e-15);
    ASSERT_EQ(s.grid.points.size(), 21u);
    EXPECT_TRUE(s.grid.in_db);
    EXPECT_EQ(s.grid.points.front(), -10.0);
    EXPECT_EQ(s.grid.points.back(), 10.0);
    EXPECT_NEAR(s.grid.points[10], 0.0, 1e-15);
}

TEST(ParseArgs, Validation) {
    const RunSpec s = parse_args(
        {"validate", "--alpha", "1", "--betas", "1,1", "--rho", "1,0.5;0.5,1", "--samples", "1000000", "--seed", "42"});
    EXPECT_EQ(s.command, Command::validate);
    EXPECT_EQ(s.samples, 1'000'000u);
    EXPECT_EQ(s.seed, 42u);
    EXPECT_EQ(s.params->rho(0, 1), 0.5);
}

TEST(ParseArgs, ErrorsNameTheFlag) {
    const auto has = [](const std::string& msg, const std::string& flag) {
        return msg.find(flag) != std::string::npos;
    };
    EXPECT_TRUE(has(usage_message({"cdf", "--alpha", "1", "--betas", "1,1", "--rho", "1,0.5;0.5", "--y", "1"}), "--rho"));
    EXPECT_TRUE(has(usage_message({"cdf", "--alpha", "1", "--betas", "1,1,1", "--rho", "1,0.5;0.5,1", "--y", "1"}), "--rho"));
    EXPECT_TRUE(has(usage_message({"cdf", "--alpha", "-1", "--betas", "1", "--y", "1"}), "--alpha"));
    EXPECT_TRUE(has(usage_message({"cdf", "--alpha", "1", "--betas", "1,0", "--y", "1"}), "--betas"));
    EXPECT_TRUE(has(usage_message({"cdf", "--alpha", "x", "--betas", "1", "--y", "1"}), "--alpha"));
    EXPECT_TRUE(has(usage_message({"cdf", "--alpha", "1", "--betas", "1", "--y-range", "3:1:5"}), "--y-range"));
    EXPECT_TRUE(has(usage_message({"outage-table", "--m", "0.3", "--snr-db", "0", "--th-db", "0:1:2"}), "--m"));
    EXPECT_TRUE(has(usage_message({"cdf", "--alpha", "1", "--betas", "1", "--y", "1", "--order", "5"}), "--order"));
    EXPECT_TRUE(has(usage_message({"quantile", "--alpha", "1", "--betas", "1", "--p", "1.5"}), "--p"));
    EXPECT_TRUE(has(usage_message({"validate", "--alpha", "0.7", "--betas", "1"}), "--alpha"));
    EXPECT_TRUE(has(usage_message({"cdf", "--alpha", "1", "--betas", "1,1", "--rho", "1,1;1,1", "--y", "1"}), "--rho"));
    EXPECT_TRUE(has(usage_message({"cdf", "--alpha", "1", "--betas", "1", "--rho-file", "missing.csv", "--y", "1"}),
                    "--rho-file"));
}

TEST(Run, UsageErrorExitStatus) {
    EXPECT_EQ(invoke({"cdf", "--betas", "1", "--y", "1"}).status, kExitUsage);
    EXPECT_EQ(invoke({"frobnicate"}).status, kExitUsage);
    EXPECT_EQ(invoke({}).status, kExitUsage);
}

TEST(Run, RayleighOutageRow) {
    const Outcome o = invoke({"outage-table", "--m", "1", "--snr-db", "0", "--th-db", "0:0:1"});
    ASSERT_EQ(o.status, kExitOk) << o.err;
    const auto doc = nlohmann::json::parse(o.out);
    EXPECT_EQ(doc["command"], "outage-table");
    ASSERT_EQ(doc["rows"].size(), 1u);
    EXPECT_EQ(doc["rows"][0]["x"].get<double>(), 0.0);
    EXPECT_NEAR(doc["rows"][0]["value"].get<double>(), 0.6321206, 1e-6);
    EXPECT_TRUE(doc["rows"][0].contains("abs_err"));
    EXPECT_TRUE(doc["rows"][0].contains("method"));
}

TEST(Run, CsvOutputAndMoments) {
    const Outcome o = invoke({"cdf", "--alpha", "1", "--betas", "1,1", "--y", "2", "--format", "csv"});
    ASSERT_EQ(o.status, kExitOk) << o.err;
    std::istringstream is(o.out);
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    EXPECT_EQ(header, "x,value,abs_err,method");
    EXPECT_NEAR(std::stod(row.substr(row.find(',') + 1)), 1.0 - 3.0 * std::exp(-2.0), 1e-14);

    const Outcome m = invoke({"moments", "--alpha", "2", "--betas", "1,2,3", "--rho", "1,0.25,0.25;0.25,1,0.25;0.25,0.25,1"});
    ASSERT_EQ(m.status, kExitOk) << m.err;
    const auto doc = nlohmann::json::parse(m.out);
    EXPECT_NEAR(doc["rows"][0]["value"].get<double>(), 12.0, 1e-12);
    EXPECT_NEAR(doc["rows"][1]["value"].get<double>(), 39.0, 1e-12);
}

TEST(Run, ProbabilitiesInUnitInterval) {
    const Outcome o = invoke({"outage-table", "--m", "0.5", "--snr-db", "3,-2,6", "--rho", "1,0.6,0.3;0.6,1,0.6;0.3,0.6,1",
                              "--th-db", "-40:30:71"});
    ASSERT_EQ(o.status, kExitOk) << o.err;
    const auto doc = nlohmann::json::parse(o.out);
    ASSERT_EQ(doc["rows"].size(), 71u);
    double previous = 0.0;
    for (const auto& row : doc["rows"]) {
        const double v = row["value"].get<double>();
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        EXPECT_GE(v, previous);
        previous = v;
    }
}

TEST(Run, DecibelThresholdsRoundTrip) {
    const Outcome o = invoke({"outage-table", "--m", "2", "--snr-db", "1", "--th-db", "-7.3:12.9:17", "--format", "csv"});
    ASSERT_EQ(o.status, kExitOk) << o.err;
    const auto sweep = parse_sweep("-7.3:12.9:17", "--th-db");
    for (double db : sweep) EXPECT_NEAR(linear_to_db(db_to_linear(db)), db, 1e-12);
    std::istringstream is(o.out);
    std::string line;
    std::getline(is, line);
    for (double db : sweep) {
        std::getline(is, line);
        EXPECT_NEAR(std::stod(line.substr(0, line.find(','))), db, 1e-12);
    }
}

TEST(Run, OutputIsDeterministic) {
    const std::vector<std::string> args{"cdf", "--alpha", "2.5", "--betas", "1,0.7,1.8", "--rho",
                                        "1,0.4,0.4;0.4,1,0.4;0.4,0.4,1", "--y-range", "0.1:40:37"};
    EXPECT_EQ(invoke(args).out, invoke(args).out);
    const std::vector<std::string> val{"validate", "--alpha", "1", "--betas", "1,2", "--samples", "20000", "--seed", "5"};
    const Outcome a = invoke(val), b = invoke(val);
    EXPECT_EQ(a.out, b.out);
    EXPECT_FALSE(a.out.empty());
}

TEST(Run, OutputFile) {
    const Outcome o = invoke({"pdf", "--alpha", "1", "--betas", "1", "--y", "1", "-o", "pdf_out.json"});
    ASSERT_EQ(o.status, kExitOk);
    EXPECT_TRUE(o.out.empty());
    std::ifstream f("pdf_out.json");
    const auto doc = nlohmann::json::parse(f);
    EXPECT_NEAR(doc["rows"][0]["value"].get<double>(), std::exp(-1.0), 1e-14);
}

TEST(Run, ValidatePassAndNegativeControl) {
    const std::vector<std::string> base{"validate", "--alpha", "1", "--betas", "1,1", "--rho", "1,0.5;0.5,1",
                                        "--samples", "1000000", "--seed", "42"};
    const Outcome pass = invoke(base);
    EXPECT_EQ(pass.status, kExitOk) << pass.out << pass.err;
    const auto doc = nlohmann::json::parse(pass.out);
    EXPECT_TRUE(doc["pass"].get<bool>());
    EXPECT_LT(doc["ks_distance"].get<double>(), 0.0027);

    std::vector<std::string> wrong = base;
    wrong.insert(wrong.end(), {"--sample-scale", "2"});
    const Outcome fail = invoke(wrong);
    EXPECT_EQ(fail.status, kExitValidation);
    EXPECT_FALSE(nlohmann::json::parse(fail.out)["pass"].get<bool>());
}

TEST(Run, QuantileRow) {
    const Outcome o = invoke({"quantile", "--alpha", "1", "--betas", "1", "--p", "0.6321205588285577"});
    ASSERT_EQ(o.status, kExitOk) << o.err;
    EXPECT_NEAR(nlohmann::json::parse(o.out)["rows"][0]["value"].get<double>(), 1.0, 1e-10);
}

}  // namespace
}  // namespace gammasum::cli
