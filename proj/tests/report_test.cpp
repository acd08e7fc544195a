#include "rsparse/report.hpp"

#include <gtest/gtest.h>

using namespace rsparse;

namespace {

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::size_t line_count(const std::string& s) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST(Report, NumberFormatRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678901234567})
        EXPECT_EQ(std::stod(report::num(v)), v);
}

TEST(Report, SminOutputs) {
    const auto d = build_mub(5);
    const auto st = analyze(d);
    SminOptions opt;
    opt.masterSeed = 4;
    const auto r = run_smin_trials(d, st, strategy::FirstN{}, 1, 2, 50, opt);
    const auto csv = report::smin_csv(r);
    EXPECT_EQ(first_line(csv), "trialIndex,sigmaMin,xiS,xiA,xiB,xiX");
    EXPECT_EQ(line_count(csv), 51u);
    EXPECT_EQ(csv, report::smin_csv(run_smin_trials(d, st, strategy::FirstN{}, 1, 2, 50, opt)));

    const auto j = report::smin_summary(r, st);
    EXPECT_EQ(j["trials"], 50);
    EXPECT_DOUBLE_EQ(j["lemma1_bound"].get<double>(), 1.0 / 30.0);
    EXPECT_DOUBLE_EQ(j["tail_bound"].get<double>(), j["lemma1_bound"].get<double>());
    EXPECT_EQ(j["chain_violations"].size(), 6u);

    const auto svg = report::smin_svg(r);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_EQ(svg, report::smin_svg(r));
}

TEST(Report, MomentOutputs) {
    const auto d = build_mub(5);
    const auto st = analyze(d);
    MomentOptions opt;
    opt.bootstrapResamples = 50;
    const auto r = estimate_moment(d, st, strategy::FirstN{}, 1, 2, 4.0, 1000, opt);
    const auto csv = report::moments_csv(r);
    EXPECT_EQ(first_line(csv), "trialIndex,xiB,xiX");
    EXPECT_EQ(line_count(csv), 1001u);
    const auto j = report::moments_summary(r, 0, st);
    EXPECT_TRUE(j["xiB"].contains("upper95"));
    EXPECT_TRUE(j["xiX"]["within_bound"].get<bool>());
    EXPECT_NE(report::moments_svg(r).find("xiB bound"), std::string::npos);
}

TEST(Report, GridOutputs) {
    const auto d = build_two_onb(4);
    const auto g = run_recovery_sweep(d, {0, 1}, {0, 1}, 3, {strategy::FirstN{}, strategy::Spread{}});
    const auto csv = report::grid_csv(g);
    EXPECT_EQ(first_line(csv), "nA,nB,strategy,trials,successes,rate");
    EXPECT_EQ(line_count(csv), 9u);
    EXPECT_NE(csv.find("0,0,first-n,3,3,1\n"), std::string::npos) << csv;

    const auto pooled = report::rate_by_total(g);
    ASSERT_EQ(pooled.size(), 2u);
    EXPECT_EQ(pooled.at("spread").at(1).second, 6u);

    const auto j = report::grid_summary(g, 0, analyze(d));
    EXPECT_EQ(j["cells"], 8);
    EXPECT_EQ(j["trials"], 24);
    const auto svg = report::grid_svg(g);
    EXPECT_NE(svg.find("polyline"), std::string::npos);
}

TEST(Report, NoTimestamps) {
    const auto d = build_two_onb(4);
    const auto g = run_recovery_sweep(d, {0}, {0, 1}, 2, {strategy::FirstN{}});
    const auto dump = report::grid_summary(g, 1, analyze(d)).dump();
    for (const char* key : {"time", "date", "created"}) EXPECT_EQ(dump.find(key), std::string::npos);
}
