#include "lmgboot/cli_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lmgboot;

namespace {

std::string read_file(const std::filesystem::path &p) {
    std::ifstream     f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string &name) {
    const auto dir = std::filesystem::temp_directory_path() / "lmgboot_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::vector<std::string> config_errors(const std::string &text) {
    try {
        validate_config(text);
    } catch(const ConfigError &e) {
        return e.reasons();
    }
    return {};
}

} // namespace

TEST(Config, ValidKeyValue) {
    const auto cfg = validate_config("L=2 gamma=1 hx=1 hz=1");
    EXPECT_EQ(cfg.L, 2);
    EXPECT_EQ(cfg.params.gamma, 1.0);
    EXPECT_FALSE(cfg.sectors.has_value());
    EXPECT_EQ(cfg.measures.size(), measure_names().size());
    EXPECT_EQ(cfg.format, Format::csv);
    EXPECT_EQ(cfg.mode, Mode::bootstrap);
}

TEST(Config, Json) {
    const auto cfg = validate_config(R"({"L": 5, "gamma": 0.5, "sectors": [0.5, 2.5], "mode": "oracle-am", "format": "json"})");
    EXPECT_EQ(cfg.L, 5);
    ASSERT_TRUE(cfg.sectors.has_value());
    EXPECT_EQ(cfg.sectors->size(), 2u);
    EXPECT_EQ(cfg.mode, Mode::oracle_am);
    EXPECT_EQ(cfg.format, Format::json);
}

TEST(Config, Rejections) {
    EXPECT_FALSE(config_errors("L=0").empty());
    EXPECT_FALSE(config_errors("L=2 sectors=[0.5]").empty());
    EXPECT_FALSE(config_errors("L=2 tol_res=-1").empty());
    EXPECT_FALSE(config_errors("L=14 mode=oracle-ed").empty());
    EXPECT_FALSE(config_errors("L=2 format=xml").empty());
    EXPECT_FALSE(config_errors("L=2 measures=concurrence,magic").empty());
}

TEST(Config, UnknownKeyIsNamedAndAllErrorsReported) {
    const auto errs = config_errors("L=0\ncolour=blue\n");
    ASSERT_EQ(errs.size(), 2u);
    const bool named = std::any_of(errs.begin(), errs.end(), [](const auto &e) { return e.find("colour") != std::string::npos; });
    EXPECT_TRUE(named);
}

TEST(Config, CommentsAndMeasureSubset) {
    const auto cfg = validate_config("# run\nL=3   # three spins\nmeasures=qfi,tangle\n");
    EXPECT_EQ(cfg.L, 3);
    EXPECT_TRUE(cfg.wants("qfi"));
    EXPECT_FALSE(cfg.wants("concurrence"));
}

TEST(Run, BootstrapTwoSpins) {
    std::ostringstream summary;
    const auto         out = run(validate_config("L=2 gamma=1 hx=1 hz=1 sectors=all"), summary);
    EXPECT_EQ(out.exit_code, 0);
    ASSERT_EQ(out.rows.size(), 4u);
    ASSERT_TRUE(out.rows[0].l.has_value());
    EXPECT_EQ(out.rows[0].l->twice, 0);
    EXPECT_NEAR(out.rows[0].E, 0.25, 1e-10);
    EXPECT_NE(summary.str().find("sector l=1: 3 states"), std::string::npos);
    EXPECT_NE(summary.str().find("wall time"), std::string::npos);
}

TEST(Run, ToyFourSpins) {
    std::ostringstream summary;
    const auto         out = run(validate_config("L=4 mode=toy"), summary);
    EXPECT_EQ(out.exit_code, 0);
    ASSERT_EQ(out.rows.size(), 5u);
    for(int k = 0; k < 5; ++k) EXPECT_NEAR(out.rows[static_cast<std::size_t>(k)].E, k - 2.0, 1e-10);
}

TEST(Run, CompareSixSpins) {
    std::ostringstream summary;
    const auto         out = run(validate_config("L=6 gamma=0.5 hx=0.5 hz=1 mode=compare"), summary);
    EXPECT_EQ(out.exit_code, 0);
    EXPECT_LT(out.max_energy_gap, compare_tolerance);
    EXPECT_NE(summary.str().find("max |E_bootstrap - E_oracle| = "), std::string::npos);
}

TEST(Run, OracleModesAgreeOnEnergies) {
    std::ostringstream s;
    const auto         am = run(validate_config("L=4 gamma=0.3 hx=0.2 hz=0.7 mode=oracle-am sectors=[2]"), s);
    const auto         ed = run(validate_config("L=4 gamma=0.3 hx=0.2 hz=0.7 mode=oracle-ed sectors=[2]"), s);
    ASSERT_EQ(am.rows.size(), ed.rows.size());
    for(std::size_t i = 0; i < am.rows.size(); ++i) {
        EXPECT_NEAR(am.rows[i].E, ed.rows[i].E, 1e-9);
        EXPECT_NEAR(*am.rows[i].F_max, *ed.rows[i].F_max, 1e-8);
        EXPECT_NEAR(*am.rows[i].C, *ed.rows[i].C, 1e-8);
        EXPECT_NEAR(*am.rows[i].tau, *ed.rows[i].tau, 1e-8);
    }
}

TEST(Run, WrongStateCountExitsThreeAndFlagsRows) {
    std::ostringstream summary;
    const auto         out = run(validate_config("L=3 tol_res=1e-30"), summary);
    EXPECT_EQ(out.exit_code, 3);
    EXPECT_NE(summary.str().find("WrongStateCount"), std::string::npos);
}

TEST(Output, DeterministicFiles) {
    const auto a = scratch("det_a.csv"), b = scratch("det_b.csv");
    std::ostringstream s;
    run(validate_config("L=5 gamma=0.4 hx=0.3 hz=0.9 out=" + a.string()), s);
    run(validate_config("L=5 gamma=0.4 hx=0.3 hz=0.9 out=" + b.string()), s);
    EXPECT_EQ(read_file(a), read_file(b));
    for(const char *suffix : {"_concurrence.csv", "_qfi_sum.csv"}) {
        const auto pa = a.parent_path() / (a.stem().string() + suffix);
        const auto pb = b.parent_path() / (b.stem().string() + suffix);
        EXPECT_EQ(read_file(pa), read_file(pb));
    }
}

TEST(Output, CsvHeaderAndPlotColumns) {
    const auto path = scratch("hdr.csv");
    std::ostringstream s;
    const auto         out = run(validate_config("L=3 out=" + path.string()), s);
    std::ifstream      f(path);
    std::string        header;
    std::getline(f, header);
    EXPECT_EQ(header.rfind("E,l,degenerate,cluster_size,", 0), 0u);
    EXPECT_EQ(out.files.size(), 7u);
    std::ifstream plot(path.parent_path() / "hdr_tangle.csv");
    std::getline(plot, header);
    EXPECT_EQ(header, "E,l,value");
}

TEST(Output, JsonRoundTrip) {
    const auto         path = scratch("rt.json");
    std::ostringstream s;
    const auto         out   = run(validate_config("L=4 gamma=0.2 hx=0.7 hz=0.1 format=json out=" + path.string()), s);
    const auto         again = rows_from_json(read_file(path));
    ASSERT_EQ(again.size(), out.rows.size());
    for(std::size_t i = 0; i < again.size(); ++i) EXPECT_EQ(again[i], rounded(out.rows[i]));
    EXPECT_EQ(to_json_text(again), read_file(path));
}

TEST(Output, TwelveSignificantDigits) {
    EXPECT_EQ(detail::fmt12(0.1234567890123456), "0.123456789012");
    EXPECT_EQ(detail::fmt12(-0.0), "0");
}

TEST(Rows, SortedBySectorThenEnergy) {
    std::ostringstream s;
    const auto         out = run(validate_config("L=5 gamma=0.6 hx=0.1 hz=0.4"), s);
    for(std::size_t i = 1; i < out.rows.size(); ++i) {
        const auto &p = out.rows[i - 1], &q = out.rows[i];
        EXPECT_TRUE(p.l < q.l || (p.l == q.l && p.E <= q.E));
    }
}

TEST(Threads, ParallelMapKeepsOrder) {
    const auto v = parallel_map<int>(37, 4, [](std::size_t i) { return static_cast<int>(i * i); });
    for(std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], static_cast<int>(i * i));
}
