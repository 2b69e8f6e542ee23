#include <gtest/gtest.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <puffer/cli.hpp>
#include <puffer/errors.hpp>
#include <puffer/estimators.hpp>
#include <puffer/preconditioners.hpp>
#include <puffer/solver.hpp>
#include <json.hpp>
#include "oracles.hpp"

using namespace puffer;
using namespace puffer::cli;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

class TempDir
{
public:
    TempDir()
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        path_ = fs::temp_directory_path() / (std::string("puffer_cli_") + info->test_suite_name() + "_" + info->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    f << text;
}

std::string read_text(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

struct Invocation
{
    int code = 0;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "puffer");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Invocation r;
    r.code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

Dataset random_dataset(std::uint64_t seed, Index n, Index p)
{
    Dataset d;
    d.x = oracle::random_matrix(seed, n, p);
    // correlate neighbours so preconditioning does something
    for (Index j = 1; j < p; ++j) d.x.col(j) += 0.6 * d.x.col(j - 1);
    d.y = d.x * oracle::random_vector(seed + 1, p) + oracle::random_vector(seed + 2, n);
    d.response_name = "y";
    for (Index j = 0; j < p; ++j) d.column_names.push_back("x" + std::to_string(j + 1));
    return d;
}

Vector beta_of(const json& j)
{
    const auto& b = j["result"]["fit"]["beta"];
    Vector v(static_cast<Index>(b.size()));
    for (std::size_t i = 0; i < b.size(); ++i) v(static_cast<Index>(i)) = b[i].get<double>();
    return v;
}

} // namespace

TEST(LoadDataset, SmallFile)
{
    TempDir dir;
    write_text(dir.file("a.csv"), "y,x1,x2\n1,2,3\n4,5,6\n7,8,9\n10,11,12\n");
    const auto d = load_dataset(dir.file("a.csv"), "y");
    EXPECT_EQ(d.x.rows(), 4);
    EXPECT_EQ(d.x.cols(), 2);
    EXPECT_EQ(d.y(3), 10.0);
    EXPECT_EQ(d.x(1, 1), 6.0);
    EXPECT_EQ(d.column_names, (std::vector<std::string>{"x1", "x2"}));
    // response by index, taken from the middle
    const auto byindex = load_dataset(dir.file("a.csv"), "1");
    EXPECT_EQ(byindex.response_name, "x1");
    EXPECT_EQ(byindex.column_names, (std::vector<std::string>{"y", "x2"}));
    EXPECT_EQ(byindex.y(0), 2.0);
}

TEST(LoadDataset, BlankCellNamesRowAndColumn)
{
    TempDir dir;
    write_text(dir.file("b.csv"), "y,x1,x2\n1,2,3\n4,,6\n7,8,9\n");
    try {
        load_dataset(dir.file("b.csv"), "y");
        FAIL() << "expected InputError";
    } catch (const InputError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
        EXPECT_NE(msg.find("'x1'"), std::string::npos) << msg;
    }
}

TEST(LoadDataset, Errors)
{
    TempDir dir;
    EXPECT_THROW(load_dataset(dir.file("missing.csv"), "y"), InputError);
    write_text(dir.file("dup.csv"), "y,x,x\n1,2,3\n4,5,6\n");
    EXPECT_THROW(load_dataset(dir.file("dup.csv"), "y"), InputError);
    write_text(dir.file("text.csv"), "y,x\n1,2\n3,abc\n");
    EXPECT_THROW(load_dataset(dir.file("text.csv"), "y"), InputError);
    write_text(dir.file("one.csv"), "y,x\n1,2\n");
    EXPECT_THROW(load_dataset(dir.file("one.csv"), "y"), InputError);
    write_text(dir.file("ragged.csv"), "y,x\n1,2\n3,4,5\n");
    EXPECT_THROW(load_dataset(dir.file("ragged.csv"), "y"), InputError);
    write_text(dir.file("ok.csv"), "y,x\n1,2\n3,4\n");
    EXPECT_THROW(load_dataset(dir.file("ok.csv"), "z"), InputError);
}

TEST(SaveDataset, LargeRoundTripIsBitIdentical)
{
    TempDir dir;
    Dataset d = random_dataset(5, 1000, 19);
    d.x.col(3) *= 1e-300;
    d.x.col(4) *= 1e300;
    save_dataset(d, dir.file("big.csv"));
    const auto back = load_dataset(dir.file("big.csv"), "y");
    EXPECT_EQ(back.x, d.x);
    EXPECT_EQ(back.y, d.y);
    EXPECT_EQ(back.column_names, d.column_names);
}

TEST(ParseArgs, Validation)
{
    std::ostringstream sink;
    auto parse = [&](std::vector<std::string> args) {
        args.insert(args.begin(), "puffer");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        return parse_args(static_cast<int>(argv.size()), argv.data(), sink);
    };
    EXPECT_THROW(parse({"fit", "--input", "a.csv", "--response", "y"}), InputError);
    EXPECT_THROW(parse({"fit", "--input", "a.csv", "--response", "y", "--lambda", "-1"}), InputError);
    EXPECT_THROW(parse({"path", "--input", "a.csv", "--response", "y", "--lambda", "1"}), InputError);
    EXPECT_THROW(parse({"fit", "--input", "a.csv", "--response", "y", "--lambda", "1", "--transform", "puffer_tau"}),
                 InputError);
    EXPECT_THROW(parse({"precondition", "--input", "a.csv", "--response", "y"}), InputError);
    EXPECT_THROW(parse({"fit", "--input", "a.csv", "--response", "y", "--lambda", "1", "--penalty", "lq"}),
                 InputError);
    EXPECT_THROW(parse({"bogus"}), InputError);

    const auto cfg = parse({"path", "--input", "a.csv", "--response", "y", "--penalty", "scad", "--penalty-param",
                            "4", "--lambda-grid", "1,0.5,0.25", "--format", "csv"});
    ASSERT_TRUE(cfg.has_value());
    EXPECT_EQ(cfg->command, Command::path);
    EXPECT_EQ(cfg->penalty, PenaltySpec::scad(4.0));
    EXPECT_EQ(cfg->lambda_grid, (std::vector<double>{1.0, 0.5, 0.25}));
    EXPECT_EQ(cfg->output_format, OutputFormat::csv);

    const auto v = parse({"verify"});
    ASSERT_TRUE(v.has_value());
    EXPECT_EQ(v->seed, 20140101u);
}

TEST(Run, ErrorRecordIsSingleLineJson)
{
    const auto r = invoke({"fit", "--input", "/nonexistent/file.csv", "--response", "y", "--lambda", "1"});
    EXPECT_EQ(r.code, exit_input_error);
    ASSERT_FALSE(r.err.empty());
    EXPECT_EQ(r.err.find('\n'), r.err.size() - 1);
    const auto j = json::parse(r.err);
    EXPECT_EQ(j["error"]["exit_code"], 2);
    EXPECT_EQ(j["error"]["kind"], "input");
}

TEST(Run, FitAboveLambdaMaxIsZero)
{
    TempDir dir;
    const Dataset d = random_dataset(6, 30, 4);
    save_dataset(d, dir.file("d.csv"));
    const double big = 1.5 * solver::lambda_max(d.x, d.y);
    const auto r = invoke({"fit", "--input", dir.file("d.csv"), "--response", "y", "--lambda", std::to_string(big)});
    ASSERT_EQ(r.code, exit_ok) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(beta_of(j).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_TRUE(j["result"]["fit"]["active_set"].empty());
    EXPECT_EQ(j["meta"]["seed"], 20140101u);
}

TEST(Run, FitMatchesLibrary)
{
    TempDir dir;
    const Dataset d = random_dataset(7, 25, 5);
    save_dataset(d, dir.file("d.csv"));
    const auto r = invoke({"fit", "--input", dir.file("d.csv"), "--response", "y", "--lambda", "0.5", "--penalty",
                           "mcp"});
    ASSERT_EQ(r.code, exit_ok) << r.err;
    const auto lib = solver::solve(d.x, d.y, 0.5, PenaltySpec::mcp());
    EXPECT_LE((beta_of(json::parse(r.out)) - lib.beta).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Run, InspectNeedsTallData)
{
    TempDir dir;
    save_dataset(random_dataset(8, 3, 5), dir.file("wide.csv"));
    const auto r = invoke({"inspect", "--input", dir.file("wide.csv"), "--response", "y"});
    EXPECT_EQ(r.code, exit_input_error);
    EXPECT_NE(r.err.find("requires n>p"), std::string::npos) << r.err;
}

TEST(Run, InspectReportsSigmaSource)
{
    TempDir dir;
    const Dataset d = random_dataset(9, 40, 3);
    save_dataset(d, dir.file("d.csv"));
    auto r = invoke({"inspect", "--input", dir.file("d.csv"), "--response", "y"});
    ASSERT_EQ(r.code, exit_ok) << r.err;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["result"]["sigma_source"], "residual_estimate");
    EXPECT_DOUBLE_EQ(j["result"]["sigma"].get<double>(), estimators::sigma_hat(d.x, d.y));
    r = invoke({"inspect", "--input", dir.file("d.csv"), "--response", "y", "--sigma", "0.5"});
    j = json::parse(r.out);
    EXPECT_EQ(j["result"]["sigma_source"], "user_supplied");
    EXPECT_EQ(j["result"]["sigma"], 0.5);
}

TEST(Run, OutputIsByteIdentical)
{
    TempDir dir;
    save_dataset(random_dataset(10, 20, 6), dir.file("d.csv"));
    const std::vector<std::string> args = {"path", "--input", dir.file("d.csv"), "--response", "y", "--penalty",
                                           "scad", "--seed", "7"};
    const auto a = invoke(args), b = invoke(args);
    ASSERT_EQ(a.code, exit_ok) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(json::parse(a.out)["result"]["path"].size(), 50u);
}

TEST(Run, PathCsvFormat)
{
    TempDir dir;
    save_dataset(random_dataset(11, 20, 3), dir.file("d.csv"));
    const auto r = invoke({"path", "--input", dir.file("d.csv"), "--response", "y", "--lambda-grid", "2,1,0.5",
                           "--format", "csv", "--output", dir.file("out.csv")});
    ASSERT_EQ(r.code, exit_ok) << r.err;
    EXPECT_TRUE(r.out.empty());
    const auto text = read_text(dir.file("out.csv"));
    EXPECT_EQ(text.substr(0, text.find('\n')), "lambda,x1,x2,x3");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

TEST(Run, PreconditionThenFitMatchesTransformedFit)
{
    TempDir dir;
    const Dataset d = random_dataset(12, 30, 5);
    save_dataset(d, dir.file("d.csv"));
    const std::vector<std::pair<std::string, std::vector<std::string>>> transforms = {
        {"puffer", {}}, {"puffer_scaled", {}}};
    for (const auto& [name, extra] : transforms) {
        auto pre = invoke({"precondition", "--input", dir.file("d.csv"), "--response", "y", "--transform", name,
                           "--output", dir.file("pre.csv")});
        ASSERT_EQ(pre.code, exit_ok) << pre.err;
        for (const std::string pen : {"lasso", "scad"}) {
            const auto plain = invoke({"fit", "--input", dir.file("pre.csv"), "--response", "y", "--lambda", "0.1",
                                       "--penalty", pen});
            const auto direct = invoke({"fit", "--input", dir.file("d.csv"), "--response", "y", "--lambda", "0.1",
                                        "--penalty", pen, "--transform", name});
            ASSERT_EQ(plain.code, exit_ok) << plain.err;
            ASSERT_EQ(direct.code, exit_ok) << direct.err;
            EXPECT_LE((beta_of(json::parse(plain.out)) - beta_of(json::parse(direct.out))).cwiseAbs().maxCoeff(), 1e-8)
                << name << " " << pen;
        }
    }
}

TEST(Run, PreconditionWideTau)
{
    TempDir dir;
    save_dataset(random_dataset(13, 6, 12), dir.file("w.csv"));
    const auto r = invoke({"precondition", "--input", dir.file("w.csv"), "--response", "y", "--transform",
                           "puffer_tau", "--tau", "0", "--output", dir.file("pre.csv")});
    ASSERT_EQ(r.code, exit_ok) << r.err;
    const auto back = load_dataset(dir.file("pre.csv"), "y");
    EXPECT_LE((back.x * back.x.transpose() - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-8);
    // a tall file cannot take the wide transform
    save_dataset(random_dataset(14, 20, 3), dir.file("t.csv"));
    const auto bad = invoke({"precondition", "--input", dir.file("t.csv"), "--response", "y", "--transform",
                             "puffer_tau", "--tau", "1"});
    EXPECT_EQ(bad.code, exit_input_error);
}

TEST(Run, RankDeficientIsInputError)
{
    TempDir dir;
    Dataset d = random_dataset(15, 10, 3);
    d.x.col(2) = d.x.col(0);
    save_dataset(d, dir.file("r.csv"));
    const auto r = invoke({"fit", "--input", dir.file("r.csv"), "--response", "y", "--lambda", "0.1", "--transform",
                           "puffer"});
    EXPECT_EQ(r.code, exit_input_error);
    EXPECT_EQ(json::parse(r.err)["error"]["kind"], "rank");
}

TEST(Run, VerifySmall)
{
    const auto r = invoke({"verify", "--trials", "8", "--seed", "3"});
    EXPECT_EQ(r.code, exit_ok) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_TRUE(j["result"]["passed"].get<bool>());
    EXPECT_EQ(j["result"]["reports"].size(), 10u);
    EXPECT_EQ(j["result"]["reports"][0]["theorem_id"], "lemma1");
}
