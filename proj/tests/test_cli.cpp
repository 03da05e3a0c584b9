#include <hsbm/io.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

const std::string kData = HSBM_TEST_DATA;

class Cli : public ::testing::Test
{
protected:
  void SetUp() override
  {
    dir_ = fs::temp_directory_path() / ("hsbm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(const std::string& args) const
  {
    const std::string cmd = std::string(HSBM_CLI) + " " + args + " > " + path("stdout.txt") + " 2> " + path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const std::string& p)
  {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

} // namespace

TEST_F(Cli, EmbedFigure1)
{
  ASSERT_EQ(run("embed --input " + kData + "/figure1.txt --d 2 --out " + path("e.csv")), 0);
  std::istringstream in(slurp(path("e.csv")));
  const hsbm::CsvTable t = hsbm::read_csv(in);
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_EQ(t.header, (std::vector<std::string>{"interaction", "x1", "x2"}));
  EXPECT_NE(t.rows[0], t.rows[2]);
  EXPECT_NE(slurp(path("stderr.txt")).find("selected eigenvalues"), std::string::npos);
}

TEST_F(Cli, EmbedWithCommunitiesAddsTypes)
{
  ASSERT_EQ(run("embed --input " + kData + "/figure1.txt --communities " + kData +
                "/figure1_classes.txt --mode matched --out " + path("e.csv")),
            0);
  EXPECT_NE(slurp(path("e.csv")).find(",type\n"), std::string::npos);
}

TEST_F(Cli, ExitCodes)
{
  std::ofstream(path("empty.txt")).close();
  EXPECT_EQ(run("embed --input " + path("empty.txt")), 2);
  EXPECT_EQ(run("embed --input " + path("missing.txt")), 2);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("grid --reps 0"), 1);
  EXPECT_EQ(run("embed --input " + kData + "/figure1.txt --d 7"), 2);
  EXPECT_EQ(run("embed --input " + kData + "/figure1.txt --mode matched"), 1);
  // b is far larger than every eigenvalue, so nothing escapes the intervals.
  EXPECT_EQ(run("embed --input " + kData + "/figure1.txt --communities " + kData +
                "/figure1_classes.txt --mode oracle"),
            3);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, SimulateEmbedClusterPipeline)
{
  ASSERT_EQ(run("--seed 4 simulate --n 10 --m 999 --regime growing --out " + path("h.txt") + " --communities " +
                path("c.txt") + " --types " + path("t.csv")),
            0);
  ASSERT_EQ(run("embed --input " + path("h.txt") + " --communities " + path("c.txt") + " --out " + path("e.csv")), 0);
  ASSERT_EQ(run("cluster --input " + path("e.csv") + " --gap --kmax 40 --dendrogram " + path("d.csv") + " --out " +
                path("p.csv")),
            0);
  EXPECT_NE(slurp(path("stderr.txt")).find("ARI against type column = 1"), std::string::npos);
  std::istringstream d(slurp(path("d.csv")));
  EXPECT_EQ(hsbm::read_csv(d).rows.size(), 998u);
  EXPECT_EQ(run("cluster --input " + path("e.csv") + " --k 3 --gap"), 1);
}

TEST_F(Cli, PlotWritesNothingOnEmptyInput)
{
  std::ofstream(path("g.csv")) << "regime,n,m,rep,seed,ari_true_k,ari_gap_k,k_gap,norm_R_Gamma,norm_hollow,norm_SW,"
                                  "norm_Sinv,norm_V_2inf,norm_VS_2inf,delta,b,runtime_ms\n";
  EXPECT_EQ(run("plot --input " + path("g.csv") + " --kind convergence --out " + path("c.svg")), 2);
  EXPECT_FALSE(fs::exists(path("c.svg")));
}

TEST_F(Cli, GridDeterministicAcrossThreadsAndConfigOverrides)
{
  const std::string common = "grid --regime both --n-values 10,20 --m-values 99,297 --reps 2 ";
  ASSERT_EQ(run("--seed 9 --threads 1 " + common + "--out " + path("a.csv")), 0);
  ASSERT_EQ(run("--seed 9 --threads 3 " + common + "--out " + path("b.csv")), 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  std::ofstream(path("cfg.txt")) << "seed=9\n";
  ASSERT_EQ(run("--seed 1 --config " + path("cfg.txt") + " " + common + "--out " + path("c.csv")), 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("c.csv")));
  fs::create_directories(path("outdir"));
  ASSERT_EQ(run("--seed 9 " + common + "--out " + path("outdir")), 0);
  EXPECT_EQ(slurp(path("outdir/grid.csv")), slurp(path("a.csv")));
  ASSERT_EQ(run("plot --input " + path("a.csv") + " --kind ari-table --no-timestamp --out " + path("t1.svg")), 0);
  ASSERT_EQ(run("plot --input " + path("a.csv") + " --kind ari-table --no-timestamp --out " + path("t2.svg")), 0);
  EXPECT_EQ(slurp(path("t1.svg")), slurp(path("t2.svg")));
}

TEST_F(Cli, DiagnoseFromDesignAndFile)
{
  ASSERT_EQ(run("diagnose --n 10 --m 99 --out " + path("d.csv")), 0);
  std::istringstream in(slurp(path("d.csv")));
  const hsbm::CsvTable t = hsbm::read_csv(in);
  EXPECT_EQ(t.header, (std::vector<std::string>{"n", "m", "regime", "seed", "metric", "value"}));
  EXPECT_GE(t.rows.size(), 8u);
  ASSERT_EQ(run("diagnose --input " + kData + "/figure1.txt --communities " + kData + "/figure1_classes.txt --mode empirical"),
            0);
  EXPECT_NE(slurp(path("stdout.txt")).find("6,4,file,1,norm_R_Gamma,"), std::string::npos);
}
