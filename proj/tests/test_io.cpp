#include <cmath>
#include <cstdlib>
#include <sstream>

#include <gtest/gtest.h>

#include "pinney/io.hpp"

using namespace pinney;

TEST(Format, SeventeenSignificantDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(-0.17), "-0.17000000000000001");
  for (double v : {std::acos(-1.0), 1e-300, -123456.789, 6.02e23}) EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
}

TEST(Format, TrajectoryCsv) {
  Trajectory traj;
  traj.samples = {{0.0, 1.0, -0.5}, {0.25, 0.75, 1e-20}};
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  EXPECT_EQ(os.str(), "t,x,v\n0,1,-0.5\n0.25,0.75,9.9999999999999995e-21\n");
}

TEST(Tabulated, ParsesTable) {
  std::istringstream in("t,omega\n0,1\n1,2\n\n2,3\r\n3,4\n");
  const auto p = parse_tabulated_profile(in);
  EXPECT_EQ(p.kind(), ProfileKind::Tabulated);
  EXPECT_DOUBLE_EQ(p.at(0.0), 1.0);
  EXPECT_DOUBLE_EQ(p.at(3.0), 4.0);
  EXPECT_NEAR(p.at(1.5), 2.5, 1e-12);  // linear data stays linear
}

TEST(Tabulated, RejectsMalformedInput) {
  auto bad = [](const char* text) {
    std::istringstream in(text);
    EXPECT_THROW((void)parse_tabulated_profile(in), Error) << text;
  };
  bad("");
  bad("s,omega\n0,1\n1,1\n2,1\n3,1\n");
  bad("t,omega\n0,1\n1,x\n2,1\n3,1\n");
  bad("t,omega\n0,1,2\n1,1\n2,1\n3,1\n");
  bad("t,omega\n0,1\n1,-1\n2,1\n3,1\n");
  bad("t,omega\n1,1\n2,1\n3,1\n4,1\n");  // does not cover s = 0
  EXPECT_THROW((void)load_tabulated_profile("/nonexistent/table.csv"), Error);
}

TEST(Profiles, ByName) {
  EXPECT_EQ(profile_from_name("constant", 2.0, 0.0).kind(), ProfileKind::Constant);
  EXPECT_EQ(profile_from_name("decaying", 2.0, 0.0).kind(), ProfileKind::Decaying);
  EXPECT_EQ(profile_from_name("growing", 2.0, 0.0).kind(), ProfileKind::Growing);
  EXPECT_EQ(profile_from_name("oscillating", 2.0, 0.7).kind(), ProfileKind::Oscillating);
  EXPECT_DOUBLE_EQ(profile_from_name("growing", 2.0, 0.0).omega0(), 2.0);
  EXPECT_THROW((void)profile_from_name("wobbly", 1.0, 0.0), Error);
  EXPECT_THROW((void)profile_from_name("tabulated:/nonexistent.csv", 1.0, 0.0), Error);
}
