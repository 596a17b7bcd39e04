#include <birkhoff/birkhoff.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace birkhoff;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "birkhoff_io_test";
    fs::create_directories(dir);
    return dir / name;
}

fs::path write(const std::string& name, const std::string& text)
{
    const auto p = scratch(name);
    std::ofstream(p) << text;
    return p;
}

} // namespace

TEST(Io, FormatDoubleRoundTrips)
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
        const auto s = io::format_double(v);
        EXPECT_EQ(std::stod(s), v);
    }
}

TEST(Io, ScalarAndComplexCsv)
{
    const auto p = write("s.csv", "value\n1.5\n# comment\n-2\n");
    EXPECT_EQ(io::read_scalar_csv(p), (std::vector<double>{1.5, -2}));
    const auto c = write("c.csv", "re,im\n1,2\n3,-4\n");
    const auto z = io::read_complex_csv(c);
    ASSERT_EQ(z.size(), 2u);
    EXPECT_EQ(z[1], std::complex<double>(3, -4));
    EXPECT_THROW(io::read_scalar_csv(write("bad.csv", "1\nabc\n")), ParseError);
    EXPECT_THROW(io::read_scalar_csv(scratch("none.csv")), IoError);
}

TEST(Io, NinoCsvValidation)
{
    const auto ok = io::read_nino34_csv(write("n.csv", "year,month,value\n1999,11,0.5\n1999,12,0.25\n2000,1,-1\n"));
    EXPECT_EQ(ok.start.str(), "1999-11");
    EXPECT_EQ(ok.values.size(), 3u);
    EXPECT_EQ(ok.index_of({2000, 1}), 2u);
    EXPECT_THROW(ok.index_of({2000, 2}), GapError);
    EXPECT_THROW(io::read_nino34_csv(write("g.csv", "year,month,value\n1999,11,0.5\n2000,1,-1\n")), GapError);
    EXPECT_THROW(io::read_nino34_csv(write("e.csv", "year,month,value\n1999,11,\n")), GapError);
    EXPECT_THROW(io::read_nino34_csv(write("h.csv", "yr,mo,v\n1999,11,1\n")), ParseError);
    EXPECT_THROW(io::read_nino34_csv(write("o.csv", "year,month,value\n1999,11,1\n1999,10,1\n")), ParseError);
}

TEST(Io, YearMonthOrdinal)
{
    const YearMonth a{1999, 12};
    EXPECT_EQ(YearMonth::from_ordinal(a.ordinal() + 1).str(), "2000-01");
}

TEST(Io, TrajectoryRoundTrip)
{
    auto t = standard_map(LambdaMode::fixed(0.25), 1.0, 2.0, 50, RngStream(1));
    t.seed = 77;
    const auto p = write("t.csv", io::trajectory_csv(t));
    const auto back = io::read_trajectory_csv(p);
    EXPECT_EQ(back.states, t.states);
    EXPECT_EQ(back.seed, t.seed);
    EXPECT_EQ(back.dt, t.dt);
}

TEST(Io, CsvTableShapeChecked)
{
    io::CsvTable t({"a", "b"});
    t.row().add(1).add(std::optional<double>{});
    EXPECT_EQ(t.str(), "a,b\n1,\n");
    t.row().add(1);
    EXPECT_THROW(t.str(), ShapeError);
}

TEST(Io, AtomicWriteReplaces)
{
    const auto p = scratch("atomic.txt");
    io::write_file_atomic(p, "one");
    io::write_file_atomic(p, "two");
    EXPECT_EQ(io::read_file(p), "two");
    for (const auto& e : fs::directory_iterator(p.parent_path()))
        EXPECT_EQ(e.path().string().find(".tmp"), std::string::npos) << e.path();
}
