#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "rcp/io/csv.hpp"
#include "rcp/parallel.hpp"

using namespace rcp;

TEST(FormatDouble, RoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5, 123456789.125, 0.0}) {
        EXPECT_EQ(std::stod(io::format_double(v)), v);
    }
    EXPECT_EQ(io::format_double(0.5), "0.5");
}

TEST(CsvWriter, HeaderAndRows) {
    std::ostringstream s;
    {
        io::CsvWriter w(s, {"x", "y"});
        w.cell(1.0).cell(0.25).end_row();
        w.cell(2.0).cell("ok").end_row();
    }
    EXPECT_EQ(s.str(), "x,y\n1,0.25\n2,ok\n");
}

TEST(CsvWriter, ColumnCountChecked) {
    std::ostringstream s;
    io::CsvWriter w(s, {"x", "y"});
    w.cell(1.0);
    EXPECT_ANY_THROW(w.end_row());
}

TEST(ParallelMap, PreservesOrder) {
    for (unsigned workers : {1u, 2u, 5u}) {
        const auto v = parallel_map(37, [](std::size_t i) { return static_cast<int>(i * i); }, workers);
        ASSERT_EQ(v.size(), 37u);
        for (std::size_t i = 0; i < v.size(); ++i) ASSERT_EQ(v[i], static_cast<int>(i * i));
    }
}

TEST(ParallelMap, RethrowsWorkerException) {
    std::atomic<int> calls{0};
    EXPECT_THROW((void)parallel_map(
                     10,
                     [&](std::size_t i) {
                         ++calls;
                         if (i == 3) throw std::runtime_error("boom");
                         return 0;
                     },
                     3),
                 std::runtime_error);
}

TEST(WorkerCount, ReadsEnvironment) {
    ::setenv("RCP_WORKERS", "3", 1);
    EXPECT_EQ(worker_count(), 3u);
    ::setenv("RCP_WORKERS", "zero", 1);
    EXPECT_THROW((void)worker_count(), ConfigError);
    ::setenv("RCP_WORKERS", "0", 1);
    EXPECT_THROW((void)worker_count(), ConfigError);
    ::unsetenv("RCP_WORKERS");
    EXPECT_GE(worker_count(), 1u);
}
