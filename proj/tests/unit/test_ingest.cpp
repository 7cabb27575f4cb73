#include <doctest.h>

#include "forge/error.hpp"
#include "forge/ingest.hpp"
#include "support.hpp"

using namespace forge;
using testing::put_file;

TEST_SUITE("ingest") {
    TEST_CASE("single half adder is admitted") {
        testing::TempDir dir;
        put_file(dir / "half_adder.v", testing::kHalfAdder);
        const auto r = ingest_corpus(dir.path());
        REQUIRE(r.samples.size() == 1);
        CHECK(r.samples[0].source_path == "half_adder.v");
        CHECK(r.samples[0].origin == Origin::Collected);
        CHECK(r.samples[0].id == hex_digest(testing::kHalfAdder));
        CHECK(r.report.rejected() == 0);
        CHECK(r.report.files_seen == 1);
    }

    TEST_CASE("zero-byte file counts as Empty") {
        testing::TempDir dir;
        put_file(dir / "empty.v", "");
        const auto r = ingest_corpus(dir.path());
        CHECK(r.samples.empty());
        CHECK(r.report.empty == 1);
    }

    TEST_CASE("whitespace-only file counts as Empty") {
        testing::TempDir dir;
        put_file(dir / "blank.sv", " \r\n\t\n");
        CHECK(ingest_corpus(dir.path()).report.empty == 1);
    }

    TEST_CASE("lone 0xFF byte counts as EncodingError") {
        testing::TempDir dir;
        put_file(dir / "bad.v", "module m;\xFF endmodule\n");
        const auto r = ingest_corpus(dir.path());
        CHECK(r.samples.empty());
        CHECK(r.report.encoding_error == 1);
    }

    TEST_CASE("extensions") {
        CHECK(has_verilog_extension("a.v"));
        CHECK(has_verilog_extension("a.SV"));
        CHECK(has_verilog_extension("x/y.vh"));
        CHECK_FALSE(has_verilog_extension("a.vhd"));
        CHECK_FALSE(has_verilog_extension("Makefile"));
        CHECK_FALSE(has_verilog_extension("a.v.bak"));

        testing::TempDir dir;
        put_file(dir / "notes.txt", "module m; endmodule");
        put_file(dir / "top.SV", "module top; endmodule");
        const auto r = ingest_corpus(dir.path());
        CHECK(r.samples.size() == 1);
        CHECK(r.report.non_verilog_extension == 1);
    }

    TEST_CASE("recursive walk, sorted output, idempotent, bounded by file count") {
        testing::TempDir dir;
        put_file(dir / "z.v", "module z; endmodule");
        put_file(dir / "a/b/c.v", "module c; endmodule");
        put_file(dir / "a/a.vh", "`define X 1");
        put_file(dir / "m.v", "module m; endmodule");
        const auto r1 = ingest_corpus(dir.path(), 3);
        const auto r2 = ingest_corpus(dir.path(), 1);
        REQUIRE(r1.samples.size() == 4);
        CHECK(r1.samples[0].source_path == "a/a.vh");
        CHECK(r1.samples[1].source_path == "a/b/c.v");
        CHECK(r1.samples[2].source_path == "m.v");
        CHECK(r1.samples[3].source_path == "z.v");
        CHECK(r1.samples == r2.samples);
        CHECK(r1.report.files_seen == 4);
        CHECK(r1.samples.size() <= r1.report.files_seen);
        for (const auto& s : r1.samples) {
            CHECK_FALSE(s.code.empty());
        }
    }

    TEST_CASE("report counts balance and round-trip") {
        testing::TempDir dir;
        put_file(dir / "ok.v", "module ok; endmodule");
        put_file(dir / "e.v", "");
        put_file(dir / "x.txt", "hi");
        put_file(dir / "bad.v", "\xC3");
        const auto r = ingest_corpus(dir.path());
        CHECK(r.report.files_seen == r.report.admitted + r.report.rejected());
        const auto back = IngestReport::from_json(nlohmann::json::parse(r.report.to_json().dump()));
        CHECK(back.files_seen == 4);
        CHECK(back.admitted == 1);
        CHECK(back.empty == 1);
        CHECK(back.encoding_error == 1);
        CHECK(back.non_verilog_extension == 1);
    }

    TEST_CASE("missing root is fatal") {
        CHECK_THROWS_AS(ingest_corpus("/nonexistent/forge/root"), ForgeError);
    }
}
