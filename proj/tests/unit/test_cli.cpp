#include <doctest.h>

#include "cortex_atlas/json_writer.hpp"
#include "cortex_atlas/param_map.hpp"
#include "pipeline.hpp"

using pipeline::cli;
using pipeline::quote;
using pipeline::run;
using pipeline::slurp;
namespace fs = std::filesystem;

namespace {

void write(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

const fs::path& workdir() {
    static const fs::path dir = [] {
        const auto d = pipeline::fresh_dir("cli");
        write(d / "tri.off", "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
        write(d / "three.txt", "0 0 0\n10 0 0\n\n0 5 0\n10 5 0\n\n0 0 5\n10 0 5\n");
        return d;
    }();
    return dir;
}

std::string at(const char* name) { return quote((workdir() / name).string()); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("param on a single triangle") {
    REQUIRE(run(cli() + " param --mesh " + at("tri.off") + " --out " + at("tri.disk.json")) == 0);
    const auto disk = cortex::parse_disk_map(slurp(workdir() / "tri.disk.json"));
    CHECK(disk.boundary.size() == 3);
    for (const auto& p : disk.uv) CHECK(std::abs(p.norm() - 1.0) < 1e-12);

    const auto report = cortex::Json::parse(slurp(workdir() / "tri.disk.json.report.json"));
    CHECK(report["status"] == "ok");
    CHECK(report["command"] == "param");
    CHECK(report.contains("timings_ms"));
    CHECK(report["warnings"].is_array());

    const auto doc = cortex::Json::parse(slurp(workdir() / "tri.disk.json"));
    const auto& prov = doc["provenance"];
    CHECK(prov["inputs"]["mesh"]["file"] == "tri.off");
    CHECK(prov["inputs"]["mesh"]["sha256"].get<std::string>().size() == 64);
    CHECK(prov["parameters"].contains("max-iters"));
    CHECK_FALSE(prov["parameters"].contains("out"));
}

TEST_CASE("cluster with theta 0 separates distinct streamlines") {
    REQUIRE(run(cli() + " cluster --streamlines " + at("three.txt") + " --theta 0 --out " + at("three.clusters.json")) == 0);
    const auto doc = cortex::Json::parse(slurp(workdir() / "three.clusters.json"));
    CHECK(doc["clusters"].size() == 3);
    CHECK(doc["provenance"]["parameters"]["theta"] == "0");
}

TEST_CASE("parameter domain errors exit nonzero with a structured error") {
    const auto err = workdir() / "err.txt";
    CHECK(run(cli() + " cluster --streamlines " + at("three.txt") + " --theta -1 --out " + at("x.json") + " 2>" +
              quote(err.string())) == 3);
    const auto e = cortex::Json::parse(slurp(err));
    CHECK(e["error"]["kind"] == "domain_error");
    CHECK(e["error"]["command"] == "cluster");
    const auto report = cortex::Json::parse(slurp(workdir() / "x.json.report.json"));
    CHECK(report["status"] == "error");

    CHECK(run(cli() + " cluster --streamlines " + at("three.txt") + " --k 1 --out " + at("x.json")) == 3);

    REQUIRE(run(cli() + " param --mesh " + at("tri.off") + " --out " + at("tri.disk.json")) == 0);
    CHECK(run(cli() + " sphere --left " + at("tri.disk.json") + " --right " + at("tri.disk.json") +
              " --scale 0.5 --out " + at("s.json")) == 3);

    REQUIRE(run(cli() + " cluster --streamlines " + at("three.txt") + " --out " + at("c.json")) == 0);
    CHECK(run(cli() + " connect --clusters " + at("c.json") + " --streamlines " + at("three.txt") +
              " --strategy interior --out " + at("b.json")) == 3);
}

TEST_CASE("missing inputs and unknown flags") {
    CHECK(run(cli() + " param --mesh " + at("nope.off") + " --out " + at("x.json")) == 2);
    CHECK(run(cli() + " cluster --bogus") == 2);
    CHECK(run(cli()) == 2);
    write(workdir() / "bad.off", "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 99\n");
    CHECK(run(cli() + " param --mesh " + at("bad.off") + " --out " + at("x.json")) == 4);
}

TEST_CASE("validate flags a broken scene") {
    write(workdir() / "broken.json", "{\"version\": 1}");
    CHECK(run(cli() + " validate " + at("broken.json")) != 0);
}

}
