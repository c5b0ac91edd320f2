#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "qedcut/config.hpp"

using namespace qedcut;

TEST_CASE("minimal config gets documented defaults") {
    RunConfig c = parse_config("{}");
    CHECK(c.physical.m0c2 == 1.0);
    CHECK(c.physical.c == 1.0);
    CHECK(c.kernel_source == "synthetic");
    CHECK(c.solver.tol == 1e-10);
    CHECK(c.caps.max_per_mode == 1);
    CHECK_FALSE(c.grid.include_origin);
    CHECK(c.g1_list.size() == 1);
}

TEST_CASE("unknown keys are hard errors with a path") {
    CHECK_THROWS_AS(parse_config(R"({"physical": {"mass": 2}})"), config_error);
    try {
        parse_config(R"({"solver": {"tol": 1e-9, "tolerance": 1}})");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("solver.tolerance") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config(R"({"frobnicate": 1})"), config_error);
}

TEST_CASE("negative tolerance names the field") {
    try {
        parse_config(R"({"solver": {"tol": -1e-8}})");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("solver.tol") != std::string::npos);
    }
}

TEST_CASE("sweep lists round-trip and must decrease") {
    RunConfig c = parse_config(R"({"m_list": [0.1, 0.05, 0.01]})");
    CHECK(c.m_list == std::vector<double>{0.1, 0.05, 0.01});
    CHECK_THROWS_AS(parse_config(R"({"m_list": [0.1, 0.2]})"), config_error);
    CHECK_THROWS_AS(parse_config(R"({"m_list": []})"), config_error);
}

TEST_CASE("physics validation") {
    CHECK_THROWS_AS(parse_config(R"({"physical": {"z_alpha": 1.0}})"), config_error);
    CHECK_THROWS_AS(parse_config(R"({"physical": {"m0c2": 0}})"), config_error);
    RunConfig c = parse_config(R"({"physical": {"z_alpha": 0.6, "g1": 0.2, "g2": -0.1}})");
    CHECK(c.physical.g2 == -0.1);
}

TEST_CASE("archive source requires an existing path") {
    CHECK_THROWS_AS(parse_config(R"({"kernels": {"source": "archive"}})"), config_error);
    CHECK_THROWS_AS(
        parse_config(R"({"kernels": {"source": "archive", "archive_path": "/no/such"}})"),
        config_error);
    CHECK_THROWS_AS(parse_config(R"({"kernels": {"source": "magic"}})"), config_error);
}

TEST_CASE("parse error carries diagnostics") {
    CHECK_THROWS_AS(parse_config("{not json"), config_error);
}

TEST_CASE("load_config reads a file") {
    const auto file = std::filesystem::temp_directory_path() / "qedcut_cfg.json";
    {
        std::ofstream out(file);
        out << R"({"physical": {"z_alpha": 0.3}, "solver": {"seed": 42}})";
    }
    RunConfig c = load_config(file);
    CHECK(c.physical.z_alpha == 0.3);
    CHECK(c.solver.seed == 42);
    CHECK_THROWS_AS(load_config("/definitely/missing.json"), config_error);
    std::filesystem::remove(file);
}

TEST_CASE("config builds a consistent mode table and kernels") {
    RunConfig c = parse_config(R"({
      "grid": {"sectors": [{"kj": 1, "n_levels": 2}], "p_max": 1.5, "n_p": 2,
               "photon": {"spacing": 0.5, "lambda": 1.0}},
      "caps": {"max_per_mode": 1, "max_photons_total": 1}
    })");
    ModeTable t = c.make_mode_table();
    CHECK(t.n_d() == 2);
    CHECK(t.n_plus() == 2);
    CHECK(t.n_minus() == 2);
    KernelSet ks = c.make_kernels(t);
    CHECK(ks.vertex.g1_dd.shape()[1] == t.photons.num_k());
}
