#ifndef QEDCUT_CONFIG_HPP
#define QEDCUT_CONFIG_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qedcut/fock.hpp"
#include "qedcut/kernels.hpp"
#include "qedcut/modes.hpp"
#include "qedcut/spectral.hpp"

namespace qedcut {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct VerifySettings {
    int instances = 100;
    int size_cap = 4;     // max modes per species in random-kernel instances
    std::uint64_t seed = 7;
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    bool random_sweeps = true;
};

// One experiment configuration; every field has a documented default, unknown
// keys in the file are hard errors.
struct RunConfig {
    PhysicalParams physical;
    GridSpec grid;
    TruncationCaps caps;

    std::string kernel_source = "synthetic"; // "synthetic" | "archive"
    SyntheticSpec synthetic;
    std::filesystem::path archive_path;
    std::string symmetry_policy = "strict"; // "strict" | "repair"

    std::vector<double> g1_list; // coupling sweeps (ground/studies use front())
    std::vector<double> g2_list;
    std::vector<double> m_list;
    std::vector<double> eps_list;
    double eps_study_m = 0.0;
    double lambda_threshold = 0.95;

    SolverOptions solver;
    double tol_zero = 1e-10;
    VerifySettings verify;
    std::filesystem::path out_dir = "out";

    ModeTable make_mode_table() const;
    KernelSet make_kernels(const ModeTable& modes) const;
};

RunConfig default_config();
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& json_text, const std::string& origin = "<string>");

} // namespace qedcut

#endif
