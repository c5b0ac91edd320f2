#include "qedcut/config.hpp"

#include <fstream>
#include <set>

#include "json.hpp"

#include "qedcut/kernel_archive.hpp"

namespace qedcut {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw config_error("config: " + path + ": " + msg);
}

void check_keys(const json& obj, const std::string& path, std::set<std::string> allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) fail(path + "." + it.key(), "unknown key");
}

double get_num(const json& obj, const std::string& path, const char* key, double dflt,
               bool require_positive = false) {
    if (!obj.contains(key)) return dflt;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    const double x = v.get<double>();
    if (require_positive && !(x > 0.0)) fail(path + "." + key, "must be > 0");
    return x;
}

long get_int(const json& obj, const std::string& path, const char* key, long dflt) {
    if (!obj.contains(key)) return dflt;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
    return v.get<long>();
}

bool get_bool(const json& obj, const std::string& path, const char* key, bool dflt) {
    if (!obj.contains(key)) return dflt;
    const json& v = obj.at(key);
    if (!v.is_boolean()) fail(path + "." + key, "expected a boolean");
    return v.get<bool>();
}

std::vector<double> get_list(const json& obj, const std::string& path, const char* key,
                             std::vector<double> dflt) {
    if (!obj.contains(key)) return dflt;
    const json& v = obj.at(key);
    if (!v.is_array()) fail(path + "." + key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) fail(path + "." + key, "expected an array of numbers");
        out.push_back(e.get<double>());
    }
    if (out.empty()) fail(path + "." + key, "list must be non-empty");
    return out;
}

} // namespace

RunConfig default_config() {
    RunConfig c;
    c.physical.z_alpha = 0.5;
    c.physical.g1 = 0.1;
    c.physical.g2 = 0.05;
    c.grid.sectors = {{1, 1}};
    c.grid.p_max = 1.0;
    c.grid.n_p = 1;
    c.grid.photon_spacing = 0.6;
    c.grid.photon_lambda = 1.5;
    c.grid.include_origin = false;
    c.caps.max_fermions = -1;
    c.caps.max_photons_total = 1;
    c.caps.max_per_mode = 1;
    c.g1_list = {c.physical.g1};
    c.g2_list = {c.physical.g2};
    c.m_list = {2.4, 1.2, 0.6, 0.3};
    c.eps_list = {1.8, 1.2, 0.6};
    return c;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error("config: " + origin + ": " + e.what());
    }
    RunConfig c = default_config();
    check_keys(root, origin,
               {"physical", "grid", "caps", "kernels", "couplings", "m_list", "eps_list",
                "eps_study_m", "lambda_threshold", "solver", "tol_zero", "verify", "output"});

    if (root.contains("physical")) {
        const json& p = root["physical"];
        check_keys(p, "physical", {"m0c2", "c", "z_alpha", "g1", "g2"});
        c.physical.m0c2 = get_num(p, "physical", "m0c2", c.physical.m0c2, true);
        c.physical.c = get_num(p, "physical", "c", c.physical.c, true);
        c.physical.z_alpha = get_num(p, "physical", "z_alpha", c.physical.z_alpha);
        c.physical.g1 = get_num(p, "physical", "g1", c.physical.g1);
        c.physical.g2 = get_num(p, "physical", "g2", c.physical.g2);
        if (!(c.physical.z_alpha >= 0.0 && c.physical.z_alpha < 1.0))
            fail("physical.z_alpha", "must lie in [0, 1)");
    }
    if (root.contains("grid")) {
        const json& g = root["grid"];
        check_keys(g, "grid", {"sectors", "p_max", "n_p", "photon"});
        if (g.contains("sectors")) {
            if (!g["sectors"].is_array()) fail("grid.sectors", "expected an array");
            c.grid.sectors.clear();
            std::size_t i = 0;
            for (const auto& s : g["sectors"]) {
                const std::string path = "grid.sectors[" + std::to_string(i++) + "]";
                check_keys(s, path, {"kj", "n_levels"});
                SectorSpec sec;
                sec.kj = static_cast<int>(get_int(s, path, "kj", 1));
                sec.n_levels = static_cast<int>(get_int(s, path, "n_levels", 1));
                if (sec.kj == 0) fail(path + ".kj", "must be nonzero");
                if (sec.n_levels < 0) fail(path + ".n_levels", "must be >= 0");
                c.grid.sectors.push_back(sec);
            }
        }
        c.grid.p_max = get_num(g, "grid", "p_max", c.grid.p_max);
        c.grid.n_p = static_cast<int>(get_int(g, "grid", "n_p", c.grid.n_p));
        if (c.grid.n_p < 0) fail("grid.n_p", "must be >= 0");
        if (g.contains("photon")) {
            const json& ph = g["photon"];
            check_keys(ph, "grid.photon", {"spacing", "lambda", "include_origin"});
            c.grid.photon_spacing = get_num(ph, "grid.photon", "spacing", c.grid.photon_spacing);
            c.grid.photon_lambda = get_num(ph, "grid.photon", "lambda", c.grid.photon_lambda);
            c.grid.include_origin =
                get_bool(ph, "grid.photon", "include_origin", c.grid.include_origin);
        }
    }
    if (root.contains("caps")) {
        const json& cc = root["caps"];
        check_keys(cc, "caps", {"max_fermions", "max_photons_total", "max_per_mode", "max_basis"});
        c.caps.max_fermions =
            static_cast<int>(get_int(cc, "caps", "max_fermions", c.caps.max_fermions));
        c.caps.max_photons_total =
            static_cast<int>(get_int(cc, "caps", "max_photons_total", c.caps.max_photons_total));
        c.caps.max_per_mode =
            static_cast<int>(get_int(cc, "caps", "max_per_mode", c.caps.max_per_mode));
        const long mb = get_int(cc, "caps", "max_basis", static_cast<long>(c.caps.max_basis));
        if (mb <= 0) fail("caps.max_basis", "must be > 0");
        c.caps.max_basis = static_cast<std::size_t>(mb);
        if (c.caps.max_photons_total < 0) fail("caps.max_photons_total", "must be >= 0");
        if (c.caps.max_per_mode < 0) fail("caps.max_per_mode", "must be >= 0");
    }
    if (root.contains("kernels")) {
        const json& k = root["kernels"];
        check_keys(k, "kernels", {"source", "synthetic", "archive_path", "symmetry_policy"});
        if (k.contains("source")) {
            c.kernel_source = k["source"].get<std::string>();
            if (c.kernel_source != "synthetic" && c.kernel_source != "archive")
                fail("kernels.source", "must be \"synthetic\" or \"archive\"");
        }
        if (k.contains("symmetry_policy")) {
            c.symmetry_policy = k["symmetry_policy"].get<std::string>();
            if (c.symmetry_policy != "strict" && c.symmetry_policy != "repair")
                fail("kernels.symmetry_policy", "must be \"strict\" or \"repair\"");
        }
        if (k.contains("archive_path")) c.archive_path = k["archive_path"].get<std::string>();
        if (c.kernel_source == "archive") {
            if (c.archive_path.empty()) fail("kernels.archive_path", "required for source=archive");
            if (!std::filesystem::exists(c.archive_path))
                fail("kernels.archive_path", "path does not exist: " + c.archive_path.string());
        }
        if (k.contains("synthetic")) {
            const json& s = k["synthetic"];
            check_keys(s, "kernels.synthetic",
                       {"vertex_amp", "f1_amp", "f2_amp", "f3_amp", "f4_amp", "f5_amp", "f6_amp",
                        "ir_power", "uv_sigma"});
            if (s.contains("vertex_amp")) {
                auto v = get_list(s, "kernels.synthetic", "vertex_amp", {});
                if (v.size() != 6) fail("kernels.synthetic.vertex_amp", "expected 6 numbers");
                for (int i = 0; i < 6; ++i) c.synthetic.vertex_amp[i] = v[i];
            }
            c.synthetic.f1_amp = get_num(s, "kernels.synthetic", "f1_amp", c.synthetic.f1_amp);
            c.synthetic.f2_amp = get_num(s, "kernels.synthetic", "f2_amp", c.synthetic.f2_amp);
            c.synthetic.f3_amp = get_num(s, "kernels.synthetic", "f3_amp", c.synthetic.f3_amp);
            c.synthetic.f4_amp = get_num(s, "kernels.synthetic", "f4_amp", c.synthetic.f4_amp);
            c.synthetic.f5_amp = get_num(s, "kernels.synthetic", "f5_amp", c.synthetic.f5_amp);
            c.synthetic.f6_amp = get_num(s, "kernels.synthetic", "f6_amp", c.synthetic.f6_amp);
            c.synthetic.ir_power =
                get_num(s, "kernels.synthetic", "ir_power", c.synthetic.ir_power);
            c.synthetic.uv_sigma =
                get_num(s, "kernels.synthetic", "uv_sigma", c.synthetic.uv_sigma, true);
        }
    }
    if (root.contains("couplings")) {
        const json& cp = root["couplings"];
        check_keys(cp, "couplings", {"g1_list", "g2_list"});
        c.g1_list = get_list(cp, "couplings", "g1_list", {c.physical.g1});
        c.g2_list = get_list(cp, "couplings", "g2_list", {c.physical.g2});
    } else {
        c.g1_list = {c.physical.g1};
        c.g2_list = {c.physical.g2};
    }
    c.m_list = get_list(root, origin, "m_list", c.m_list);
    c.eps_list = get_list(root, origin, "eps_list", c.eps_list);
    c.eps_study_m = get_num(root, origin, "eps_study_m", c.eps_study_m);
    c.lambda_threshold = get_num(root, origin, "lambda_threshold", c.lambda_threshold);
    if (root.contains("solver")) {
        const json& s = root["solver"];
        check_keys(s, "solver", {"tol", "max_iter", "seed", "gap_tol", "dense_threshold"});
        c.solver.tol = get_num(s, "solver", "tol", c.solver.tol, true);
        c.solver.max_iter = static_cast<int>(get_int(s, "solver", "max_iter", c.solver.max_iter));
        if (c.solver.max_iter <= 0) fail("solver.max_iter", "must be > 0");
        c.solver.seed = static_cast<std::uint64_t>(
            get_int(s, "solver", "seed", static_cast<long>(c.solver.seed)));
        c.solver.gap_tol = get_num(s, "solver", "gap_tol", c.solver.gap_tol, true);
        c.solver.dense_threshold =
            static_cast<int>(get_int(s, "solver", "dense_threshold", c.solver.dense_threshold));
    }
    c.tol_zero = get_num(root, origin, "tol_zero", c.tol_zero, true);
    if (root.contains("verify")) {
        const json& v = root["verify"];
        check_keys(v, "verify",
                   {"instances", "size_cap", "seed", "rel_tol", "abs_tol", "random_sweeps"});
        c.verify.instances = static_cast<int>(get_int(v, "verify", "instances", c.verify.instances));
        if (c.verify.instances <= 0) fail("verify.instances", "must be > 0");
        c.verify.size_cap = static_cast<int>(get_int(v, "verify", "size_cap", c.verify.size_cap));
        if (c.verify.size_cap < 1 || c.verify.size_cap > 6)
            fail("verify.size_cap", "must lie in [1, 6]");
        c.verify.seed =
            static_cast<std::uint64_t>(get_int(v, "verify", "seed", static_cast<long>(c.verify.seed)));
        c.verify.rel_tol = get_num(v, "verify", "rel_tol", c.verify.rel_tol, true);
        c.verify.abs_tol = get_num(v, "verify", "abs_tol", c.verify.abs_tol, true);
        c.verify.random_sweeps = get_bool(v, "verify", "random_sweeps", c.verify.random_sweeps);
    }
    if (root.contains("output")) {
        const json& o = root["output"];
        check_keys(o, "output", {"dir"});
        if (o.contains("dir")) c.out_dir = o["dir"].get<std::string>();
    }

    if (!(c.lambda_threshold > 0.0)) fail("lambda_threshold", "must be > 0");
    for (std::size_t i = 1; i < c.m_list.size(); ++i)
        if (!(c.m_list[i] < c.m_list[i - 1])) fail("m_list", "must strictly decrease");
    for (std::size_t i = 1; i < c.eps_list.size(); ++i)
        if (!(c.eps_list[i] < c.eps_list[i - 1])) fail("eps_list", "must strictly decrease");
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text, path.string());
}

ModeTable RunConfig::make_mode_table() const { return build_mode_table(physical, grid); }

KernelSet RunConfig::make_kernels(const ModeTable& modes) const {
    const SymmetryPolicy policy =
        symmetry_policy == "repair" ? SymmetryPolicy::Repair : SymmetryPolicy::Strict;
    if (kernel_source == "archive") return load_kernel_archive(archive_path, modes, policy);
    return synthetic_kernels(modes, synthetic);
}

} // namespace qedcut
