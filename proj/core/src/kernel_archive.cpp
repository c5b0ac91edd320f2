#include "qedcut/kernel_archive.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace qedcut {

static_assert(std::endian::native == std::endian::little,
              "kernel archive assumes a little-endian host");

namespace {

std::vector<std::pair<std::string, Tensor*>> tensor_list(KernelSet& ks) {
    return {
        {"g1_dd", &ks.vertex.g1_dd},       {"g2_dplus", &ks.vertex.g2_dplus},
        {"g3_dminus", &ks.vertex.g3_dminus}, {"g4_pm", &ks.vertex.g4_pm},
        {"g5_pp", &ks.vertex.g5_pp},       {"g6_mm", &ks.vertex.g6_mm},
        {"f1", &ks.coulomb.f1},            {"f2_plus", &ks.coulomb.f2_plus},
        {"f2_minus", &ks.coulomb.f2_minus}, {"f3_pm", &ks.coulomb.f3_pm},
        {"f3_mp", &ks.coulomb.f3_mp},      {"f4", &ks.coulomb.f4},
        {"f5_plus", &ks.coulomb.f5_plus},  {"f5_minus", &ks.coulomb.f5_minus},
        {"f6_pm", &ks.coulomb.f6_pm},      {"f6_mp", &ks.coulomb.f6_mp},
    };
}

const std::map<std::string, std::string> kSymmetryDecl = {
    {"f1", "conj-swap-(12)(34)"},
    {"f2_plus", "reversal-4321"},
    {"f2_minus", "reversal-4321"},
    {"f5_plus", "conj-transpose"},
    {"f5_minus", "conj-transpose"},
};

} // namespace

void save_tensor(const std::filesystem::path& file, const std::string& name,
                 const Tensor& t) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw archive_error("cannot open " + file.string() + " for writing");
    std::ostringstream shape;
    for (std::size_t i = 0; i < t.rank(); ++i) {
        if (i) shape << 'x';
        shape << t.shape()[i];
    }
    if (t.rank() == 0) shape << "1";
    out << name << ' ' << shape.str() << " dtype=complex128 layout=row-major\n";
    out.write(reinterpret_cast<const char*>(t.data().data()),
              static_cast<std::streamsize>(t.size() * sizeof(Tensor::value_type)));
    if (!out) throw archive_error("write failed for " + file.string());
}

std::pair<std::string, Tensor> load_tensor(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw archive_error("cannot open " + file.string());
    std::string header;
    std::getline(in, header);
    std::istringstream hs(header);
    std::string name, shape_s, dtype_s, layout_s;
    hs >> name >> shape_s >> dtype_s >> layout_s;
    if (dtype_s != "dtype=complex128" || layout_s != "layout=row-major")
        throw archive_error("unsupported tensor header in " + file.string() + ": " + header);
    std::vector<std::size_t> shape;
    std::istringstream ss(shape_s);
    std::string dim;
    while (std::getline(ss, dim, 'x')) shape.push_back(std::stoull(dim));
    Tensor t(shape);
    in.read(reinterpret_cast<char*>(t.data().data()),
            static_cast<std::streamsize>(t.size() * sizeof(Tensor::value_type)));
    if (in.gcount() != static_cast<std::streamsize>(t.size() * sizeof(Tensor::value_type)))
        throw archive_error("truncated tensor payload in " + file.string());
    return {name, std::move(t)};
}

void save_kernel_archive(const std::filesystem::path& dir, const KernelSet& ks) {
    std::filesystem::create_directories(dir);
    auto list = tensor_list(const_cast<KernelSet&>(ks));
    nlohmann::json manifest;
    manifest["schema_version"] = 1;
    manifest["families"] = nlohmann::json::array();
    manifest["symmetry"] = nlohmann::json::object();
    for (auto& [name, t] : list) {
        if (t->empty()) continue;
        manifest["families"].push_back(name);
        if (auto it = kSymmetryDecl.find(name); it != kSymmetryDecl.end())
            manifest["symmetry"][name] = it->second;
        save_tensor(dir / (name + ".tensor"), name, *t);
    }
    std::ofstream mf(dir / "manifest.json");
    mf << manifest.dump(2) << '\n';
    if (!mf) throw archive_error("cannot write manifest in " + dir.string());
}

KernelSet load_kernel_archive(const std::filesystem::path& dir, const ModeTable& modes,
                              SymmetryPolicy policy) {
    std::ifstream mf(dir / "manifest.json");
    if (!mf) throw archive_error("missing manifest.json in " + dir.string());
    nlohmann::json manifest = nlohmann::json::parse(mf);

    KernelSet ks;
    ks.vertex = PhotonVertexKernels::zeros(modes);
    ks.coulomb = CoulombKernels::zeros(modes);
    auto list = tensor_list(ks);

    for (const auto& fam : manifest.at("families")) {
        const std::string name = fam.get<std::string>();
        auto it = std::find_if(list.begin(), list.end(),
                               [&](const auto& p) { return p.first == name; });
        if (it == list.end()) throw archive_error("unknown tensor family in manifest: " + name);
        auto [fname, t] = load_tensor(dir / (name + ".tensor"));
        if (fname != name)
            throw archive_error("tensor header name mismatch for " + name + " (got " + fname + ")");
        if (t.shape() != it->second->shape()) {
            std::ostringstream msg;
            msg << "tensor " << name << " shape does not match the mode table";
            throw archive_error(msg.str());
        }
        *it->second = std::move(t);
    }
    enforce_coulomb_symmetries(ks.coulomb, policy);
    return ks;
}

} // namespace qedcut
