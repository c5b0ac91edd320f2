#ifndef QEDCUT_KERNEL_ARCHIVE_HPP
#define QEDCUT_KERNEL_ARCHIVE_HPP

#include <filesystem>
#include <map>
#include <string>

#include "qedcut/kernels.hpp"

namespace qedcut {

// Kernel archive: a directory holding one `<name>.tensor` file per tensor —
// an ASCII header line `name shape dtype=complex128 layout=row-major`
// (shape as d0xd1x...) followed by raw little-endian interleaved (re, im)
// doubles — plus a `manifest.json` listing the families present and their
// symmetry declarations. Round-trips bit-exactly.

struct archive_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void save_tensor(const std::filesystem::path& file, const std::string& name,
                 const Tensor& t);
std::pair<std::string, Tensor> load_tensor(const std::filesystem::path& file);

void save_kernel_archive(const std::filesystem::path& dir, const KernelSet& ks);

// Loads and validates against the mode table shapes; enforces the declared
// symmetries with the given policy.
KernelSet load_kernel_archive(const std::filesystem::path& dir, const ModeTable& modes,
                              SymmetryPolicy policy = SymmetryPolicy::Strict);

} // namespace qedcut

#endif
