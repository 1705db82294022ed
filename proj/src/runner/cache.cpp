#include "bqec/runner/cache.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace bqec::runner {

namespace fs = std::filesystem;

std::string cache_dir() {
    if (const char* env = std::getenv("BQEC_CACHE_DIR"); env && *env) return env;
    return ".bqec-cache";
}

namespace {

constexpr std::uint32_t kMagic = 0x42514543;  // "BQEC"

bool load_matrix(const std::string& path, int dim, Eigen::MatrixXd& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::uint32_t magic = 0;
    std::int32_t d = 0;
    in.read(reinterpret_cast<char*>(&magic), sizeof magic);
    in.read(reinterpret_cast<char*>(&d), sizeof d);
    if (!in || magic != kMagic || d != dim) return false;
    out.resize(dim, dim);
    in.read(reinterpret_cast<char*>(out.data()), std::streamsize(sizeof(double)) * dim * dim);
    return bool(in);
}

void store_matrix(const std::string& path, const Eigen::MatrixXd& m) {
    std::error_code ec;
    fs::create_directories(fs::path(path).parent_path(), ec);
    const std::string tmp = path + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) return;
        const std::uint32_t magic = kMagic;
        const std::int32_t d = std::int32_t(m.rows());
        out.write(reinterpret_cast<const char*>(&magic), sizeof magic);
        out.write(reinterpret_cast<const char*>(&d), sizeof d);
        out.write(reinterpret_cast<const char*>(m.data()),
                  std::streamsize(sizeof(double)) * m.rows() * m.cols());
        if (!out) {
            std::remove(tmp.c_str());
            return;
        }
    }
    std::rename(tmp.c_str(), path.c_str());  // atomic creation
}

}  // namespace

measure::HMatrix cached_ahd(int dim, int lmax) {
    if (lmax < 0) lmax = 2 * dim;
    const std::string path =
        cache_dir() + "/ahd_d" + std::to_string(dim) + "_l" + std::to_string(lmax) + ".bin";
    Eigen::MatrixXd entries;
    if (load_matrix(path, dim, entries))
        return measure::HMatrix{measure::Scheme::AdaptiveHomodyne, std::move(entries)};
    measure::HMatrix h = measure::h_adaptive_homodyne(fock::TruncatedSpace(dim), lmax);
    store_matrix(path, h.entries);
    return h;
}

measure::HMatrix h_for_scheme(measure::Scheme scheme, int dim) {
    const fock::TruncatedSpace space(dim);
    switch (scheme) {
        case measure::Scheme::Canonical: return measure::h_canonical(space);
        case measure::Scheme::Heterodyne: return measure::h_heterodyne(space);
        case measure::Scheme::AdaptiveHomodyne: return cached_ahd(dim);
    }
    throw std::logic_error("h_for_scheme: bad scheme");
}

}  // namespace bqec::runner
