#pragma once

#include <filesystem>
#include <vector>

#include "nkpolicy/landscape.hpp"

namespace nkpolicy {

inline constexpr std::uint32_t kEnsembleFormatVersion = 1;

/// Landscapes sharing (N, K), generated once and reused across experiments.
struct LandscapeEnsemble {
    int n = 0;
    int k = 0;
    Seed master_seed = 0;
    std::vector<NKLandscape> landscapes;

    friend bool operator==(const LandscapeEnsemble&, const LandscapeEnsemble&) = default;
};

/// Seed of landscape `index` in an ensemble built from `master_seed`.
Seed ensemble_member_seed(Seed master_seed, std::size_t index) noexcept;

LandscapeEnsemble make_ensemble(int count, int n, int k, Seed master_seed);

/// Builds the ensemble and writes it to `path`. Throws IoError if the file
/// cannot be written.
LandscapeEnsemble generate_ensemble(int count, int n, int k, Seed master_seed, const std::filesystem::path& path);

/// Binary layout is described in docs/ensemble_format.md.
void save_ensemble(const LandscapeEnsemble& ensemble, const std::filesystem::path& path);

/// Throws IoError when the file cannot be opened and FormatError, naming the
/// offending field, when its content is malformed.
LandscapeEnsemble load_ensemble(const std::filesystem::path& path);

}  // namespace nkpolicy
