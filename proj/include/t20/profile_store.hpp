#pragma once

// On-disk profile store: one flat CSV table per role
//   player,phase,n,lambda,pW,p0,p1,p2,p3,p4,p6   (12 significant digits)
// plus a JSON sidecar (profiles.json) recording the corpus hash, the
// excluded match ids, n_min and the per-phase population averages.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "t20/ingest.hpp"
#include "t20/profiles.hpp"

namespace t20 {

struct ProfileStore {
    ProfileSet batting;
    ProfileSet bowling;
    std::string corpus_hash;
    std::vector<std::string> excluded_matches;
    double n_min = kDefaultMinDeliveries;

    const ProfileSet& for_role(Role role) const noexcept { return role == Role::Batsman ? batting : bowling; }
};

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

void write_profile_table(std::ostream& out, const ProfileSet& profiles);

/// Reads a flat table written by write_profile_table. Throws SchemaError.
ProfileSet read_profile_table(std::istream& in, Role role, double n_min,
                              std::array<std::optional<OutcomeVector>, kPhaseCount> population = {});

struct CorpusBuild {
    ProfileStore store;
    std::vector<RowError> row_errors;
    std::size_t deliveries = 0;
    std::size_t legal_deliveries = 0;
};

/// Parses the corpus, attributes both roles and builds blended profiles.
CorpusBuild build_store_from_corpus(const std::filesystem::path& corpus_csv,
                                    const std::vector<std::string>& excluded_matches,
                                    double n_min = kDefaultMinDeliveries);

void save_store(const std::filesystem::path& dir, const ProfileStore& store);

/// Throws SchemaError when the directory does not hold a store.
ProfileStore load_store(const std::filesystem::path& dir);

inline constexpr std::string_view kBattingTable = "batting_profiles.csv";
inline constexpr std::string_view kBowlingTable = "bowling_profiles.csv";
inline constexpr std::string_view kStoreSidecar = "profiles.json";

}  // namespace t20
