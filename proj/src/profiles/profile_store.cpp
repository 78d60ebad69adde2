#include "t20/profile_store.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "t20/csv.hpp"
#include "t20/error.hpp"

namespace t20 {

namespace {

using json = nlohmann::json;

std::string sig12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

double parse_double(const std::string& s, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw SchemaError("profile table line " + std::to_string(line) + ": '" + s + "' is not a number");
    return v;
}

json vector_json(const OutcomeVector& v) {
    json out = json::object();
    for (Outcome o : kOutcomes) out[std::string(outcome_code(o))] = v[o];
    return out;
}

OutcomeVector vector_from_json(const json& j) {
    OutcomeVector::Array p{};
    for (Outcome o : kOutcomes) p[index_of(o)] = j.at(std::string(outcome_code(o))).get<double>();
    return OutcomeVector::from_probabilities(p);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 digest failed");
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
    return out.str();
}

void write_profile_table(std::ostream& out, const ProfileSet& profiles) {
    out << "player,phase,n,lambda,pW,p0,p1,p2,p3,p4,p6\n";
    for (const auto& [key, prof] : profiles.profiles()) {
        out << csv::escape(key.player) << ',' << phase_code(key.phase) << ',' << prof.n << ',' << sig12(prof.lambda);
        for (double p : prof.vector.values()) out << ',' << sig12(p);
        out << '\n';
    }
}

ProfileSet read_profile_table(std::istream& in, Role role, double n_min,
                              std::array<std::optional<OutcomeVector>, kPhaseCount> population) {
    csv::Reader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields.size() != 11 || fields[0] != "player")
        throw SchemaError("profile table: expected header player,phase,n,lambda,pW,p0,p1,p2,p3,p4,p6");
    std::map<PlayerPhaseKey, PlayerPhaseProfile> profiles;
    while (reader.next(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        const std::size_t line = reader.record_line();
        if (fields.size() != 11) throw SchemaError("profile table line " + std::to_string(line) + ": expected 11 fields");
        Phase phase;
        try {
            phase = parse_phase(fields[1]);
        } catch (const DomainError& e) {
            throw SchemaError("profile table line " + std::to_string(line) + ": " + e.what());
        }
        const auto n = static_cast<std::uint64_t>(parse_double(fields[2], line));
        const double lambda = parse_double(fields[3], line);
        OutcomeVector::Array p{};
        for (std::size_t k = 0; k < kOutcomeCount; ++k) p[k] = parse_double(fields[4 + k], line);
        OutcomeVector v;
        try {
            v = OutcomeVector::from_probabilities(p);
        } catch (const DomainError& e) {
            throw SchemaError("profile table line " + std::to_string(line) + ": " + e.what());
        }
        profiles.emplace(PlayerPhaseKey{fields[0], phase}, make_profile(fields[0], phase, n, lambda, v));
    }
    return ProfileSet(role, n_min, std::move(profiles), std::move(population));
}

CorpusBuild build_store_from_corpus(const std::filesystem::path& corpus_csv,
                                    const std::vector<std::string>& excluded_matches, double n_min) {
    const std::string bytes = read_file(corpus_csv);
    std::istringstream in(bytes);
    const std::unordered_set<std::string> excluded(excluded_matches.begin(), excluded_matches.end());
    ParseResult parsed = parse_deliveries(in, excluded);

    CorpusBuild build;
    build.deliveries = parsed.deliveries.size();
    for (const auto& d : parsed.deliveries)
        if (is_legal(d)) ++build.legal_deliveries;
    build.row_errors = std::move(parsed.errors);

    const auto bat = attribute_all(parsed.deliveries, Role::Batsman);
    const auto bowl = attribute_all(parsed.deliveries, Role::Bowler);
    build.store.batting = build_profiles(accumulate(bat, Role::Batsman), n_min);
    build.store.bowling = build_profiles(accumulate(bowl, Role::Bowler), n_min);
    build.store.corpus_hash = sha256_hex(bytes);
    build.store.excluded_matches = excluded_matches;
    std::sort(build.store.excluded_matches.begin(), build.store.excluded_matches.end());
    build.store.n_min = n_min;
    return build;
}

void save_store(const std::filesystem::path& dir, const ProfileStore& store) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / kBattingTable, std::ios::binary);
        write_profile_table(out, store.batting);
    }
    {
        std::ofstream out(dir / kBowlingTable, std::ios::binary);
        write_profile_table(out, store.bowling);
    }
    json sidecar;
    sidecar["corpus_hash"] = store.corpus_hash;
    sidecar["excluded_matches"] = store.excluded_matches;
    sidecar["n_min"] = store.n_min;
    sidecar["tables"] = {{"batsman", kBattingTable}, {"bowler", kBowlingTable}};
    json population = json::object();
    for (const auto& [role, set] : {std::pair{"batsman", &store.batting}, std::pair{"bowler", &store.bowling}}) {
        json per_phase = json::object();
        for (Phase p : kPhases)
            if (set->population(p)) per_phase[std::string(phase_code(p))] = vector_json(*set->population(p));
        population[role] = per_phase;
    }
    sidecar["population"] = population;
    std::ofstream out(dir / kStoreSidecar, std::ios::binary);
    out << sidecar.dump(2) << '\n';
}

ProfileStore load_store(const std::filesystem::path& dir) {
    json sidecar;
    try {
        sidecar = json::parse(read_file(dir / kStoreSidecar));
    } catch (const json::exception& e) {
        throw SchemaError("profile store sidecar: " + std::string(e.what()));
    }
    ProfileStore store;
    try {
        store.corpus_hash = sidecar.at("corpus_hash").get<std::string>();
        store.excluded_matches = sidecar.value("excluded_matches", std::vector<std::string>{});
        store.n_min = sidecar.value("n_min", kDefaultMinDeliveries);
        for (Role role : {Role::Batsman, Role::Bowler}) {
            std::array<std::optional<OutcomeVector>, kPhaseCount> population;
            const json pop = sidecar.value("population", json::object()).value(std::string(role_name(role)), json::object());
            for (Phase p : kPhases)
                if (pop.contains(std::string(phase_code(p))))
                    population[index_of(p)] = vector_from_json(pop.at(std::string(phase_code(p))));
            const auto table = sidecar.at("tables").at(std::string(role_name(role))).get<std::string>();
            std::istringstream in(read_file(dir / table));
            (role == Role::Batsman ? store.batting : store.bowling) =
                read_profile_table(in, role, store.n_min, population);
        }
    } catch (const json::exception& e) {
        throw SchemaError("profile store sidecar: " + std::string(e.what()));
    }
    return store;
}

}  // namespace t20
