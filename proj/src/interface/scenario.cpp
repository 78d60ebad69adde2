#include "t20/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "t20/bowling_opt.hpp"
#include "t20/error.hpp"

namespace t20 {

using json = nlohmann::json;

namespace {

// Collects field issues while walking a document so a single load reports
// every problem at once.
class Walker {
public:
    void fail(std::string field, std::string message) { issues_.push_back({std::move(field), std::move(message)}); }
    bool ok() const noexcept { return issues_.empty(); }
    void raise_if_any() {
        if (!issues_.empty()) throw ValidationError(std::move(issues_));
    }

    const json* object(const json& parent, const std::string& key, const std::string& path, bool required = true) {
        if (!parent.is_object() || !parent.contains(key)) {
            if (required) fail(path, "required");
            return nullptr;
        }
        const json& v = parent.at(key);
        if (!v.is_object()) {
            fail(path, "must be an object");
            return nullptr;
        }
        return &v;
    }

    const json* array(const json& parent, const std::string& key, const std::string& path, bool required = true) {
        if (!parent.is_object() || !parent.contains(key)) {
            if (required) fail(path, "required");
            return nullptr;
        }
        const json& v = parent.at(key);
        if (!v.is_array()) {
            fail(path, "must be an array");
            return nullptr;
        }
        return &v;
    }

    std::optional<int> integer(const json& parent, const std::string& key, const std::string& path,
                               bool required = true) {
        if (!parent.is_object() || !parent.contains(key)) {
            if (required) fail(path, "required");
            return std::nullopt;
        }
        const json& v = parent.at(key);
        if (!v.is_number_integer()) {
            fail(path, "must be an integer");
            return std::nullopt;
        }
        return v.get<int>();
    }

    std::optional<double> number(const json& parent, const std::string& key, const std::string& path,
                                 bool required = true) {
        if (!parent.is_object() || !parent.contains(key)) {
            if (required) fail(path, "required");
            return std::nullopt;
        }
        const json& v = parent.at(key);
        if (!v.is_number()) {
            fail(path, "must be a number");
            return std::nullopt;
        }
        return v.get<double>();
    }

    std::optional<std::string> string(const json& parent, const std::string& key, const std::string& path,
                                      bool required = true) {
        if (!parent.is_object() || !parent.contains(key)) {
            if (required) fail(path, "required");
            return std::nullopt;
        }
        const json& v = parent.at(key);
        if (!v.is_string()) {
            fail(path, "must be a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    std::optional<std::vector<std::string>> strings(const json& v, const std::string& path) {
        if (!v.is_array()) {
            fail(path, "must be an array of strings");
            return std::nullopt;
        }
        std::vector<std::string> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_string()) {
                fail(path + "[" + std::to_string(i) + "]", "must be a string");
                return std::nullopt;
            }
            out.push_back(v[i].get<std::string>());
        }
        return out;
    }

private:
    std::vector<FieldIssue> issues_;
};

// Structural checks on the assembled scenario, reported under document paths.
template <typename S>
void check_structure(const S& s, const std::string& section, Walker& w) {
    try {
        s.validate();
    } catch (const ValidationError& e) {
        for (const auto& i : e.issues()) {
            const bool top = i.field == "runs" || i.field == "balls" || i.field == "wickets" || i.field == "w_max";
            w.fail((top ? "intervention." : section + ".") + i.field, i.message);
        }
    }
}


std::optional<OutcomeVector> vector_from(const json& j, const std::string& path, Walker& w) {
    if (!j.is_object()) {
        w.fail(path, "must be an object keyed by outcome code");
        return std::nullopt;
    }
    OutcomeVector::Array p{};
    for (Outcome o : kOutcomes) {
        const std::string code(outcome_code(o));
        auto v = w.number(j, code, path + "." + code);
        if (!v) return std::nullopt;
        p[index_of(o)] = *v;
    }
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (Outcome o : kOutcomes) known = known || key == outcome_code(o);
        if (!known) w.fail(path + "." + key, "unknown outcome code");
    }
    try {
        return OutcomeVector::from_probabilities(p, 1e-6);
    } catch (const DomainError& e) {
        w.fail(path, e.what());
        return std::nullopt;
    }
}

std::array<OutcomeVector, kPhaseCount> phase_shapes(const json& j, const std::string& path, Walker& w) {
    std::array<OutcomeVector, kPhaseCount> out;
    if (!j.is_object()) {
        w.fail(path, "must be an object keyed by phase");
        return out;
    }
    for (Phase p : kPhases) {
        const std::string code(phase_code(p));
        if (!j.contains(code)) {
            w.fail(path + "." + code, "required");
            continue;
        }
        if (auto v = vector_from(j.at(code), path + "." + code, w)) out[index_of(p)] = *v;
    }
    return out;
}

std::string sig17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class Resolver {
public:
    Resolver(const ScenarioContext& ctx, const std::optional<PopulationShapes>& shapes, Walker& w,
             std::vector<FitRecord>& log)
        : ctx_(ctx), shapes_(shapes), w_(w), log_(log) {}

    /// Resolves all three phases of one player.
    PhaseProfiles resolve(const std::string& id, Role role, const json& player, const std::string& path) {
        PhaseProfiles out;
        bool from_store = false;
        if (player.contains("source")) {
            auto src = w_.string(player, "source", path + ".source");
            if (src && *src == "store") {
                from_store = true;
            } else if (src && *src != "inline") {
                w_.fail(path + ".source", "must be \"store\" or \"inline\"");
            }
        }
        const json* phases = player.contains("phases") ? w_.object(player, "phases", path + ".phases") : nullptr;
        if (phases) {
            for (const auto& [key, _] : phases->items()) {
                try {
                    (void)parse_phase(key);
                } catch (const DomainError&) {
                    w_.fail(path + ".phases." + key, "unknown phase (expected PP, MI or DE)");
                }
            }
        }
        if (from_store && !ctx_.store) {
            w_.fail(path + ".source", "player '" + id + "' references a profile store but none is loaded");
            return out;
        }
        if (from_store && !ctx_.store->for_role(role).contains(id)) {
            w_.fail(path + ".id", "player '" + id + "' not found in the profile store (" +
                                      std::string(role_name(role)) + " table)");
            return out;
        }
        for (Phase p : kPhases) {
            const std::string code(phase_code(p));
            const std::string ppath = path + ".phases." + code;
            FitRecord rec{id, role, p, "", std::nullopt, std::nullopt, {}, 0.0, 0.0};
            std::optional<OutcomeVector> v;
            if (phases && phases->contains(code)) {
                v = inline_phase(phases->at(code), role, p, ppath, rec);
            } else if (from_store) {
                if (const auto* prof = ctx_.store->for_role(role).find(id, p)) {
                    v = prof->vector;
                    rec.source = "store";
                } else if (const auto& pop = ctx_.store->for_role(role).population(p)) {
                    v = *pop;
                    rec.source = "population";
                }
            } else if (auto pop = population(role, p)) {
                v = *pop;
                rec.source = "population";
            }
            if (!v) {
                if (rec.source.empty()) w_.fail(ppath, "no profile and no population shape for this phase");
                continue;
            }
            out[index_of(p)] = *v;
            rec.fitted = derive_stats(*v);
            if (rec.sr_target) rec.sr_residual = rec.fitted.sr - *rec.sr_target;
            if (rec.p_w_target) rec.p_w_residual = rec.fitted.p_w - *rec.p_w_target;
            log_.push_back(std::move(rec));
        }
        return out;
    }

private:
    std::optional<OutcomeVector> population(Role role, Phase p) const {
        if (shapes_) return shapes_->for_role(role)[index_of(p)];
        if (ctx_.store) return ctx_.store->for_role(role).population(p);
        return std::nullopt;
    }

    std::optional<OutcomeVector> inline_phase(const json& j, Role role, Phase p, const std::string& path,
                                              FitRecord& rec) {
        if (!j.is_object()) {
            w_.fail(path, "must be an object");
            return std::nullopt;
        }
        if (j.contains("vector")) {
            rec.source = "vector";
            return vector_from(j.at("vector"), path + ".vector", w_);
        }
        rec.source = "summary";
        const bool has_sr = j.contains("sr");
        const bool has_er = j.contains("er");
        if (has_sr == has_er) {
            w_.fail(path, "give exactly one of sr or er (or a full vector)");
            return std::nullopt;
        }
        auto rate = w_.number(j, has_sr ? "sr" : "er", path + (has_sr ? ".sr" : ".er"));
        auto p_w = w_.number(j, "p_w", path + ".p_w");
        if (!rate || !p_w) return std::nullopt;
        const double sr = has_sr ? *rate : sr_from_er(*rate);
        rec.sr_target = sr;
        rec.p_w_target = *p_w;
        auto shape = population(role, p);
        if (!shape) {
            w_.fail(path, "summary row needs a population shape for this phase");
            return std::nullopt;
        }
        try {
            return fit_profile_from_summary(sr, *p_w, *shape);
        } catch (const FitError& e) {
            w_.fail(path + "." + (e.bound() == "p_w" ? "p_w" : (has_sr ? "sr" : "er")),
                    std::string(e.what()) + " [bound: " + e.bound() + "]");
            return std::nullopt;
        }
    }

    const ScenarioContext& ctx_;
    const std::optional<PopulationShapes>& shapes_;
    Walker& w_;
    std::vector<FitRecord>& log_;
};

std::optional<PopulationShapes> load_shapes(const json& doc, const ScenarioContext& ctx, Walker& w) {
    if (!doc.contains("population_shapes")) return std::nullopt;
    const json& node = doc.at("population_shapes");
    json body;
    if (node.is_string()) {
        std::filesystem::path p = node.get<std::string>();
        if (p.is_relative()) p = ctx.base_dir / p;
        std::ifstream in(p);
        if (!in) {
            w.fail("population_shapes", "cannot open " + p.string());
            return std::nullopt;
        }
        try {
            body = json::parse(in);
        } catch (const json::exception& e) {
            w.fail("population_shapes", std::string("not valid JSON: ") + e.what());
            return std::nullopt;
        }
    } else {
        body = node;
    }
    try {
        return parse_population_shapes(body);
    } catch (const ValidationError& e) {
        for (const auto& issue : e.issues()) w.fail("population_shapes." + issue.field, issue.message);
        return std::nullopt;
    }
}

std::string hash_profiles(const Scenario& s) {
    std::string text;
    auto add = [&](std::string_view tag, const std::string& id, const PhaseProfiles& prof) {
        text += tag;
        text += '|';
        text += id;
        for (const auto& v : prof)
            for (double x : v.values()) text += '|' + sig17(x);
        text += '\n';
    };
    if (s.batting) {
        add("nonstriker", s.batting->fixed_non_striker.id, s.batting->fixed_non_striker.profiles);
        for (const auto& b : s.batting->pool) add("pool", b.id, b.profiles);
    }
    if (s.bowling) {
        for (const auto& b : s.bowling->bowlers) add("bowler", b.id, b.profiles);
        if (s.bowling->batting_proxy) add("proxy", "", *s.bowling->batting_proxy);
    }
    return sha256_hex(text);
}

void load_batting(const json& doc, Scenario& s, Walker& w, Resolver& r) {
    BattingScenario b;
    if (const json* iv = w.object(doc, "intervention", "intervention")) {
        b.runs = w.integer(*iv, "runs", "intervention.runs").value_or(0);
        b.balls = w.integer(*iv, "balls", "intervention.balls").value_or(0);
        b.wickets = w.integer(*iv, "wickets", "intervention.wickets").value_or(0);
    }
    const json* body = w.object(doc, "batting", "batting");
    if (!body) return;
    if (const json* ns = w.object(*body, "fixed_non_striker", "batting.fixed_non_striker")) {
        if (auto id = w.string(*ns, "id", "batting.fixed_non_striker.id"))
            b.fixed_non_striker = {*id, r.resolve(*id, Role::Batsman, *ns, "batting.fixed_non_striker")};
    }
    if (const json* pool = w.array(*body, "pool", "batting.pool")) {
        if (pool->empty()) w.fail("batting.pool", "must name at least one batsman");
        for (std::size_t i = 0; i < pool->size(); ++i) {
            const std::string path = "batting.pool[" + std::to_string(i) + "]";
            const json& p = (*pool)[i];
            if (!p.is_object()) {
                w.fail(path, "must be an object");
                continue;
            }
            if (auto id = w.string(p, "id", path + ".id")) b.pool.push_back({*id, r.resolve(*id, Role::Batsman, p, path)});
        }
    }
    if (auto striker = w.string(*body, "initial_striker", "batting.initial_striker", false)) {
        if (*striker == "new_batsman") {
            b.initial_striker = InitialStriker::NewBatsman;
        } else if (*striker == "fixed_non_striker") {
            b.initial_striker = InitialStriker::FixedNonStriker;
        } else {
            w.fail("batting.initial_striker", "must be \"new_batsman\" or \"fixed_non_striker\"");
        }
    }
    check_structure(b, "batting", w);
    if (!w.ok()) return;
    if (doc.contains("actual_decision")) {
        const json& ad = doc.at("actual_decision");
        if (!ad.is_object() || !ad.contains("order")) {
            w.fail("actual_decision.order", "required for a batting scenario's actual decision");
        } else if (auto ids = w.strings(ad.at("order"), "actual_decision.order")) {
            try {
                s.actual_order = order_from_ids(*ids, b);
            } catch (const ValidationError& e) {
                for (const auto& issue : e.issues()) w.fail("actual_decision.order" + issue.field, issue.message);
            }
        }
    }
    s.batting = std::move(b);
}

void load_bowling(const json& doc, Scenario& s, Walker& w, Resolver& r) {
    BowlingScenario b;
    if (const json* iv = w.object(doc, "intervention", "intervention")) {
        b.runs = w.integer(*iv, "runs", "intervention.runs").value_or(0);
        b.balls = w.integer(*iv, "balls", "intervention.balls").value_or(0);
        b.w_max = w.integer(*iv, "w_max", "intervention.w_max").value_or(0);
    }
    const json* body = w.object(doc, "bowling", "bowling");
    if (!body) return;
    if (body->contains("slots")) {
        const json& slots = body->at("slots");
        if (!slots.is_array()) {
            w.fail("bowling.slots", "must be an array of over indices");
        } else {
            for (std::size_t i = 0; i < slots.size(); ++i) {
                if (!slots[i].is_number_integer()) {
                    w.fail("bowling.slots[" + std::to_string(i) + "]", "must be an integer");
                    continue;
                }
                b.slots.push_back(slots[i].get<int>());
            }
        }
    } else if (b.balls > 0 && b.balls <= kInningsBalls) {
        for (int o = (kInningsBalls - b.balls) / kBallsPerOver; o < kOversPerInnings; ++o) b.slots.push_back(o);
    }
    if (const json* bowlers = w.array(*body, "bowlers", "bowling.bowlers")) {
        if (bowlers->empty()) w.fail("bowling.bowlers", "must name at least one bowler");
        for (std::size_t i = 0; i < bowlers->size(); ++i) {
            const std::string path = "bowling.bowlers[" + std::to_string(i) + "]";
            const json& p = (*bowlers)[i];
            if (!p.is_object()) {
                w.fail(path, "must be an object");
                continue;
            }
            auto id = w.string(p, "id", path + ".id");
            auto quota = w.integer(p, "quota", path + ".quota");
            if (id && quota) b.bowlers.push_back({*id, *quota, r.resolve(*id, Role::Bowler, p, path)});
        }
    }
    b.prev_bowler = w.string(*body, "prev_bowler", "bowling.prev_bowler", false);
    if (body->contains("batting_proxy")) {
        const json& proxy = body->at("batting_proxy");
        if (!proxy.is_object()) {
            w.fail("bowling.batting_proxy", "must be an object");
        } else {
            b.batting_proxy = r.resolve("batting_proxy", Role::Batsman, proxy, "bowling.batting_proxy");
        }
    }
    check_structure(b, "bowling", w);
    if (!w.ok()) return;
    b.validate();  // quota shortfall surfaces as InfeasibleError
    if (doc.contains("actual_decision")) {
        const json& ad = doc.at("actual_decision");
        if (!ad.is_object() || !ad.contains("plan")) {
            w.fail("actual_decision.plan", "required for a bowling scenario's actual decision");
        } else if (auto ids = w.strings(ad.at("plan"), "actual_decision.plan")) {
            try {
                s.actual_plan = plan_from_ids(*ids, b);
            } catch (const ValidationError& e) {
                for (const auto& issue : e.issues()) w.fail("actual_decision.plan" + issue.field, issue.message);
            }
        }
    }
    s.bowling = std::move(b);
}

}  // namespace

std::string_view scenario_kind_name(ScenarioKind k) noexcept {
    return k == ScenarioKind::Batting ? "batting" : "bowling";
}

PopulationShapes parse_population_shapes(const json& j) {
    Walker w;
    PopulationShapes out;
    if (!j.is_object()) {
        w.fail("", "must be an object with batsman and bowler entries");
        w.raise_if_any();
    }
    for (Role role : {Role::Batsman, Role::Bowler}) {
        const std::string key(role_name(role));
        if (!j.contains(key)) {
            w.fail(key, "required");
            continue;
        }
        (role == Role::Batsman ? out.batsman : out.bowler) = phase_shapes(j.at(key), key, w);
    }
    w.raise_if_any();
    return out;
}

const BattingScenario& Scenario::bat() const {
    if (!batting) throw ContractViolation("scenario '" + name + "' is not a batting scenario");
    return *batting;
}

const BowlingScenario& Scenario::bowl() const {
    if (!bowling) throw ContractViolation("scenario '" + name + "' is not a bowling scenario");
    return *bowling;
}

Scenario load_scenario(const json& doc, const ScenarioContext& ctx) {
    Walker w;
    if (!doc.is_object()) {
        w.fail("", "scenario must be a JSON object");
        w.raise_if_any();
    }
    Scenario s;
    s.name = w.string(doc, "name", "name", false).value_or("");
    auto kind = w.string(doc, "kind", "kind");
    if (kind && *kind != "batting" && *kind != "bowling") w.fail("kind", "must be \"batting\" or \"bowling\"");
    w.raise_if_any();
    s.kind = *kind == "batting" ? ScenarioKind::Batting : ScenarioKind::Bowling;

    const auto shapes = load_shapes(doc, ctx, w);
    Resolver resolver(ctx, shapes, w, s.fit_log);
    if (s.kind == ScenarioKind::Batting) {
        load_batting(doc, s, w, resolver);
    } else {
        load_bowling(doc, s, w, resolver);
    }
    w.raise_if_any();
    s.profile_hash = hash_profiles(s);
    if (ctx.store) {
        bool uses_store = false;
        for (const auto& rec : s.fit_log) uses_store = uses_store || rec.source == "store";
        if (uses_store) s.corpus_hash = ctx.store->corpus_hash;
    }
    return s;
}

Scenario load_scenario_file(const std::filesystem::path& path, const ProfileStore* store) {
    std::ifstream in(path);
    if (!in) throw ValidationError("scenario", "cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("scenario", std::string("not valid JSON: ") + e.what());
    }
    ScenarioContext ctx{store, path.parent_path()};
    return load_scenario(doc, ctx);
}

BattingOrder order_from_ids(const std::vector<std::string>& ids, const BattingScenario& scenario) {
    std::vector<FieldIssue> issues;
    BattingOrder order;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const std::string field = "[" + std::to_string(i) + "]";
        int found = -1;
        for (std::size_t k = 0; k < scenario.pool.size(); ++k)
            if (scenario.pool[k].id == ids[i]) found = static_cast<int>(k);
        if (found < 0) {
            issues.push_back({field, "'" + ids[i] + "' is not in the batting pool"});
        } else if (!seen.insert(ids[i]).second) {
            issues.push_back({field, "'" + ids[i] + "' appears more than once"});
        }
        order.push_back(found);
    }
    if (issues.empty() && ids.size() != scenario.pool.size())
        issues.push_back({"", "order must list all " + std::to_string(scenario.pool.size()) + " pool batsmen"});
    if (!issues.empty()) throw ValidationError(std::move(issues));
    return order;
}

std::vector<std::string> order_ids(std::span<const int> order, const BattingScenario& scenario) {
    std::vector<std::string> out;
    out.reserve(order.size());
    for (int i : order) out.push_back(scenario.pool.at(static_cast<std::size_t>(i)).id);
    return out;
}

json fit_log_json(const std::vector<FitRecord>& log) {
    json out = json::array();
    for (const auto& r : log) {
        json row{{"player", r.player},
                 {"role", role_name(r.role)},
                 {"phase", phase_code(r.phase)},
                 {"source", r.source},
                 {"sr", r.fitted.sr},
                 {"er", r.fitted.er},
                 {"p_w", r.fitted.p_w},
                 {"p_dot", r.fitted.p_dot}};
        if (r.sr_target) {
            row["sr_target"] = *r.sr_target;
            row["sr_residual"] = r.sr_residual;
        }
        if (r.p_w_target) {
            row["p_w_target"] = *r.p_w_target;
            row["p_w_residual"] = r.p_w_residual;
        }
        out.push_back(std::move(row));
    }
    return out;
}

void write_fitted_profiles(const Scenario& scenario, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::map<PlayerPhaseKey, PlayerPhaseProfile> bat, bowl;
    auto add = [](auto& table, const std::string& id, const PhaseProfiles& prof, const std::vector<FitRecord>& log,
                  Role role) {
        for (Phase p : kPhases) {
            double lambda = 1.0;
            for (const auto& r : log)
                if (r.player == id && r.role == role && r.phase == p && r.source == "population") lambda = 0.0;
            table.emplace(PlayerPhaseKey{id, p}, make_profile(id, p, 0, lambda, prof[index_of(p)]));
        }
    };
    if (scenario.batting) {
        add(bat, scenario.batting->fixed_non_striker.id, scenario.batting->fixed_non_striker.profiles,
            scenario.fit_log, Role::Batsman);
        for (const auto& b : scenario.batting->pool) add(bat, b.id, b.profiles, scenario.fit_log, Role::Batsman);
    }
    if (scenario.bowling)
        for (const auto& b : scenario.bowling->bowlers) add(bowl, b.id, b.profiles, scenario.fit_log, Role::Bowler);
    if (!bat.empty()) {
        std::ofstream out(out_dir / kBattingTable, std::ios::binary);
        write_profile_table(out, ProfileSet(Role::Batsman, kDefaultMinDeliveries, std::move(bat), {}));
    }
    if (!bowl.empty()) {
        std::ofstream out(out_dir / kBowlingTable, std::ios::binary);
        write_profile_table(out, ProfileSet(Role::Bowler, kDefaultMinDeliveries, std::move(bowl), {}));
    }
    std::ofstream log(out_dir / "fit_log.json", std::ios::binary);
    log << json{{"scenario", scenario.name}, {"profile_hash", scenario.profile_hash},
                {"fits", fit_log_json(scenario.fit_log)}}
               .dump(2)
        << '\n';
}

}  // namespace t20
